#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <chainzono/serialization.hpp>
#include <chainzono/sim.hpp>

namespace chainzono::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and validates a config document. Unknown keys are rejected;
/// errors name the offending field.
SimConfig config_from_json(const Json& j);
Json config_to_json(const SimConfig& config);

SimConfig parse_config(const std::string& text, const std::string& origin = "<string>");
SimConfig load_config(const std::filesystem::path& path);
void save_config(const SimConfig& config, const std::filesystem::path& path);

const char* role_name(AgentRole role);

}  // namespace chainzono::app
