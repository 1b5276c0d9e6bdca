#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <chainzono/serialization.hpp>
#include <chainzono/sim.hpp>

namespace chainzono::app {

enum class Subcommand { simulate, montecarlo, demo, validate_config };

struct Command {
  Subcommand kind = Subcommand::simulate;
  std::filesystem::path config;  ///< empty selects the built-in demo preset
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> sectors;
  std::optional<int> steps;
  std::optional<int> runs;
  int threads = 1;
};

enum ExitStatus : int { kExitOk = 0, kExitBreach = 1, kExitUsage = 2 };

SimConfig demo_config();

/// Loads the command's config (or the demo preset) and applies overrides.
SimConfig resolve_config(const Command& cmd);

Json record_to_json(const AgentStepRecord& rec, AgentRole role);
Json run_summary_json(const RunLog& log);
Json mc_summary_json(const McSummary& summary);

/// Writes records.jsonl and summary.json for one episode seeded with the
/// config seed. Returns kExitOk iff every posterior contains the truth and no
/// step aborted.
int cmd_simulate(const Command& cmd);

/// Writes ratios.csv and summary.json. Returns kExitOk iff every agent's
/// containment rate is 1.
int cmd_montecarlo(const Command& cmd);

int cmd_validate_config(const Command& cmd);

/// Full command-line entry point; never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace chainzono::app
