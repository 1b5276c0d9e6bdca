#include "chainzono_app/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <chainzono/error.hpp>

namespace chainzono::app {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config." + field + ": " + what);
}

void reject_unknown(const Json& j, const std::string& where,
                    std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

const Json& require_field(const Json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where.empty() ? key : where + "." + key, "missing required field");
  return j.at(key);
}

std::string path_of(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

double get_number(const Json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

int get_int(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<int>();
}

Eigen::VectorXd get_vector(const Json& v, const std::string& field, Eigen::Index size) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
    fail(field, "expected an array of " + std::to_string(size) + " numbers");
  }
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    out[i] = get_number(v[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

AgentRole get_role(const Json& v, const std::string& field) {
  if (v == "anchor") return AgentRole::anchor;
  if (v == "ordinary") return AgentRole::ordinary;
  fail(field, "expected \"anchor\" or \"ordinary\"");
}

AgentSpec agent_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  reject_unknown(j, where, {"role", "position", "velocity", "abs_noise", "inputs"});
  AgentSpec a;
  a.role = get_role(require_field(j, where, "role"), path_of(where, "role"));
  a.position = get_vector(require_field(j, where, "position"), path_of(where, "position"), 2);
  a.velocity = get_vector(require_field(j, where, "velocity"), path_of(where, "velocity"), 2);
  a.abs_noise = get_number(require_field(j, where, "abs_noise"), path_of(where, "abs_noise"));
  if (j.contains("inputs")) {
    const Json& inputs = j.at("inputs");
    if (!inputs.is_array()) fail(path_of(where, "inputs"), "expected an array");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const std::string at = path_of(where, "inputs") + "[" + std::to_string(i) + "]";
      const Json& in = inputs[i];
      if (!in.is_object()) fail(at, "expected an object");
      reject_unknown(in, at, {"from_step", "u"});
      InputStep step;
      step.from_step = get_int(require_field(in, at, "from_step"), path_of(at, "from_step"));
      step.u = get_vector(require_field(in, at, "u"), path_of(at, "u"), 1);
      a.inputs.push_back(std::move(step));
    }
  }
  return a;
}

}  // namespace

const char* role_name(AgentRole role) {
  return role == AgentRole::anchor ? "anchor" : "ordinary";
}

SimConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a top-level object");
  reject_unknown(j, "",
                 {"steps", "period", "sectors", "seed", "runs", "burn_in", "process_noise",
                  "range_noise", "initial_halfwidth", "sampler_noise_scale", "agents"});
  SimConfig c;
  c.steps = get_int(require_field(j, "", "steps"), "steps");
  c.period = get_number(require_field(j, "", "period"), "period");
  c.process_noise = get_number(require_field(j, "", "process_noise"), "process_noise");
  const Eigen::VectorXd r = get_vector(require_field(j, "", "range_noise"), "range_noise", 2);
  c.range_noise = {r[0], r[1]};
  c.initial_halfwidth = get_number(require_field(j, "", "initial_halfwidth"), "initial_halfwidth");
  if (j.contains("sectors")) c.sectors = get_int(j.at("sectors"), "sectors");
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned()) fail("seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("runs")) c.runs = get_int(j.at("runs"), "runs");
  if (j.contains("burn_in")) c.burn_in = get_int(j.at("burn_in"), "burn_in");
  if (j.contains("sampler_noise_scale")) {
    c.sampler_noise_scale = get_number(j.at("sampler_noise_scale"), "sampler_noise_scale");
  }
  const Json& agents = require_field(j, "", "agents");
  if (!agents.is_array()) fail("agents", "expected an array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    c.agents.push_back(agent_from_json(agents[i], "agents[" + std::to_string(i) + "]"));
  }
  try {
    validate(c);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Json config_to_json(const SimConfig& c) {
  Json j;
  j["steps"] = c.steps;
  j["period"] = c.period;
  j["sectors"] = c.sectors;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["burn_in"] = c.burn_in;
  j["process_noise"] = c.process_noise;
  j["range_noise"] = Json::array({c.range_noise.lo, c.range_noise.hi});
  j["initial_halfwidth"] = c.initial_halfwidth;
  j["sampler_noise_scale"] = c.sampler_noise_scale;
  Json agents = Json::array();
  for (const AgentSpec& a : c.agents) {
    Json aj;
    aj["role"] = role_name(a.role);
    aj["position"] = vector_to_json(a.position);
    aj["velocity"] = vector_to_json(a.velocity);
    aj["abs_noise"] = a.abs_noise;
    Json inputs = Json::array();
    for (const InputStep& in : a.inputs) {
      Json ij;
      ij["from_step"] = in.from_step;
      ij["u"] = vector_to_json(in.u);
      inputs.push_back(std::move(ij));
    }
    aj["inputs"] = std::move(inputs);
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j;
}

SimConfig parse_config(const std::string& text, const std::string& origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return config_from_json(j);
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

void save_config(const SimConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string() + ": cannot write config");
  out << config_to_json(config).dump(2) << '\n';
}

}  // namespace chainzono::app
