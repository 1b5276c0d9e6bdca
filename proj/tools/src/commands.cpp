#include "chainzono_app/commands.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "chainzono_app/config_io.hpp"

namespace chainzono::app {

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError((dir / name).string() + ": cannot open for writing");
  return out;
}

Json window_json(const std::optional<SectorWindow>& w) {
  if (!w) return nullptr;
  Json j;
  j["q_lo"] = w->q_lo;
  j["q_hi"] = w->q_hi;
  j["M"] = w->M;
  j["wrap"] = w->wrap;
  j["count"] = w->count();
  return j;
}

void configure_logging() {
  if (const char* level = std::getenv("CHAINZONO_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::set_level(spdlog::level::warn);
  }
}

}  // namespace

SimConfig demo_config() {
  SimConfig c;
  c.steps = 10;
  c.period = 0.5;
  c.sectors = 32;
  c.seed = 7;
  c.runs = 1;
  c.burn_in = 2;
  c.process_noise = 0.1;
  c.range_noise = {-0.1, 0.1};
  c.initial_halfwidth = 2.0;
  InputStep accel{4, Eigen::VectorXd::Constant(1, 0.2)};
  c.agents.push_back({AgentRole::anchor, {0.0, 0.0}, {1.0, 0.0}, 0.1, {accel}});
  c.agents.push_back({AgentRole::ordinary, {6.0, 8.0}, {1.0, 0.0}, 1.0, {accel}});
  return c;
}

SimConfig resolve_config(const Command& cmd) {
  SimConfig c = cmd.config.empty() ? demo_config() : load_config(cmd.config);
  if (cmd.seed) c.seed = *cmd.seed;
  if (cmd.sectors) c.sectors = *cmd.sectors;
  if (cmd.steps) c.steps = *cmd.steps;
  if (cmd.runs) c.runs = *cmd.runs;
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Json record_to_json(const AgentStepRecord& rec, AgentRole role) {
  Json j;
  j["k"] = rec.k;
  j["agent"] = rec.agent;
  j["role"] = role_name(role);
  j["truth"] = vector_to_json(rec.truth);
  j["y_abs"] = vector_to_json(rec.y_abs);
  j["y_rel"] = rec.y_rel ? Json(*rec.y_rel) : Json(nullptr);
  j["prior_hull"] = to_json(rec.prior_hull);
  j["posterior_hull"] = to_json(rec.posterior_hull);
  j["baseline_hull"] = to_json(rec.baseline_hull);
  j["posterior_set"] = rec.posterior ? to_json(*rec.posterior) : Json(nullptr);
  Json flags;
  flags["contained"] = rec.contained;
  flags["baseline_contained"] = rec.baseline_contained;
  flags["noise_admissible"] = rec.noise_admissible;
  flags["fallback"] = rec.flags.fallback;
  flags["wedge_unavailable"] = rec.flags.wedge_unavailable;
  flags["no_active_sector"] = rec.flags.no_active_sector;
  flags["empty_intersection"] = rec.flags.empty_intersection;
  flags["assumption_prior_small"] = rec.flags.assumption_prior_small;
  flags["assumption_neighbor_small"] = rec.flags.assumption_neighbor_small;
  flags["contiguous"] = rec.flags.contiguous;
  j["flags"] = std::move(flags);
  j["window"] = window_json(rec.flags.window);
  j["neighbor_radius"] = rec.flags.neighbor_radius;
  j["size_proposed"] = rec.size_proposed;
  j["size_baseline"] = rec.size_baseline;
  return j;
}

Json run_summary_json(const RunLog& log) {
  int contained = 0, fallback = 0, violations = 0;
  Json breaches = Json::array();
  for (const AgentStepRecord& rec : log.records) {
    if (rec.contained) {
      ++contained;
    } else {
      breaches.push_back({{"k", rec.k}, {"agent", rec.agent}});
    }
    if (rec.flags.fallback) ++fallback;
    if (!rec.noise_admissible) ++violations;
  }
  const int expected = log.agents * log.steps;
  Json j;
  j["seed"] = log.seed;
  j["agents"] = log.agents;
  j["steps"] = log.steps;
  j["records"] = log.records.size();
  j["contained"] = contained;
  j["containment_rate"] = expected > 0 ? static_cast<double>(contained) / expected : 0.0;
  j["aborted"] = log.aborted;
  j["abort_reason"] = log.abort_reason;
  j["fallback_steps"] = fallback;
  j["noise_violations"] = violations;
  j["breaches"] = std::move(breaches);
  return j;
}

Json mc_summary_json(const McSummary& s) {
  Json j;
  j["runs"] = s.runs;
  j["seed"] = s.seed;
  j["steps"] = s.steps;
  j["aborted_runs"] = s.aborted_runs;
  j["fallback_steps"] = s.fallback_steps;
  j["noise_violations"] = s.noise_violations;
  Json agents = Json::array();
  for (const AgentSummary& a : s.agents) {
    double pro = 0.0, base = 0.0;
    for (double v : a.run_size_proposed) pro += v;
    for (double v : a.run_size_baseline) base += v;
    const double n = a.run_size_proposed.empty() ? 1.0 : a.run_size_proposed.size();
    Json aj;
    aj["agent"] = a.agent;
    aj["role"] = role_name(a.role);
    aj["containment_rate"] = a.containment_rate;
    aj["baseline_containment_rate"] = a.baseline_containment_rate;
    aj["mean_ratio"] = a.mean_ratio ? Json(*a.mean_ratio) : Json(nullptr);
    aj["ratio_samples"] = a.ratio_samples;
    aj["mean_size_proposed"] = pro / n;
    aj["mean_size_baseline"] = base / n;
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j;
}

int cmd_simulate(const Command& cmd) {
  const SimConfig config = resolve_config(cmd);
  const RunLog log = run_episode(config, config.seed);

  std::ofstream records = open_output(cmd.out, "records.jsonl");
  for (const AgentStepRecord& rec : log.records) {
    records << record_to_json(rec, config.agents[static_cast<std::size_t>(rec.agent)].role).dump()
            << '\n';
  }
  const Json summary = run_summary_json(log);
  open_output(cmd.out, "summary.json") << summary.dump(2) << '\n';

  const bool ok = !log.aborted && summary["breaches"].empty() &&
                  log.records.size() == config.agents.size() * static_cast<std::size_t>(config.steps);
  if (!ok) {
    spdlog::error("simulate: {} breaches{}", summary["breaches"].size(),
                  log.aborted ? ", aborted at " + log.abort_reason : std::string());
  }
  std::cout << fmt::format("{} records, containment {:.4f}{}\n", log.records.size(),
                           summary["containment_rate"].get<double>(),
                           log.aborted ? " (aborted)" : "");
  return ok ? kExitOk : kExitBreach;
}

int cmd_montecarlo(const Command& cmd) {
  const SimConfig config = resolve_config(cmd);
  const McSummary summary = run_monte_carlo(config, cmd.threads);

  std::ofstream csv = open_output(cmd.out, "ratios.csv");
  csv << "agent,mean_ratio,containment_rate,runs\n";
  bool ok = summary.aborted_runs == 0;
  for (const AgentSummary& a : summary.agents) {
    ok = ok && a.containment_rate == 1.0;
    if (a.role == AgentRole::anchor) continue;
    csv << fmt::format("{},{:.6f},{:.6f},{}\n", a.agent, a.mean_ratio.value_or(0.0),
                       a.containment_rate, summary.runs);
  }
  open_output(cmd.out, "summary.json") << mc_summary_json(summary).dump(2) << '\n';

  for (const AgentSummary& a : summary.agents) {
    std::cout << fmt::format("agent {} ({}): containment {:.4f}", a.agent, role_name(a.role),
                             a.containment_rate);
    if (a.mean_ratio) std::cout << fmt::format(", mean ratio {:.4f}", *a.mean_ratio);
    std::cout << '\n';
  }
  if (!ok) spdlog::error("montecarlo: containment below 1 or aborted runs ({})", summary.aborted_runs);
  return ok ? kExitOk : kExitBreach;
}

int cmd_validate_config(const Command& cmd) {
  const SimConfig config = resolve_config(cmd);
  std::cout << fmt::format("ok: {} agents, {} steps, {} sectors, {} runs, seed {}\n",
                           config.agents.size(), config.steps, config.sectors, config.runs,
                           config.seed);
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  configure_logging();
  CLI::App app{"Guaranteed set-membership localization for an anchored agent chain"};
  app.require_subcommand(1);

  Command cmd;
  std::string config, out = "out";
  std::uint64_t seed = 0;
  int sectors = 0, steps = 0, runs = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "Config file (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Override the RNG seed");
    sub->add_option("--sectors", sectors, "Override the sector count M")->check(CLI::PositiveNumber);
    sub->add_option("--steps", steps, "Override the step count K")->check(CLI::PositiveNumber);
    sub->add_option("--runs", runs, "Override the Monte Carlo run count")->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "Run one episode and write per-step records");
  add_common(simulate, true);
  auto* montecarlo = app.add_subcommand("montecarlo", "Run a Monte Carlo campaign and write the ratio table");
  add_common(montecarlo, true);
  montecarlo->add_option("--threads", cmd.threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* demo = app.add_subcommand("demo", "Run the built-in demo preset");
  add_common(demo, false);
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config file");
  add_common(validate_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cmd.config = config;
  cmd.out = out;
  auto* chosen = app.get_subcommands().front();
  if (chosen->count("--seed")) cmd.seed = seed;
  if (chosen->count("--sectors")) cmd.sectors = sectors;
  if (chosen->count("--steps")) cmd.steps = steps;
  if (chosen->count("--runs")) cmd.runs = runs;

  try {
    if (chosen == simulate) return cmd_simulate(cmd);
    if (chosen == montecarlo) return cmd_montecarlo(cmd);
    if (chosen == demo) return cmd_simulate(cmd);
    return cmd_validate_config(cmd);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBreach;
  }
}

}  // namespace chainzono::app
