#include "chainzono/sim.hpp"

#include <spdlog/spdlog.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "chainzono/error.hpp"

namespace chainzono {

namespace {

constexpr Eigen::Index kStateDim = 4;
constexpr Eigen::Index kInputDim = 1;

void require(bool condition, const std::string& field, const std::string& what) {
  if (!condition) throw InvalidArgument("config." + field + ": " + what);
}

Zonotope noise_box(double half_width, Eigen::Index dim) {
  return Zonotope::from_generators(half_width * Eigen::MatrixXd::Identity(dim, dim),
                                   Eigen::VectorXd::Zero(dim));
}

Eigen::VectorXd scaled_draw(const Zonotope& Z, Rng& rng, double scale) {
  return Z.c() + scale * (sample_unconstrained(Z, rng) - Z.c());
}

}  // namespace

void validate(const SimConfig& config) {
  require(config.steps >= 1, "steps", "must be >= 1");
  require(config.period > 0.0 && std::isfinite(config.period), "period", "must be positive");
  require(config.sectors >= kMinSectorCount, "sectors", "must be >= 8");
  require(config.runs >= 1, "runs", "must be >= 1");
  require(config.burn_in >= 0, "burn_in", "must be >= 0");
  require(config.process_noise >= 0.0, "process_noise", "must be >= 0");
  require(config.range_noise.lo <= config.range_noise.hi, "range_noise", "lo must not exceed hi");
  require(config.initial_halfwidth >= 0.0, "initial_halfwidth", "must be >= 0");
  require(config.sampler_noise_scale >= 0.0, "sampler_noise_scale", "must be >= 0");
  require(!config.agents.empty(), "agents", "need at least one agent");
  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    const auto& a = config.agents[i];
    const std::string field = "agents[" + std::to_string(i) + "]";
    require((i == 0) == (a.role == AgentRole::anchor), field + ".role",
            "agent 0 must be the anchor and all others ordinary");
    require(a.abs_noise >= 0.0, field + ".abs_noise", "must be >= 0");
    for (const auto& in : a.inputs) {
      require(in.from_step >= 0, field + ".inputs.from_step", "must be >= 0");
      require(in.u.size() == kInputDim, field + ".inputs.u", "must have one component");
    }
  }
}

std::vector<AgentModel> build_models(const SimConfig& config) {
  const double T = config.period;
  Eigen::Matrix2d dyn;
  dyn << 1.0, T, 0.0, 1.0;
  Eigen::MatrixXd A = Eigen::kroneckerProduct(dyn, Eigen::Matrix2d::Identity()).eval();
  Eigen::MatrixXd B(kStateDim, kInputDim);
  B << T * T / 2.0, T * T / 2.0, T, T;

  std::vector<AgentModel> models;
  models.reserve(config.agents.size());
  for (const auto& spec : config.agents) {
    AgentModel m{A,
                 B,
                 Eigen::MatrixXd::Identity(kStateDim, kStateDim),
                 noise_box(config.process_noise, kStateDim),
                 noise_box(spec.abs_noise, kStateDim),
                 config.range_noise,
                 spec.role,
                 position_selector(kStateDim)};
    validate(m);
    models.push_back(std::move(m));
  }
  return models;
}

Eigen::VectorXd input_at(const AgentSpec& spec, int k, Eigen::Index input_dim) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(input_dim);
  int best = -1;
  for (const auto& in : spec.inputs) {
    if (in.from_step <= k && in.from_step >= best) {
      best = in.from_step;
      u = in.u;
    }
  }
  return u;
}

Eigen::VectorXd sample_unconstrained(const Zonotope& Z, Rng& rng) {
  if (Z.num_constraints() != 0) throw InvalidArgument("sample_unconstrained: set has constraints");
  Eigen::VectorXd xi(Z.num_generators());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = rng.uniform(Z.xi_lo()[j], Z.xi_hi()[j]);
  return Z.G() * xi + Z.c();
}

Eigen::VectorXd propagate_truth(const Eigen::VectorXd& x, const AgentModel& model,
                                const Eigen::VectorXd& u, Rng& rng, double noise_scale,
                                Eigen::VectorXd* drawn_noise) {
  Eigen::VectorXd w = scaled_draw(model.W, rng, noise_scale);
  Eigen::VectorXd next = model.A * x + model.B * u + w;
  if (drawn_noise) *drawn_noise = std::move(w);
  return next;
}

Eigen::VectorXd gen_abs_measurement(const Eigen::VectorXd& x, const AgentModel& model, Rng& rng,
                                    double noise_scale, Eigen::VectorXd* drawn_noise) {
  Eigen::VectorXd v = scaled_draw(model.V, rng, noise_scale);
  Eigen::VectorXd y = model.C * x + v;
  if (drawn_noise) *drawn_noise = std::move(v);
  return y;
}

double gen_rel_measurement(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j,
                           const AgentModel& model, Rng& rng, double noise_scale,
                           double* drawn_noise) {
  const double r =
      noise_scale * rng.uniform(model.range_noise.lo, model.range_noise.hi);
  if (drawn_noise) *drawn_noise = r;
  return (model.range_selector * (x_i - x_j)).norm() + r;
}

double planar_size(const IntervalHull& hull, const Eigen::MatrixXd& selector) {
  const IntervalHull plane = interval_hull(linear_map(selector, Zonotope::from_hull(hull)));
  return plane.half_widths().maxCoeff();
}

RunLog run_episode(const SimConfig& config, std::uint64_t seed) {
  validate(config);
  const std::vector<AgentModel> models = build_models(config);
  const std::size_t n_agents = models.size();
  const double scale = config.sampler_noise_scale;
  Rng rng(seed);

  RunLog log;
  log.seed = seed;
  log.agents = static_cast<int>(n_agents);
  log.steps = config.steps;
  log.records.reserve(n_agents * static_cast<std::size_t>(config.steps));

  std::vector<Eigen::VectorXd> truth(n_agents);
  std::vector<Zonotope> initial;
  initial.reserve(n_agents);
  const double h = config.initial_halfwidth;
  for (std::size_t i = 0; i < n_agents; ++i) {
    truth[i].resize(kStateDim);
    truth[i] << config.agents[i].position, config.agents[i].velocity;
    Eigen::VectorXd offset(kStateDim);
    for (Eigen::Index d = 0; d < kStateDim; ++d) offset[d] = rng.uniform(-0.5 * h, 0.5 * h);
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(kStateDim, h);
    initial.push_back(Zonotope::from_hull({truth[i] + offset - half, truth[i] + offset + half}));
  }

  ChainState proposed = make_chain_state(initial);
  ChainState baseline = make_chain_state(initial);
  const FilterOptions proposed_options{config.sectors, true};
  const FilterOptions baseline_options{config.sectors, false};

  for (int k = 0; k < config.steps; ++k) {
    std::vector<Eigen::VectorXd> inputs(n_agents);
    std::vector<bool> noise_ok(n_agents, true);
    for (std::size_t i = 0; i < n_agents; ++i) {
      inputs[i] = k > 0 ? input_at(config.agents[i], k - 1, kInputDim)
                        : Eigen::VectorXd::Zero(kInputDim);
      if (k > 0) {
        Eigen::VectorXd w;
        truth[i] = propagate_truth(truth[i], models[i], inputs[i], rng, scale, &w);
        noise_ok[i] = noise_ok[i] && contains_point(models[i].W, w);
      }
    }

    StepMeasurements meas;
    meas.absolute.resize(n_agents);
    meas.relative.assign(n_agents, 0.0);
    for (std::size_t i = 0; i < n_agents; ++i) {
      Eigen::VectorXd v;
      meas.absolute[i] = gen_abs_measurement(truth[i], models[i], rng, scale, &v);
      noise_ok[i] = noise_ok[i] && contains_point(models[i].V, v);
    }
    for (std::size_t i = 1; i < n_agents; ++i) {
      double r = 0.0;
      meas.relative[i] = gen_rel_measurement(truth[i], truth[i - 1], models[i], rng, scale, &r);
      noise_ok[i] = noise_ok[i] && r >= models[i].range_noise.lo && r <= models[i].range_noise.hi;
    }

    try {
      proposed = step_chain(proposed, meas, models, inputs, proposed_options);
      baseline = step_chain(baseline, meas, models, inputs, baseline_options);
    } catch (const std::exception& e) {
      log.aborted = true;
      log.abort_reason = "step " + std::to_string(k) + ": " + e.what();
      spdlog::warn("episode seed {} aborted at {}", seed, log.abort_reason);
      break;
    }

    for (std::size_t i = 0; i < n_agents; ++i) {
      const AgentEstimate& est = proposed.agents[i];
      const AgentEstimate& base = baseline.agents[i];
      AgentStepRecord rec;
      rec.k = k;
      rec.agent = static_cast<int>(i);
      rec.truth = truth[i];
      rec.y_abs = meas.absolute[i];
      if (i > 0) rec.y_rel = meas.relative[i];
      rec.prior_hull = interval_hull(est.prior);
      rec.posterior_hull = est.hull;
      rec.baseline_hull = base.hull;
      rec.posterior = est.posterior;
      rec.flags = est.flags;
      rec.contained = contains_point(est.posterior, truth[i]);
      rec.baseline_contained = contains_point(base.posterior, truth[i]);
      rec.noise_admissible = noise_ok[i];
      rec.size_proposed = planar_size(est.hull, models[i].range_selector);
      rec.size_baseline = planar_size(base.hull, models[i].range_selector);
      log.records.push_back(std::move(rec));
    }
  }
  return log;
}

std::vector<RunLog> run_episodes(const SimConfig& config, int threads) {
  validate(config);
  const auto runs = static_cast<std::size_t>(config.runs);
  std::vector<RunLog> logs(runs);
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, config.runs));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      logs[i] = run_episode(config, episode_seed(config.seed, i));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  return logs;
}

McSummary summarize(const SimConfig& config, const std::vector<RunLog>& logs) {
  McSummary summary;
  summary.runs = static_cast<int>(logs.size());
  summary.seed = config.seed;
  summary.steps = config.steps;
  const std::size_t n_agents = config.agents.size();

  struct Tally {
    std::size_t records = 0, contained = 0, baseline_contained = 0, ratio_n = 0;
    double ratio_sum = 0.0;
  };
  std::vector<Tally> tally(n_agents);
  summary.agents.resize(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) {
    summary.agents[i].agent = static_cast<int>(i);
    summary.agents[i].role = config.agents[i].role;
  }

  for (const RunLog& log : logs) {
    if (log.aborted) ++summary.aborted_runs;
    std::vector<double> pro(n_agents, 0.0), base(n_agents, 0.0);
    std::vector<int> count(n_agents, 0);
    for (const AgentStepRecord& rec : log.records) {
      const auto i = static_cast<std::size_t>(rec.agent);
      Tally& t = tally[i];
      ++t.records;
      t.contained += rec.contained ? 1 : 0;
      t.baseline_contained += rec.baseline_contained ? 1 : 0;
      if (rec.flags.fallback) ++summary.fallback_steps;
      if (!rec.noise_admissible) ++summary.noise_violations;
      pro[i] += rec.size_proposed;
      base[i] += rec.size_baseline;
      ++count[i];
      if (i > 0 && rec.k >= config.burn_in && rec.size_baseline > 0.0) {
        t.ratio_sum += rec.size_proposed / rec.size_baseline;
        ++t.ratio_n;
      }
    }
    for (std::size_t i = 0; i < n_agents; ++i) {
      const double n = std::max(count[i], 1);
      summary.agents[i].run_size_proposed.push_back(pro[i] / n);
      summary.agents[i].run_size_baseline.push_back(base[i] / n);
    }
  }

  for (std::size_t i = 0; i < n_agents; ++i) {
    const Tally& t = tally[i];
    AgentSummary& a = summary.agents[i];
    // Steps lost to an aborted episode count as breaches.
    const double expected = static_cast<double>(logs.size()) * config.steps;
    a.containment_rate = expected > 0 ? static_cast<double>(t.contained) / expected : 0.0;
    a.baseline_containment_rate =
        expected > 0 ? static_cast<double>(t.baseline_contained) / expected : 0.0;
    a.ratio_samples = static_cast<int>(t.ratio_n);
    if (i > 0 && t.ratio_n > 0) a.mean_ratio = t.ratio_sum / static_cast<double>(t.ratio_n);
  }
  return summary;
}

McSummary run_monte_carlo(const SimConfig& config, int threads) {
  return summarize(config, run_episodes(config, threads));
}

}  // namespace chainzono
