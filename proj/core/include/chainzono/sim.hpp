#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainzono/filter.hpp"
#include "chainzono/rng.hpp"

namespace chainzono {

/// Piecewise-constant input: `u` applies from step `from_step` until the
/// next entry.
struct InputStep {
  int from_step = 0;
  Eigen::VectorXd u;
};

struct AgentSpec {
  AgentRole role = AgentRole::ordinary;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double abs_noise = 1.0;  ///< half-width of the absolute measurement noise box
  std::vector<InputStep> inputs;
};

/// Planar double-integrator chain: state [p_x, p_y, v_x, v_y], agent 0 is
/// the anchor and agent i ranges to agent i-1.
struct SimConfig {
  int steps = 40;
  double period = 0.5;
  int sectors = kDefaultSectorCount;
  std::uint64_t seed = 1;
  int runs = 50;
  int burn_in = 5;                 ///< first step counted in the ratio averages
  double process_noise = 0.1;      ///< half-width of the process noise box
  NoiseInterval range_noise{-0.1, 0.1};
  double initial_halfwidth = 2.0;  ///< half-width of the initial boxes
  double sampler_noise_scale = 1.0;  ///< > 1 draws noise outside the declared sets
  std::vector<AgentSpec> agents;
};

/// Throws InvalidArgument naming the offending field.
void validate(const SimConfig& config);

std::vector<AgentModel> build_models(const SimConfig& config);

/// Input in force at step k (zero before the first schedule entry).
Eigen::VectorXd input_at(const AgentSpec& spec, int k, Eigen::Index input_dim);

struct AgentStepRecord {
  int k = 0;
  int agent = 0;
  Eigen::VectorXd truth;
  Eigen::VectorXd y_abs;
  std::optional<double> y_rel;
  IntervalHull prior_hull;
  IntervalHull posterior_hull;
  IntervalHull baseline_hull;
  std::optional<Zonotope> posterior;
  AgentStepFlags flags;
  bool contained = false;
  bool baseline_contained = false;
  bool noise_admissible = true;
  double size_proposed = 0.0;  ///< largest position half-width of the posterior hull
  double size_baseline = 0.0;
};

struct RunLog {
  std::uint64_t seed = 0;
  int agents = 0;
  int steps = 0;
  std::vector<AgentStepRecord> records;  ///< step-major, agent-minor
  bool aborted = false;
  std::string abort_reason;
};

/// x' = A x + B u + w with w uniform in the (scaled) process noise set.
Eigen::VectorXd propagate_truth(const Eigen::VectorXd& x, const AgentModel& model,
                                const Eigen::VectorXd& u, Rng& rng, double noise_scale = 1.0,
                                Eigen::VectorXd* drawn_noise = nullptr);

/// y = C x + v with v uniform in V.
Eigen::VectorXd gen_abs_measurement(const Eigen::VectorXd& x, const AgentModel& model, Rng& rng,
                                    double noise_scale = 1.0, Eigen::VectorXd* drawn_noise = nullptr);

/// ||S (x_i - x_j)||_2 + r with r uniform in the range-noise interval.
double gen_rel_measurement(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j,
                           const AgentModel& model, Rng& rng, double noise_scale = 1.0,
                           double* drawn_noise = nullptr);

/// Uniform sample of an unconstrained zonotope's generator box.
Eigen::VectorXd sample_unconstrained(const Zonotope& Z, Rng& rng);

/// Truth, measurements, proposed filter and absolute-only baseline on the
/// same noise draws. Filter failures end the episode and are recorded.
RunLog run_episode(const SimConfig& config, std::uint64_t seed);

struct AgentSummary {
  int agent = 0;
  AgentRole role = AgentRole::ordinary;
  double containment_rate = 0.0;
  double baseline_containment_rate = 0.0;
  std::optional<double> mean_ratio;  ///< ordinary agents only
  int ratio_samples = 0;
  std::vector<double> run_size_proposed;  ///< per-run mean posterior size
  std::vector<double> run_size_baseline;
};

struct McSummary {
  int runs = 0;
  std::uint64_t seed = 0;
  int steps = 0;
  std::vector<AgentSummary> agents;
  int aborted_runs = 0;
  int fallback_steps = 0;
  int noise_violations = 0;
};

/// Episode `i` uses episode_seed(config.seed, i). Episodes may run on
/// `threads` workers; results are ordered by episode index.
std::vector<RunLog> run_episodes(const SimConfig& config, int threads = 1);

McSummary summarize(const SimConfig& config, const std::vector<RunLog>& logs);

McSummary run_monte_carlo(const SimConfig& config, int threads = 1);

/// Largest half-width of the hull's image under the selector.
double planar_size(const IntervalHull& hull, const Eigen::MatrixXd& selector);

}  // namespace chainzono
