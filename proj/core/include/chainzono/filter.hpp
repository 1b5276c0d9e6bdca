#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "chainzono/range_geometry.hpp"
#include "chainzono/zonotope.hpp"

namespace chainzono {

enum class AgentRole { anchor, ordinary };

/// Closed interval of admissible relative-range noise.
struct NoiseInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Linear agent x' = A x + B u + w, absolute measurement y = C x + v, and
/// relative range ||S (x_i - x_j)||_2 + r with S the range selector.
struct AgentModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Zonotope W;  ///< process noise set
  Zonotope V;  ///< absolute measurement noise set
  NoiseInterval range_noise;
  AgentRole role = AgentRole::ordinary;
  Eigen::MatrixXd range_selector;

  Eigen::Index state_dim() const { return A.rows(); }
};

/// Throws InvalidArgument unless the shapes agree, (C, A) is observable,
/// W and V are nonempty and the range-noise interval is ordered.
void validate(const AgentModel& model);

/// [I_2 0] for a state whose first two components are the planar position.
Eigen::MatrixXd position_selector(Eigen::Index state_dim);

struct AgentStepFlags {
  bool fallback = false;             ///< relative information discarded this step
  bool wedge_unavailable = false;    ///< active window too wide for a wedge bound
  bool no_active_sector = false;
  bool empty_intersection = false;   ///< triple intersection came out empty
  bool assumption_prior_small = true;
  bool assumption_neighbor_small = true;
  bool contiguous = true;
  std::optional<SectorWindow> window;
  double neighbor_radius = 0.0;
};

struct AgentEstimate {
  Zonotope prior;
  Zonotope posterior;  ///< interval hull re-represented as a box zonotope
  IntervalHull hull;
  AgentStepFlags flags;
};

struct ChainState {
  int k = 0;                               ///< index of the next step to run
  std::vector<Zonotope> initial;           ///< priors for step 0
  std::vector<AgentEstimate> agents;       ///< results of step k - 1 (empty before step 0)
};

struct StepMeasurements {
  std::vector<Eigen::VectorXd> absolute;   ///< y_i for every agent in chain order
  std::vector<double> relative;            ///< relative[i] ranges agent i to agent i-1; relative[0] unused
};

struct FilterOptions {
  int sectors = kDefaultSectorCount;
  bool use_relative = true;  ///< false gives the absolute-only baseline
};

ChainState make_chain_state(std::vector<Zonotope> initial_sets);

/// A (posterior) (+) {B u} (+) W.
Zonotope predict(const Zonotope& posterior, const AgentModel& model, const Eigen::VectorXd& u);

/// {y} (+) (-V), the measurement-space set to intersect through C.
Zonotope absolute_measurement_set(const Eigen::VectorXd& y, const Zonotope& V);

/// Interval hull of prior intersected with the absolute measurement set.
/// Throws InconsistentMeasurementError when the intersection is empty.
AgentEstimate update_anchor(const Zonotope& prior, const Eigen::VectorXd& y,
                            const AgentModel& model);

/// Interval hull of prior cap relative wedge cap absolute set. Falls back to
/// the absolute-only update, flagging the step, when no wedge can be formed
/// or the triple intersection is empty.
AgentEstimate update_chain_agent(const Zonotope& prior, const Zonotope& neighbor_posterior,
                                 const Eigen::VectorXd& y_abs, double y_rel,
                                 const AgentModel& model, int sectors = kDefaultSectorCount);

/// One time step over the whole chain: predict every agent (or take the
/// initial sets at step 0), update the anchor, then update agents 1..l_max in
/// order, each against its predecessor's fresh posterior.
ChainState step_chain(const ChainState& state, const StepMeasurements& measurements,
                      const std::vector<AgentModel>& models,
                      const std::vector<Eigen::VectorXd>& inputs,
                      const FilterOptions& options = {});

}  // namespace chainzono
