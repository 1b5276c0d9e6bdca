#include "chainzono/filter.hpp"

#include <spdlog/spdlog.h>

#include "chainzono/error.hpp"

namespace chainzono {

namespace {

AgentEstimate finish(const Zonotope& prior, const Zonotope& updated, AgentStepFlags flags) {
  IntervalHull hull = interval_hull(updated);
  Zonotope box = Zonotope::from_hull(hull);
  return {prior, std::move(box), std::move(hull), std::move(flags)};
}

}  // namespace

void validate(const AgentModel& model) {
  const Eigen::Index n = model.A.rows();
  if (model.A.cols() != n) throw InvalidArgument("agent model: A must be square");
  if (model.B.rows() != n) throw InvalidArgument("agent model: B rows must equal the state dimension");
  if (model.C.cols() != n) throw InvalidArgument("agent model: C columns must equal the state dimension");
  if (model.W.dim() != n) throw InvalidArgument("agent model: W dimension must equal the state dimension");
  if (model.V.dim() != model.C.rows()) throw InvalidArgument("agent model: V dimension must equal the measurement dimension");
  if (model.range_selector.rows() != 2 || model.range_selector.cols() != n) {
    throw InvalidArgument("agent model: range selector must be 2 x n");
  }
  if (!(model.range_noise.lo <= model.range_noise.hi)) {
    throw InvalidArgument("agent model: range noise bounds out of order");
  }
  if (is_empty(model.W) || is_empty(model.V)) throw InvalidArgument("agent model: empty noise set");

  // Observability: rank [C; CA; ...; CA^{n-1}] = n.
  Eigen::MatrixXd stack(model.C.rows() * n, n);
  Eigen::MatrixXd block = model.C;
  for (Eigen::Index i = 0; i < n; ++i) {
    stack.middleRows(i * model.C.rows(), model.C.rows()) = block;
    block = block * model.A;
  }
  if (Eigen::FullPivLU<Eigen::MatrixXd>(stack).rank() != n) {
    throw InvalidArgument("agent model: (C, A) is not observable");
  }
}

Eigen::MatrixXd position_selector(Eigen::Index state_dim) {
  if (state_dim < 2) throw InvalidArgument("position_selector: state must have at least 2 components");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2, state_dim);
  S(0, 0) = 1.0;
  S(1, 1) = 1.0;
  return S;
}

ChainState make_chain_state(std::vector<Zonotope> initial_sets) {
  ChainState state;
  state.initial = std::move(initial_sets);
  return state;
}

Zonotope predict(const Zonotope& posterior, const AgentModel& model, const Eigen::VectorXd& u) {
  return minkowski_sum(translate(linear_map(model.A, posterior), model.B * u), model.W);
}

Zonotope absolute_measurement_set(const Eigen::VectorXd& y, const Zonotope& V) {
  if (y.size() != V.dim()) throw InvalidArgument("absolute_measurement_set: dimension mismatch");
  const Eigen::MatrixXd negate = -Eigen::MatrixXd::Identity(V.dim(), V.dim());
  return translate(linear_map(negate, V), y);
}

AgentEstimate update_anchor(const Zonotope& prior, const Eigen::VectorXd& y,
                            const AgentModel& model) {
  const Zonotope updated =
      generalized_intersect(prior, absolute_measurement_set(y, model.V), model.C);
  if (is_empty(updated)) {
    throw InconsistentMeasurementError("update_anchor: prior and measurement set are disjoint");
  }
  return finish(prior, updated, {});
}

AgentEstimate update_chain_agent(const Zonotope& prior, const Zonotope& neighbor_posterior,
                                 const Eigen::VectorXd& y_abs, double y_rel,
                                 const AgentModel& model, int sectors) {
  const Zonotope measured = absolute_measurement_set(y_abs, model.V);
  AgentStepFlags flags;

  std::optional<Zonotope> relative;
  try {
    RelativeMeasurement rel =
        relative_measurement_set(neighbor_posterior, y_rel, model.range_noise.lo,
                                 model.range_noise.hi, prior, model.range_selector, sectors);
    flags.window = rel.sectors.window;
    flags.contiguous = rel.sectors.contiguous;
    flags.neighbor_radius = rel.neighbor_radius;
    flags.assumption_prior_small = rel.assumptions.prior_small;
    flags.assumption_neighbor_small = rel.assumptions.neighbor_small;
    if (rel.set) {
      relative = std::move(rel.set);
    } else {
      flags.wedge_unavailable = true;
    }
  } catch (const NoActiveSectorError&) {
    flags.no_active_sector = true;
  } catch (const InconsistentMeasurementError&) {
    flags.no_active_sector = true;
  }

  if (relative) {
    const Zonotope updated = generalized_intersect(
        generalized_intersect(prior, *relative, model.range_selector), measured, model.C);
    if (!is_empty(updated)) return finish(prior, updated, std::move(flags));
    flags.empty_intersection = true;
  }

  flags.fallback = true;
  spdlog::debug("update_chain_agent: relative measurement discarded (wedge_unavailable={}, "
                "no_active_sector={}, empty_intersection={})",
                flags.wedge_unavailable, flags.no_active_sector, flags.empty_intersection);
  const Zonotope updated = generalized_intersect(prior, measured, model.C);
  if (is_empty(updated)) {
    throw InconsistentMeasurementError("update_chain_agent: prior and measurement set are disjoint");
  }
  return finish(prior, updated, std::move(flags));
}

ChainState step_chain(const ChainState& state, const StepMeasurements& measurements,
                      const std::vector<AgentModel>& models,
                      const std::vector<Eigen::VectorXd>& inputs, const FilterOptions& options) {
  const std::size_t agents = models.size();
  if (agents == 0) throw InvalidArgument("step_chain: empty chain");
  if (measurements.absolute.size() != agents || inputs.size() != agents ||
      (agents > 1 && measurements.relative.size() != agents)) {
    throw InvalidArgument("step_chain: measurement or input count does not match the chain");
  }
  if (state.k == 0 && state.initial.size() != agents) {
    throw InvalidArgument("step_chain: initial set count does not match the chain");
  }

  std::vector<Zonotope> priors;
  priors.reserve(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    priors.push_back(state.k == 0 ? state.initial[i]
                                  : predict(state.agents[i].posterior, models[i], inputs[i]));
  }

  ChainState next;
  next.k = state.k + 1;
  next.initial = state.initial;
  next.agents.reserve(agents);
  next.agents.push_back(update_anchor(priors[0], measurements.absolute[0], models[0]));
  for (std::size_t i = 1; i < agents; ++i) {
    if (options.use_relative) {
      next.agents.push_back(update_chain_agent(priors[i], next.agents[i - 1].posterior,
                                               measurements.absolute[i],
                                               measurements.relative[i], models[i],
                                               options.sectors));
    } else {
      next.agents.push_back(update_anchor(priors[i], measurements.absolute[i], models[i]));
    }
  }
  return next;
}

}  // namespace chainzono
