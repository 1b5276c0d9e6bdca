#include <gtest/gtest.h>

#include <chainzono/error.hpp>
#include <chainzono/filter.hpp>
#include <chainzono/sim.hpp>

#include "support/test_support.hpp"

namespace cz = chainzono;
namespace ct = chainzono::testing;
using cz::Zonotope;

namespace {

Zonotope box(const Eigen::VectorXd& center, double half) {
  return Zonotope::from_hull({center.array() - half, center.array() + half});
}

Zonotope zero_set(Eigen::Index n) { return Zonotope::point(Eigen::VectorXd::Zero(n)); }

cz::AgentModel double_integrator(double w, double v, cz::AgentRole role) {
  cz::SimConfig config;
  config.process_noise = w;
  config.agents.push_back({cz::AgentRole::anchor, {0, 0}, {0, 0}, v, {}});
  auto model = cz::build_models(config).front();
  model.role = role;
  return model;
}

cz::AgentModel static_model(Eigen::Index n, cz::NoiseInterval range = {0.0, 0.0}) {
  return {Eigen::MatrixXd::Identity(n, n),
          Eigen::MatrixXd::Zero(n, 1),
          Eigen::MatrixXd::Identity(n, n),
          zero_set(n),
          zero_set(n),
          range,
          cz::AgentRole::ordinary,
          cz::position_selector(n)};
}

}  // namespace

TEST(Validate, RejectsBadModels) {
  auto m = static_model(4);
  EXPECT_NO_THROW(cz::validate(m));
  auto bad = m;
  bad.C = Eigen::MatrixXd::Zero(1, 4);
  bad.C(0, 0) = 1.0;
  bad.V = zero_set(1);
  EXPECT_THROW(cz::validate(bad), cz::InvalidArgument);  // unobservable
  bad = m;
  bad.B = Eigen::MatrixXd::Zero(3, 1);
  EXPECT_THROW(cz::validate(bad), cz::InvalidArgument);
  bad = m;
  bad.range_noise = {0.1, -0.1};
  EXPECT_THROW(cz::validate(bad), cz::InvalidArgument);
  bad = m;
  Eigen::MatrixXd A(1, 4);
  A << 1, 0, 0, 0;
  bad.W = Zonotope(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Zero(4), A,
                   Eigen::VectorXd::Constant(1, 3.0), -Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(4));
  EXPECT_THROW(cz::validate(bad), cz::InvalidArgument);  // empty noise set
}

TEST(Predict, IdentityWithoutNoiseKeepsSet) {
  const auto m = static_model(2);
  const Zonotope post = box(Eigen::Vector2d(1, 2), 0.5);
  const auto h = cz::interval_hull(cz::predict(post, m, Eigen::VectorXd::Zero(1)));
  const auto h0 = cz::interval_hull(post);
  EXPECT_TRUE(h.lo.isApprox(h0.lo));
  EXPECT_TRUE(h.hi.isApprox(h0.hi));
}

TEST(Predict, DoubleIntegratorPropagatesPoint) {
  auto m = double_integrator(0.0, 0.1, cz::AgentRole::anchor);
  m.W = zero_set(4);
  const Eigen::Vector4d x(1, 2, 3, -4);
  const auto h = cz::interval_hull(cz::predict(Zonotope::point(x), m, Eigen::VectorXd::Zero(1)));
  const Eigen::Vector4d expected(1 + 0.5 * 3, 2 - 0.5 * 4, 3, -4);
  EXPECT_LE((h.lo - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((h.hi - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Predict, SampledTransitionsContained) {
  cz::Rng rng(61);
  const auto m = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  const Zonotope post = box(Eigen::Vector4d(0, 1, 1, 0), 0.3);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.4);
  const Zonotope prior = cz::predict(post, m, u);
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd x = cz::sample_unconstrained(post, rng);
    const Eigen::VectorXd w = cz::sample_unconstrained(m.W, rng);
    ASSERT_TRUE(cz::contains_point(prior, m.A * x + m.B * u + w));
  }
}

TEST(AbsoluteMeasurementSet, ZeroNoiseIsSingleton) {
  const Eigen::Vector2d y(3, 4);
  const auto h = cz::interval_hull(cz::absolute_measurement_set(y, zero_set(2)));
  EXPECT_EQ(h.lo, Eigen::VectorXd(y));
  EXPECT_EQ(h.hi, Eigen::VectorXd(y));
}

TEST(AbsoluteMeasurementSet, AnchorNoiseBox) {
  const auto m = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  const auto h = cz::interval_hull(cz::absolute_measurement_set(Eigen::VectorXd::Zero(4), m.V));
  EXPECT_TRUE(h.lo.isApprox(Eigen::VectorXd::Constant(4, -0.1)));
  EXPECT_TRUE(h.hi.isApprox(Eigen::VectorXd::Constant(4, 0.1)));
  EXPECT_THROW(cz::absolute_measurement_set(Eigen::Vector2d::Zero(), m.V), cz::InvalidArgument);
}

TEST(AbsoluteMeasurementSet, OffsetNoiseIsReflected) {
  const Zonotope V = Zonotope::from_hull({Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 0.5)});
  const auto h = cz::interval_hull(cz::absolute_measurement_set(Eigen::VectorXd::Constant(1, 2.0), V));
  EXPECT_NEAR(h.lo[0], 1.5, 1e-12);
  EXPECT_NEAR(h.hi[0], 2.0, 1e-12);
}

TEST(UpdateAnchor, ExactMeasurementPinsState) {
  const auto m = static_model(4);
  const Eigen::Vector4d y(1, -2, 0.5, 3);
  const auto est = cz::update_anchor(box(Eigen::VectorXd::Zero(4), 100.0), y, m);
  EXPECT_LE((est.hull.lo - y).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((est.hull.hi - y).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(UpdateAnchor, NoiseBoxBoundsHull) {
  const auto m = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  const auto est = cz::update_anchor(box(Eigen::VectorXd::Zero(4), 2.0), Eigen::Vector4d(0.3, -0.2, 1, 0), m);
  EXPECT_LE((est.hull.hi - est.hull.lo).maxCoeff(), 0.2 + 1e-9);
  EXPECT_EQ(est.posterior.num_constraints(), 0);
}

TEST(UpdateAnchor, DisjointMeasurementThrows) {
  const auto m = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  EXPECT_THROW(cz::update_anchor(box(Eigen::VectorXd::Zero(4), 1.0), Eigen::Vector4d(5, 0, 0, 0), m),
               cz::InconsistentMeasurementError);
}

TEST(UpdateChainAgent, PointNeighborExactDataCollapses) {
  const auto m = static_model(2);
  const Eigen::Vector2d truth(6, 8);
  const Zonotope prior = box(truth + Eigen::Vector2d(0.1, -0.05), 0.5);
  const auto est = cz::update_chain_agent(prior, Zonotope::point(Eigen::Vector2d::Zero()), truth,
                                          truth.norm(), m, 64);
  EXPECT_FALSE(est.flags.fallback);
  EXPECT_LE((est.hull.hi - est.hull.lo).maxCoeff(), 1e-6);
  EXPECT_TRUE(est.hull.contains(truth, 1e-7));
}

TEST(UpdateChainAgent, RangeOnlyTightensAlongBearing) {
  // Absolute data is uninformative, so only the range can narrow the set.
  auto m = static_model(2, {-0.05, 0.05});
  m.V = box(Eigen::Vector2d::Zero(), 10.0);
  const Eigen::Vector2d truth(0, 10);
  const Zonotope prior = box(truth, 1.0);
  const auto est = cz::update_chain_agent(prior, Zonotope::point(Eigen::Vector2d::Zero()), truth,
                                          10.0, m, 128);
  EXPECT_FALSE(est.flags.fallback);
  EXPECT_LT(est.hull.hi[1] - est.hull.lo[1], 0.5);
  EXPECT_TRUE(est.hull.contains(truth));
}

TEST(UpdateChainAgent, FallbackEqualsAbsoluteUpdate) {
  const auto m = double_integrator(0.1, 1.0, cz::AgentRole::ordinary);
  const Zonotope prior = box(Eigen::Vector4d(0, 0, 1, 1), 2.0);
  const Eigen::Vector4d y(0.2, -0.1, 1, 1);
  // The neighbor sits inside the prior, so the window covers the circle.
  const auto est = cz::update_chain_agent(prior, box(Eigen::Vector4d(0.5, 0, 0, 0), 0.1), y, 1.0, m, 64);
  EXPECT_TRUE(est.flags.fallback);
  EXPECT_TRUE(est.flags.wedge_unavailable);
  const auto base = cz::update_anchor(prior, y, m);
  EXPECT_EQ(est.hull.lo, base.hull.lo);
  EXPECT_EQ(est.hull.hi, base.hull.hi);
}

TEST(UpdateChainAgent, InconsistentRangeFallsBack) {
  const auto m = double_integrator(0.1, 1.0, cz::AgentRole::ordinary);
  const Zonotope prior = box(Eigen::Vector4d(10, 0, 0, 0), 0.5);
  const Eigen::Vector4d y(10, 0, 0, 0);
  const auto est = cz::update_chain_agent(prior, box(Eigen::Vector4d::Zero(), 0.1), y, 3.0, m, 64);
  EXPECT_TRUE(est.flags.fallback);
  EXPECT_TRUE(est.flags.no_active_sector);
  EXPECT_TRUE(est.hull.contains(y));
}

TEST(StepChain, AnchorOnlyIsPredictPlusUpdate) {
  const auto m = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  const Zonotope x0 = box(Eigen::Vector4d(0, 0, 1, 0), 2.0);
  auto state = cz::make_chain_state({x0});
  cz::StepMeasurements meas{{Eigen::Vector4d(0.05, 0, 1, 0)}, {}};
  const std::vector<Eigen::VectorXd> u{Eigen::VectorXd::Zero(1)};
  state = cz::step_chain(state, meas, {m}, u);
  EXPECT_EQ(state.k, 1);
  meas.absolute[0] = Eigen::Vector4d(0.55, 0.02, 1.02, 0);
  const auto next = cz::step_chain(state, meas, {m}, u);
  const auto expected = cz::update_anchor(cz::predict(state.agents[0].posterior, m, u[0]), meas.absolute[0], m);
  EXPECT_EQ(next.agents[0].hull.lo, expected.hull.lo);
  EXPECT_EQ(next.agents[0].hull.hi, expected.hull.hi);
  EXPECT_EQ(next.k, 2);
}

TEST(StepChain, NoiselessTwoAgentChainCollapses) {
  const auto m = static_model(2);
  const Eigen::Vector2d x0(0, 0), x1(3, 4);
  auto state = cz::make_chain_state({box(x0, 1.0), box(x1, 1.0)});
  cz::StepMeasurements meas{{x0, x1}, {0.0, 5.0}};
  const std::vector<Eigen::VectorXd> u(2, Eigen::VectorXd::Zero(1));
  state = cz::step_chain(state, meas, {m, m}, u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE((state.agents[static_cast<std::size_t>(i)].hull.hi -
               state.agents[static_cast<std::size_t>(i)].hull.lo).maxCoeff(), 1e-9);
  }
  EXPECT_TRUE(state.agents[1].hull.contains(x1, 1e-8));
}

TEST(StepChain, BaselineIgnoresRanges) {
  const auto m0 = double_integrator(0.1, 0.1, cz::AgentRole::anchor);
  const auto m1 = double_integrator(0.1, 1.0, cz::AgentRole::ordinary);
  const Eigen::Vector4d x0(0, 0, 1, 0), x1(6, 8, 1, 0);
  const auto init = cz::make_chain_state({box(x0, 2.0), box(x1, 2.0)});
  cz::StepMeasurements meas{{x0, x1}, {0.0, 10.0}};
  const std::vector<Eigen::VectorXd> u(2, Eigen::VectorXd::Zero(1));
  const auto base = cz::step_chain(init, meas, {m0, m1}, u, {64, false});
  const auto expected = cz::update_anchor(box(x1, 2.0), x1, m1);
  EXPECT_EQ(base.agents[1].hull.lo, expected.hull.lo);
  const auto pro = cz::step_chain(init, meas, {m0, m1}, u, {64, true});
  EXPECT_EQ(pro.agents[0].hull.lo, base.agents[0].hull.lo);
  EXPECT_TRUE(((pro.agents[1].hull.hi - pro.agents[1].hull.lo).array() <=
               (base.agents[1].hull.hi - base.agents[1].hull.lo).array() + 1e-9).all());
}

TEST(StepChain, RejectsMismatchedInputs) {
  const auto m = static_model(2);
  auto state = cz::make_chain_state({box(Eigen::Vector2d::Zero(), 1.0)});
  const cz::StepMeasurements meas{{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()}, {0, 0}};
  EXPECT_THROW(cz::step_chain(state, meas, {m}, {Eigen::VectorXd::Zero(1)}), cz::InvalidArgument);
  EXPECT_THROW(cz::step_chain(state, meas, {}, {}), cz::InvalidArgument);
}

TEST(StepChain, RandomChainsContainTruth) {
  // Property: for random noiseless-to-noisy chains the truth stays inside.
  cz::Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    cz::SimConfig config;
    config.steps = 12;
    config.sectors = 8 * ct::uniform_int(rng, 1, 8);
    const int n = ct::uniform_int(rng, 2, 4);
    for (int i = 0; i < n; ++i) {
      const double angle = rng.uniform(0, 2 * std::numbers::pi);
      cz::AgentSpec a;
      a.role = i == 0 ? cz::AgentRole::anchor : cz::AgentRole::ordinary;
      a.position = (i == 0 ? Eigen::Vector2d::Zero()
                           : Eigen::Vector2d(rng.uniform(4, 15) * std::cos(angle),
                                             rng.uniform(4, 15) * std::sin(angle)));
      a.velocity = ct::random_vector(rng, 2, -1.0, 1.0);
      a.abs_noise = i == 0 ? 0.1 : rng.uniform(0.2, 1.5);
      config.agents.push_back(a);
    }
    const auto log = cz::run_episode(config, 100 + static_cast<std::uint64_t>(trial));
    ASSERT_FALSE(log.aborted) << log.abort_reason;
    for (const auto& rec : log.records) ASSERT_TRUE(rec.contained) << "trial " << trial << " k " << rec.k;
  }
}
