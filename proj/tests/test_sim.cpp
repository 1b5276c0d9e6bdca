#include <gtest/gtest.h>

#include <chainzono/error.hpp>
#include <chainzono/sim.hpp>

#include "support/test_support.hpp"

namespace cz = chainzono;

namespace {

cz::SimConfig two_agent_config() {
  cz::SimConfig c;
  c.steps = 15;
  c.runs = 3;
  c.agents.push_back({cz::AgentRole::anchor, {0, 0}, {1, 0.5}, 0.1, {}});
  c.agents.push_back({cz::AgentRole::ordinary, {8, 6}, {1, 0.5}, 1.0, {}});
  return c;
}

cz::AgentModel zero_noise_model(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  return {A,
          Eigen::MatrixXd::Zero(n, 1),
          Eigen::MatrixXd::Identity(n, n),
          cz::Zonotope::point(Eigen::VectorXd::Zero(n)),
          cz::Zonotope::point(Eigen::VectorXd::Zero(n)),
          {0.0, 0.0},
          cz::AgentRole::ordinary,
          cz::position_selector(n)};
}

}  // namespace

TEST(Rng, PortableStream) {
  cz::Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    EXPECT_EQ(x, b.uniform01());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_NE(a.uniform01(), c.uniform01());
  EXPECT_NE(cz::episode_seed(1, 0), cz::episode_seed(1, 1));
  EXPECT_NE(cz::episode_seed(1, 0), cz::episode_seed(2, 0));
  // std::mt19937_64 is fully specified, so the first draw is fixed.
  EXPECT_EQ(cz::Rng(5489).uniform01(), static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53);
}

TEST(Validate, NamesOffendingField) {
  auto c = two_agent_config();
  c.agents[1].role = cz::AgentRole::anchor;
  try {
    cz::validate(c);
    FAIL();
  } catch (const cz::InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("agents[1].role"), std::string::npos);
  }
  c = two_agent_config();
  c.sectors = 4;
  EXPECT_THROW(cz::validate(c), cz::InvalidArgument);
  c = two_agent_config();
  c.range_noise = {0.1, -0.1};
  EXPECT_THROW(cz::validate(c), cz::InvalidArgument);
  c = two_agent_config();
  c.agents.clear();
  EXPECT_THROW(cz::validate(c), cz::InvalidArgument);
}

TEST(BuildModels, DoubleIntegratorShape) {
  const auto models = cz::build_models(two_agent_config());
  ASSERT_EQ(models.size(), 2u);
  Eigen::Matrix4d A;
  A << 1, 0, 0.5, 0, 0, 1, 0, 0.5, 0, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_TRUE(models[0].A.isApprox(A));
  EXPECT_TRUE(models[0].B.isApprox(Eigen::Vector4d(0.125, 0.125, 0.5, 0.5)));
  EXPECT_TRUE(models[0].C.isIdentity());
  EXPECT_NEAR(cz::interval_hull(models[0].V).hi.maxCoeff(), 0.1, 1e-12);
  EXPECT_NEAR(cz::interval_hull(models[1].V).hi.maxCoeff(), 1.0, 1e-12);
  EXPECT_NEAR(cz::interval_hull(models[1].W).hi.maxCoeff(), 0.1, 1e-12);
  EXPECT_EQ(models[1].range_noise.lo, -0.1);
  EXPECT_EQ(models[1].range_noise.hi, 0.1);
}

TEST(InputAt, PiecewiseConstantSchedule) {
  cz::AgentSpec spec;
  spec.inputs = {{5, Eigen::VectorXd::Constant(1, 1.0)}, {2, Eigen::VectorXd::Constant(1, -1.0)}};
  EXPECT_EQ(cz::input_at(spec, 0, 1)[0], 0.0);
  EXPECT_EQ(cz::input_at(spec, 2, 1)[0], -1.0);
  EXPECT_EQ(cz::input_at(spec, 4, 1)[0], -1.0);
  EXPECT_EQ(cz::input_at(spec, 9, 1)[0], 1.0);
}

TEST(PropagateTruth, StaticWithoutNoise) {
  cz::Rng rng(1);
  const auto m = zero_noise_model(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::Vector4d x(1, 2, 3, 4);
  EXPECT_EQ(cz::propagate_truth(x, m, Eigen::VectorXd::Zero(1), rng), Eigen::VectorXd(x));
}

TEST(PropagateTruth, DoubleIntegratorStepAndNoiseAudit) {
  cz::Rng rng(2);
  const auto m = cz::build_models(two_agent_config())[1];
  const Eigen::Vector4d x(0, 0, 1, 0.5);
  for (int i = 0; i < 2000; ++i) {
    Eigen::VectorXd w;
    const Eigen::VectorXd next = cz::propagate_truth(x, m, Eigen::VectorXd::Zero(1), rng, 1.0, &w);
    ASSERT_TRUE(cz::contains_point(m.W, w));
    ASSERT_LE(std::abs(next[0] - 0.5), 0.1 + 1e-12);
    ASSERT_LE(std::abs(next[1] - 0.25), 0.1 + 1e-12);
  }
}

TEST(GenAbsMeasurement, ExactAndNoisy) {
  cz::Rng rng(3);
  const auto exact = zero_noise_model(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::Vector4d x(1, -1, 0.5, 0);
  EXPECT_EQ(cz::gen_abs_measurement(x, exact, rng), Eigen::VectorXd(x));
  const auto m = cz::build_models(two_agent_config())[1];
  for (int i = 0; i < 2000; ++i) {
    const Eigen::VectorXd y = cz::gen_abs_measurement(x, m, rng);
    ASSERT_TRUE(cz::contains_point(cz::absolute_measurement_set(y, m.V), m.C * x));
  }
}

TEST(GenRelMeasurement, DistanceWithinNoiseBand) {
  cz::Rng rng(4);
  const auto exact = zero_noise_model(Eigen::MatrixXd::Identity(4, 4));
  const Eigen::Vector4d x(1, 1, 0, 0);
  EXPECT_EQ(cz::gen_rel_measurement(x, x, exact, rng), 0.0);
  const auto m = cz::build_models(two_agent_config())[1];
  const Eigen::Vector4d xj(4, 5, 9, 9);
  for (int i = 0; i < 2000; ++i) {
    const double y = cz::gen_rel_measurement(x, xj, m, rng);
    ASSERT_GE(5.0, y - m.range_noise.hi - 1e-12);
    ASSERT_LE(5.0, y - m.range_noise.lo + 1e-12);
  }
}

TEST(RunEpisode, RecordCountAndContainment) {
  const auto c = two_agent_config();
  const auto log = cz::run_episode(c, 9);
  ASSERT_FALSE(log.aborted) << log.abort_reason;
  ASSERT_EQ(log.records.size(), 30u);
  for (const auto& rec : log.records) {
    EXPECT_TRUE(rec.contained);
    EXPECT_TRUE(rec.baseline_contained);
    EXPECT_TRUE(rec.noise_admissible);
    EXPECT_EQ(rec.y_rel.has_value(), rec.agent > 0);
    if (rec.agent == 0) {
      EXPECT_EQ(rec.size_proposed, rec.size_baseline);
    }
  }
}

TEST(RunEpisode, NoiselessCollapsesToPoints) {
  auto c = two_agent_config();
  c.steps = 1;
  c.process_noise = 0.0;
  c.range_noise = {0.0, 0.0};
  c.agents[0].abs_noise = 0.0;
  c.agents[1].abs_noise = 0.0;
  const auto log = cz::run_episode(c, 1);
  for (const auto& rec : log.records) {
    EXPECT_LE((rec.posterior_hull.hi - rec.posterior_hull.lo).maxCoeff(), 1e-9);
    EXPECT_TRUE(rec.contained);
  }
}

TEST(RunEpisode, SameSeedSameLog) {
  const auto c = two_agent_config();
  const auto a = cz::run_episode(c, 77), b = cz::run_episode(c, 77), d = cz::run_episode(c, 78);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].truth, b.records[i].truth);
    EXPECT_EQ(a.records[i].posterior_hull.lo, b.records[i].posterior_hull.lo);
    EXPECT_EQ(a.records[i].posterior_hull.hi, b.records[i].posterior_hull.hi);
  }
  EXPECT_NE(a.records.back().truth, d.records.back().truth);
}

TEST(RunEpisode, InflatedSamplerIsFlagged) {
  auto c = two_agent_config();
  c.sampler_noise_scale = 3.0;
  const auto log = cz::run_episode(c, 5);
  bool violation = false, breach = log.aborted;
  for (const auto& rec : log.records) {
    violation = violation || !rec.noise_admissible;
    breach = breach || !rec.contained;
  }
  // Either a recorded step shows the out-of-set draw or the episode aborted.
  EXPECT_TRUE(violation || log.aborted);
  EXPECT_TRUE(breach);
}

TEST(RunEpisode, BaselineNeverTighterOnWedgeSteps) {
  auto c = two_agent_config();
  c.steps = 30;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto log = cz::run_episode(c, seed);
    for (const auto& rec : log.records) {
      if (rec.agent == 0 || rec.flags.fallback || rec.k < c.burn_in) continue;
      EXPECT_TRUE(((rec.posterior_hull.hi - rec.posterior_hull.lo).array() <=
                   (rec.baseline_hull.hi - rec.baseline_hull.lo).array() + 1e-9)
                      .all())
          << "seed " << seed << " k " << rec.k;
    }
  }
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  const auto c = two_agent_config();
  const auto one = cz::run_monte_carlo(c, 1), three = cz::run_monte_carlo(c, 3);
  ASSERT_EQ(one.agents.size(), three.agents.size());
  for (std::size_t i = 0; i < one.agents.size(); ++i) {
    EXPECT_EQ(one.agents[i].run_size_proposed, three.agents[i].run_size_proposed);
    EXPECT_EQ(one.agents[i].mean_ratio, three.agents[i].mean_ratio);
  }
}

TEST(MonteCarlo, SummaryCounts) {
  const auto c = two_agent_config();
  const auto s = cz::run_monte_carlo(c);
  EXPECT_EQ(s.runs, 3);
  EXPECT_EQ(s.aborted_runs, 0);
  ASSERT_EQ(s.agents.size(), 2u);
  EXPECT_EQ(s.agents[0].containment_rate, 1.0);
  EXPECT_EQ(s.agents[1].containment_rate, 1.0);
  EXPECT_FALSE(s.agents[0].mean_ratio.has_value());
  ASSERT_TRUE(s.agents[1].mean_ratio.has_value());
  EXPECT_GT(*s.agents[1].mean_ratio, 0.0);
  EXPECT_LT(*s.agents[1].mean_ratio, 1.0);
  EXPECT_EQ(s.agents[1].ratio_samples, 3 * (c.steps - c.burn_in));
  EXPECT_EQ(s.agents[1].run_size_proposed.size(), 3u);
}

TEST(MonteCarlo, AbortedStepsCountAsBreaches) {
  auto c = two_agent_config();
  cz::RunLog log;
  log.agents = 2;
  log.steps = c.steps;
  log.aborted = true;
  c.runs = 1;
  const auto s = cz::summarize(c, {log});
  EXPECT_EQ(s.aborted_runs, 1);
  EXPECT_EQ(s.agents[0].containment_rate, 0.0);
}

TEST(PlanarSize, LargestPositionHalfWidth) {
  const cz::IntervalHull h{Eigen::Vector4d(-1, -3, -10, -10), Eigen::Vector4d(1, 3, 10, 10)};
  EXPECT_DOUBLE_EQ(cz::planar_size(h, cz::position_selector(4)), 3.0);
}
