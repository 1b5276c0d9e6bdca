#include <benchmark/benchmark.h>

#include <chainzono/filter.hpp>
#include <chainzono/lp.hpp>
#include <chainzono/range_geometry.hpp>
#include <chainzono/sim.hpp>

namespace cz = chainzono;

namespace {

cz::SimConfig chain_config(int agents) {
  cz::SimConfig c;
  c.steps = 40;
  c.runs = 1;
  for (int i = 0; i < agents; ++i) {
    c.agents.push_back({i == 0 ? cz::AgentRole::anchor : cz::AgentRole::ordinary,
                        {8.0 * i, 6.0 * i},
                        {1.0, 0.5},
                        i == 0 ? 0.1 : 1.0,
                        {}});
  }
  return c;
}

void BM_LpFeasibility(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  cz::Rng rng(1);
  cz::lp::Problem p;
  p.A = Eigen::MatrixXd(n / 2, n);
  for (Eigen::Index i = 0; i < p.A.size(); ++i) p.A.data()[i] = rng.uniform(-1, 1);
  p.lower = -Eigen::VectorXd::Ones(n);
  p.upper = Eigen::VectorXd::Ones(n);
  p.b = p.A * Eigen::VectorXd::Constant(n, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(cz::lp::solve(p));
}
BENCHMARK(BM_LpFeasibility)->Arg(4)->Arg(12)->Arg(24);

void BM_SelectActiveWindow(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto seg = cz::segment_ring({{0, 0}, 9.6, 10.4}, M);
  const cz::Zonotope prior = cz::Zonotope::from_hull(
      {Eigen::Vector4d(6, 7, 0, 0), Eigen::Vector4d(8, 9, 1, 1)});
  const Eigen::MatrixXd S = cz::position_selector(4);
  for (auto _ : state) benchmark::DoNotOptimize(cz::select_active_window(seg, prior, S));
}
BENCHMARK(BM_SelectActiveWindow)->Arg(16)->Arg(64)->Arg(256);

void BM_Episode(benchmark::State& state) {
  const auto config = chain_config(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(cz::run_episode(config, ++seed));
  state.SetItemsProcessed(state.iterations() * config.steps);
}
BENCHMARK(BM_Episode)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
