// Serial reference kernels against their OpenMP counterparts.
//
//   ./build/bench/bench_kernels --benchmark_filter=loss
#include <benchmark/benchmark.h>

#include <vector>

#include "phase_bandit/estimator.hpp"
#include "phase_bandit/kernels.hpp"

using namespace phase_bandit;
namespace ks = kernels::serial;
namespace ko = kernels::omp;

namespace {

EstimatorProblem make_problem(int d, int rows) {
  Rng rng(RngState{2024, 1});
  const Vector theta = sample_unit_sphere(d, rng).coords() * 0.8;
  std::vector<Datum> data;
  data.reserve(static_cast<std::size_t>(rows));
  for (int t = 0; t < rows; ++t) {
    const Action a = sample_unit_sphere(d, rng);
    const double ip = a.coords().dot(theta);
    data.push_back({a, ip * ip + rng.normal()});
  }
  return EstimatorProblem(data, FeasibleSet{});
}

Vector probe(int d) { return Vector::Constant(d, 0.3 / std::sqrt(static_cast<double>(d))); }

template <bool Parallel>
void BM_loss_gradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = make_problem(d, static_cast<int>(state.range(1)));
  const Vector th = probe(d);
  Vector g;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? ko::quartic_loss_and_gradient(p.design(), th, g)
                                      : ks::quartic_loss_and_gradient(p.design(), th, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool Parallel>
void BM_second_moment(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = make_problem(d, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    Eigen::MatrixXd m = Parallel ? ko::weighted_second_moment(p.design()) : ks::weighted_second_moment(p.design());
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool Parallel>
void BM_grid_argmin(benchmark::State& state) {
  const auto p = make_problem(2, 30);
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto res = Parallel ? ko::grid_argmin(p.design(), p.feasible(), points)
                        : ks::grid_argmin(p.design(), p.feasible(), points);
    benchmark::DoNotOptimize(res.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool Parallel>
void BM_moment_sums(benchmark::State& state) {
  const std::int64_t samples = state.range(1);
  for (auto _ : state) {
    auto res = Parallel ? ko::sphere_moment_sums(static_cast<int>(state.range(0)), 1.0, 1.0, samples, RngState{7, 7})
                        : ks::sphere_moment_sums(static_cast<int>(state.range(0)), 1.0, 1.0, samples, RngState{7, 7});
    benchmark::DoNotOptimize(res.sum_y);
  }
  state.SetItemsProcessed(state.iterations() * samples);
}

}  // namespace

BENCHMARK(BM_loss_gradient<false>)->Name("loss_gradient/serial")->Args({5, 4096})->Args({32, 65536});
BENCHMARK(BM_loss_gradient<true>)->Name("loss_gradient/omp")->Args({5, 4096})->Args({32, 65536});
BENCHMARK(BM_second_moment<false>)->Name("second_moment/serial")->Args({5, 4096})->Args({32, 65536});
BENCHMARK(BM_second_moment<true>)->Name("second_moment/omp")->Args({5, 4096})->Args({32, 65536});
BENCHMARK(BM_grid_argmin<false>)->Name("grid_argmin/serial")->Arg(501)->Arg(2001);
BENCHMARK(BM_grid_argmin<true>)->Name("grid_argmin/omp")->Arg(501)->Arg(2001);
BENCHMARK(BM_moment_sums<false>)->Name("moment_sums/serial")->Args({5, 1 << 18});
BENCHMARK(BM_moment_sums<true>)->Name("moment_sums/omp")->Args({5, 1 << 18});

BENCHMARK_MAIN();
