#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ioprobe/convolution.hpp"
#include "ioprobe/gain.hpp"
#include "ioprobe/lti.hpp"
#include "ioprobe/probe.hpp"
#include "ioprobe/spectra.hpp"
#include "ioprobe/trace.hpp"

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void BM_ConvolveDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = noise(n, 1), u = noise(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    ioprobe::convolve_direct(g, u, y, false);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveDirect)->RangeMultiplier(4)->Range(64, 8192)->Complexity();

void BM_ConvolveFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = noise(n, 1), u = noise(n, 2);
  std::vector<double> y(n);
  for (auto _ : state) {
    ioprobe::convolve_fft(g, u, y, false);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvolveFft)->RangeMultiplier(4)->Range(64, 8192)->Complexity();

void BM_GramProbe(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ioprobe::ProbeSession session(ioprobe::random_stable_plant(7, 20, n));
  const ioprobe::Signal u = ioprobe::make_initial_input({ioprobe::InitialInputKind::white, 3, {}}, 1, n);
  for (auto _ : state) {
    auto probe = session.gram_apply(u);
    benchmark::DoNotOptimize(probe.gram_u.data());
  }
}
BENCHMARK(BM_GramProbe)->Arg(256)->Arg(2000)->Arg(8192);

void BM_Jacobi(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  const Eigen::MatrixXd m = a + a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(ioprobe::jacobi_eigen(m).eigenvalues.data());
}
BENCHMARK(BM_Jacobi)->Arg(16)->Arg(32)->Arg(64);

void BM_PowerIteration(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ioprobe::Plant plant(ioprobe::random_stable_plant(11, 20, n));
  ioprobe::GainConfig cfg;
  cfg.stop.max_iterations = 50;
  cfg.stop.max_samples = 1000000;
  for (auto _ : state) {
    ioprobe::ProbeSession session(plant);
    benchmark::DoNotOptimize(ioprobe::estimate_gain(session, cfg).gamma_hat);
  }
}
BENCHMARK(BM_PowerIteration)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
