#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "safecorridor/gmm.hpp"

namespace {

using namespace safecorridor;

std::vector<Eigen::VectorXd> blob_samples(std::size_t n) {
  Rng rng(11);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = (i % 4 < 2) ? -1.5 : 1.5;
    const double cy = (i % 2 == 0) ? -1.5 : 1.5;
    Eigen::VectorXd p(2);
    p << cx + noise(rng), cy + noise(rng);
    pts.push_back(p);
  }
  return pts;
}

void BM_MeanShift(benchmark::State& state) {
  const auto pts = blob_samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(meanshift_cluster(pts, 0.1745));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MeanShift)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MixturePdf(benchmark::State& state) {
  const auto pts = blob_samples(2000);
  const GaussianMixture gmm = fit_mixture(pts, 0.3);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  for (auto _ : state) benchmark::DoNotOptimize(mixture_pdf(x, gmm));
}
BENCHMARK(BM_MixturePdf);

void BM_SampleMixture(benchmark::State& state) {
  const auto pts = blob_samples(2000);
  const GaussianMixture gmm = fit_mixture(pts, 0.3);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mixture(gmm, rng));
}
BENCHMARK(BM_SampleMixture);

}  // namespace
