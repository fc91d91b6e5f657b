#include <benchmark/benchmark.h>

#include "bcpnn/network.hpp"
#include "bcpnn/rng.hpp"

using namespace bcpnn;

namespace {

RunConfig bench_config(const std::string& preset) {
  RunConfig cfg;
  cfg.apply_variant_preset(preset);
  cfg.H_INP = cfg.H_INPRC = 784;
  cfg.H_HID = 100;
  cfg.M_HID = 100;
  return cfg;
}

Eigen::VectorXd bench_image(uint64_t salt) {
  Eigen::VectorXd img(784);
  rng::Sequence seq(salt, rng::Stream::test);
  for (int p = 0; p < 784; ++p)
    img[p] = seq.next_double() < 0.8 ? 0.0 : seq.next_double();
  return img;
}

void BM_SoftmaxHid(benchmark::State& state) {
  PopulationShape shape{100, 100};
  Eigen::VectorXd v(shape.units()), pi(shape.units());
  rng::Sequence seq(1, rng::Stream::test);
  for (int i = 0; i < v.size(); ++i) v[i] = 20.0 * seq.next_double() - 10.0;
  for (auto _ : state) {
    softmax_hypercolumn(v, shape, pi);
    benchmark::DoNotOptimize(pi.data());
  }
}
BENCHMARK(BM_SoftmaxHid);

void BM_TrainPatternSpspk(benchmark::State& state) {
  Network net(bench_config("SpspkFull"));
  Eigen::VectorXd img = bench_image(3);
  for (auto _ : state) net.run_pattern(img, RunMode::train, false);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrainPatternSpspk)->Unit(benchmark::kMillisecond);

void BM_TrainPatternRate(benchmark::State& state) {
  Network net(bench_config("RateFull"));
  Eigen::VectorXd img = bench_image(3);
  for (auto _ : state) net.run_pattern(img, RunMode::train, false);
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrainPatternRate)->Unit(benchmark::kMillisecond);

void BM_EvalPatternSpspk(benchmark::State& state) {
  Network net(bench_config("SpspkFull"));
  Eigen::MatrixXd imgs(784, 1);
  imgs.col(0) = bench_image(5);
  for (auto _ : state) net.evaluate(imgs, {1, {}});
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalPatternSpspk)->Unit(benchmark::kMillisecond);

void BM_FfwdWeightRefresh(benchmark::State& state) {
  Network net(bench_config("SpspkFull"));
  Eigen::VectorXd img = bench_image(7);
  net.run_pattern(img, RunMode::train, false);
  for (auto _ : state) {
    net.ffwd().mark_weights_dirty();
    net.ffwd().recompute_weights();
  }
}
BENCHMARK(BM_FfwdWeightRefresh)->Unit(benchmark::kMillisecond);

void BM_RewireStepFfwd(benchmark::State& state) {
  Network net(bench_config("SpspkFull"));
  Eigen::VectorXd img = bench_image(9);
  for (int i = 0; i < 4; ++i) net.run_pattern(img, RunMode::train, false);
  for (auto _ : state) {
    auto r = net.ffwd().rewire_step(100);
    benchmark::DoNotOptimize(r.flips);
  }
}
BENCHMARK(BM_RewireStepFfwd)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
