// Serial reference vs OpenMP kernels. Run with --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "livrank/kernels.hpp"

namespace k = livrank::kernels;

namespace {

std::vector<std::uint8_t> noise_pixels(int w, int h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  std::mt19937 rng(1);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng());
  return px;
}

template <auto Fn>
void resample(benchmark::State& state) {
  const int src_w = 4000, src_h = 3000;
  const int dst_w = static_cast<int>(state.range(0)), dst_h = dst_w * 3 / 4;
  const auto src = noise_pixels(src_w, src_h);
  std::vector<std::uint8_t> dst(static_cast<std::size_t>(dst_w) * dst_h * 3);
  for (auto _ : state) {
    Fn(k::ConstImageView{src_w, src_h, src}, k::ImageView{dst_w, dst_h, dst});
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetItemsProcessed(state.iterations() * dst_w * dst_h);
}

template <auto Fn>
void displacement(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::int32_t> a(n), b(n);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  std::shuffle(b.begin(), b.end(), std::mt19937(2));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <auto Fn>
void aux_r2(benchmark::State& state) {
  const auto p = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(5000, p);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x));
}

}  // namespace

BENCHMARK(resample<k::serial::resample_bilinear>)->Name("resample/serial")->Arg(1200)->Arg(2400)->Unit(benchmark::kMillisecond);
BENCHMARK(resample<k::parallel::resample_bilinear>)->Name("resample/parallel")->Arg(1200)->Arg(2400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(displacement<k::serial::total_displacement>)->Name("footrule/serial")->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK(displacement<k::parallel::total_displacement>)->Name("footrule/parallel")->Arg(1 << 16)->Arg(1 << 22)->UseRealTime();
BENCHMARK(aux_r2<k::serial::auxiliary_r2>)->Name("vif_aux_r2/serial")->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(aux_r2<k::parallel::auxiliary_r2>)->Name("vif_aux_r2/parallel")->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
