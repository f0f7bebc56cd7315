#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "whitney/cutoff.hpp"
#include "whitney/expr.hpp"
#include "whitney/extension.hpp"
#include "whitney/jet.hpp"
#include "whitney/random.hpp"
#include "whitney/scene_io.hpp"

using namespace whitney;

namespace {

PointJet<double> random_jet(int n, int p, Rng& rng) {
  auto j = PointJet<double>::zero(n, p, std::vector<double>(static_cast<std::size_t>(n), 0.25));
  for (auto& c : j.coeffs()) c = rng.uniform(-1.0, 1.0);
  return j;
}

Scene corpus(const char* name) { return load_scene(std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json"); }

}  // namespace

static void BM_JetMul(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0)), p = static_cast<int>(state.range(1));
  const auto a = random_jet(n, p, rng), b = random_jet(n, p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(jet_mul(a, b));
}
BENCHMARK(BM_JetMul)->Args({1, 4})->Args({2, 4})->Args({3, 4});

static void BM_JetCompose(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0)), p = static_cast<int>(state.range(1));
  std::vector<PointJet<double>> inner;
  std::vector<double> base;
  for (int i = 0; i < n; ++i) {
    inner.push_back(random_jet(n, p, rng));
    base.push_back(inner.back().value());
  }
  auto outer = random_jet(n, p, rng);
  outer = PointJet<double>(outer.index_ptr(), base, outer.coeffs());
  for (auto _ : state) benchmark::DoNotOptimize(jet_compose(outer, inner));
}
BENCHMARK(BM_JetCompose)->Args({1, 4})->Args({2, 4})->Args({3, 3});

static void BM_ExprJet(benchmark::State& state) {
  const auto x = ExprFn::variable(2, 0), y = ExprFn::variable(2, 1);
  const auto f = x.pow(2) * y + ExprFn::constant(2, 1.0) / (ExprFn::constant(2, 1.0) + x * x + y * y);
  const std::vector<double> at = {0.3, -0.7};
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_jet(f, at, order));
}
BENCHMARK(BM_ExprJet)->DenseRange(1, 4);

static void BM_CutoffValue(benchmark::State& state) {
  const auto specs = load_cutoff_specs(std::string(WHITNEY_SCENE_DIR) + "/cutoffs.json");
  const auto omega = build_cutoff(specs[static_cast<std::size_t>(state.range(0))].spec);
  const int n = omega.spec().n;
  Rng rng(3);
  std::vector<std::vector<double>> xs;
  for (int k = 0; k < 256; ++k) {
    std::vector<double> x;
    for (int i = 0; i < n; ++i) x.push_back(rng.uniform(-0.5, 1.5));
    xs.push_back(std::move(x));
  }
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(omega.value(xs[k++ & 255]));
  state.SetLabel(specs[static_cast<std::size_t>(state.range(0))].name);
}
BENCHMARK(BM_CutoffValue)->DenseRange(0, 2);

static void BM_ExtendField(benchmark::State& state) {
  const char* names[] = {"finite_set", "half_line", "parabola", "square_boundary", "full_space"};
  const auto scene = corpus(names[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(extend_field(scene));
  state.SetLabel(names[state.range(0)]);
}
BENCHMARK(BM_ExtendField)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

static void BM_ExtensionValue(benchmark::State& state) {
  const auto scene = corpus("square_boundary");
  const auto f = extend_field(scene);
  Rng rng(4);
  std::vector<std::vector<double>> xs;
  for (int k = 0; k < 256; ++k) xs.push_back({rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)});
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(f.value(xs[k++ & 255]));
}
BENCHMARK(BM_ExtensionValue);

BENCHMARK_MAIN();
