#include <benchmark/benchmark.h>

#include <random>

#include "etale/element.hpp"
#include "etale/rep.hpp"
#include "random_groupoid.hpp"

using namespace etale;

namespace {

void BM_ConvolveRandomFinite(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto inst = testing::random_instance(rng, 200);
  const auto terms = static_cast<std::size_t>(state.range(0));
  auto f = testing::random_element(inst.model, rng, terms, inst.level);
  auto g = testing::random_element(inst.model, rng, terms, inst.level);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(inst.sigma, f, g));
  state.SetLabel(std::to_string(inst.model->arrow_count()) + " arrows");
}
BENCHMARK(BM_ConvolveRandomFinite)->Arg(8)->Arg(32)->Arg(128);

void BM_ConvolveRotation(benchmark::State& state) {
  auto z2 = std::make_shared<GroupGroupoid>(Group::zd(2));
  auto s = TwoCocycle::bicharacter(z2, {{0, mpq_class(1, 4)}, {0, 0}});
  const auto n = state.range(0);
  Element f(z2);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) f.add(GroupArrow{{{i, j}}}, Cyclotomic::gaussian(i - j, 1));
  for (auto _ : state) benchmark::DoNotOptimize(convolve(s, f, f));
}
BENCHMARK(BM_ConvolveRotation)->Arg(4)->Arg(8)->Arg(16);

void BM_RegularRepZ(benchmark::State& state) {
  auto z = std::make_shared<GroupGroupoid>(Group::zd(1));
  Element f(z);
  f.add(GroupArrow{{{0}}}, 1);
  f.add(GroupArrow{{{1}}}, 1);
  f.add(GroupArrow{{{2}}}, Cyclotomic::i());
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(regular_rep_matrix(TwoCocycle::trivial(z), f, std::int64_t{0}, n));
}
BENCHMARK(BM_RegularRepZ)->Arg(64)->Arg(256)->Arg(512);

void BM_OperatorNorm(benchmark::State& state) {
  auto z = std::make_shared<GroupGroupoid>(Group::zd(1));
  Element f(z);
  f.add(GroupArrow{{{0}}}, 1);
  f.add(GroupArrow{{{1}}}, 1);
  f.add(GroupArrow{{{2}}}, Cyclotomic::i());
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rep = regular_rep_matrix(TwoCocycle::trivial(z), f, std::int64_t{0}, n);
  OperatorNormOptions opt;
  opt.dense_limit = state.range(1) ? n : 0;
  opt.tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(rep.matrix, opt));
}
BENCHMARK(BM_OperatorNorm)->Args({128, 1})->Args({128, 0})->Args({512, 1})->Args({512, 0})->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  auto p = std::make_shared<PairGroupoid>(state.range(0));
  const auto s = TwoCocycle::trivial(p);
  for (auto _ : state) benchmark::DoNotOptimize(decompose_finite_cstar(s));
}
BENCHMARK(BM_Decompose)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_DecomposeTwistedAction(benchmark::State& state) {
  auto t = std::make_shared<TransformationGroupoid>(
      6, Group::product_of_cyclics({4, 4}),
      std::vector<std::vector<std::int64_t>>{{1, 2, 3, 0, 4, 5}, {2, 3, 0, 1, 5, 4}});
  auto g = std::make_shared<GroupGroupoid>(Group::product_of_cyclics({4, 4}));
  const auto s = TwoCocycle::pullback(t, TwoCocycle::bicharacter(g, {{0, mpq_class(1, 4)}, {0, 0}}));
  for (auto _ : state) benchmark::DoNotOptimize(decompose_finite_cstar(s));
}
BENCHMARK(BM_DecomposeTwistedAction)->Unit(benchmark::kMillisecond);

void BM_CylinderINorm(benchmark::State& state) {
  auto shift = std::make_shared<CylinderShiftGroupoid>(Subshift(2, {}), 8, 24);
  Element f(shift);
  const auto width = state.range(0);
  for (std::int64_t k = 0; k < width; ++k) {
    Cylinder c;
    for (std::int64_t p = 0; p <= k; ++p) c.symbols[p] = static_cast<Symbol>((k + p) % 2);
    f.add(ArrowBundle{c, k % 3 - 1}, Cyclotomic::gaussian(1, k));
  }
  for (auto _ : state) benchmark::DoNotOptimize(i_norm(f));
}
BENCHMARK(BM_CylinderINorm)->Arg(4)->Arg(8)->Arg(12);

}  // namespace
BENCHMARK_MAIN();
