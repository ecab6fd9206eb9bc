#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "etale/error.hpp"
#include "etale/rep.hpp"

using namespace etale;

namespace {

Element ones(const ModelPtr& m) {
  Element f(m);
  for (const auto& a : m->arrows()) f.add(a, 1);
  return f;
}

Element z_element(const ModelPtr& z, std::initializer_list<std::pair<std::int64_t, Cyclotomic>> terms) {
  Element f(z);
  for (const auto& [k, c] : terms) f.add(GroupArrow{{{k}}}, c);
  return f;
}

std::shared_ptr<TransformationGroupoid> action() {
  return std::make_shared<TransformationGroupoid>(
      6, Group::product_of_cyclics({4, 4}),
      std::vector<std::vector<std::int64_t>>{{1, 2, 3, 0, 4, 5}, {2, 3, 0, 1, 5, 4}});
}

std::multiset<std::size_t> dims(const BlockStructure& b) {
  std::multiset<std::size_t> out;
  for (const auto& x : b.blocks) out.insert(x.dimension);
  return out;
}

}  // namespace

TEST_CASE("pair groupoid regular representation is the coefficient array") {
  auto pair = std::make_shared<PairGroupoid>(3);
  auto rep = regular_rep_matrix(TwoCocycle::trivial(pair), ones(pair), std::int64_t{1}, 100);
  REQUIRE(rep.dimension() == 3);
  CHECK_FALSE(rep.truncated);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(rep.matrix(i, j) == std::complex<double>(1));
  CHECK(operator_norm(rep.matrix).value == doctest::Approx(3).epsilon(1e-12));
  OperatorNormOptions power;
  power.dense_limit = 0;
  power.tol = 1e-12;
  CHECK(operator_norm(rep.matrix, power).value == doctest::Approx(3).epsilon(1e-10));
  CHECK(operator_norm(ComplexMatrix(4, 4)).value == 0);
}

TEST_CASE("shift on Z") {
  auto z = std::make_shared<GroupGroupoid>(Group::zd(1));
  auto rep = regular_rep_matrix(TwoCocycle::trivial(z), z_element(z, {{1, 1}}), std::int64_t{0}, 64);
  CHECK(rep.truncated);
  std::map<std::int64_t, std::size_t> pos;
  for (std::size_t i = 0; i < rep.dimension(); ++i) pos[std::get<GroupArrow>(rep.basis[i]).g.v[0]] = i;
  for (const auto& [k, i] : pos)
    for (const auto& [l, j] : pos) CHECK(rep.matrix(j, i) == std::complex<double>(l == k + 1 ? 1 : 0));
  CHECK(operator_norm(rep.matrix).value == doctest::Approx(1).epsilon(1e-10));
  OperatorNormOptions power;
  power.dense_limit = 0;
  CHECK(operator_norm(rep.matrix, power).value == doctest::Approx(1).epsilon(1e-6));
}

TEST_CASE("regular representation is an exact *-homomorphism on finite models") {
  std::mt19937 rng(23);
  auto t = action();
  auto g = std::make_shared<GroupGroupoid>(Group::product_of_cyclics({4, 4}));
  auto sigma = TwoCocycle::pullback(t, TwoCocycle::bicharacter(g, {{0, mpq_class(1, 4)}, {0, 0}}));
  auto arrows = t->arrows();
  for (int trial = 0; trial < 6; ++trial) {
    Element f(t), h(t);
    for (int k = 0; k < 6; ++k) {
      f.add(arrows[rng() % arrows.size()], Cyclotomic::gaussian(static_cast<int>(rng() % 5) - 2, 1));
      h.add(arrows[rng() % arrows.size()], Cyclotomic::gaussian(1, static_cast<int>(rng() % 5) - 2));
    }
    for (const auto& x : t->units()) {
      auto lf = regular_rep_matrix(sigma, f, x, 1000), lh = regular_rep_matrix(sigma, h, x, 1000);
      CHECK_FALSE(lf.truncated);
      CHECK(regular_rep_matrix(sigma, convolve(sigma, f, h), x, 1000).exact == exact_product(lf.exact, lh.exact));
      CHECK(regular_rep_matrix(sigma, involve(sigma, f), x, 1000).exact == exact_adjoint(lf.exact));
      CHECK(operator_norm(lf.matrix).value <= i_norm(f).value + 1e-9);
    }
  }
}

TEST_CASE("reduced norm estimates") {
  auto t = action();
  auto sigma = TwoCocycle::trivial(t);
  auto est = reduced_norm_estimate(sigma, unit_function(t), t->units(), 1000);
  CHECK(est.lower == doctest::Approx(1));
  CHECK(est.upper == 1);
  auto p4 = std::make_shared<PairGroupoid>(4);
  auto e4 = reduced_norm_estimate(TwoCocycle::trivial(p4), ones(p4), p4->units(), 100);
  CHECK(e4.lower == doctest::Approx(4).epsilon(1e-12));
  CHECK(e4.upper_exact == AbsSum::of(4));
  CHECK(reduced_norm_estimate(sigma, unit_function(t), {}, 10).lower == 0);
}

TEST_CASE("Fourier symbol oracle") {
  auto z = std::make_shared<GroupGroupoid>(Group::zd(1));
  CHECK(fourier_symbol_norm(z_element(z, {{0, 1}, {1, 1}, {-1, 1}}), 1000) == doctest::Approx(3));
  CHECK(fourier_symbol_norm(z_element(z, {{1, 1}, {-1, -1}}), 1000) == doctest::Approx(2));
  auto f = z_element(z, {{0, 1}, {1, 1}, {2, Cyclotomic::i()}});
  const double oracle = fourier_symbol_norm(f, 100000);
  CHECK(oracle > 2.7);
  CHECK(oracle < 2.9);
  auto est = reduced_norm_estimate(TwoCocycle::trivial(z), f, {std::int64_t{0}}, 512);
  CHECK(std::abs(est.lower - oracle) < 1e-3);
  CHECK(est.upper_exact == AbsSum::of(3));
  auto pair = std::make_shared<PairGroupoid>(2);
  CHECK_THROWS_AS(fourier_symbol_norm(ones(pair), 10), Error);
}

TEST_CASE("lower bounds grow with nested truncations") {
  auto z2 = std::make_shared<GroupGroupoid>(Group::zd(2));
  Element f(z2);
  f.add(GroupArrow{{{0, 0}}}, 1);
  f.add(GroupArrow{{{1, 0}}}, Cyclotomic::i());
  f.add(GroupArrow{{{0, 1}}}, Cyclotomic::gaussian(1, 1));
  double prev = 0;
  for (std::size_t n : {16, 32, 64, 128}) {
    auto est = reduced_norm_estimate(TwoCocycle::trivial(z2), f, {std::int64_t{0}}, n);
    CHECK(est.lower >= prev);
    CHECK(est.lower <= est.upper);
    prev = est.lower;
  }
}

TEST_CASE("finite block decompositions") {
  auto z2 = std::make_shared<GroupGroupoid>(Group::cyclic(2));
  CHECK(dims(decompose_finite_cstar(TwoCocycle::trivial(z2))) == std::multiset<std::size_t>{1, 1});
  auto p4 = std::make_shared<PairGroupoid>(4);
  auto b4 = decompose_finite_cstar(TwoCocycle::trivial(p4));
  CHECK(dims(b4) == std::multiset<std::size_t>{4});
  CHECK(b4.center_dimension == 1);
  auto klein = std::make_shared<GroupGroupoid>(Group::product_of_cyclics({2, 2}));
  auto twisted = TwoCocycle::bicharacter(klein, {{0, 0}, {mpq_class(1, 2), 0}});
  auto bt = decompose_finite_cstar(twisted);
  CHECK(dims(bt) == std::multiset<std::size_t>{2});
  CHECK(bt.separation_above >= 1e6);
  CHECK(bt.separation_below >= 1e6);
  CHECK(dims(decompose_finite_cstar(TwoCocycle::trivial(klein))) == std::multiset<std::size_t>{1, 1, 1, 1});
  DecomposeOptions rotated;
  rotated.basis_seed = 99;
  CHECK(dims(decompose_finite_cstar(twisted, rotated)) == std::multiset<std::size_t>{2});
  // S3: two characters and one 2-dimensional irreducible
  std::vector<std::vector<std::int64_t>> s3 = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 5, 3, 4}, {2, 0, 1, 4, 5, 3},
                                               {3, 4, 5, 0, 1, 2}, {4, 5, 3, 2, 0, 1}, {5, 3, 4, 1, 2, 0}};
  auto g = std::make_shared<GroupGroupoid>(Group::table(s3));
  auto bs = decompose_finite_cstar(TwoCocycle::trivial(g), rotated);
  CHECK(dims(bs) == std::multiset<std::size_t>{1, 1, 2});
  // groupoid with two orbits: Pair(2) plus a Z2 bundle point
  auto t = std::make_shared<TransformationGroupoid>(3, Group::cyclic(2), std::vector<std::vector<std::int64_t>>{{1, 0, 2}});
  CHECK(dims(decompose_finite_cstar(TwoCocycle::trivial(t))) == std::multiset<std::size_t>{2, 1, 1});
}
