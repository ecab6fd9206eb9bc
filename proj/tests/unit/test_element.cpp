#include <random>

#include "doctest.h"
#include "etale/element.hpp"
#include "etale/error.hpp"

using namespace etale;

namespace {

Element random_element(const ModelPtr& m, std::mt19937& rng, int terms) {
  auto arrows = m->arrows();
  Element f(m);
  std::uniform_int_distribution<int> c(-3, 3);
  for (int i = 0; i < terms; ++i) {
    const auto& a = arrows[rng() % arrows.size()];
    f.add(a, Cyclotomic::gaussian(c(rng), c(rng)));
  }
  return f;
}

// Direct double sum over all composable pairs.
std::map<Arrow, std::complex<double>> oracle_convolve(const TwoCocycle& s, const Element& f, const Element& g) {
  const auto& m = *f.model();
  std::map<Arrow, std::complex<double>> out;
  for (const auto& a : m.arrows())
    for (const auto& b : m.arrows()) {
      if (m.source(a) != m.range(b)) continue;
      out[m.compose(a, b)] += f.at(a).to_complex() * g.at(b).to_complex() * s.eval(a, b).to_complex();
    }
  return out;
}

// Z4 x Z4 on six points: a 4-cycle on {0,1,2,3}, and its square combined
// with the swap of 4 and 5.
std::shared_ptr<TransformationGroupoid> z2_action() {
  return std::make_shared<TransformationGroupoid>(
      6, Group::product_of_cyclics({4, 4}),
      std::vector<std::vector<std::int64_t>>{{1, 2, 3, 0, 4, 5}, {2, 3, 0, 1, 5, 4}});
}

TwoCocycle quarter_twist(const ModelPtr& m) {
  auto g = std::make_shared<GroupGroupoid>(Group::product_of_cyclics({4, 4}));
  return TwoCocycle::pullback(m, TwoCocycle::bicharacter(g, {{0, mpq_class(1, 4)}, {0, 0}}));
}

}  // namespace

TEST_CASE("pair groupoid all-ones square") {
  auto pair = std::make_shared<PairGroupoid>(2);
  Element ones(pair);
  for (auto& a : pair->arrows()) ones.add(a, 1);
  auto sq = convolve(TwoCocycle::trivial(pair), ones, ones);
  CHECK(sq == ones.scaled(2));
  CHECK(i_norm(ones).value == doctest::Approx(2));
  auto p3 = std::make_shared<PairGroupoid>(3);
  Element ones3(p3);
  for (auto& a : p3->arrows()) ones3.add(a, 1);
  CHECK(i_norm(ones3).exact == AbsSum::of(3));
}

TEST_CASE("deltas convolve with the cocycle phase") {
  auto g = std::make_shared<GroupGroupoid>(Group::zd(2));
  auto sigma = TwoCocycle::bicharacter(g, {{0, mpq_class(1, 4)}, {0, 0}});
  Arrow a = GroupArrow{{{1, 0}}}, b = GroupArrow{{{0, 1}}};
  auto ab = convolve(sigma, delta(g, a), delta(g, b));
  CHECK(ab.size() == 1);
  CHECK(ab.at(GroupArrow{{{1, 1}}}) == Cyclotomic::i());
  CHECK(convolve(sigma, delta(g, b), delta(g, a)).at(GroupArrow{{{1, 1}}}) == Cyclotomic(1));
}

TEST_CASE("involution on Z") {
  auto z = std::make_shared<GroupGroupoid>(Group::zd(1));
  Element f(z);
  f.add(GroupArrow{{{1}}}, Cyclotomic::i());
  auto fs = involve(TwoCocycle::trivial(z), f);
  CHECK(fs.size() == 1);
  CHECK(fs.at(GroupArrow{{{-1}}}) == Cyclotomic::gaussian(0, -1));
  Element h(z);
  h.add(GroupArrow{{{0}}}, 1);
  h.add(GroupArrow{{{1}}}, 1);
  h.add(GroupArrow{{{2}}}, Cyclotomic::i());
  CHECK(i_norm(h).exact == AbsSum::of(3));
}

TEST_CASE("convolution matches the brute-force oracle and is associative") {
  std::mt19937 rng(11);
  auto t = z2_action();
  auto sigma = quarter_twist(t);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = random_element(t, rng, 6), g = random_element(t, rng, 6), h = random_element(t, rng, 6);
    auto fg = convolve(sigma, f, g);
    auto want = oracle_convolve(sigma, f, g);
    for (const auto& a : t->arrows()) CHECK(std::abs(fg.at(a).to_complex() - want[a]) < 1e-12);
    CHECK(convolve(sigma, fg, h) == convolve(sigma, f, convolve(sigma, g, h)));
    CHECK(involve(sigma, fg) == convolve(sigma, involve(sigma, g), involve(sigma, f)));
    CHECK(involve(sigma, involve(sigma, f)) == f);
    // I-norm against a direct scan of fibers
    double best = 0;
    for (const auto& x : t->units()) {
      double r = 0, s = 0;
      for (const auto& [sup, c] : f.terms()) {
        const auto& a = std::get<Arrow>(sup);
        if (t->range(a) == x) r += std::abs(c.to_complex());
        if (t->source(a) == x) s += std::abs(c.to_complex());
      }
      best = std::max({best, r, s});
    }
    CHECK(i_norm(f).value == doctest::Approx(best).epsilon(1e-12));
    CHECK(i_norm(to_float(f)) == doctest::Approx(best).epsilon(1e-12));
    CHECK(i_norm(fg).value <= i_norm(f).value * i_norm(g).value + 1e-9);
  }
}

TEST_CASE("full shift bundles") {
  auto full = std::make_shared<CylinderShiftGroupoid>(Subshift(2, {}));
  Element f(full);
  f.add(ArrowBundle{Cylinder{{{0, 0}}}, 1}, 1);
  CHECK(i_norm(f).exact == AbsSum::of(1));
  CHECK_THROWS_AS(f.add(ShiftArrow{SequencePoint::periodic({0}), 1}, 1), Error);
  auto sigma = TwoCocycle::trivial(full);
  auto fs = involve(sigma, f);
  CHECK(fs.terms().begin()->first == Support{ArrowBundle{Cylinder{{{-1, 0}}}, -1}});
  // [0]=0 and [0]=1 split the unit
  Element split(full);
  split.add(ArrowBundle{Cylinder{{{0, 0}}}, 0}, 1);
  split.add(ArrowBundle{Cylinder{{{0, 1}}}, 0}, 1);
  CHECK(equal_as_functions(split, unit_function(full)));
  CHECK_FALSE(split == unit_function(full));
  // f* f is the indicator of the source set, f f* that of the range set
  Element src(full), rng(full);
  src.add(ArrowBundle{Cylinder{{{-1, 0}}}, 0}, 1);
  rng.add(ArrowBundle{Cylinder{{{0, 0}}}, 0}, 1);
  CHECK(equal_as_functions(convolve(sigma, involve(sigma, f), f), src));
  CHECK(equal_as_functions(convolve(sigma, f, involve(sigma, f)), rng));
  auto x = SequencePoint::periodic({0});
  CHECK(f.at(ShiftArrow{x, 1}) == Cyclotomic(1));
  CHECK(f.at(ShiftArrow{SequencePoint::periodic({1}), 1}) == Cyclotomic(0));
}

TEST_CASE("restriction to isotropy fibers is multiplicative and isometric") {
  std::mt19937 rng(5);
  auto t = z2_action();
  auto sigma = quarter_twist(t);
  for (std::int64_t x = 0; x < 6; ++x) {
    auto fiber = std::make_shared<const FiberCocycle>(restrict_to_fiber(sigma, x, 64));
    std::vector<Arrow> iso;
    for (const auto& a : t->arrows())
      if (t->is_isotropy(a) && t->range(a) == Unit{x}) iso.push_back(a);
    REQUIRE(!iso.empty());
    for (int trial = 0; trial < 3; ++trial) {
      Element f(t), g(t);
      for (int k = 0; k < 4; ++k) {
        f.add(iso[rng() % iso.size()], Cyclotomic::gaussian(static_cast<int>(rng() % 5) - 2, 1));
        g.add(iso[rng() % iso.size()], Cyclotomic::gaussian(1, static_cast<int>(rng() % 5) - 2));
      }
      auto pf = psi_restrict(fiber, f, x), pg = psi_restrict(fiber, g, x);
      auto pfg = psi_restrict(fiber, convolve(sigma, f, g), x);
      CHECK(pfg.coefficients == fiber_convolve(pf, pg).coefficients);
      CHECK(pf.l1_norm() == isotropy_i_norm(f).exact);
      CHECK(quotient_i_norm(f, x).exact == pf.l1_norm());
      CHECK(iota_embed(f) == f);
    }
  }
}

TEST_CASE("non-isotropy support is rejected") {
  auto pair = std::make_shared<PairGroupoid>(2);
  auto f = delta(pair, PairArrow{0, 1});
  CHECK_THROWS_AS(iota_embed(f), Error);
  CHECK_THROWS_AS(isotropy_i_norm(f), Error);
}

TEST_CASE("unit-supported multipliers commute with convolution") {
  std::mt19937 rng(17);
  auto t = z2_action();
  auto sigma = quarter_twist(t);
  Element g(t);
  for (const auto& x : t->units()) g.add(t->unit_arrow(x), static_cast<long>(rng() % 7));
  for (int trial = 0; trial < 4; ++trial) {
    auto f = random_element(t, rng, 7);
    CHECK(c0_multiply(g, f) == convolve(sigma, g, f));
    CHECK(c0_multiply_right(f, g) == convolve(sigma, f, g));
  }
  CHECK_THROWS_AS(c0_multiply(random_element(t, rng, 3) + delta(t, ActionArrow{0, {{1, 0}}}), g), Error);
}
