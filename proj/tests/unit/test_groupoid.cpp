#include <set>

#include "doctest.h"
#include "etale/error.hpp"
#include "etale/groupoid.hpp"

using namespace etale;

namespace {

void check_axioms(const GroupoidModel& m) {
  const auto arrows = m.arrows();
  for (auto& a : arrows) {
    CHECK(m.invert(m.invert(a)) == a);
    CHECK(m.compose(a, m.invert(a)) == m.unit_arrow(m.range(a)));
    for (auto& b : arrows) {
      if (!m.composable(a, b)) continue;
      auto ab = m.compose(a, b);
      CHECK(m.range(ab) == m.range(a));
      CHECK(m.source(ab) == m.source(b));
      CHECK(m.invert(ab) == m.compose(m.invert(b), m.invert(a)));
      for (auto& c : arrows) {
        if (m.composable(b, c)) CHECK(m.compose(ab, c) == m.compose(a, m.compose(b, c)));
      }
    }
  }
  std::size_t total_s = 0, total_r = 0;
  for (auto& x : m.units()) {
    total_s += m.fiber(x, FiberDirection::Source, 100000).arrows.size();
    total_r += m.fiber(x, FiberDirection::Range, 100000).arrows.size();
    for (auto& a : m.fiber(x, FiberDirection::Source, 100000).arrows) CHECK(m.source(a) == x);
    for (auto& a : m.fiber(x, FiberDirection::Range, 100000).arrows) CHECK(m.range(a) == x);
  }
  CHECK(total_s == arrows.size());
  CHECK(total_r == arrows.size());
}

}  // namespace

TEST_CASE("pair groupoid") {
  PairGroupoid p(3);
  CHECK(p.arrows().size() == 9);
  CHECK(p.units().size() == 3);
  CHECK(p.compose(PairArrow{0, 1}, PairArrow{1, 2}) == Arrow{PairArrow{0, 2}});
  CHECK_THROWS_AS(p.compose(PairArrow{0, 1}, PairArrow{2, 0}), Error);
  CHECK(p.invert(PairArrow{0, 2}) == Arrow{PairArrow{2, 0}});
  check_axioms(p);
  PairGroupoid p4(4);
  auto f = p4.fiber(std::int64_t{1}, FiberDirection::Source, 10);
  CHECK(f.arrows == std::vector<Arrow>{PairArrow{0, 1}, PairArrow{1, 1}, PairArrow{2, 1}, PairArrow{3, 1}});
  CHECK_FALSE(f.truncated);
}

TEST_CASE("group groupoids") {
  GroupGroupoid z(Group::zd(1));
  CHECK(z.compose(GroupArrow{{{2}}}, GroupArrow{{{3}}}) == Arrow{GroupArrow{{{5}}}});
  GroupGroupoid z2(Group::zd(2));
  CHECK(z2.invert(GroupArrow{{{1, -3}}}) == Arrow{GroupArrow{{{-1, 3}}}});
  auto f = z.fiber(std::int64_t{0}, FiberDirection::Source, 5);
  CHECK(f.truncated);
  CHECK(f.arrows.size() == 5);
  check_axioms(GroupGroupoid(Group::cyclic(5)));
  check_axioms(GroupBundleGroupoid({Group::cyclic(2), Group::product_of_cyclics({2, 3}), Group::cyclic(1)}));
}

TEST_CASE("transformation groupoids") {
  // swap on {a, b} by Z2
  TransformationGroupoid t(2, Group::cyclic(2), {{1, 0}});
  CHECK(t.range(ActionArrow{0, {{1}}}) == Unit{std::int64_t{0}});
  CHECK(t.source(ActionArrow{0, {{1}}}) == Unit{std::int64_t{1}});
  check_axioms(t);
  // Z4 through its order-2 quotient
  check_axioms(TransformationGroupoid(2, Group::cyclic(4), {{1, 0}}));
  CHECK_THROWS_AS(TransformationGroupoid(3, Group::cyclic(2), {{1, 2, 0}}), Error);
  // S3 acting on 3 points, by table
  std::vector<std::vector<std::int64_t>> s3 = {
      {0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
      {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  // right action: x.g = perm_g(x), composed as x.(gh) = (x.g).h
  std::vector<std::vector<std::int64_t>> act = {
      {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  bool built = true;
  try {
    check_axioms(TransformationGroupoid(3, Group::table(s3), act));
  } catch (const Error&) {
    built = false;
  }
  // whether this particular labelling is a right action depends on the table
  // convention; check against brute force
  bool right_action = true;
  for (int g = 0; g < 6; ++g)
    for (int h = 0; h < 6; ++h)
      for (int x = 0; x < 3; ++x)
        if (act[h][act[g][x]] != act[s3[g][h]][x]) right_action = false;
  CHECK(built == right_action);
}

TEST_CASE("lamplighter acting on a finite set") {
  // lamps toggle bit 0 of a pair (bit, position mod 2); shift moves position
  // points: 4 = (bit b, pos p) -> 2p + b
  std::vector<std::int64_t> lamp = {1, 0, 2, 3};      // toggles the bit only at position 0
  std::vector<std::int64_t> shift = {2, 3, 0, 1};     // position +1 mod 2
  TransformationGroupoid t(4, Group::lamplighter(2), {lamp, shift});
  auto l = Group::lamplighter(2);
  for (auto& g : l.enumerate(30))
    for (auto& h : l.enumerate(30))
      for (std::int64_t x = 0; x < 4; ++x) CHECK(t.act(t.act(x, g), h) == t.act(x, l.multiply(g, h)));
}

TEST_CASE("finite explicit groupoid validation") {
  // Z2 as a finite groupoid: unit 0, arrow 1 with 1*1 = 0
  FiniteExplicitGroupoid g({0}, {0, 0}, {0, 0}, {{1, 1, 0}}, {0, 1});
  check_axioms(g);
  // range violation: declare 1*1 = 1 (not invertible consistently)
  CHECK_THROWS_AS(FiniteExplicitGroupoid({0}, {0, 0}, {0, 0}, {{1, 1, 1}}, {0, 1}), Error);
  // pair groupoid on 2 points: units 0,1; arrows 2=(0,1), 3=(1,0)
  std::vector<CompositionEntry> comp = {{2, 3, 0}, {3, 2, 1}};
  FiniteExplicitGroupoid p({0, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}, comp, {0, 1, 3, 2});
  check_axioms(p);
  // r(ab) != r(a)
  try {
    FiniteExplicitGroupoid({0, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}, {{2, 3, 1}, {3, 2, 1}}, {0, 1, 3, 2});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StructureError);
    CHECK_FALSE(e.witness().empty());
  }
}

TEST_CASE("cylinder shift groupoid") {
  CylinderShiftGroupoid full(Subshift(2, {}));
  auto zero = SequencePoint::periodic({0});
  auto f = full.fiber(zero, FiberDirection::Source, 5);
  CHECK(f.arrows.size() == 5);
  std::set<std::int64_t> shifts;
  for (auto& a : f.arrows) shifts.insert(std::get<ShiftArrow>(a).shift);
  CHECK(shifts == std::set<std::int64_t>{-2, -1, 0, 1, 2});
  auto x = SequencePoint::from_parts({0}, 0, {1, 1, 0, 1}, {0});
  Arrow a = ShiftArrow{x, 2};
  CHECK(full.invert(a) == Arrow{ShiftArrow{x.shifted(2), -2}});
  CHECK(full.compose(a, full.invert(a)) == full.unit_arrow(x));
  ArrowBundle b{Cylinder{{{0, 1}}}, 1};
  ArrowBundle c{Cylinder{{{0, 0}}}, 2};
  auto bc = full.bundle_product(b, c);
  REQUIRE(bc.has_value());
  // (x,1)(x.1,2) with x_0 = 1 and x_1 = 0
  CHECK(bc->constraint == Cylinder{{{0, 1}, {1, 0}}});
  CHECK(bc->shift == 3);
  auto arrow_b = full.bundle_arrow_with_range(b, x);
  REQUIRE(arrow_b.has_value());
  auto arrow_c = full.bundle_arrow_with_range(c, unit_point(full.source(*arrow_b)));
  if (arrow_c) CHECK(full.bundle_contains(*bc, full.compose(*arrow_b, *arrow_c)));
  auto inv = full.bundle_inverse(b);
  CHECK(full.bundle_contains(inv, full.invert(*arrow_b)));
  CHECK_THROWS_AS(CylinderShiftGroupoid(Subshift(2, {{0}, {1}})), Error);
}
