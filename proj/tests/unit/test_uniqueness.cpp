#include "doctest.h"
#include "etale/error.hpp"
#include "etale/uniqueness.hpp"

using namespace etale;

namespace {

bool has_step(const UniquenessVerdict& v, const std::string& id) {
  for (const auto& s : v.chain)
    if (s.id == id) return true;
  return false;
}

}  // namespace

TEST_CASE("group classification") {
  CHECK(classify_group(Group::cyclic(1)).tag == GroupTag::Trivial);
  CHECK(classify_group(Group::cyclic(2)).tag == GroupTag::Finite);
  CHECK(classify_group(Group::zd(3)).tag == GroupTag::FinitelyGeneratedAbelian);
  CHECK(classify_group(Group::lamplighter(2)).tag == GroupTag::SemidirectOfAbelians);
  CHECK(classify_lamplighter_base(2).tag == GroupTag::LocallyFinite);
  CHECK(classify_group(Group::cyclic(2), GroupTag::Unknown).provenance == Provenance::Derived);
}

TEST_CASE("weak containment") {
  auto pair = std::make_shared<PairGroupoid>(3);
  auto sigma = TwoCocycle::trivial(pair);
  CHECK(weak_containment_status(*pair, sigma).flag == WeakContainment::HoldsByAmenability);
  auto shift = std::make_shared<CylinderShiftGroupoid>(Subshift(2, {}));
  CHECK(weak_containment_status(*shift, TwoCocycle::trivial(shift)).flag == WeakContainment::HoldsByAmenability);
  pair->set_amenability(AmenabilityMode::Withheld);
  CHECK(weak_containment_status(*pair, sigma).flag == WeakContainment::Unknown);
  pair->set_amenability(AmenabilityMode::Asserted);
  CHECK(weak_containment_status(*pair, sigma).flag == WeakContainment::Asserted);
}

TEST_CASE("principal routes") {
  auto pair = std::make_shared<PairGroupoid>(5);
  auto v = analyze(TwoCocycle::trivial(pair), 2);
  CHECK(v.outcome == Outcome::CStarUnique);
  CHECK(v.route == "trivial-isotropy");
  AnalyzeOptions fibers;
  fibers.fiber_route_only = true;
  auto w = analyze(TwoCocycle::trivial(pair), 2, fibers);
  CHECK(w.outcome == Outcome::CStarUnique);
  CHECK(w.route == "fiber-classification");

  auto shift = std::make_shared<CylinderShiftGroupoid>(Subshift(2, {}));
  auto s = analyze(TwoCocycle::trivial(shift), 4);
  CHECK(s.outcome == Outcome::CStarUnique);
  REQUIRE(s.chain.size() >= 3);
  CHECK(s.chain[1].id == "weak-containment");
  CHECK(s.chain[2].id == "topological-principality");
  CHECK(has_step(s, "shift-scenario"));
}

TEST_CASE("fiber classification route") {
  // Z4 acting on two points through its order-2 quotient
  auto t = std::make_shared<TransformationGroupoid>(2, Group::cyclic(4), std::vector<std::vector<std::int64_t>>{{1, 0}});
  auto v = analyze(TwoCocycle::trivial(t), 3);
  CHECK(v.outcome == Outcome::CStarUnique);
  CHECK(v.route == "fiber-classification");
  CHECK(has_step(v, "coverage"));
  // twisted Klein four group goes through the extension
  auto klein = std::make_shared<GroupGroupoid>(Group::product_of_cyclics({2, 2}));
  auto bc = TwoCocycle::bicharacter(klein, {{0, 0}, {mpq_class(1, 2), 0}});
  auto k = analyze(bc, 2);
  CHECK(k.outcome == Outcome::CStarUnique);
  CHECK(has_step(k, "mackey-reduction"));
  // rotation twist on Z^2
  auto z2 = std::make_shared<GroupGroupoid>(Group::zd(2));
  auto rot = analyze(TwoCocycle::bicharacter(z2, {{0, mpq_class(1, 4)}, {0, 0}}), 2);
  CHECK(rot.outcome == Outcome::CStarUnique);
  CHECK(has_step(rot, "mackey-reduction"));
  CHECK(analyze(TwoCocycle::trivial(std::make_shared<GroupGroupoid>(Group::lamplighter(2))), 2).outcome ==
        Outcome::CStarUnique);
}

TEST_CASE("inconclusive inputs") {
  auto pair = std::make_shared<PairGroupoid>(3);
  pair->set_amenability(AmenabilityMode::Withheld);
  auto v = analyze(TwoCocycle::trivial(pair), 2);
  CHECK(v.outcome == Outcome::Inconclusive);
  CHECK(v.reason.find("weak containment") != std::string::npos);
  // isolated periodic orbit: nonprincipal on an infinite unit space
  auto alt = std::make_shared<CylinderShiftGroupoid>(Subshift(2, {{0, 0}, {1, 1}}));
  CHECK(analyze(TwoCocycle::trivial(alt), 3).outcome == Outcome::Inconclusive);
  AnalyzeOptions narrow;
  narrow.catalog = {GroupTag::Trivial};
  auto t = std::make_shared<TransformationGroupoid>(2, Group::cyclic(4), std::vector<std::vector<std::int64_t>>{{1, 0}});
  CHECK(analyze(TwoCocycle::trivial(t), 3, narrow).outcome == Outcome::Inconclusive);
}
