#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "etale/cocycle.hpp"
#include "etale/group.hpp"
#include "etale/groupoid.hpp"

namespace etale {

enum class GroupTag {
  Trivial,
  Finite,
  FinitelyGeneratedAbelian,
  LocallyFinite,
  PolynomialGrowthFlag,
  SemidirectOfAbelians,
  Unknown,
};
std::string to_string(GroupTag t);
std::optional<GroupTag> parse_group_tag(const std::string& s);

enum class Provenance { Derived, Asserted, None };
std::string to_string(Provenance p);

struct GroupClass {
  GroupTag tag = GroupTag::Unknown;
  Provenance provenance = Provenance::None;
  std::string note;
};

// Tag derivable from the constructor; `asserted` is echoed (with Asserted
// provenance) only when nothing can be derived.
GroupClass classify_group(const Group& g, std::optional<GroupTag> asserted = std::nullopt);
// The base of Lamplighter(m): a direct sum of copies of Z_m.
GroupClass classify_lamplighter_base(std::int64_t m);
// Class of an isotropy fiber (subgroup of the acting group).
GroupClass classify_fiber(const FiberCocycle& fiber, std::optional<GroupTag> asserted = std::nullopt);

enum class WeakContainment { HoldsByAmenability, Asserted, Unknown };
std::string to_string(WeakContainment w);

struct WeakContainmentStatus {
  WeakContainment flag = WeakContainment::Unknown;
  std::string note;
};

WeakContainmentStatus weak_containment_status(const GroupoidModel& model, const TwoCocycle& sigma);

// Classes whose (twisted) l^1-algebras are known to be C*-unique.
std::set<GroupTag> default_catalog();

struct ChainStep {
  std::string id;
  std::string statement;
  std::string evidence;
  Provenance provenance = Provenance::Derived;
};

enum class Outcome { CStarUnique, Inconclusive };
std::string to_string(Outcome o);

struct UniquenessVerdict {
  Outcome outcome = Outcome::Inconclusive;
  std::string route;   // "trivial-isotropy" or "fiber-classification" when unique
  std::string reason;  // first obstruction when inconclusive
  std::vector<ChainStep> chain;
};

struct AnalyzeOptions {
  std::set<GroupTag> catalog = default_catalog();
  // Applied to fibers whose class cannot be derived.
  std::optional<GroupTag> asserted_fiber_class;
  // Skip the trivial-isotropy route.
  bool fiber_route_only = false;
  std::size_t fiber_bound = 64;
  std::size_t max_units = 4096;
};

UniquenessVerdict analyze(const TwoCocycle& sigma, std::size_t depth, const AnalyzeOptions& options = {});

}  // namespace etale
