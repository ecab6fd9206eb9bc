#include "etale/uniqueness.hpp"

#include "etale/error.hpp"
#include "etale/isotropy.hpp"

namespace etale {

std::string to_string(GroupTag t) {
  switch (t) {
    case GroupTag::Trivial: return "Trivial";
    case GroupTag::Finite: return "Finite";
    case GroupTag::FinitelyGeneratedAbelian: return "FinitelyGeneratedAbelian";
    case GroupTag::LocallyFinite: return "LocallyFinite";
    case GroupTag::PolynomialGrowthFlag: return "PolynomialGrowthFlag";
    case GroupTag::SemidirectOfAbelians: return "SemidirectOfAbelians";
    case GroupTag::Unknown: return "Unknown";
  }
  return "?";
}

std::optional<GroupTag> parse_group_tag(const std::string& s) {
  for (auto t : {GroupTag::Trivial, GroupTag::Finite, GroupTag::FinitelyGeneratedAbelian, GroupTag::LocallyFinite,
                 GroupTag::PolynomialGrowthFlag, GroupTag::SemidirectOfAbelians, GroupTag::Unknown})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Derived: return "derived";
    case Provenance::Asserted: return "asserted";
    case Provenance::None: return "none";
  }
  return "?";
}

std::string to_string(WeakContainment w) {
  switch (w) {
    case WeakContainment::HoldsByAmenability: return "HoldsByAmenability";
    case WeakContainment::Asserted: return "Asserted";
    case WeakContainment::Unknown: return "Unknown";
  }
  return "?";
}

std::string to_string(Outcome o) { return o == Outcome::CStarUnique ? "CStarUnique" : "Inconclusive"; }

std::set<GroupTag> default_catalog() {
  return {GroupTag::Trivial,       GroupTag::Finite,
          GroupTag::FinitelyGeneratedAbelian, GroupTag::LocallyFinite,
          GroupTag::PolynomialGrowthFlag,     GroupTag::SemidirectOfAbelians};
}

namespace {

GroupClass unknown_or_asserted(std::optional<GroupTag> asserted, std::string note) {
  if (asserted) return {*asserted, Provenance::Asserted, note + "; class asserted by the user"};
  return {GroupTag::Unknown, Provenance::None, std::move(note)};
}

}  // namespace

GroupClass classify_group(const Group& g, std::optional<GroupTag> asserted) {
  if (auto order = g.order()) {
    if (*order == 1) return {GroupTag::Trivial, Provenance::Derived, "trivial group"};
    return {GroupTag::Finite, Provenance::Derived, "finite of order " + std::to_string(*order) + " (enumerated)"};
  }
  switch (g.family()) {
    case GroupFamily::Zd:
      return {GroupTag::FinitelyGeneratedAbelian, Provenance::Derived, g.describe() + " (free abelian of finite rank)"};
    case GroupFamily::Lamplighter:
      return {GroupTag::SemidirectOfAbelians, Provenance::Derived,
              g.describe() + " = (direct sum of Z_" + std::to_string(g.lamplighter_base()) + ") semidirect Z"};
    default: break;
  }
  return unknown_or_asserted(asserted, "no constructor fact applies to " + g.describe());
}

GroupClass classify_lamplighter_base(std::int64_t m) {
  return {GroupTag::LocallyFinite, Provenance::Derived,
          "direct sum of copies of Z_" + std::to_string(m) + " (finitely generated subgroups are finite)"};
}

GroupClass classify_fiber(const FiberCocycle& fiber, std::optional<GroupTag> asserted) {
  const auto& iso = fiber.iso;
  switch (iso.shape) {
    case IsotropyShape::Trivial: return {GroupTag::Trivial, Provenance::Derived, "trivial isotropy"};
    case IsotropyShape::Finite:
      if (iso.elements.size() == 1) return {GroupTag::Trivial, Provenance::Derived, "trivial isotropy"};
      return {GroupTag::Finite, Provenance::Derived,
              "finite isotropy of order " + std::to_string(iso.elements.size()) + " (enumerated)"};
    case IsotropyShape::Lattice:
      if (iso.basis.empty()) return {GroupTag::Trivial, Provenance::Derived, "trivial isotropy"};
      return {GroupTag::FinitelyGeneratedAbelian, Provenance::Derived,
              "lattice isotropy of rank " + std::to_string(iso.basis.size())};
    case IsotropyShape::LamplighterSubgroup: {
      bool in_base = true;
      for (const auto& a : iso.generators) {
        const auto* p = std::get_if<ActionArrow>(&a);
        if (!p || p->g.v.empty() || p->g.v[0] != 0) in_base = false;
      }
      if (in_base) {
        return {GroupTag::LocallyFinite, Provenance::Derived,
                "isotropy inside the lamplighter base (locally finite abelian)"};
      }
      // S meets the base in an abelian normal subgroup with quotient a
      // subgroup of Z, hence free, so the extension splits
      return {GroupTag::SemidirectOfAbelians, Provenance::Derived,
              "isotropy (S cap base) semidirect Z inside the lamplighter group"};
    }
  }
  return unknown_or_asserted(asserted, "unrecognized isotropy shape");
}

WeakContainmentStatus weak_containment_status(const GroupoidModel& model, const TwoCocycle& sigma) {
  if (sigma.model().get() != &model) throw Error(ErrorKind::ModelMismatch, "cocycle lives on a different model");
  switch (model.amenability()) {
    case AmenabilityMode::Asserted:
      return {WeakContainment::Asserted, "weak containment asserted by the model file"};
    case AmenabilityMode::Withheld:
      return {WeakContainment::Unknown, "amenability withheld; weak containment not established"};
    case AmenabilityMode::Derive: break;
  }
  std::string why;
  switch (model.kind()) {
    case ModelKind::FiniteExplicit:
    case ModelKind::Pair: why = "finite groupoid"; break;
    case ModelKind::Group: why = "group " + dynamic_cast<const GroupGroupoid&>(model).group().describe() + " is amenable"; break;
    case ModelKind::GroupBundle: why = "bundle of amenable groups over a finite set"; break;
    case ModelKind::TransformationFinite: why = "transformation groupoid of an amenable group"; break;
    case ModelKind::CylinderShift: why = "shift groupoid of an action of the amenable group Z"; break;
  }
  return {WeakContainment::HoldsByAmenability, "amenable groupoid (" + why + "), so the twisted full and reduced norms agree"};
}

UniquenessVerdict analyze(const TwoCocycle& sigma, std::size_t depth, const AnalyzeOptions& options) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
  const auto& model = *sigma.model();
  UniquenessVerdict v;
  auto inconclusive = [&](std::string reason) {
    v.outcome = Outcome::Inconclusive;
    v.route.clear();
    v.reason = std::move(reason);
    return v;
  };

  const auto report = check_cocycle(sigma, depth);
  if (!report.valid) return inconclusive("cocycle fails the identity: " + report.witness);
  v.chain.push_back({"cocycle-identity", "sigma is a normalized 2-cocycle",
                     std::string(report.exhaustive ? "exhaustive" : "sampled") + " check of " +
                         std::to_string(report.triples_checked) + " triples",
                     Provenance::Derived});

  const auto wc = weak_containment_status(model, sigma);
  if (wc.flag == WeakContainment::Unknown) return inconclusive("weak containment unknown: " + wc.note);
  v.chain.push_back({"weak-containment", "full and reduced twisted C*-norms agree", to_string(wc.flag) + ": " + wc.note,
                     wc.flag == WeakContainment::Asserted ? Provenance::Asserted : Provenance::Derived});

  if (!options.fiber_route_only) {
    const auto principal = is_topologically_principal(model, depth);
    if (principal.verdict == Verdict::Yes) {
      v.chain.push_back({"topological-principality", "the interior of the isotropy is the unit space",
                         "certified at depth " + std::to_string(principal.depth) +
                             (principal.witness.empty() ? "" : ": " + principal.witness),
                         Provenance::Derived});
      if (const auto* cyl = dynamic_cast<const CylinderShiftGroupoid*>(&model); cyl && cyl->subshift().is_full_shift()) {
        const auto base = classify_lamplighter_base(cyl->subshift().alphabet());
        v.chain.push_back({"shift-scenario", "the shift space is the dual of a direct sum of finite groups",
                           to_string(base.tag) + ": " + base.note, base.provenance});
      }
      v.chain.push_back({"trivial-isotropy-uniqueness", "every fiber algebra is the scalars, hence C*-unique",
                         "follows from the two previous steps", Provenance::Derived});
      v.outcome = Outcome::CStarUnique;
      v.route = "trivial-isotropy";
      return v;
    }
    v.chain.push_back({"topological-principality", "the interior of the isotropy is the unit space",
                       to_string(principal.verdict) + " at depth " + std::to_string(principal.depth) +
                           (principal.witness.empty() ? "" : ": " + principal.witness),
                       Provenance::Derived});
  }

  if (!model.has_finite_unit_space()) {
    return inconclusive("infinite unit space with nontrivial or undecided interior isotropy and no symmetry "
                        "certificate covering all fibers");
  }
  const auto units = model.units();
  if (units.size() > options.max_units) {
    return inconclusive("unit space has " + std::to_string(units.size()) + " points, above the fiber limit");
  }
  for (const auto& x : units) {
    FiberCocycle fiber = restrict_to_fiber(sigma, x, options.fiber_bound);
    auto cls = classify_fiber(fiber, options.asserted_fiber_class);
    std::string evidence = "x = " + to_string(x) + ": " + fiber.iso.description + "; " + to_string(cls.tag) + " (" +
                           cls.note + ")";
    const bool twisted = !fiber.sigma.is_trivial();
    if (twisted) {
      const auto level = fiber.sigma.denominator();
      std::string mackey;
      GroupClass ext;
      switch (cls.tag) {
        case GroupTag::Trivial:
        case GroupTag::Finite: {
          std::string desc;
          try {
            desc = mackey_group(fiber.sigma, level).description;
          } catch (const Error& e) {
            desc = "not tabulated (" + std::string(e.what()) + ")";
          }
          ext = {GroupTag::Finite, Provenance::Derived, "central extension of a finite group by Z_" + std::to_string(level) + ": " + desc};
          break;
        }
        case GroupTag::FinitelyGeneratedAbelian:
          ext = {GroupTag::PolynomialGrowthFlag, Provenance::Derived,
                 "central extension of a lattice by Z_" + std::to_string(level) +
                     " is finitely generated nilpotent, of polynomial growth"};
          break;
        case GroupTag::LocallyFinite:
          ext = {GroupTag::LocallyFinite, Provenance::Derived,
                 "central extension of a locally finite group by Z_" + std::to_string(level) + " is locally finite"};
          break;
        default:
          ext = unknown_or_asserted(options.asserted_fiber_class,
                                    "no catalog fact covers the central extension of " + to_string(cls.tag) +
                                        " by Z_" + std::to_string(level));
      }
      v.chain.push_back({"mackey-reduction", "twisted fiber algebra is a corner of the l1-algebra of the extension",
                         evidence + "; twisted, level " + std::to_string(level) + " -> " + to_string(ext.tag) + " (" +
                             ext.note + ")",
                         ext.provenance});
      cls = ext;
    } else {
      v.chain.push_back({"fiber-classification", "untwisted fiber group lies in the catalog", evidence, cls.provenance});
    }
    if (!options.catalog.count(cls.tag)) {
      return inconclusive("fiber at " + to_string(x) + " has class " + to_string(cls.tag) + " outside the catalog");
    }
  }
  v.chain.push_back({"coverage", "every unit examined", "exhaustive over " + std::to_string(units.size()) + " units",
                     Provenance::Derived});
  v.chain.push_back({"fiber-uniqueness", "all twisted fiber algebras are C*-unique, so l1(G, sigma) is",
                     "follows from weak containment and the fiber steps", Provenance::Derived});
  v.outcome = Outcome::CStarUnique;
  v.route = "fiber-classification";
  return v;
}

}  // namespace etale
