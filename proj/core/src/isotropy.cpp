#include "etale/isotropy.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "etale/error.hpp"
#include "etale/integer_matrix.hpp"

namespace etale {

namespace {

std::string vec_string(const std::vector<std::int64_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

Word rotate(const Word& w, std::size_t r) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[(i + r) % w.size()];
  return out;
}

// An isolated point of the subshift lying in `c` whose orbit length divides n
// (n == 0 accepts any length).
std::optional<SequencePoint> isolated_point_in(const Subshift& x, const Cylinder& c, std::int64_t n) {
  for (const auto& w : x.isolated_orbits()) {
    const auto len = static_cast<std::int64_t>(w.size());
    if (n != 0 && n % len != 0) continue;
    for (std::size_t r = 0; r < w.size(); ++r) {
      auto p = SequencePoint::periodic(rotate(w, r));
      if (c.matches(p)) return p;
    }
  }
  return std::nullopt;
}

// Within the window W around the bundle, every refinement of c on the inner
// window (W shrunk by |n|) admits a legal point with x_k != x_{k+n} for some
// k, k+n in W. Returns the witness point for the coarsest refinement.
std::optional<std::string> window_witness(const Subshift& x, const Cylinder& c, std::int64_t n, std::size_t depth) {
  const auto d = static_cast<std::int64_t>(depth);
  std::int64_t lo = -d, hi = d;
  if (!c.empty()) {
    lo = std::min(lo, c.min_position());
    hi = std::max(hi, c.max_position());
  }
  const auto a = std::abs(n);
  const std::int64_t ilo = lo + a, ihi = hi - a;

  std::vector<Cylinder> refinements;
  if (ilo > ihi) {
    refinements.push_back(c);
  } else {
    Cylinder inner;
    for (const auto& [p, s] : c.symbols)
      if (p >= ilo && p <= ihi) inner.symbols.emplace(p, s);
    constexpr std::size_t kLimit = 1 << 14;
    auto words = x.legal_fillings(inner, ilo, ihi, kLimit + 1);
    if (words.size() > kLimit) return std::nullopt;
    for (const auto& w : words) {
      Cylinder r = c;
      bool ok = true;
      for (std::int64_t p = ilo; p <= ihi && ok; ++p) {
        auto [it, inserted] = r.symbols.emplace(p, w[static_cast<std::size_t>(p - ilo)]);
        if (!inserted && it->second != w[static_cast<std::size_t>(p - ilo)]) ok = false;
      }
      if (ok && x.is_consistent(r)) refinements.push_back(std::move(r));
    }
  }
  std::string first;
  for (const auto& r : refinements) {
    bool found = false;
    for (std::int64_t k = lo; k <= hi && !found; ++k) {
      const auto k2 = k + n;
      if (k2 < lo || k2 > hi) continue;
      const auto f1 = r.symbols.find(k), f2 = r.symbols.find(k2);
      if (f1 != r.symbols.end() && f2 != r.symbols.end()) {
        if (f1->second != f2->second) {
          found = true;
          if (first.empty()) {
            if (auto p = x.complete(r, lo, hi)) first = p->to_string();
          }
        }
        continue;
      }
      for (Symbol s1 = 0; s1 < x.alphabet() && !found; ++s1) {
        for (Symbol s2 = 0; s2 < x.alphabet() && !found; ++s2) {
          if (s1 == s2) continue;
          Cylinder t = r;
          if (!t.symbols.emplace(k, s1).second && t.symbols.at(k) != s1) continue;
          if (!t.symbols.emplace(k2, s2).second && t.symbols.at(k2) != s2) continue;
          auto p = x.complete(t, lo, hi);
          if (p) {
            found = true;
            if (first.empty()) first = p->to_string();
          }
        }
      }
    }
    if (!found) return std::nullopt;
  }
  if (first.empty()) first = "(no refinement is legal)";
  return first;
}

IsotropyGroup finite_filter(const GroupoidModel& model, const Unit& x, const std::vector<Arrow>& candidates) {
  IsotropyGroup out;
  out.unit = x;
  for (const auto& a : candidates)
    if (model.is_isotropy(a) && model.range(a) == x) out.elements.push_back(a);
  out.shape = out.elements.size() == 1 ? IsotropyShape::Trivial : IsotropyShape::Finite;
  // generators: greedy, add elements not yet in the generated subgroup
  std::set<Arrow> generated{model.unit_arrow(x)};
  for (const auto& a : out.elements) {
    if (generated.count(a)) continue;
    out.generators.push_back(a);
    std::deque<Arrow> queue(generated.begin(), generated.end());
    while (!queue.empty()) {
      auto g = queue.front();
      queue.pop_front();
      for (const auto& h : out.generators) {
        auto gh = model.compose(g, h);
        if (generated.insert(gh).second) queue.push_back(gh);
      }
    }
  }
  out.description = out.shape == IsotropyShape::Trivial
                        ? "trivial"
                        : "finite of order " + std::to_string(out.elements.size());
  return out;
}

IsotropyGroup lattice_group(const GroupoidModel& model, const Unit& x, std::vector<std::vector<std::int64_t>> basis,
                            std::size_t bound) {
  IsotropyGroup out;
  out.unit = x;
  out.basis = std::move(basis);
  if (out.basis.empty()) {
    out.shape = IsotropyShape::Trivial;
    out.elements.push_back(model.unit_arrow(x));
    out.description = "trivial";
    return out;
  }
  out.shape = IsotropyShape::Lattice;
  const auto rank = out.basis.size();
  auto coords = Group::zd(rank).enumerate(bound);
  out.truncated = true;
  for (const auto& k : coords) out.elements.push_back(lattice_arrow(model, out, k.v));
  for (std::size_t i = 0; i < rank; ++i) {
    std::vector<std::int64_t> e(rank, 0);
    e[i] = 1;
    out.generators.push_back(lattice_arrow(model, out, e));
  }
  std::string b;
  for (const auto& v : out.basis) b += (b.empty() ? "" : ", ") + vec_string(v);
  out.description = "free abelian of rank " + std::to_string(rank) + " with basis " + b;
  return out;
}

std::vector<std::vector<std::int64_t>> identity_basis(std::size_t d) {
  std::vector<std::vector<std::int64_t>> b(d, std::vector<std::int64_t>(d, 0));
  for (std::size_t i = 0; i < d; ++i) b[i][i] = 1;
  return b;
}

IsotropyGroup whole_group(const GroupoidModel& model, const Unit& x, const Group& g, std::size_t bound) {
  switch (g.family()) {
    case GroupFamily::Zd:
      return lattice_group(model, x, identity_basis(g.dimension()), bound);
    case GroupFamily::Lamplighter: {
      IsotropyGroup out;
      out.unit = x;
      out.shape = IsotropyShape::LamplighterSubgroup;
      auto f = model.fiber(x, FiberDirection::Source, bound);
      out.elements = std::move(f.arrows);
      out.truncated = true;
      for (const auto& h : g.generators()) {
        if (model.kind() == ModelKind::Group) {
          out.generators.push_back(GroupArrow{h});
        } else {
          out.generators.push_back(BundleArrow{unit_index(x), h});
        }
      }
      out.description = "the whole lamplighter group " + g.describe();
      return out;
    }
    default: {
      auto f = model.fiber(x, FiberDirection::Source, static_cast<std::size_t>(*g.order()) + 1);
      return finite_filter(model, x, f.arrows);
    }
  }
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::string to_string(IsotropyShape s) {
  switch (s) {
    case IsotropyShape::Trivial: return "trivial";
    case IsotropyShape::Finite: return "finite";
    case IsotropyShape::Lattice: return "lattice";
    case IsotropyShape::LamplighterSubgroup: return "lamplighter_subgroup";
  }
  return "unknown";
}

Arrow lattice_arrow(const GroupoidModel& model, const IsotropyGroup& iso, const std::vector<std::int64_t>& k) {
  if (iso.basis.empty()) return model.unit_arrow(iso.unit);
  const auto d = iso.basis.front().size();
  GroupElement g{std::vector<std::int64_t>(d, 0)};
  for (std::size_t i = 0; i < iso.basis.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) g.v[j] += k.at(i) * iso.basis[i][j];
  switch (model.kind()) {
    case ModelKind::Group: return GroupArrow{g};
    case ModelKind::GroupBundle: return BundleArrow{unit_index(iso.unit), g};
    case ModelKind::TransformationFinite: return ActionArrow{unit_index(iso.unit), g};
    case ModelKind::CylinderShift: return ShiftArrow{unit_point(iso.unit), g.v[0]};
    default: break;
  }
  throw Error(ErrorKind::UnsupportedModel, "lattice isotropy is not available for " + model.describe());
}

InteriorResult interior_isotropy_test(const GroupoidModel& model, const Support& b, std::size_t depth) {
  if (const auto* a = std::get_if<Arrow>(&b)) {
    model.check_arrow(*a);
    if (model.is_discrete()) {
      const bool iso = model.is_isotropy(*a);
      return {iso ? Verdict::Yes : Verdict::No, 0,
              iso ? to_string(*a) : to_string(*a) + " has range " + to_string(model.range(*a)) + " and source " +
                                        to_string(model.source(*a))};
    }
    // a single arrow (x, n) of a shift model lies in the interior exactly
    // when n = 0 or x is an isolated point of period dividing n
    const auto& cyl = dynamic_cast<const CylinderShiftGroupoid&>(model);
    const auto& s = std::get<ShiftArrow>(*a);
    if (s.shift == 0) return {Verdict::Yes, 0, to_string(*a)};
    bool inside = false;
    if (s.point.shifted(s.shift) == s.point) {
      for (const auto& w : cyl.subshift().isolated_orbits()) {
        for (std::size_t r = 0; r < w.size() && !inside; ++r)
          inside = SequencePoint::periodic(rotate(w, r)) == s.point;
      }
    }
    if (inside) return {Verdict::Yes, 0, to_string(*a) + " at an isolated periodic point"};
    return {Verdict::No, 0, to_string(*a) + (s.point.shifted(s.shift) == s.point ? " (point is not isolated)"
                                                                                  : " moves its point")};
  }
  const auto& bundle = std::get<ArrowBundle>(b);
  const auto* cyl = dynamic_cast<const CylinderShiftGroupoid*>(&model);
  if (!cyl) throw Error(ErrorKind::IncompatibleVariant, "bundles are only defined on cylinder shift models");
  cyl->check_bundle(bundle);
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
  if (bundle.shift == 0) return {Verdict::Yes, 0, to_string(bundle) + " consists of units"};
  if (auto p = isolated_point_in(cyl->subshift(), bundle.constraint, bundle.shift)) {
    return {Verdict::Yes, 0, "isolated periodic point " + p->to_string() + " in " + to_string(bundle)};
  }
  if (auto w = window_witness(cyl->subshift(), bundle.constraint, bundle.shift, depth)) {
    return {Verdict::No, depth, "moved point " + *w};
  }
  return {Verdict::Unknown, depth, "no moved point inside the depth-" + std::to_string(depth) + " window"};
}

InteriorResult is_topologically_principal(const GroupoidModel& model, std::size_t depth) {
  if (const auto* cyl = dynamic_cast<const CylinderShiftGroupoid*>(&model)) {
    if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be at least 1");
    const auto& orbits = cyl->subshift().isolated_orbits();
    if (!orbits.empty()) {
      const auto& w = orbits.front();
      return {Verdict::No, 0,
              "isolated periodic point " + SequencePoint::periodic(w).to_string() + " fixed by shift " +
                  std::to_string(w.size())};
    }
    for (std::int64_t n = 1; n <= static_cast<std::int64_t>(depth); ++n) {
      for (std::int64_t sign : {1, -1}) {
        auto r = interior_isotropy_test(model, ArrowBundle{Cylinder{}, sign * n}, depth);
        if (r.verdict != Verdict::No) {
          return {Verdict::Unknown, depth, "bundle with shift " + std::to_string(sign * n) + " not certified"};
        }
      }
    }
    return {Verdict::Yes, depth,
            "every shift 1.." + std::to_string(depth) + " moves a point in each depth-" + std::to_string(depth) +
                " cylinder; no isolated points"};
  }
  if (!model.has_finite_unit_space()) {
    return {Verdict::Unknown, depth, "unit space not finite"};
  }
  for (const auto& x : model.units()) {
    auto iso = isotropy_group(model, x, 2);
    if (iso.shape != IsotropyShape::Trivial) {
      Arrow w = iso.generators.empty() ? iso.elements.at(1) : iso.generators.front();
      return {Verdict::No, 0, "isotropy arrow " + to_string(w) + " at unit " + to_string(x)};
    }
  }
  return {Verdict::Yes, 0, "all isotropy groups trivial"};
}

IsotropyGroup isotropy_group(const GroupoidModel& model, const Unit& x, std::size_t bound) {
  model.check_unit(x);
  switch (model.kind()) {
    case ModelKind::Pair: {
      IsotropyGroup out;
      out.unit = x;
      out.elements.push_back(model.unit_arrow(x));
      out.description = "trivial";
      return out;
    }
    case ModelKind::FiniteExplicit:
      return finite_filter(model, x, model.fiber(x, FiberDirection::Source, 1u << 20).arrows);
    case ModelKind::Group:
      return whole_group(model, x, dynamic_cast<const GroupGroupoid&>(model).group(), bound);
    case ModelKind::GroupBundle:
      return whole_group(model, x, dynamic_cast<const GroupBundleGroupoid&>(model).groups()[unit_index(x)], bound);
    case ModelKind::TransformationFinite: {
      const auto& t = dynamic_cast<const TransformationGroupoid&>(model);
      const auto& g = t.group();
      const auto u = unit_index(x);
      if (g.is_finite()) return finite_filter(model, x, model.fiber(x, FiberDirection::Range, 1u << 20).arrows);
      // Schreier generators over the orbit of u
      const auto gens = g.generators();
      std::map<std::int64_t, GroupElement> label{{u, g.identity()}};
      std::deque<std::int64_t> queue{u};
      std::vector<GroupElement> schreier;
      while (!queue.empty()) {
        const auto y = queue.front();
        queue.pop_front();
        for (const auto& s : gens) {
          for (const auto& step : {s, g.inverse(s)}) {
            const auto z = t.act(y, step);
            auto word = g.multiply(label.at(y), step);
            auto it = label.find(z);
            if (it == label.end()) {
              label.emplace(z, word);
              queue.push_back(z);
            } else {
              auto h = g.multiply(word, g.inverse(it->second));
              if (!g.is_identity(h)) schreier.push_back(h);
            }
          }
        }
      }
      if (g.family() == GroupFamily::Zd) {
        std::vector<std::vector<std::int64_t>> vs;
        for (auto& h : schreier) vs.push_back(h.v);
        auto basis = lattice_basis(vs, g.dimension());
        auto out = lattice_group(model, x, basis, bound);
        out.description = "stabilizer: " + out.description + ", index " + std::to_string(label.size());
        return out;
      }
      IsotropyGroup out;
      out.unit = x;
      out.shape = IsotropyShape::LamplighterSubgroup;
      std::sort(schreier.begin(), schreier.end());
      schreier.erase(std::unique(schreier.begin(), schreier.end()), schreier.end());
      for (auto& h : schreier) out.generators.push_back(ActionArrow{u, h});
      const std::size_t scan = std::min<std::size_t>(20000, std::max<std::size_t>(bound, 1) * label.size() * 4);
      for (auto& h : g.enumerate(scan)) {
        if (out.elements.size() == bound) break;
        if (t.act(u, h) == u) out.elements.push_back(ActionArrow{u, h});
      }
      out.truncated = true;
      out.description = "stabilizer of index " + std::to_string(label.size()) + " in " + g.describe();
      return out;
    }
    case ModelKind::CylinderShift: {
      const auto& p = unit_point(x);
      auto period = p.period();
      if (!period) return lattice_group(model, x, {}, bound);
      auto out = lattice_group(model, x, {{*period}}, bound);
      out.description = "shifts by multiples of the period " + std::to_string(*period);
      return out;
    }
  }
  throw Error(ErrorKind::UnsupportedModel, "isotropy not available");
}

IsotropyGroup interior_isotropy_group(const GroupoidModel& model, const Unit& x, std::size_t bound) {
  if (model.is_discrete()) return isotropy_group(model, x, bound);
  const auto& cyl = dynamic_cast<const CylinderShiftGroupoid&>(model);
  model.check_unit(x);
  const auto& p = unit_point(x);
  for (const auto& w : cyl.subshift().isolated_orbits()) {
    for (std::size_t r = 0; r < w.size(); ++r) {
      if (SequencePoint::periodic(rotate(w, r)) == p) {
        auto out = lattice_group(model, x, {{static_cast<std::int64_t>(w.size())}}, bound);
        out.description = "isolated periodic point: " + out.description;
        return out;
      }
    }
  }
  return lattice_group(model, x, {}, bound);
}

}  // namespace etale
