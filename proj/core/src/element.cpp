#include "etale/element.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "etale/error.hpp"
#include "etale/isotropy.hpp"

namespace etale {

namespace {

const CylinderShiftGroupoid* as_cylinder(const GroupoidModel& m) { return dynamic_cast<const CylinderShiftGroupoid*>(&m); }

void same_model(const ModelPtr& a, const ModelPtr& b) {
  if (a != b) throw Error(ErrorKind::ModelMismatch, "elements live on different models");
}

Phase shift_cocycle(const TwoCocycle& sigma, std::int64_t n, std::int64_t m) {
  return sigma.eval_unchecked(ShiftArrow{SequencePoint(), n}, ShiftArrow{SequencePoint(), m});
}

// Positions touched by a bundle when evaluated at ranges (constraint) and at
// sources (constraint translated by -shift).
void widen(std::int64_t& lo, std::int64_t& hi, bool& any, const Cylinder& c) {
  if (c.empty()) return;
  lo = any ? std::min(lo, c.min_position()) : c.min_position();
  hi = any ? std::max(hi, c.max_position()) : c.max_position();
  any = true;
}

bool matches_word(const Cylinder& c, const Word& w, std::int64_t lo) {
  for (const auto& [p, s] : c.symbols)
    if (w[static_cast<std::size_t>(p - lo)] != s) return false;
  return true;
}

constexpr std::size_t kWindowWords = 1u << 16;

std::vector<Word> window_words(const Subshift& x, std::int64_t lo, std::int64_t hi) {
  auto words = x.legal_fillings(Cylinder{}, lo, hi, kWindowWords + 1);
  if (words.size() > kWindowWords) {
    throw Error(ErrorKind::BundleIncompatible, "window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                                   "] has too many legal words for exact evaluation");
  }
  return words;
}

template <class C>
void check_support(const GroupoidModel& m, const Support& s) {
  if (const auto* cyl = as_cylinder(m)) {
    const auto* b = std::get_if<ArrowBundle>(&s);
    if (!b) {
      throw Error(ErrorKind::UnknownArrow,
                  "cylinder elements are supported on bundles, not single arrows: " + to_string(s), to_string(s));
    }
    cyl->check_bundle(*b);
    return;
  }
  const auto* a = std::get_if<Arrow>(&s);
  if (!a) throw Error(ErrorKind::UnknownArrow, "bundles are only defined on cylinder models", to_string(s));
  m.check_arrow(*a);
}

}  // namespace

std::string CoeffTraits<std::complex<double>>::to_string(const std::complex<double>& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", c.real(), c.imag());
  return buf;
}

template <class C>
BasicElement<C>::BasicElement(ModelPtr model) : model_(std::move(model)) {
  if (!model_) throw Error(ErrorKind::InvalidArgument, "element needs a model");
}

template <class C>
void BasicElement<C>::add(const Support& s, const C& c) {
  check_support<C>(*model_, s);
  add_unchecked(s, c);
}

template <class C>
void BasicElement<C>::add_unchecked(const Support& s, const C& c) {
  if (CoeffTraits<C>::is_zero(c)) return;
  auto [it, inserted] = terms_.emplace(s, c);
  if (!inserted) {
    it->second += c;
    if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
  }
}

template <class C>
C BasicElement<C>::at(const Arrow& a) const {
  if (const auto* cyl = as_cylinder(*model_)) {
    C sum = CoeffTraits<C>::zero();
    for (const auto& [s, c] : terms_)
      if (cyl->bundle_contains(std::get<ArrowBundle>(s), a)) sum += c;
    return sum;
  }
  auto it = terms_.find(Support{a});
  return it == terms_.end() ? CoeffTraits<C>::zero() : it->second;
}

template <class C>
BasicElement<C> BasicElement<C>::operator+(const BasicElement& other) const {
  same_model(model_, other.model_);
  BasicElement out = *this;
  for (const auto& [s, c] : other.terms_) out.add_unchecked(s, c);
  return out;
}

template <class C>
BasicElement<C> BasicElement<C>::operator-(const BasicElement& other) const {
  same_model(model_, other.model_);
  BasicElement out = *this;
  for (const auto& [s, c] : other.terms_) out.add_unchecked(s, CoeffTraits<C>::zero() - c);
  return out;
}

template <class C>
BasicElement<C> BasicElement<C>::scaled(const C& k) const {
  BasicElement out(model_);
  for (const auto& [s, c] : terms_) out.add_unchecked(s, c * k);
  return out;
}

template <class C>
std::string BasicElement<C>::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [sup, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += "(" + CoeffTraits<C>::to_string(c) + ")" + etale::to_string(sup);
  }
  return s;
}

FloatElement to_float(const Element& f) {
  FloatElement out(f.model());
  for (const auto& [s, c] : f.terms()) out.add_unchecked(s, c.to_complex());
  return out;
}

Element delta(ModelPtr model, const Arrow& a) {
  Element f(std::move(model));
  f.add(a, Cyclotomic(1));
  return f;
}

Element unit_function(ModelPtr model) {
  Element f(model);
  if (as_cylinder(*model)) {
    f.add(ArrowBundle{Cylinder{}, 0}, Cyclotomic(1));
    return f;
  }
  for (const auto& x : model->units()) f.add(model->unit_arrow(x), Cyclotomic(1));
  return f;
}

// ---------------------------------------------------------------------------

template <class C>
BasicElement<C> convolve(const TwoCocycle& sigma, const BasicElement<C>& f, const BasicElement<C>& g) {
  same_model(f.model(), g.model());
  same_model(f.model(), sigma.model());
  const auto& m = *f.model();
  BasicElement<C> out(f.model());
  if (const auto* cyl = as_cylinder(m)) {
    for (const auto& [s1, a] : f.terms()) {
      const auto& b1 = std::get<ArrowBundle>(s1);
      for (const auto& [s2, b] : g.terms()) {
        const auto& b2 = std::get<ArrowBundle>(s2);
        auto p = cyl->bundle_product(b1, b2);
        if (!p) continue;
        out.add_unchecked(*p, CoeffTraits<C>::times(a * b, shift_cocycle(sigma, b1.shift, b2.shift)));
      }
    }
    return out;
  }
  std::map<Unit, std::vector<std::pair<const Arrow*, const C*>>> by_range;
  for (const auto& [s, b] : g.terms()) {
    const auto& beta = std::get<Arrow>(s);
    by_range[m.range(beta)].emplace_back(&beta, &b);
  }
  for (const auto& [s, a] : f.terms()) {
    const auto& alpha = std::get<Arrow>(s);
    auto it = by_range.find(m.source(alpha));
    if (it == by_range.end()) continue;
    for (const auto& [beta, b] : it->second) {
      out.add_unchecked(m.compose(alpha, *beta), CoeffTraits<C>::times(a * *b, sigma.eval_unchecked(alpha, *beta)));
    }
  }
  return out;
}

template <class C>
BasicElement<C> involve(const TwoCocycle& sigma, const BasicElement<C>& f) {
  same_model(f.model(), sigma.model());
  const auto& m = *f.model();
  BasicElement<C> out(f.model());
  if (const auto* cyl = as_cylinder(m)) {
    for (const auto& [s, a] : f.terms()) {
      const auto& b = std::get<ArrowBundle>(s);
      out.add_unchecked(cyl->bundle_inverse(b),
                        CoeffTraits<C>::times(CoeffTraits<C>::conj(a), -shift_cocycle(sigma, b.shift, -b.shift)));
    }
    return out;
  }
  for (const auto& [s, a] : f.terms()) {
    const auto& alpha = std::get<Arrow>(s);
    const auto inv = m.invert(alpha);
    out.add_unchecked(inv, CoeffTraits<C>::times(CoeffTraits<C>::conj(a), -sigma.eval_unchecked(alpha, inv)));
  }
  return out;
}

template Element convolve(const TwoCocycle&, const Element&, const Element&);
template FloatElement convolve(const TwoCocycle&, const FloatElement&, const FloatElement&);
template Element involve(const TwoCocycle&, const Element&);
template FloatElement involve(const TwoCocycle&, const FloatElement&);
template class BasicElement<Cyclotomic>;
template class BasicElement<std::complex<double>>;

bool equal_as_functions(const Element& f, const Element& g) {
  same_model(f.model(), g.model());
  const auto* cyl = as_cylinder(*f.model());
  if (!cyl) return f == g;
  const auto diff = f - g;
  std::map<std::int64_t, std::vector<std::pair<Cylinder, Cyclotomic>>> by_shift;
  for (const auto& [s, c] : diff.terms()) {
    const auto& b = std::get<ArrowBundle>(s);
    by_shift[b.shift].emplace_back(b.constraint, c);
  }
  for (const auto& [n, list] : by_shift) {
    std::int64_t lo = 0, hi = 0;
    bool any = false;
    for (const auto& [c, v] : list) widen(lo, hi, any, c);
    std::vector<Word> words = any ? window_words(cyl->subshift(), lo, hi) : std::vector<Word>{Word{}};
    for (const auto& w : words) {
      Cyclotomic sum;
      for (const auto& [c, v] : list)
        if (matches_word(c, w, lo)) sum += v;
      if (!sum.is_zero()) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Norms

namespace {

struct Sums {
  AbsSum source;
  AbsSum range;
};

NormValue better(NormValue best, const AbsSum& candidate, const Unit& x) {
  if (!best.attained_at || best.exact < candidate) {
    best.exact = candidate;
    best.value = candidate.value();
    best.attained_at = x;
  }
  return best;
}

// Exact fiber sums of a cylinder element at every word of its window.
NormValue cylinder_norm(const Element& f, bool isotropy_only) {
  const auto& cyl = *as_cylinder(*f.model());
  std::int64_t lo = 0, hi = 0;
  bool any = false;
  for (const auto& [s, c] : f.terms()) {
    const auto& b = std::get<ArrowBundle>(s);
    widen(lo, hi, any, b.constraint);
    widen(lo, hi, any, b.constraint.translated(-b.shift));
  }
  std::vector<Word> words = any ? window_words(cyl.subshift(), lo, hi) : std::vector<Word>{Word{}};
  NormValue best;
  for (const auto& w : words) {
    std::map<std::int64_t, Cyclotomic> rng, src;
    for (const auto& [s, c] : f.terms()) {
      const auto& b = std::get<ArrowBundle>(s);
      if (isotropy_only && b.shift != 0) continue;
      if (matches_word(b.constraint, w, lo)) rng[b.shift] += c;
      if (matches_word(b.constraint.translated(-b.shift), w, lo)) src[b.shift] += c;
    }
    AbsSum r, so;
    for (const auto& [n, c] : rng) r.add_abs(c);
    for (const auto& [n, c] : src) so.add_abs(c);
    const auto& m = r < so ? so : r;
    if (!best.attained_at || best.exact < m) {
      Cylinder fixed;
      for (std::size_t i = 0; i < w.size(); ++i) fixed.symbols.emplace(lo + static_cast<std::int64_t>(i), w[i]);
      auto p = any ? cyl.subshift().complete(fixed, lo, hi) : cyl.subshift().complete(fixed, 0, 0);
      best.exact = m;
      best.value = m.value();
      best.attained_at = p ? Unit{*p} : Unit{SequencePoint()};
    }
  }
  best.note = "maximized over " + std::to_string(words.size()) + " window words";
  return best;
}

template <class C, class Acc, class Add>
std::map<Unit, std::pair<Acc, Acc>> discrete_sums(const BasicElement<C>& f, Add add) {
  const auto& m = *f.model();
  std::map<Unit, std::pair<Acc, Acc>> sums;
  for (const auto& [s, c] : f.terms()) {
    const auto& a = std::get<Arrow>(s);
    add(sums[m.source(a)].first, c);
    add(sums[m.range(a)].second, c);
  }
  return sums;
}

}  // namespace

NormValue fiber_sum_function(const Element& f, const Unit& x) {
  const auto& m = *f.model();
  m.check_unit(x);
  NormValue out;
  out.attained_at = x;
  if (const auto* cyl = as_cylinder(m)) {
    const auto& p = unit_point(x);
    std::map<std::int64_t, Cyclotomic> rng, src;
    for (const auto& [s, c] : f.terms()) {
      const auto& b = std::get<ArrowBundle>(s);
      if (cyl->bundle_arrow_with_range(b, p)) rng[b.shift] += c;
      if (cyl->bundle_arrow_with_source(b, p)) src[b.shift] += c;
    }
    AbsSum r, so;
    for (const auto& [n, c] : rng) r.add_abs(c);
    for (const auto& [n, c] : src) so.add_abs(c);
    out.exact = r < so ? so : r;
  } else {
    AbsSum r, so;
    for (const auto& [s, c] : f.terms()) {
      const auto& a = std::get<Arrow>(s);
      if (m.source(a) == x) so.add_abs(c);
      if (m.range(a) == x) r.add_abs(c);
    }
    out.exact = r < so ? so : r;
  }
  out.value = out.exact.value();
  return out;
}

double fiber_sum_function(const FloatElement& f, const Unit& x) {
  const auto& m = *f.model();
  m.check_unit(x);
  if (const auto* cyl = as_cylinder(m)) {
    const auto& p = unit_point(x);
    std::map<std::int64_t, std::complex<double>> rng, src;
    for (const auto& [s, c] : f.terms()) {
      const auto& b = std::get<ArrowBundle>(s);
      if (cyl->bundle_arrow_with_range(b, p)) rng[b.shift] += c;
      if (cyl->bundle_arrow_with_source(b, p)) src[b.shift] += c;
    }
    double r = 0, so = 0;
    for (const auto& [n, c] : rng) r += std::abs(c);
    for (const auto& [n, c] : src) so += std::abs(c);
    return std::max(r, so);
  }
  double r = 0, so = 0;
  for (const auto& [s, c] : f.terms()) {
    const auto& a = std::get<Arrow>(s);
    if (m.source(a) == x) so += std::abs(c);
    if (m.range(a) == x) r += std::abs(c);
  }
  return std::max(r, so);
}

NormValue i_norm(const Element& f) {
  if (as_cylinder(*f.model())) return cylinder_norm(f, false);
  auto sums = discrete_sums<Cyclotomic, AbsSum>(f, [](AbsSum& acc, const Cyclotomic& c) { acc.add_abs(c); });
  NormValue best;
  for (const auto& [x, p] : sums) best = better(best, p.first < p.second ? p.second : p.first, x);
  if (!best.attained_at) best.value = 0;
  return best;
}

double i_norm(const FloatElement& f) {
  if (as_cylinder(*f.model())) {
    const auto& cyl = *as_cylinder(*f.model());
    std::int64_t lo = 0, hi = 0;
    bool any = false;
    for (const auto& [s, c] : f.terms()) {
      const auto& b = std::get<ArrowBundle>(s);
      widen(lo, hi, any, b.constraint);
      widen(lo, hi, any, b.constraint.translated(-b.shift));
    }
    std::vector<Word> words = any ? window_words(cyl.subshift(), lo, hi) : std::vector<Word>{Word{}};
    double best = 0;
    for (const auto& w : words) {
      std::map<std::int64_t, std::complex<double>> rng, src;
      for (const auto& [s, c] : f.terms()) {
        const auto& b = std::get<ArrowBundle>(s);
        if (matches_word(b.constraint, w, lo)) rng[b.shift] += c;
        if (matches_word(b.constraint.translated(-b.shift), w, lo)) src[b.shift] += c;
      }
      double r = 0, so = 0;
      for (const auto& [n, c] : rng) r += std::abs(c);
      for (const auto& [n, c] : src) so += std::abs(c);
      best = std::max({best, r, so});
    }
    return best;
  }
  auto sums = discrete_sums<std::complex<double>, double>(
      f, [](double& acc, const std::complex<double>& c) { acc += std::abs(c); });
  double best = 0;
  for (const auto& [x, p] : sums) best = std::max({best, p.first, p.second});
  return best;
}

void require_interior_support(const Element& f, std::size_t depth) {
  const auto& m = *f.model();
  for (const auto& [s, c] : f.terms()) {
    if (const auto* b = std::get_if<ArrowBundle>(&s)) {
      if (b->shift == 0) continue;
      auto r = interior_isotropy_test(m, s, depth);
      throw Error(ErrorKind::NotInterior,
                  "bundle " + to_string(*b) + " is not contained in the interior of the isotropy (interior test: " +
                      to_string(r.verdict) + ")",
                  to_string(*b));
    }
    auto r = interior_isotropy_test(m, s, depth);
    if (r.verdict != Verdict::Yes) {
      throw Error(ErrorKind::NotInterior, "arrow " + to_string(s) + " is not in the interior of the isotropy",
                  r.witness);
    }
  }
}

NormValue isotropy_i_norm(const Element& f) {
  require_interior_support(f, 1);
  if (as_cylinder(*f.model())) return cylinder_norm(f, true);
  const auto& m = *f.model();
  std::map<Unit, AbsSum> sums;
  for (const auto& [s, c] : f.terms()) sums[m.range(std::get<Arrow>(s))].add_abs(c);
  NormValue best;
  for (const auto& [x, v] : sums) best = better(best, v, x);
  return best;
}

Element iota_embed(const Element& f, std::size_t depth) {
  require_interior_support(f, depth);
  return f;
}

// ---------------------------------------------------------------------------
// Fibers

AbsSum FiberVector::l1_norm() const {
  AbsSum s;
  for (const auto& [g, c] : coefficients) s.add_abs(c);
  return s;
}

std::optional<GroupElement> fiber_coordinates(const FiberCocycle& fiber, const GroupoidModel& model, const Arrow& a) {
  const auto& x = fiber.iso.unit;
  if (model.range(a) != x || model.source(a) != x) return std::nullopt;
  switch (fiber.iso.shape) {
    case IsotropyShape::Trivial:
      if (a == model.unit_arrow(x)) return fiber.group->group().identity();
      return std::nullopt;
    case IsotropyShape::Finite: {
      const auto& els = fiber.iso.elements;
      auto it = std::find(els.begin(), els.end(), a);
      if (it == els.end()) return std::nullopt;
      return GroupElement{{static_cast<std::int64_t>(it - els.begin())}};
    }
    case IsotropyShape::Lattice: {
      std::vector<std::int64_t> v;
      if (const auto* s = std::get_if<ShiftArrow>(&a)) v = {s->shift};
      else if (const auto* p = std::get_if<ActionArrow>(&a)) v = p->g.v;
      else if (const auto* p = std::get_if<BundleArrow>(&a)) v = p->g.v;
      else if (const auto* p = std::get_if<GroupArrow>(&a)) v = p->g.v;
      const auto& basis = fiber.iso.basis;
      std::vector<std::int64_t> k(basis.size(), 0);
      auto rest = v;
      // basis in echelon form: pivot = first nonzero entry, increasing
      for (std::size_t i = 0; i < basis.size(); ++i) {
        std::size_t p = 0;
        while (p < basis[i].size() && basis[i][p] == 0) ++p;
        if (p == basis[i].size() || rest[p] % basis[i][p] != 0) return std::nullopt;
        k[i] = rest[p] / basis[i][p];
        for (std::size_t j = 0; j < rest.size(); ++j) rest[j] -= k[i] * basis[i][j];
      }
      if (std::any_of(rest.begin(), rest.end(), [](std::int64_t r) { return r != 0; })) return std::nullopt;
      return GroupElement{k};
    }
    case IsotropyShape::LamplighterSubgroup: {
      GroupElement g;
      if (const auto* p = std::get_if<ActionArrow>(&a)) g = p->g;
      else if (const auto* p = std::get_if<BundleArrow>(&a)) g = p->g;
      else if (const auto* p = std::get_if<GroupArrow>(&a)) g = p->g;
      if (!fiber.member(g)) return std::nullopt;
      return g;
    }
  }
  return std::nullopt;
}

FiberVector psi_restrict(std::shared_ptr<const FiberCocycle> fiber, const Element& f, const Unit& x,
                         std::size_t depth) {
  require_interior_support(f, depth);
  const auto& m = *f.model();
  FiberVector out{x, fiber, {}};
  if (const auto* cyl = as_cylinder(m)) {
    const auto& p = unit_point(x);
    const auto e = fiber->group->group().identity();
    for (const auto& [s, c] : f.terms()) {
      if (cyl->bundle_arrow_with_range(std::get<ArrowBundle>(s), p)) out.coefficients[e] += c;
    }
  } else {
    for (const auto& [s, c] : f.terms()) {
      const auto& a = std::get<Arrow>(s);
      if (m.range(a) != x) continue;
      auto g = fiber_coordinates(*fiber, m, a);
      if (!g) throw Error(ErrorKind::NotInterior, "arrow " + to_string(a) + " is outside the fiber group", to_string(a));
      out.coefficients[*g] += c;
    }
  }
  for (auto it = out.coefficients.begin(); it != out.coefficients.end();) {
    it = it->second.is_zero() ? out.coefficients.erase(it) : std::next(it);
  }
  return out;
}

FiberVector psi_restrict(const TwoCocycle& sigma, const Element& f, const Unit& x, std::size_t depth) {
  same_model(f.model(), sigma.model());
  auto fiber = std::make_shared<const FiberCocycle>(restrict_to_fiber(sigma, x, 64));
  return psi_restrict(std::move(fiber), f, x, depth);
}

FiberVector fiber_convolve(const FiberVector& a, const FiberVector& b) {
  if (a.fiber != b.fiber) throw Error(ErrorKind::ModelMismatch, "fiber vectors over different fibers");
  const auto& g = a.fiber->group->group();
  const auto& sigma = a.fiber->sigma;
  FiberVector out{a.unit, a.fiber, {}};
  for (const auto& [x, c] : a.coefficients) {
    for (const auto& [y, d] : b.coefficients) {
      out.coefficients[g.multiply(x, y)] += (c * d).times(sigma.eval_unchecked(GroupArrow{x}, GroupArrow{y}));
    }
  }
  for (auto it = out.coefficients.begin(); it != out.coefficients.end();) {
    it = it->second.is_zero() ? out.coefficients.erase(it) : std::next(it);
  }
  return out;
}

NormValue quotient_i_norm(const Element& f, const Unit& x) {
  if (!f.model()->finite_index()) {
    throw Error(ErrorKind::UnsupportedModel, "quotient norms are computed on finite models");
  }
  require_interior_support(f, 1);
  // h = -f off the fiber at x leaves f restricted to G_x^x, and no h in I_x
  // can change the values on that fiber
  return fiber_sum_function(f, x);
}

Element c0_multiply(const Element& g, const Element& f) {
  same_model(g.model(), f.model());
  const auto& m = *f.model();
  for (const auto& [s, c] : g.terms()) {
    const bool unit = std::holds_alternative<ArrowBundle>(s) ? std::get<ArrowBundle>(s).shift == 0
                                                              : m.is_unit(std::get<Arrow>(s));
    if (!unit) throw Error(ErrorKind::InvalidArgument, "multiplier is not supported on units", to_string(s));
  }
  if (as_cylinder(m)) return convolve(TwoCocycle::trivial(f.model()), g, f);
  Element out(f.model());
  for (const auto& [s, c] : f.terms()) {
    const auto& a = std::get<Arrow>(s);
    out.add_unchecked(a, c * g.at(m.unit_arrow(m.range(a))));
  }
  return out;
}

Element c0_multiply_right(const Element& f, const Element& g) {
  same_model(g.model(), f.model());
  const auto& m = *f.model();
  for (const auto& [s, c] : g.terms()) {
    const bool unit = std::holds_alternative<ArrowBundle>(s) ? std::get<ArrowBundle>(s).shift == 0
                                                              : m.is_unit(std::get<Arrow>(s));
    if (!unit) throw Error(ErrorKind::InvalidArgument, "multiplier is not supported on units", to_string(s));
  }
  if (as_cylinder(m)) return convolve(TwoCocycle::trivial(f.model()), f, g);
  Element out(f.model());
  for (const auto& [s, c] : f.terms()) {
    const auto& a = std::get<Arrow>(s);
    out.add_unchecked(a, c * g.at(m.unit_arrow(m.source(a))));
  }
  return out;
}

}  // namespace etale
