#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "etale/abs_sum.hpp"
#include "etale/cocycle.hpp"
#include "etale/cyclotomic.hpp"
#include "etale/groupoid.hpp"

namespace etale {

// Coefficient operations shared by exact (Cyclotomic) and floating
// (std::complex<double>) elements.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Cyclotomic> {
  static Cyclotomic zero() { return Cyclotomic(); }
  static bool is_zero(const Cyclotomic& c) { return c.is_zero(); }
  static Cyclotomic conj(const Cyclotomic& c) { return c.conj(); }
  static Cyclotomic times(const Cyclotomic& c, const Phase& p) { return p.is_zero() ? c : c.times(p); }
  static std::complex<double> to_complex(const Cyclotomic& c) { return c.to_complex(); }
  static std::string to_string(const Cyclotomic& c) { return c.to_string(); }
};

template <>
struct CoeffTraits<std::complex<double>> {
  static std::complex<double> zero() { return {}; }
  static bool is_zero(const std::complex<double>& c) { return c == std::complex<double>(); }
  static std::complex<double> conj(const std::complex<double>& c) { return std::conj(c); }
  static std::complex<double> times(const std::complex<double>& c, const Phase& p) {
    return p.is_zero() ? c : c * p.to_complex();
  }
  static std::complex<double> to_complex(const std::complex<double>& c) { return c; }
  static std::string to_string(const std::complex<double>& c);
};

// Finitely supported function on arrows (discrete models) or finite sum of
// bundle indicator functions (cylinder models). Terms with equal support are
// merged and zero terms pruned.
template <class C>
class BasicElement {
 public:
  using Coeff = C;
  using Terms = std::map<Support, C>;

  explicit BasicElement(ModelPtr model);

  const ModelPtr& model() const noexcept { return model_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  // Validates the support against the model (UnknownArrow / BundleIncompatible).
  void add(const Support& s, const C& c);
  void add_unchecked(const Support& s, const C& c);
  // f(gamma); bundles containing gamma contribute their coefficient.
  C at(const Arrow& a) const;

  BasicElement operator+(const BasicElement& other) const;
  BasicElement operator-(const BasicElement& other) const;
  BasicElement scaled(const C& c) const;

  std::string to_string() const;

  friend bool operator==(const BasicElement& a, const BasicElement& b) {
    return a.model_ == b.model_ && a.terms_ == b.terms_;
  }

 private:
  ModelPtr model_;
  Terms terms_;
};

using Element = BasicElement<Cyclotomic>;
using FloatElement = BasicElement<std::complex<double>>;

FloatElement to_float(const Element& f);

// delta_a (coefficient 1) and the unit-space identity on finite unit spaces.
Element delta(ModelPtr model, const Arrow& a);
Element unit_function(ModelPtr model);

// (f * g)(gamma) = sum_{alpha beta = gamma} f(alpha) g(beta) sigma(alpha, beta)
template <class C>
BasicElement<C> convolve(const TwoCocycle& sigma, const BasicElement<C>& f, const BasicElement<C>& g);

// f*(gamma) = conj(sigma(gamma^-1, gamma)) conj(f(gamma^-1))
template <class C>
BasicElement<C> involve(const TwoCocycle& sigma, const BasicElement<C>& f);

// Cylinder elements compared as functions (bundles refined to a common
// window); plain term comparison elsewhere.
bool equal_as_functions(const Element& f, const Element& g);

struct NormValue {
  double value = 0.0;
  AbsSum exact;          // exact representation (exact elements only)
  std::optional<Unit> attained_at;  // a unit where the supremum is attained
  std::string note;
};

// max(sum over G_x of |f|, sum over G^x of |f|)
NormValue fiber_sum_function(const Element& f, const Unit& x);
double fiber_sum_function(const FloatElement& f, const Unit& x);

// sup over units of fiber_sum_function; exact on finite unit spaces and for
// bundle-supported cylinder elements (maximized over window words).
NormValue i_norm(const Element& f);
double i_norm(const FloatElement& f);

// I-norm of an Iso°-supported element computed inside the isotropy bundle:
// max over x of sum over Iso°_x of |f|.
NormValue isotropy_i_norm(const Element& f);

// Throws NotInterior unless every support term passes the interior test at
// `depth` and lies in the interior (see documentation of psi_restrict).
void require_interior_support(const Element& f, std::size_t depth);

// Extension by zero of an Iso°-supported function; the result is f itself,
// viewed in l^1(G, sigma).
Element iota_embed(const Element& f, std::size_t depth = 4);

// Element of l^1(Iso°_x, sigma_x), in the coordinates of the fiber group.
struct FiberVector {
  Unit unit;
  std::shared_ptr<const FiberCocycle> fiber;
  std::map<GroupElement, Cyclotomic> coefficients;

  AbsSum l1_norm() const;
};

// Restriction of an Iso°-supported element to the fiber at x.
FiberVector psi_restrict(const TwoCocycle& sigma, const Element& f, const Unit& x, std::size_t depth = 4);
FiberVector psi_restrict(std::shared_ptr<const FiberCocycle> fiber, const Element& f, const Unit& x,
                         std::size_t depth = 4);
// Twisted convolution in l^1(Iso°_x, sigma_x).
FiberVector fiber_convolve(const FiberVector& a, const FiberVector& b);
// Coordinates of an isotropy arrow in the fiber group (nullopt if outside).
std::optional<GroupElement> fiber_coordinates(const FiberCocycle& fiber, const GroupoidModel& model, const Arrow& a);

// inf over h in I_x of ||f + h||_I (finite models).
NormValue quotient_i_norm(const Element& f, const Unit& x);

// (g f)(gamma) = g(r(gamma)) f(gamma) for g supported on units.
Element c0_multiply(const Element& g, const Element& f);
// (f g)(gamma) = f(gamma) g(s(gamma)).
Element c0_multiply_right(const Element& f, const Element& g);

}  // namespace etale
