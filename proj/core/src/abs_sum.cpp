#include "etale/abs_sum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <mpfr.h>

namespace etale {

namespace {

constexpr mpfr_prec_t kPrecision = 384;
constexpr long kTieExponent = -300;

class Real {
 public:
  Real() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, kPrecision); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real& operator=(const Real& o) { mpfr_set(v_, o.v_, MPFR_RNDN); return *this; }
  ~Real() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// cos(2*pi*k/N) for k < N, cached per order.
const std::vector<Real>& cosines(std::int64_t order) {
  static std::mutex m;
  static std::map<std::int64_t, std::vector<Real>> cache;
  std::lock_guard lock(m);
  if (auto it = cache.find(order); it != cache.end()) return it->second;
  std::vector<Real> table(static_cast<std::size_t>(order));
  Real pi;
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  for (std::int64_t k = 0; k < order; ++k) {
    Real angle;
    mpfr_mul_si(angle.get(), pi.get(), 2 * k, MPFR_RNDN);
    mpfr_div_si(angle.get(), angle.get(), order, MPFR_RNDN);
    mpfr_cos(table[static_cast<std::size_t>(k)].get(), angle.get(), MPFR_RNDN);
  }
  return cache.emplace(order, std::move(table)).first->second;
}

// sqrt of a real cyclotomic value (imaginary part is zero for squared moduli).
Real sqrt_of(const Cyclotomic& v) {
  Real acc;
  if (v.is_zero()) return acc;
  const auto& cos = cosines(v.order());
  Real term;
  for (std::size_t k = 0; k < v.coefficients().size(); ++k) {
    const mpq_class& c = v.coefficients()[k];
    if (sgn(c) == 0) continue;
    mpfr_mul_q(term.get(), cos[k].get(), c.get_mpq_t(), MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
  }
  if (mpfr_sgn(acc.get()) < 0) mpfr_set_zero(acc.get(), 1);
  mpfr_sqrt(acc.get(), acc.get(), MPFR_RNDN);
  return acc;
}

Real evaluate(const std::vector<Cyclotomic>& terms) {
  Real sum;
  for (const auto& t : terms) {
    Real s = sqrt_of(t);
    mpfr_add(sum.get(), sum.get(), s.get(), MPFR_RNDN);
  }
  return sum;
}

bool same_multiset(const std::vector<Cyclotomic>& a, const std::vector<Cyclotomic>& b) {
  if (a.size() != b.size() || a.size() > 256) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && b[j] == x) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

AbsSum AbsSum::of(const Cyclotomic& c) {
  AbsSum s;
  s.add_abs(c);
  return s;
}

void AbsSum::add_abs(const Cyclotomic& c) {
  if (!c.is_zero()) terms_.push_back(c.norm_squared());
}

AbsSum AbsSum::operator+(const AbsSum& other) const {
  AbsSum out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

AbsSum AbsSum::operator*(const AbsSum& other) const {
  AbsSum out;
  out.terms_.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) out.terms_.push_back(a * b);
  }
  return out;
}

double AbsSum::value() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::sqrt(std::max(0.0, t.to_complex().real()));
  return s;
}

int compare(const AbsSum& a, const AbsSum& b) {
  if (same_multiset(a.terms_, b.terms_)) return 0;
  Real va = evaluate(a.terms_);
  Real vb = evaluate(b.terms_);
  Real diff;
  mpfr_sub(diff.get(), va.get(), vb.get(), MPFR_RNDN);
  if (mpfr_zero_p(diff.get())) return 0;
  Real scale;
  mpfr_abs(scale.get(), va.get(), MPFR_RNDN);
  if (mpfr_cmpabs(vb.get(), scale.get()) > 0) mpfr_abs(scale.get(), vb.get(), MPFR_RNDN);
  if (mpfr_zero_p(scale.get())) return 0;
  mpfr_div(diff.get(), diff.get(), scale.get(), MPFR_RNDN);
  if (mpfr_get_exp(diff.get()) < kTieExponent) return 0;
  return mpfr_sgn(diff.get()) < 0 ? -1 : 1;
}

}  // namespace etale
