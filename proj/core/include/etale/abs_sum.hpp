#pragma once

#include <vector>

#include "etale/cyclotomic.hpp"

namespace etale {

// An exact nonnegative real of the form sum_i sqrt(v_i), where each v_i is the
// squared modulus |c_i|^2 of an exact coefficient. Closed under + and *, which
// is enough to state the I-norm identities without rounding.
//
// Comparison first tries multiset equality of the v_i; otherwise it evaluates
// both sides with 384-bit MPFR arithmetic and treats differences below 2^-300
// (relative) as equality.
class AbsSum {
 public:
  AbsSum() = default;

  static AbsSum of(const Cyclotomic& c);

  void add_abs(const Cyclotomic& c);
  AbsSum operator+(const AbsSum& other) const;
  AbsSum operator*(const AbsSum& other) const;

  const std::vector<Cyclotomic>& squared_terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  double value() const;

  friend int compare(const AbsSum& a, const AbsSum& b);
  friend bool operator==(const AbsSum& a, const AbsSum& b) { return compare(a, b) == 0; }
  friend bool operator<(const AbsSum& a, const AbsSum& b) { return compare(a, b) < 0; }
  friend bool operator<=(const AbsSum& a, const AbsSum& b) { return compare(a, b) <= 0; }

 private:
  std::vector<Cyclotomic> terms_;
};

}  // namespace etale
