#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "etale/phase.hpp"

namespace etale {

// Exact element of a cyclotomic field Q(zeta_N), stored in the power basis
// 1, zeta, ..., zeta^(phi(N)-1) with zeta = exp(2*pi*i/N). Values living in
// different fields are lifted to the compositum on demand, so equality and
// arithmetic are exact across orders.
//
// Orders are capped at kMaxOrder; exceeding it raises ExactnessLimit.
class Cyclotomic {
 public:
  static constexpr std::int64_t kMaxOrder = 1024;

  Cyclotomic() = default;
  Cyclotomic(long value);  // NOLINT(google-explicit-constructor): rational literals
  explicit Cyclotomic(const mpq_class& value);

  static Cyclotomic gaussian(const mpq_class& re, const mpq_class& im);
  static Cyclotomic root_of_unity(const Phase& phase);
  static Cyclotomic i() { return gaussian(0, 1); }

  std::int64_t order() const noexcept { return order_; }
  const std::vector<mpq_class>& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  bool is_rational() const noexcept { return order_ == 1; }

  // Rewrites the value in Q(zeta_M); M must be a multiple of order().
  Cyclotomic lifted(std::int64_t order) const;

  Cyclotomic operator+(const Cyclotomic& other) const;
  Cyclotomic operator-(const Cyclotomic& other) const;
  Cyclotomic operator-() const;
  Cyclotomic operator*(const Cyclotomic& other) const;
  Cyclotomic& operator+=(const Cyclotomic& other) { return *this = *this + other; }
  Cyclotomic& operator-=(const Cyclotomic& other) { return *this = *this - other; }
  Cyclotomic& operator*=(const Cyclotomic& other) { return *this = *this * other; }

  Cyclotomic times(const Phase& phase) const;
  Cyclotomic conj() const;
  // |z|^2 as an exact (real) cyclotomic value.
  Cyclotomic norm_squared() const { return *this * conj(); }

  std::complex<double> to_complex() const;
  double abs() const { return std::abs(to_complex()); }
  std::string to_string() const;

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);

 private:
  Cyclotomic(std::int64_t order, std::vector<mpq_class> coeffs);
  void normalize();

  std::int64_t order_ = 1;
  std::vector<mpq_class> coeffs_;  // empty means zero
};

// Euler's totient; exposed for tests.
std::int64_t euler_phi(std::int64_t n);

// Integer coefficients of the N-th cyclotomic polynomial, lowest degree first.
const std::vector<std::int64_t>& cyclotomic_polynomial(std::int64_t n);

}  // namespace etale
