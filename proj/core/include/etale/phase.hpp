#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace etale {

// An exact element q of Q/Z, standing for the unimodular value exp(2*pi*i*q).
// Stored reduced with 0 <= numerator < denominator.
class Phase {
 public:
  constexpr Phase() = default;
  Phase(std::int64_t numerator, std::int64_t denominator);

  static Phase from_rational(const mpq_class& q);
  // Accepts "p/q", "p" or "-p/q".
  static Phase parse(std::string_view text);

  std::int64_t numerator() const noexcept { return num_; }
  std::int64_t denominator() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }

  Phase operator+(const Phase& other) const;
  Phase operator-(const Phase& other) const;
  Phase operator-() const;
  Phase& operator+=(const Phase& other) { return *this = *this + other; }
  Phase& operator-=(const Phase& other) { return *this = *this - other; }
  Phase times(std::int64_t k) const;

  mpq_class to_rational() const { return mpq_class(num_, den_); }
  std::complex<double> to_complex() const;
  std::string to_string() const;

  friend bool operator==(const Phase&, const Phase&) = default;
  friend auto operator<=>(const Phase&, const Phase&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Parses "p/q" (or an integer) into an exact rational.
mpq_class parse_rational(std::string_view text);
std::string rational_to_string(const mpq_class& q);

}  // namespace etale
