#include "etale/phase.hpp"

#include <numbers>
#include <numeric>

#include "etale/error.hpp"

namespace etale {

namespace {

constexpr std::int64_t kMaxDenominator = std::int64_t{1} << 62;

Phase reduce(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  num %= den;
  if (num < 0) num += den;
  __int128 a = num, b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  if (den > kMaxDenominator) {
    throw Error(ErrorKind::ExactnessLimit, "phase denominator exceeds 2^62");
  }
  return Phase(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Phase::Phase(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) {
    throw Error(ErrorKind::InvalidArgument, "phase with zero denominator");
  }
  __int128 n = numerator, d = denominator;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  n %= d;
  if (n < 0) n += d;
  const auto g = std::gcd(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
  num_ = static_cast<std::int64_t>(n) / (g == 0 ? 1 : g);
  den_ = static_cast<std::int64_t>(d) / (g == 0 ? 1 : g);
}

Phase Phase::from_rational(const mpq_class& q) {
  mpz_class num = q.get_num();
  const mpz_class& den = q.get_den();
  if (!den.fits_slong_p()) {
    throw Error(ErrorKind::ExactnessLimit, "phase denominator does not fit in 64 bits");
  }
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Phase(r.get_si(), den.get_si());
}

Phase Phase::parse(std::string_view text) {
  return from_rational(parse_rational(text));
}

Phase Phase::operator+(const Phase& other) const {
  const __int128 den = static_cast<__int128>(den_) / std::gcd(den_, other.den_) * other.den_;
  const __int128 num = static_cast<__int128>(num_) * (den / den_) +
                       static_cast<__int128>(other.num_) * (den / other.den_);
  return reduce(num, den);
}

Phase Phase::operator-(const Phase& other) const { return *this + (-other); }

Phase Phase::operator-() const { return Phase(num_ == 0 ? 0 : den_ - num_, den_); }

Phase Phase::times(std::int64_t k) const {
  return reduce(static_cast<__int128>(num_) * k, den_);
}

std::complex<double> Phase::to_complex() const {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
  return {std::cos(angle), std::sin(angle)};
}

std::string Phase::to_string() const {
  if (num_ == 0) return "0";
  return std::to_string(num_) + "/" + std::to_string(den_);
}

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty rational literal");
  if (s.front() == '+') s.erase(s.begin());
  mpq_class q;
  if (q.set_str(s, 10) != 0) {
    throw Error(ErrorKind::ParseError, "invalid rational literal '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

}  // namespace etale
