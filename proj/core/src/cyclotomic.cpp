#include "etale/cyclotomic.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "etale/error.hpp"

namespace etale {

namespace {

using Poly = std::vector<std::int64_t>;

// Reduction data for Q(zeta_N): row k holds x^k mod Phi_N for 0 <= k < N.
struct FieldData {
  std::int64_t order = 1;
  std::int64_t degree = 1;
  std::vector<std::int64_t> power_table;  // order x degree, row-major

  const std::int64_t* power(std::int64_t k) const { return power_table.data() + k * degree; }
};

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::int64_t, Poly>& polynomial_cache() {
  static std::map<std::int64_t, Poly> cache;
  return cache;
}

std::map<std::int64_t, std::unique_ptr<FieldData>>& field_cache() {
  static std::map<std::int64_t, std::unique_ptr<FieldData>> cache;
  return cache;
}

// Exact division of monic integer polynomials.
Poly divide(Poly num, const Poly& den) {
  const std::size_t dn = den.size() - 1;
  Poly quotient(num.size() - dn, 0);
  for (std::size_t i = num.size(); i-- > dn;) {
    const std::int64_t c = num[i];
    if (c == 0) continue;
    quotient[i - dn] = c;
    for (std::size_t j = 0; j <= dn; ++j) num[i - dn + j] -= c * den[j];
  }
  return quotient;
}

const Poly& cyclotomic_polynomial_locked(std::int64_t n) {
  auto& cache = polynomial_cache();
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  Poly p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<std::size_t>(n)] = 1;
  for (std::int64_t d = 1; d < n; ++d) {
    if (n % d == 0) p = divide(p, cyclotomic_polynomial_locked(d));
  }
  return cache.emplace(n, std::move(p)).first->second;
}

const FieldData& field(std::int64_t n) {
  if (n > Cyclotomic::kMaxOrder) {
    throw Error(ErrorKind::ExactnessLimit,
                "cyclotomic order " + std::to_string(n) + " exceeds the exact-arithmetic limit " +
                    std::to_string(Cyclotomic::kMaxOrder));
  }
  std::lock_guard lock(cache_mutex());
  auto& cache = field_cache();
  if (auto it = cache.find(n); it != cache.end()) return *it->second;
  const Poly& phi = cyclotomic_polynomial_locked(n);
  auto data = std::make_unique<FieldData>();
  data->order = n;
  data->degree = static_cast<std::int64_t>(phi.size()) - 1;
  const auto deg = data->degree;
  data->power_table.assign(static_cast<std::size_t>(n * deg), 0);
  Poly cur(static_cast<std::size_t>(deg), 0);
  cur[0] = 1;
  for (std::int64_t k = 0; k < n; ++k) {
    std::copy(cur.begin(), cur.end(), data->power_table.begin() + k * deg);
    // multiply by x, then eliminate x^deg using the monic relation
    const std::int64_t top = cur[static_cast<std::size_t>(deg - 1)];
    for (std::int64_t j = deg - 1; j > 0; --j) cur[j] = cur[j - 1];
    cur[0] = 0;
    if (top != 0) {
      for (std::int64_t j = 0; j < deg; ++j) cur[j] -= top * phi[j];
    }
  }
  return *cache.emplace(n, std::move(data)).first->second;
}

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  const std::int64_t l = std::lcm(a, b);
  if (l > Cyclotomic::kMaxOrder) {
    throw Error(ErrorKind::ExactnessLimit,
                "cyclotomic order " + std::to_string(l) + " exceeds the exact-arithmetic limit");
  }
  return l;
}

// Sum of c_k x^(k) for arbitrary exponents, reduced into Q(zeta_N).
std::vector<mpq_class> reduce_exponents(const FieldData& f, const std::vector<mpq_class>& by_exponent) {
  std::vector<mpq_class> out(static_cast<std::size_t>(f.degree));
  for (std::size_t k = 0; k < by_exponent.size(); ++k) {
    if (sgn(by_exponent[k]) == 0) continue;
    const std::int64_t* row = f.power(static_cast<std::int64_t>(k) % f.order);
    for (std::int64_t j = 0; j < f.degree; ++j) {
      if (row[j] != 0) out[static_cast<std::size_t>(j)] += by_exponent[k] * row[j];
    }
  }
  return out;
}

}  // namespace

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t result = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

const std::vector<std::int64_t>& cyclotomic_polynomial(std::int64_t n) {
  std::lock_guard lock(cache_mutex());
  return cyclotomic_polynomial_locked(n);
}

Cyclotomic::Cyclotomic(long value) : Cyclotomic(mpq_class(value)) {}

Cyclotomic::Cyclotomic(const mpq_class& value) {
  if (sgn(value) != 0) coeffs_.push_back(value);
}

Cyclotomic::Cyclotomic(std::int64_t order, std::vector<mpq_class> coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
  normalize();
}

void Cyclotomic::normalize() {
  bool all_zero = true;
  bool rational = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (sgn(coeffs_[k]) != 0) {
      all_zero = false;
      if (k > 0) rational = false;
    }
  }
  if (all_zero) {
    order_ = 1;
    coeffs_.clear();
  } else if (rational && order_ != 1) {
    mpq_class c = coeffs_[0];
    order_ = 1;
    coeffs_.assign(1, c);
  }
}

Cyclotomic Cyclotomic::gaussian(const mpq_class& re, const mpq_class& im) {
  if (sgn(im) == 0) return Cyclotomic(re);
  std::vector<mpq_class> c{re, im};  // Q(zeta_4) = Q(i), Phi_4 = x^2 + 1
  return Cyclotomic(4, std::move(c));
}

Cyclotomic Cyclotomic::root_of_unity(const Phase& phase) {
  if (phase.is_zero()) return Cyclotomic(1L);
  const std::int64_t n = phase.denominator();
  const FieldData& f = field(n);
  const std::int64_t* row = f.power(phase.numerator());
  std::vector<mpq_class> c(static_cast<std::size_t>(f.degree));
  for (std::int64_t j = 0; j < f.degree; ++j) c[static_cast<std::size_t>(j)] = row[j];
  return Cyclotomic(n, std::move(c));
}

Cyclotomic Cyclotomic::lifted(std::int64_t order) const {
  if (order == order_ || is_zero()) {
    Cyclotomic copy = *this;
    if (!is_zero() && order != order_) copy.order_ = order;
    return copy;
  }
  if (order % order_ != 0) {
    throw Error(ErrorKind::InvalidArgument, "cannot lift cyclotomic to a non-multiple order");
  }
  const std::int64_t step = order / order_;
  const FieldData& f = field(order);
  std::vector<mpq_class> by_exponent(static_cast<std::size_t>((static_cast<std::int64_t>(coeffs_.size()) - 1) * step + 1));
  for (std::size_t k = 0; k < coeffs_.size(); ++k) by_exponent[k * static_cast<std::size_t>(step)] = coeffs_[k];
  Cyclotomic out;
  out.order_ = order;
  out.coeffs_ = reduce_exponents(f, by_exponent);
  return out;  // deliberately not normalized: caller wants this order
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& other) const {
  if (is_zero()) return other;
  if (other.is_zero()) return *this;
  const std::int64_t n = lcm_checked(order_, other.order_);
  Cyclotomic a = lifted(n);
  const Cyclotomic b = other.lifted(n);
  a.coeffs_.resize(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) a.coeffs_[k] += b.coeffs_[k];
  a.normalize();
  return a;
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& other) const { return *this + (-other); }

Cyclotomic Cyclotomic::operator*(const Cyclotomic& other) const {
  if (is_zero() || other.is_zero()) return {};
  if (order_ == 1) {
    Cyclotomic out = other;
    for (auto& c : out.coeffs_) c *= coeffs_[0];
    return out;
  }
  if (other.order_ == 1) return other * *this;
  const std::int64_t n = lcm_checked(order_, other.order_);
  const Cyclotomic a = lifted(n);
  const Cyclotomic b = other.lifted(n);
  std::vector<mpq_class> prod(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (sgn(a.coeffs_[i]) == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
      if (sgn(b.coeffs_[j]) == 0) continue;
      prod[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return Cyclotomic(n, reduce_exponents(field(n), prod));
}

Cyclotomic Cyclotomic::times(const Phase& phase) const {
  if (phase.is_zero() || is_zero()) return *this;
  const std::int64_t n = lcm_checked(order_, phase.denominator());
  const Cyclotomic a = lifted(n);
  const std::int64_t shift = phase.numerator() * (n / phase.denominator());
  std::vector<mpq_class> by_exponent(a.coeffs_.size() + static_cast<std::size_t>(shift));
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) by_exponent[k + static_cast<std::size_t>(shift)] = a.coeffs_[k];
  return Cyclotomic(n, reduce_exponents(field(n), by_exponent));
}

Cyclotomic Cyclotomic::conj() const {
  if (order_ <= 2 || is_zero()) return *this;
  std::vector<mpq_class> by_exponent(static_cast<std::size_t>(order_));
  by_exponent[0] = coeffs_[0];
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    by_exponent[static_cast<std::size_t>(order_) - k] = coeffs_[k];
  }
  return Cyclotomic(order_, reduce_exponents(field(order_), by_exponent));
}

std::complex<double> Cyclotomic::to_complex() const {
  std::complex<double> z{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (sgn(coeffs_[k]) == 0) continue;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(order_);
    z += coeffs_[k].get_d() * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return z;
}

std::string Cyclotomic::to_string() const {
  if (is_zero()) return "0";
  if (order_ == 1) return coeffs_[0].get_str();
  if (order_ == 4) {
    std::ostringstream os;
    os << coeffs_[0].get_str() << (sgn(coeffs_[1]) < 0 ? "-" : "+")
       << mpq_class(::abs(coeffs_[1])).get_str() << "i";
    return os.str();
  }
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (sgn(coeffs_[k]) == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << coeffs_[k].get_str() << ")";
    if (k > 0) os << "*z" << order_ << "^" << k;
  }
  return os.str();
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.order_ == b.order_) return a.coeffs_ == b.coeffs_;
  return (a - b).is_zero();
}

}  // namespace etale
