#include "etale/integer_matrix.hpp"

#include <utility>

#include "etale/error.hpp"

namespace etale {

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorKind::InvalidArgument, "matrix dimension mismatch");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const mpz_class& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t a, std::size_t b, const mpz_class& k) {
  if (sgn(k) == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += k * (*this)(b, j);
}

void IntMatrix::add_col_multiple(std::size_t a, std::size_t b, const mpz_class& k) {
  if (sgn(k) == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += k * (*this)(i, b);
}

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithForm s{IntMatrix::identity(a.rows()), a, IntMatrix::identity(a.cols()), 0};
  IntMatrix& d = s.diagonal;
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pr = t, pc = t;
      bool found = false;
      for (std::size_t i = t; i < d.rows(); ++i) {
        for (std::size_t j = t; j < d.cols(); ++j) {
          if (sgn(d(i, j)) == 0) continue;
          if (!found || abs(d(i, j)) < abs(d(pr, pc))) {
            pr = i;
            pc = j;
            found = true;
          }
        }
      }
      if (!found) {
        s.rank = t;
        return s;
      }
      d.swap_rows(t, pr);
      s.left.swap_rows(t, pr);
      d.swap_cols(t, pc);
      s.right.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t i = t + 1; i < d.rows(); ++i) {
        if (sgn(d(i, t)) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), d(t, t).get_mpz_t());
        d.add_row_multiple(i, t, -q);
        s.left.add_row_multiple(i, t, -q);
        if (sgn(d(i, t)) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < d.cols(); ++j) {
        if (sgn(d(t, j)) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), d(t, t).get_mpz_t());
        d.add_col_multiple(j, t, -q);
        s.right.add_col_multiple(j, t, -q);
        if (sgn(d(t, j)) != 0) clean = false;
      }
      if (!clean) continue;
      // enforce divisibility of the remaining block by the pivot
      bool divides = true;
      for (std::size_t i = t + 1; i < d.rows() && divides; ++i) {
        for (std::size_t j = t + 1; j < d.cols(); ++j) {
          if (!mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
            d.add_row_multiple(t, i, 1);
            s.left.add_row_multiple(t, i, 1);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    if (sgn(d(t, t)) < 0) {
      for (std::size_t j = 0; j < d.cols(); ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < s.left.cols(); ++j) s.left(t, j) = -s.left(t, j);
    }
  }
  s.rank = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (sgn(d(t, t)) == 0) {
      s.rank = t;
      break;
    }
  }
  return s;
}

std::optional<std::vector<std::int64_t>> solve_mod(const IntMatrix& a, const std::vector<std::int64_t>& b,
                                                   std::int64_t modulus) {
  if (b.size() != a.rows()) throw Error(ErrorKind::InvalidArgument, "right-hand side size mismatch");
  if (modulus <= 0) throw Error(ErrorKind::InvalidArgument, "modulus must be positive");
  const SmithForm s = smith_normal_form(a);
  const mpz_class m = modulus;
  // c = U b (mod m)
  std::vector<mpz_class> c(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    mpz_class acc = 0;
    for (std::size_t k = 0; k < a.rows(); ++k) acc += s.left(i, k) * b[k];
    mpz_fdiv_r(c[i].get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
  }
  std::vector<mpz_class> y(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const mpz_class di = i < std::min(a.rows(), a.cols()) ? s.diagonal(i, i) : mpz_class(0);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), di.get_mpz_t(), m.get_mpz_t());
    if (!mpz_divisible_p(c[i].get_mpz_t(), g.get_mpz_t())) return std::nullopt;
    if (i >= a.cols() || sgn(di) == 0) continue;
    const mpz_class reduced_mod = m / g;
    mpz_class dr = di / g;
    mpz_class inv;
    if (reduced_mod == 1) {
      y[i] = 0;
      continue;
    }
    mpz_fdiv_r(dr.get_mpz_t(), dr.get_mpz_t(), reduced_mod.get_mpz_t());
    mpz_invert(inv.get_mpz_t(), dr.get_mpz_t(), reduced_mod.get_mpz_t());
    mpz_class yi = (c[i] / g) * inv;
    mpz_fdiv_r(y[i].get_mpz_t(), yi.get_mpz_t(), reduced_mod.get_mpz_t());
  }
  std::vector<std::int64_t> x(a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    mpz_class acc = 0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += s.right(i, k) * y[k];
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
    x[i] = r.get_si();
  }
  return x;
}

std::vector<std::vector<std::int64_t>> lattice_basis(const std::vector<std::vector<std::int64_t>>& generators,
                                                     std::size_t dimension) {
  IntMatrix m(generators.size(), dimension);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    for (std::size_t j = 0; j < dimension; ++j) m(i, j) = generators[i].at(j);
  }
  std::size_t row = 0;
  for (std::size_t col = 0; col < dimension && row < m.rows(); ++col) {
    // euclidean elimination below `row` in this column
    for (;;) {
      std::size_t pivot = m.rows();
      for (std::size_t i = row; i < m.rows(); ++i) {
        if (sgn(m(i, col)) != 0 && (pivot == m.rows() || abs(m(i, col)) < abs(m(pivot, col)))) pivot = i;
      }
      if (pivot == m.rows()) break;
      m.swap_rows(row, pivot);
      bool done = true;
      for (std::size_t i = row + 1; i < m.rows(); ++i) {
        if (sgn(m(i, col)) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, col).get_mpz_t(), m(row, col).get_mpz_t());
        m.add_row_multiple(i, row, -q);
        if (sgn(m(i, col)) != 0) done = false;
      }
      if (done) break;
    }
    if (sgn(m(row, col)) == 0) continue;
    if (sgn(m(row, col)) < 0) {
      for (std::size_t j = 0; j < dimension; ++j) m(row, j) = -m(row, j);
    }
    for (std::size_t i = 0; i < row; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), m(i, col).get_mpz_t(), m(row, col).get_mpz_t());
      m.add_row_multiple(i, row, -q);
    }
    ++row;
  }
  std::vector<std::vector<std::int64_t>> basis;
  for (std::size_t i = 0; i < row; ++i) {
    std::vector<std::int64_t> v(dimension);
    for (std::size_t j = 0; j < dimension; ++j) {
      if (!m(i, j).fits_slong_p()) throw Error(ErrorKind::ExactnessLimit, "lattice basis entry overflow");
      v[j] = m(i, j).get_si();
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace etale
