#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace etale {

// Dense integer matrix with arbitrary-precision entries.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  mpz_class& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const mpz_class& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntMatrix operator*(const IntMatrix& other) const;
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row[a] += k * row[b]
  void add_row_multiple(std::size_t a, std::size_t b, const mpz_class& k);
  void add_col_multiple(std::size_t a, std::size_t b, const mpz_class& k);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

// U * A * V = D with U, V unimodular and D diagonal, d_i | d_{i+1}.
struct SmithForm {
  IntMatrix left;      // U
  IntMatrix diagonal;  // D
  IntMatrix right;     // V
  std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& a);

// Solves A x = b over Z/mZ. Returns nullopt when the system is inconsistent.
std::optional<std::vector<std::int64_t>> solve_mod(const IntMatrix& a, const std::vector<std::int64_t>& b,
                                                   std::int64_t modulus);

// Row-style Hermite normal form of the lattice spanned by `generators`;
// returns a basis (nonzero rows only).
std::vector<std::vector<std::int64_t>> lattice_basis(const std::vector<std::vector<std::int64_t>>& generators,
                                                     std::size_t dimension);

}  // namespace etale
