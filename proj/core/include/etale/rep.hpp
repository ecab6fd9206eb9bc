#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etale/element.hpp"

namespace etale {

// Dense row-major complex matrix.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::complex<double>> data;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  std::complex<double>& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const std::complex<double>& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  ComplexMatrix operator*(const ComplexMatrix& other) const;
  ComplexMatrix operator-(const ComplexMatrix& other) const;
  ComplexMatrix adjoint() const;
  double max_abs() const;
};

// Sparse exact matrix keyed by (row, column).
using ExactMatrix = std::map<std::pair<std::size_t, std::size_t>, Cyclotomic>;

ExactMatrix exact_product(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix exact_adjoint(const ExactMatrix& a);

// L^{sigma,x}(f) compressed to the first `truncation` arrows of the source
// fiber G_x (the fiber enumeration order, so bases are nested in the
// truncation). Entry (gamma', gamma) = sum over mu with mu gamma = gamma' of
// sigma(mu, gamma) f(mu).
struct RepMatrix {
  Unit unit;
  std::vector<Arrow> basis;
  bool truncated = false;  // the fiber has more arrows than the basis
  ComplexMatrix matrix;
  ExactMatrix exact;

  std::size_t dimension() const noexcept { return basis.size(); }
};

RepMatrix regular_rep_matrix(const TwoCocycle& sigma, const Element& f, const Unit& x, std::size_t truncation);
// Floating coefficients; `exact` stays empty.
RepMatrix regular_rep_matrix(const TwoCocycle& sigma, const FloatElement& f, const Unit& x,
                             std::size_t truncation);

struct OperatorNormOptions {
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int restarts = 3;
  int max_iterations = 200000;
  // At or below this dimension the top eigenvalue of M^dagger M is computed
  // by a dense Hermitian eigensolver; above it by power iteration.
  std::size_t dense_limit = 1024;
};

struct OperatorNorm {
  double value = 0.0;
  double lower = 0.0;  // ||M v|| for the final unit vector v
  double upper = 0.0;  // sqrt(||M||_1 ||M||_inf)
  int iterations = 0;
  std::string method;
};

OperatorNorm operator_norm(const ComplexMatrix& m, const OperatorNormOptions& options = {});

struct UnitNorm {
  Unit unit;
  double value = 0.0;
  std::size_t basis_size = 0;
  bool truncated = false;
};

struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  AbsSum upper_exact;
  std::size_t truncation = 0;
  std::vector<UnitNorm> units;
  double tol = 0.0;
};

NormEstimate reduced_norm_estimate(const TwoCocycle& sigma, const Element& f, const std::vector<Unit>& units,
                                   std::size_t truncation, const OperatorNormOptions& options = {});

// max over the grid {k / grid}^d of |sum_m f(m) e^{2 pi i m.t}|; Z^d group
// models only. Throws InvalidArgument when grid^d exceeds 10^8 points.
double fourier_symbol_norm(const Element& f, std::size_t grid);

struct Block {
  std::size_t dimension = 0;
  std::size_t multiplicity = 0;  // dimension^2, the block's share of the algebra
  double eigenvalue = 0.0;       // of the random central element used to split
};

struct BlockStructure {
  std::vector<Block> blocks;  // by decreasing dimension
  std::size_t center_dimension = 0;
  std::size_t algebra_dimension = 0;
  double threshold = 0.0;
  // singular values of the commutator map: smallest above / largest below
  // the threshold (infinity / 0 when that side is empty)
  double smallest_above = 0.0;
  double largest_below = 0.0;
  double separation_above = 0.0;  // smallest_above / threshold
  double separation_below = 0.0;  // threshold / largest_below
  std::vector<double> singular_values;
};

struct DecomposeOptions {
  std::uint64_t seed = 1;
  // When set, every matrix is conjugated by a random unitary drawn from this
  // seed before its spectrum is taken.
  std::optional<std::uint64_t> basis_seed;
  // A separation below this factor raises NumericalRankAmbiguity.
  double min_separation = 1e3;
};

BlockStructure decompose_finite_cstar(const TwoCocycle& sigma, const DecomposeOptions& options = {});

}  // namespace etale
