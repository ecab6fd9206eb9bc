#include "etale/rep.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "etale/error.hpp"

namespace etale {

namespace {

using Mat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXcd;

Eigen::Map<const Mat> view(const ComplexMatrix& m) {
  return {m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols)};
}

ComplexMatrix from_eigen(const Mat& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  Eigen::Map<Mat>(out.data.data(), m.rows(), m.cols()) = m;
  return out;
}

Mat random_unitary(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::MatrixXcd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = {d(rng), d(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const CylinderShiftGroupoid* as_cylinder(const GroupoidModel& m) { return dynamic_cast<const CylinderShiftGroupoid*>(&m); }

template <class C>
RepMatrix build(const TwoCocycle& sigma, const BasicElement<C>& f, const Unit& x, std::size_t truncation,
                ExactMatrix* exact) {
  if (f.model() != sigma.model()) throw Error(ErrorKind::ModelMismatch, "cocycle and element live on different models");
  const auto& m = *f.model();
  m.check_unit(x);
  if (truncation == 0) throw Error(ErrorKind::InvalidArgument, "truncation must be positive");
  auto fiber = m.fiber(x, FiberDirection::Source, truncation);
  RepMatrix out;
  out.unit = x;
  out.basis = std::move(fiber.arrows);
  out.truncated = fiber.truncated;
  const std::size_t n = out.basis.size();
  out.matrix = ComplexMatrix(n, n);
  std::map<Arrow, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(out.basis[i], i);

  const auto* cyl = as_cylinder(m);
  std::map<Unit, std::vector<std::pair<Arrow, const C*>>> by_source;
  if (!cyl) {
    for (const auto& [s, c] : f.terms()) {
      const auto& mu = std::get<Arrow>(s);
      by_source[m.source(mu)].emplace_back(mu, &c);
    }
  }
  auto put = [&](std::size_t row, std::size_t col, const Arrow& mu, const Arrow& gamma, const C& c) {
    const auto phase = sigma.eval_unchecked(mu, gamma);
    const auto v = CoeffTraits<C>::times(c, phase);
    out.matrix(row, col) += CoeffTraits<C>::to_complex(v);
    if constexpr (std::is_same_v<C, Cyclotomic>) {
      if (exact) {
        auto& e = (*exact)[{row, col}];
        e += v;
        if (e.is_zero()) exact->erase({row, col});
      }
    }
  };
  for (std::size_t col = 0; col < n; ++col) {
    const auto& gamma = out.basis[col];
    const auto y = m.range(gamma);
    if (cyl) {
      const auto& p = std::get<SequencePoint>(y);
      for (const auto& [s, c] : f.terms()) {
        auto mu = cyl->bundle_arrow_with_source(std::get<ArrowBundle>(s), p);
        if (!mu) continue;
        auto it = index.find(m.compose(*mu, gamma));
        if (it != index.end()) put(it->second, col, *mu, gamma, c);
      }
      continue;
    }
    auto terms = by_source.find(y);
    if (terms == by_source.end()) continue;
    for (const auto& [mu, c] : terms->second) {
      auto it = index.find(m.compose(mu, gamma));
      if (it != index.end()) put(it->second, col, mu, gamma, *c);
    }
  }
  return out;
}

}  // namespace

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
  if (cols != other.rows) throw Error(ErrorKind::InvalidArgument, "matrix shapes do not match");
  return from_eigen(view(*this) * view(other));
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
  if (rows != other.rows || cols != other.cols) throw Error(ErrorKind::InvalidArgument, "matrix shapes do not match");
  return from_eigen(view(*this) - view(other));
}

ComplexMatrix ComplexMatrix::adjoint() const { return from_eigen(view(*this).adjoint()); }

double ComplexMatrix::max_abs() const {
  double r = 0;
  for (const auto& z : data) r = std::max(r, std::abs(z));
  return r;
}

ExactMatrix exact_product(const ExactMatrix& a, const ExactMatrix& b) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, const Cyclotomic*>>> rows_of_b;
  for (const auto& [k, v] : b) rows_of_b[k.first].emplace_back(k.second, &v);
  ExactMatrix out;
  for (const auto& [k, v] : a) {
    auto it = rows_of_b.find(k.second);
    if (it == rows_of_b.end()) continue;
    for (const auto& [j, w] : it->second) {
      auto& e = out[{k.first, j}];
      e += v * *w;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

ExactMatrix exact_adjoint(const ExactMatrix& a) {
  ExactMatrix out;
  for (const auto& [k, v] : a) out.emplace(std::pair{k.second, k.first}, v.conj());
  return out;
}

RepMatrix regular_rep_matrix(const TwoCocycle& sigma, const Element& f, const Unit& x, std::size_t truncation) {
  ExactMatrix exact;
  auto out = build(sigma, f, x, truncation, &exact);
  out.exact = std::move(exact);
  return out;
}

RepMatrix regular_rep_matrix(const TwoCocycle& sigma, const FloatElement& f, const Unit& x,
                             std::size_t truncation) {
  return build(sigma, f, x, truncation, nullptr);
}

// ---------------------------------------------------------------------------

OperatorNorm operator_norm(const ComplexMatrix& matrix, const OperatorNormOptions& options) {
  if (!(options.tol > 0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  OperatorNorm out;
  const auto m = view(matrix);
  if (matrix.rows == 0 || matrix.cols == 0) {
    out.method = "empty";
    return out;
  }
  const double row_sum = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double col_sum = m.cwiseAbs().colwise().sum().maxCoeff();
  out.upper = std::sqrt(row_sum * col_sum);
  if (out.upper == 0) {
    out.method = "zero";
    return out;
  }
  const auto n = static_cast<Eigen::Index>(matrix.cols);

  if (matrix.cols <= options.dense_limit) {
    const Eigen::MatrixXcd a = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    const Eigen::Index top = n - 1;
    const Vec v = es.eigenvectors().col(top);
    out.lower = (m * v).norm();
    out.value = std::sqrt(std::max(es.eigenvalues()(top), 0.0));
    out.value = std::min(std::max(out.value, out.lower), out.upper);
    out.method = "dense-hermitian";
    return out;
  }

  // regular representation matrices have |supp f| nonzeros per column
  const Eigen::SparseMatrix<std::complex<double>> sm = Eigen::MatrixXcd(m).sparseView();
  const Eigen::SparseMatrix<std::complex<double>> sa = sm.adjoint();
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> d;
  Vec best;
  double best_rho = -1;
  int total = 0;
  for (int r = 0; r < std::max(options.restarts, 1); ++r) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {d(rng), d(rng)};
    v.normalize();
    double rho = 0;
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it, ++total) {
      Vec w = sa * (sm * v);
      rho = v.dot(w).real();
      const double residual = (w - rho * v).norm();
      if (rho <= 0) break;
      if (residual <= options.tol * rho) {
        converged = true;
        break;
      }
      v = w / w.norm();
    }
    if (!converged && rho > 0) {
      out.lower = std::max(out.lower, (m * v).norm());
      out.value = out.lower;
      out.iterations = total;
      throw Error(ErrorKind::ConvergenceFailure,
                  "power iteration did not converge; interval [" + std::to_string(out.lower) + ", " +
                      std::to_string(out.upper) + "]");
    }
    if (rho > best_rho) {
      best_rho = rho;
      best = v;
    }
  }
  out.iterations = total;
  out.lower = (m * best).norm();
  out.value = std::min(out.lower, out.upper);
  out.method = "power-iteration";
  return out;
}

NormEstimate reduced_norm_estimate(const TwoCocycle& sigma, const Element& f, const std::vector<Unit>& units,
                                   std::size_t truncation, const OperatorNormOptions& options) {
  NormEstimate est;
  est.truncation = truncation;
  est.tol = options.tol;
  auto in = i_norm(f);
  est.upper = in.value;
  est.upper_exact = in.exact;
  const auto ff = to_float(f);
  for (const auto& x : units) {
    auto rep = regular_rep_matrix(sigma, ff, x, truncation);
    auto norm = operator_norm(rep.matrix, options);
    est.units.push_back({x, norm.value, rep.dimension(), rep.truncated});
    est.lower = std::max(est.lower, norm.value);
  }
  // compressions never exceed the I-norm; clip rounding above it
  est.lower = std::min(est.lower, est.upper);
  return est;
}

double fourier_symbol_norm(const Element& f, std::size_t grid) {
  const auto* g = dynamic_cast<const GroupGroupoid*>(f.model().get());
  if (!g || g->group().family() != GroupFamily::Zd) {
    throw Error(ErrorKind::UnsupportedModel, "Fourier symbols are defined for Z^d group models");
  }
  const std::size_t d = g->group().dimension();
  if (grid == 0) throw Error(ErrorKind::InvalidArgument, "grid must be positive");
  double points = std::pow(static_cast<double>(grid), static_cast<double>(d));
  if (points > 1e8) throw Error(ErrorKind::InvalidArgument, "grid has more than 10^8 points");
  std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>> terms;
  for (const auto& [s, c] : f.terms()) terms.emplace_back(std::get<GroupArrow>(std::get<Arrow>(s)).g.v, c.to_complex());
  const auto total = static_cast<std::size_t>(points);
  double best = 0;
  std::vector<double> t(d);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t r = k;
    for (std::size_t i = 0; i < d; ++i) {
      t[i] = static_cast<double>(r % grid) / static_cast<double>(grid);
      r /= grid;
    }
    std::complex<double> sum;
    for (const auto& [mv, c] : terms) {
      double phase = 0;
      for (std::size_t i = 0; i < d; ++i) phase += static_cast<double>(mv[i]) * t[i];
      sum += c * std::polar(1.0, 2 * std::numbers::pi * phase);
    }
    best = std::max(best, std::abs(sum));
  }
  return best;
}

// ---------------------------------------------------------------------------

BlockStructure decompose_finite_cstar(const TwoCocycle& sigma, const DecomposeOptions& options) {
  const auto& model = *sigma.model();
  const auto* idx = model.finite_index();
  if (!idx) throw Error(ErrorKind::UnsupportedModel, "block decomposition needs a finite model");
  const auto report = check_cocycle(sigma, 1);
  if (!report.valid) throw Error(ErrorKind::CocycleViolation, report.message, report.witness);

  const std::size_t n = idx->size();
  const auto& arrows = idx->arrows;
  // product table: prod[a][b] = (index of ab, sigma(a,b)) when composable
  std::vector<std::vector<std::pair<std::size_t, std::complex<double>>>> prod(
      n, std::vector<std::pair<std::size_t, std::complex<double>>>(n, {n, {}}));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (idx->source_unit[a] != idx->range_unit[b]) continue;
      prod[a][b] = {idx->at(model.compose(arrows[a], arrows[b])),
                    sigma.eval_unchecked(arrows[a], arrows[b]).to_complex()};
    }

  // c -> ([sum c_g delta_g, delta_b])_b, stacked over b and compressed to
  // its triangular factor as rows accumulate
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd r_factor(0, nn);
  Eigen::MatrixXcd pending(0, nn);
  auto compress = [&] {
    Eigen::MatrixXcd stacked(r_factor.rows() + pending.rows(), nn);
    stacked << r_factor, pending;
    pending.resize(0, nn);
    if (stacked.rows() <= nn) {
      r_factor = stacked;
      return;
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
    r_factor = qr.matrixQR().topRows(nn).triangularView<Eigen::Upper>();
  };
  std::vector<std::vector<std::pair<std::size_t, std::complex<double>>>> rows(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (auto& r : rows) r.clear();
    for (std::size_t g = 0; g < n; ++g) {
      if (prod[g][b].first < n) rows[prod[g][b].first].emplace_back(g, prod[g][b].second);
      if (prod[b][g].first < n) rows[prod[b][g].first].emplace_back(g, -prod[b][g].second);
    }
    for (const auto& r : rows) {
      Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(nn);
      for (const auto& [i, v] : r) row(static_cast<Eigen::Index>(i)) += v;
      if (row.cwiseAbs().maxCoeff() == 0) continue;
      pending.conservativeResize(pending.rows() + 1, nn);
      pending.row(pending.rows() - 1) = row;
    }
    if (pending.rows() >= 3 * nn) compress();
  }
  compress();
  Eigen::MatrixXcd u_basis;
  if (options.basis_seed) {
    u_basis = random_unitary(n, *options.basis_seed);
    r_factor = r_factor * u_basis;
  }
  Eigen::MatrixXcd square = Eigen::MatrixXcd::Zero(nn, nn);
  square.topRows(std::min(r_factor.rows(), nn)) = r_factor.topRows(std::min(r_factor.rows(), nn));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(square, Eigen::ComputeFullV);
  BlockStructure out;
  out.algebra_dimension = n;
  const auto sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) out.singular_values.push_back(sv(i));
  std::sort(out.singular_values.begin(), out.singular_values.end());
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  // structure constants are unimodular, so a commutative algebra keeps scale 1
  out.threshold = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(smax, 1.0);
  out.smallest_above = std::numeric_limits<double>::infinity();
  out.largest_below = 0;
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double s = sv(i);
    if (s <= out.threshold) {
      out.largest_below = std::max(out.largest_below, s);
      null_cols.push_back(i);
    } else {
      out.smallest_above = std::min(out.smallest_above, s);
    }
  }
  out.separation_above = out.smallest_above / out.threshold;
  out.separation_below =
      out.largest_below > 0 ? out.threshold / out.largest_below : std::numeric_limits<double>::infinity();
  out.center_dimension = null_cols.size();
  if (out.separation_above < options.min_separation || out.separation_below < options.min_separation) {
    throw Error(ErrorKind::NumericalRankAmbiguity,
                "singular values near the rank threshold " + format_double(out.threshold) + ": gap [" +
                    format_double(out.largest_below) + ", " + format_double(out.smallest_above) + "]");
  }
  Eigen::MatrixXcd center(n, null_cols.size());
  for (std::size_t j = 0; j < null_cols.size(); ++j) center.col(static_cast<Eigen::Index>(j)) = svd.matrixV().col(null_cols[j]);
  if (options.basis_seed) center = u_basis * center;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index j = 0; j < center.cols(); ++j) z += coef(rng) * center.col(j);
    // a = z + z*, with z*(g^-1) = conj(z(g)) conj(sigma(g, g^-1))
    Eigen::VectorXcd a = z;
    for (std::size_t g = 0; g < n; ++g) {
      const std::size_t gi = idx->inverse[g];
      a(static_cast<Eigen::Index>(gi)) += std::conj(z(static_cast<Eigen::Index>(g))) * std::conj(prod[g][gi].second);
    }
    Eigen::MatrixXcd la = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t mu = 0; mu < n; ++mu) {
      if (std::abs(a(static_cast<Eigen::Index>(mu))) == 0) continue;
      for (std::size_t g = 0; g < n; ++g)
        if (prod[mu][g].first < n)
          la(static_cast<Eigen::Index>(prod[mu][g].first), static_cast<Eigen::Index>(g)) +=
              a(static_cast<Eigen::Index>(mu)) * prod[mu][g].second;
    }
    if (options.basis_seed) la = u_basis * la * u_basis.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> spec(la, Eigen::EigenvaluesOnly);
    const auto lam = spec.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    std::vector<Block> blocks;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (blocks.empty() || lam(i) - blocks.back().eigenvalue > 1e-6 * scale) {
        blocks.push_back({0, 0, lam(i)});
      }
      ++blocks.back().multiplicity;
    }
    if (blocks.size() != out.center_dimension) continue;
    bool square = true;
    for (auto& b : blocks) {
      b.dimension = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(b.multiplicity))));
      square = square && b.dimension * b.dimension == b.multiplicity;
    }
    if (!square) continue;
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& x, const Block& y) { return x.dimension > y.dimension; });
    out.blocks = std::move(blocks);
    return out;
  }
  throw Error(ErrorKind::NumericalRankAmbiguity,
              "could not split the center of dimension " + std::to_string(out.center_dimension) +
                  " into blocks with square multiplicities");
}

}  // namespace etale
