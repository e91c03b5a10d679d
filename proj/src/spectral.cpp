#include "vsbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "vsbm/errors.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

std::vector<Index> order_by_magnitude(const Vector& values) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });
  return order;
}

Matrix orthonormal_basis(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

Matrix gaussian_sketch(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix omega(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) omega(i, j) = rng.normal();
  }
  return omega;
}

SpectralTruncation from_eigen(const Vector& values, const Matrix& vectors, Index r) {
  SpectralTruncation out;
  out.left = vectors.leftCols(r);
  out.right = out.left;
  out.singular_values.resize(r);
  for (Index j = 0; j < r; ++j) {
    out.singular_values(j) = std::abs(values(j));
    if (values(j) < 0) out.right.col(j) *= -1.0;
  }
  return out;
}

SpectralTruncation symmetric_subspace_iteration(const Matrix& a, Index r,
                                                const TruncationOptions& opt) {
  const Index n = a.rows();
  const Index width = std::min(n, r + opt.oversampling);
  Matrix q = orthonormal_basis(a * gaussian_sketch(n, width, opt.seed));

  Vector ritz_values;
  Matrix ritz_vectors;
  for (int iter = 1; iter <= opt.max_power_iterations; ++iter) {
    const Matrix y = a * q;
    Matrix h = q.transpose() * y;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> small(h);
    const auto order = order_by_magnitude(small.eigenvalues());
    Matrix w(width, width);
    ritz_values.resize(width);
    for (Index j = 0; j < width; ++j) {
      w.col(j) = small.eigenvectors().col(order[static_cast<std::size_t>(j)]);
      ritz_values(j) = small.eigenvalues()(order[static_cast<std::size_t>(j)]);
    }
    ritz_vectors = q * w;
    const Matrix residual =
        (y * w.leftCols(r)) - ritz_vectors.leftCols(r) * ritz_values.head(r).asDiagonal();
    const double scale = std::max(std::abs(ritz_values(0)), 1e-300);
    const double worst = residual.colwise().norm().maxCoeff();
    if (iter >= opt.min_power_iterations && worst <= opt.tolerance * scale) break;
    q = orthonormal_basis(y * w);
  }
  return from_eigen(ritz_values, ritz_vectors, r);
}

SpectralTruncation general_subspace_iteration(const Matrix& a, Index r,
                                              const TruncationOptions& opt) {
  const Index width = std::min(std::min(a.rows(), a.cols()), r + opt.oversampling);
  Matrix q = orthonormal_basis(a * gaussian_sketch(a.cols(), width, opt.seed));

  SpectralTruncation out;
  for (int iter = 1; iter <= opt.max_power_iterations; ++iter) {
    // Rayleigh-Ritz on range(q): q^T a = u_s s v_s^T.
    const Matrix z = a.transpose() * q;
    Eigen::JacobiSVD<Matrix> small(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix right = small.matrixU();
    const Matrix left = q * small.matrixV();
    const Vector s = small.singularValues();
    const Matrix y = a * right;
    const Matrix residual = y.leftCols(r) - left.leftCols(r) * s.head(r).asDiagonal();
    out.left = left.leftCols(r);
    out.right = right.leftCols(r);
    out.singular_values = s.head(r);
    const double worst = residual.colwise().norm().maxCoeff();
    if (iter >= opt.min_power_iterations && worst <= opt.tolerance * std::max(s(0), 1e-300)) {
      break;
    }
    q = orthonormal_basis(y);
  }
  return out;
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

SymmetricEigen sym_eigendecomp(const Matrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("sym_eigendecomp: matrix is not square");
  require_finite(m, "sym_eigendecomp");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw ValidationError("sym_eigendecomp: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("sym_eigendecomp: solver failed");

  const auto order = order_by_magnitude(solver.eigenvalues());
  SymmetricEigen out;
  out.values.resize(m.rows());
  out.vectors.resize(m.rows(), m.cols());
  for (Index j = 0; j < m.rows(); ++j) {
    out.values(j) = solver.eigenvalues()(order[static_cast<std::size_t>(j)]);
    out.vectors.col(j) = solver.eigenvectors().col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

SpectralTruncation truncated_svd(const Matrix& a, Index r, const TruncationOptions& options) {
  if (r < 1 || r > std::min(a.rows(), a.cols())) {
    throw ValidationError("truncated_svd: rank " + std::to_string(r) + " outside [1, " +
                          std::to_string(std::min(a.rows(), a.cols())) + "]");
  }
  require_finite(a, "truncated_svd");

  const bool symmetric = a.rows() == a.cols() && a == a.transpose();
  const bool direct = std::min(a.rows(), a.cols()) <= options.direct_limit;

  if (symmetric) {
    if (direct) {
      const SymmetricEigen eig = sym_eigendecomp(a);
      return from_eigen(eig.values, eig.vectors, r);
    }
    return symmetric_subspace_iteration(a, r, options);
  }
  if (!direct) return general_subspace_iteration(a, r, options);

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SpectralTruncation out;
  out.left = svd.matrixU().leftCols(r);
  out.right = svd.matrixV().leftCols(r);
  out.singular_values = svd.singularValues().head(r);
  return out;
}

Index select_rank(std::span<const double> s) {
  if (s.size() < 2) throw ValidationError("select_rank: need at least two singular values");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] >= 0.0) || !std::isfinite(s[i])) {
      throw ValidationError("select_rank: singular values must be finite and nonnegative");
    }
    if (i > 0 && s[i] > s[i - 1]) throw ValidationError("select_rank: values must be nonincreasing");
  }
  const auto nonzero = static_cast<Index>(std::count_if(s.begin(), s.end(), [](double v) { return v > 0.0; }));
  if (nonzero == 0) throw ValidationError("select_rank: all singular values are zero");
  if (nonzero < static_cast<Index>(s.size())) return nonzero;

  Index best = 1;
  double best_ratio = s[0] / s[1];
  for (std::size_t r = 2; r < s.size(); ++r) {
    const double ratio = s[r - 1] / s[r];
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = static_cast<Index>(r);
    }
  }
  return best;
}

}  // namespace vsbm
