#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace vsbm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws ValidationError if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Eigenpairs ordered by descending |eigenvalue|.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Eigendecomposition of a symmetric matrix. Inputs asymmetric by at most
/// 1e-10 (relative to the largest entry) are symmetrized by averaging; larger
/// asymmetry is rejected. Ordering is by magnitude because blockmodel
/// connectivity matrices may be indefinite.
SymmetricEigen sym_eigendecomp(const Matrix& m);

/// Top-r singular triplets. Singular values are nonincreasing; both factors
/// have orthonormal columns.
struct SpectralTruncation {
  Matrix left;
  Matrix right;
  Vector singular_values;
};

struct TruncationOptions {
  /// Matrices whose smaller dimension is at most this use a direct dense
  /// decomposition; larger ones use randomized subspace iteration.
  Index direct_limit = 256;
  Index oversampling = 10;
  int min_power_iterations = 4;
  int max_power_iterations = 500;
  /// Stop when every retained Ritz residual is below tolerance * s_1.
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Best rank-r approximation factors of `a`. Exactly symmetric square inputs
/// go through an eigendecomposition: singular values are |lambda|, left
/// vectors are eigenvectors and right vectors carry sign(lambda).
SpectralTruncation truncated_svd(const Matrix& a, Index r, const TruncationOptions& options = {});

/// Index r (1-based) maximizing s_r / s_{r+1}. Positions with s_{r+1} = 0
/// are skipped unless every trailing value is zero, in which case the
/// position of the last nonzero value is returned. Ties go to the smaller r.
Index select_rank(std::span<const double> singular_values);

}  // namespace vsbm
