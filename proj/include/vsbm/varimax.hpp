#pragma once

#include <cstdint>
#include <vector>

#include "vsbm/spectral.hpp"

namespace vsbm {

/// sum_j [ mean_i L_ij^4 - (mean_i L_ij^2)^2 ] for L = u * r.
double varimax_objective(const Matrix& u, const Matrix& r);

struct VarimaxOptions {
  /// Stop once a full sweep raises the objective by less than
  /// tolerance * |objective|.
  double tolerance = 1e-10;
  int max_sweeps = 1000;
  /// Extra solves from Haar-random starting rotations; the best is kept.
  int restarts = 0;
  std::uint64_t seed = 0;
};

struct RotationResult {
  Matrix rotation;
  double objective_value = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  /// Objective after each sweep of the solve that produced `rotation`,
  /// starting with the value at the initial rotation.
  std::vector<double> objective_trace;
};

/// Varimax rotation of an orthonormal-column matrix by cyclic pairwise
/// planar rotations, each pair receiving its closed-form optimal angle.
/// No row normalization. The returned rotation is canonicalized: columns are
/// sign-flipped so each rotated column has a nonnegative sum of cubes, then
/// ordered by descending column maximum.
RotationResult varimax_rotate(const Matrix& u, const VarimaxOptions& options = {});

/// An element of the signed permutation group P(k). As a matrix, row a has
/// its single nonzero entry signs[a] in column perm[a], so (P x)_a =
/// signs[a] * x[perm[a]].
class SignedPermutation {
 public:
  SignedPermutation() = default;
  SignedPermutation(std::vector<int> perm, std::vector<int> signs);

  static SignedPermutation identity(int k);

  int size() const { return static_cast<int>(perm_.size()); }
  const std::vector<int>& perm() const { return perm_; }
  const std::vector<int>& signs() const { return signs_; }

  Matrix matrix() const;
  /// Applies P to each row of `rows` viewed as a column vector.
  Matrix apply_rows(const Matrix& rows) const;

  bool operator==(const SignedPermutation&) const = default;

 private:
  std::vector<int> perm_;
  std::vector<int> signs_;
};

/// max_i || P * estimate_i - target_i ||_2.
double alignment_error(const Matrix& estimate, const Matrix& target, const SignedPermutation& p);

/// Exhaustive minimizer of alignment_error over P(k), k <= 10. Candidates
/// are enumerated lexicographically in (perm[0], sign[0], perm[1], ...) with
/// +1 ordered before -1; the first minimizer wins. Branch-and-bound prunes
/// partial assignments whose lower bound already matches the incumbent.
SignedPermutation align_signed_permutation(const Matrix& estimate, const Matrix& target);

}  // namespace vsbm
