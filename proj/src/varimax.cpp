#include "vsbm/varimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vsbm/errors.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

namespace {

constexpr double kOrthogonalityTolerance = 1e-8;
constexpr double kOrthonormalInputTolerance = 1e-6;
constexpr int kMaxAlignmentSize = 10;

double column_criterion(const Eigen::Ref<const Vector>& col) {
  const double n = static_cast<double>(col.size());
  const double mean_sq = col.squaredNorm() / n;
  const double mean_quartic = col.array().square().square().sum() / n;
  return mean_quartic - mean_sq * mean_sq;
}

double loading_objective(const Matrix& loadings) {
  double total = 0.0;
  for (Index j = 0; j < loadings.cols(); ++j) total += column_criterion(loadings.col(j));
  return total;
}

struct Solve {
  Matrix rotation;
  Matrix loadings;
  std::vector<double> trace;
  int sweeps = 0;
  bool converged = false;
};

// One pairwise rotation of loading columns (x, y) by the angle maximizing
// the planar varimax criterion. Returns false when already at the optimum.
bool rotate_pair(Matrix& loadings, Matrix& rotation, Index p, Index q) {
  const double n = static_cast<double>(loadings.rows());
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (Index i = 0; i < loadings.rows(); ++i) {
    const double x = loadings(i, p);
    const double y = loadings(i, q);
    const double u = x * x - y * y;
    const double v = 2.0 * x * y;
    a += u;
    b += v;
    c += u * u - v * v;
    d += 2.0 * u * v;
  }
  const double num = d - 2.0 * a * b / n;
  const double den = c - (a * a - b * b) / n;
  // Criterion along the circle is const + (den cos 4phi + num sin 4phi) / 4n,
  // currently at phi = 0.
  const double amplitude = std::hypot(num, den);
  if (amplitude - den <= 1e-15 * std::max(amplitude, 1e-300)) return false;

  const double phi = 0.25 * std::atan2(num, den);
  const double cs = std::cos(phi);
  const double sn = std::sin(phi);
  auto givens = [&](Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
      const double x = m(i, p);
      const double y = m(i, q);
      m(i, p) = cs * x + sn * y;
      m(i, q) = -sn * x + cs * y;
    }
  };
  givens(loadings);
  givens(rotation);
  return true;
}

Solve solve_from(const Matrix& u, const Matrix& start, const VarimaxOptions& opt) {
  Solve s;
  s.rotation = start;
  s.loadings = u * start;
  const Index d = u.cols();
  double current = loading_objective(s.loadings);
  s.trace.push_back(current);
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    bool moved = false;
    for (Index p = 0; p + 1 < d; ++p) {
      for (Index q = p + 1; q < d; ++q) moved |= rotate_pair(s.loadings, s.rotation, p, q);
    }
    // Recompute from the rotation so drift in the running loadings cannot
    // accumulate across sweeps.
    s.loadings = u * s.rotation;
    const double next = loading_objective(s.loadings);
    s.trace.push_back(next);
    s.sweeps = sweep;
    const double gain = next - current;
    current = next;
    if (!moved || gain <= opt.tolerance * std::abs(next)) {
      s.converged = true;
      break;
    }
  }
  return s;
}

Matrix random_orthogonal(Index d, Rng& rng) {
  Matrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

void canonicalize(const Matrix& u, Matrix& rotation) {
  const Index d = rotation.cols();
  Matrix loadings = u * rotation;
  for (Index j = 0; j < d; ++j) {
    if (loadings.col(j).array().cube().sum() < 0.0) {
      rotation.col(j) *= -1.0;
      loadings.col(j) *= -1.0;
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  Vector col_max = loadings.colwise().maxCoeff();
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return col_max(a) > col_max(b); });
  Matrix sorted(rotation.rows(), d);
  for (Index j = 0; j < d; ++j) sorted.col(j) = rotation.col(order[static_cast<std::size_t>(j)]);
  rotation = std::move(sorted);
}

}  // namespace

double varimax_objective(const Matrix& u, const Matrix& r) {
  if (r.rows() != r.cols() || u.cols() != r.rows()) {
    throw ValidationError("varimax_objective: dimension mismatch");
  }
  if (u.rows() == 0) throw ValidationError("varimax_objective: empty input");
  const Matrix gram = r.transpose() * r;
  if ((gram - Matrix::Identity(r.cols(), r.cols())).norm() > kOrthogonalityTolerance) {
    throw ValidationError("varimax_objective: rotation is not orthogonal");
  }
  return loading_objective(u * r);
}

RotationResult varimax_rotate(const Matrix& u, const VarimaxOptions& options) {
  const Index d = u.cols();
  if (d < 1 || u.rows() < 1) throw ValidationError("varimax_rotate: empty input");
  require_finite(u, "varimax_rotate");
  if ((u.transpose() * u - Matrix::Identity(d, d)).norm() > kOrthonormalInputTolerance) {
    throw ValidationError("varimax_rotate: input columns are not orthonormal");
  }
  if (options.max_sweeps < 1) throw ValidationError("varimax_rotate: max_sweeps must be positive");

  RotationResult out;
  if (d == 1) {
    out.rotation = Matrix::Identity(1, 1);
    out.objective_value = varimax_objective(u, out.rotation);
    out.objective_trace = {out.objective_value};
    out.converged = true;
    return out;
  }

  Solve best = solve_from(u, Matrix::Identity(d, d), options);
  if (options.restarts > 0) {
    Rng rng(options.seed, 0x7a71ULL);
    for (int k = 0; k < options.restarts; ++k) {
      Solve trial = solve_from(u, random_orthogonal(d, rng), options);
      if (trial.trace.back() > best.trace.back()) best = std::move(trial);
    }
  }

  canonicalize(u, best.rotation);
  out.rotation = std::move(best.rotation);
  out.objective_value = varimax_objective(u, out.rotation);
  out.sweeps_used = best.sweeps;
  out.converged = best.converged;
  out.objective_trace = std::move(best.trace);
  return out;
}

SignedPermutation::SignedPermutation(std::vector<int> perm, std::vector<int> signs)
    : perm_(std::move(perm)), signs_(std::move(signs)) {
  if (perm_.size() != signs_.size()) throw ValidationError("SignedPermutation: size mismatch");
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t a = 0; a < perm_.size(); ++a) {
    const int target = perm_[a];
    if (target < 0 || target >= static_cast<int>(perm_.size()) || seen[static_cast<std::size_t>(target)]) {
      throw ValidationError("SignedPermutation: perm is not a bijection");
    }
    seen[static_cast<std::size_t>(target)] = true;
    if (signs_[a] != 1 && signs_[a] != -1) throw ValidationError("SignedPermutation: signs must be +-1");
  }
}

SignedPermutation SignedPermutation::identity(int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  return {std::move(perm), std::vector<int>(static_cast<std::size_t>(k), 1)};
}

Matrix SignedPermutation::matrix() const {
  const Index k = size();
  Matrix m = Matrix::Zero(k, k);
  for (Index a = 0; a < k; ++a) m(a, perm_[static_cast<std::size_t>(a)]) = signs_[static_cast<std::size_t>(a)];
  return m;
}

Matrix SignedPermutation::apply_rows(const Matrix& rows) const {
  if (rows.cols() != size()) throw ValidationError("SignedPermutation::apply_rows: width mismatch");
  Matrix out(rows.rows(), rows.cols());
  for (Index a = 0; a < rows.cols(); ++a) {
    out.col(a) = signs_[static_cast<std::size_t>(a)] * rows.col(perm_[static_cast<std::size_t>(a)]);
  }
  return out;
}

double alignment_error(const Matrix& estimate, const Matrix& target, const SignedPermutation& p) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols() ||
      estimate.cols() != p.size()) {
    throw ValidationError("alignment_error: shape mismatch");
  }
  if (estimate.rows() == 0) return 0.0;
  return (p.apply_rows(estimate) - target).rowwise().norm().maxCoeff();
}

namespace {

// Depth-first search over target coordinates a = 0..k-1. partial[a] holds
// per-row squared error accumulated over coordinates < a, so its maximum is
// a lower bound for every completion.
class AlignmentSearch {
 public:
  AlignmentSearch(const Matrix& estimate, const Matrix& target)
      : estimate_(estimate), target_(target), k_(static_cast<int>(estimate.cols())),
        partial_(estimate.rows(), k_ + 1), used_(static_cast<std::size_t>(k_), false),
        perm_(static_cast<std::size_t>(k_)), signs_(static_cast<std::size_t>(k_)) {
    partial_.col(0).setZero();
  }

  SignedPermutation run() {
    descend(0);
    return {best_perm_, best_signs_};
  }

 private:
  void descend(int a) {
    if (a == k_) {
      const double value = partial_.col(k_).maxCoeff();
      if (value < best_) {
        best_ = value;
        best_perm_ = perm_;
        best_signs_ = signs_;
      }
      return;
    }
    for (int c = 0; c < k_; ++c) {
      if (used_[static_cast<std::size_t>(c)]) continue;
      for (int sign : {1, -1}) {
        partial_.col(a + 1) =
            partial_.col(a) + (sign * estimate_.col(c) - target_.col(a)).array().square().matrix();
        if (best_perm_.empty() || partial_.col(a + 1).maxCoeff() < best_) {
          used_[static_cast<std::size_t>(c)] = true;
          perm_[static_cast<std::size_t>(a)] = c;
          signs_[static_cast<std::size_t>(a)] = sign;
          descend(a + 1);
          used_[static_cast<std::size_t>(c)] = false;
        }
      }
    }
  }

  const Matrix& estimate_;
  const Matrix& target_;
  int k_;
  Matrix partial_;
  std::vector<bool> used_;
  std::vector<int> perm_;
  std::vector<int> signs_;
  std::vector<int> best_perm_;
  std::vector<int> best_signs_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

SignedPermutation align_signed_permutation(const Matrix& estimate, const Matrix& target) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols()) {
    throw ValidationError("align_signed_permutation: shape mismatch");
  }
  const Index k = estimate.cols();
  if (k > kMaxAlignmentSize) {
    throw UnsupportedSizeError("align_signed_permutation: k = " + std::to_string(k) +
                               " exceeds the exhaustive-search limit of 10");
  }
  if (k < 1) throw ValidationError("align_signed_permutation: empty coordinate dimension");
  if (estimate.rows() == 0) return SignedPermutation::identity(static_cast<int>(k));
  require_finite(estimate, "align_signed_permutation");
  require_finite(target, "align_signed_permutation");
  return AlignmentSearch(estimate, target).run();
}

}  // namespace vsbm
