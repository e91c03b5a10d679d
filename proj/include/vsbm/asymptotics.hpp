#pragma once

#include <cstdint>

#include "vsbm/models.hpp"

namespace vsbm {

/// Limit of the sparsity factor: dense means rho = 1, sparse means rho -> 0.
enum class Regime { dense, sparse };

inline double rho_limit(Regime regime) { return regime == Regime::dense ? 1.0 : 0.0; }

/// B = T^T J T with T = |Lambda|^{1/2} U^T and J = diag(1_p, -1_q).
struct IndefiniteFactorization {
  Matrix t;
  /// Diagonal of J.
  Vector j;
  /// Eigenvalues of B in descending order, matching the rows of t.
  Vector eigenvalues;
  int positive = 0;
  int negative = 0;
};

/// Throws NumericalError naming the eigenvalue if min |lambda| <= 1e-10.
IndefiniteFactorization factorize_indefinite(const Matrix& b);

/// B = U S V^T split as T_xi = S^{1/2} U^T, T_upsilon = S^{1/2} V^T, so that
/// T_xi^T T_upsilon = B.
struct SvdFactorPair {
  Matrix t_xi;
  Matrix t_upsilon;
  Vector singular_values;
};

SvdFactorPair factorize_svd(const Matrix& b);

/// (x^T J xi)(1 - rho_inf x^T J xi) xi xi^T. `j` holds the diagonal of J;
/// pass all ones for the directed form.
Matrix g_matrix(const Vector& xi, const Vector& x, const Vector& j, Regime regime);

/// Limiting covariance of (n rho)^{1/2}(P Zhat_i - Zbreve_i) given Z_i = e_block
/// for the undirected model. Blocks are 0-based.
Matrix sbm_covariance(const UndirectedSbm& model, Index block, Regime regime);

/// The analytic two-block covariances for B = [[a, b], [b, a]],
/// pi = (pi1, 1 - pi1), dense regime.
struct TwoBlockCovariance {
  Matrix sigma1;
  Matrix sigma2;
  /// Shared determinant a(1-a) b(1-b) / ((a^2 - b^2)^2 pi1^2 (1 - pi1)^2).
  double determinant = 0.0;
};

TwoBlockCovariance two_block_closed_form(double a, double b, double pi1);

enum class Side { left, right };

/// Limiting covariance of the left (Zhat) or right (Yhat) embedding of the
/// directed model given membership `block` on that side.
Matrix disbm_covariance(const DirectedSbm& model, Index block, Side side, Regime regime);

/// E_{xi'} g(xi', b) for b = theta * T_B e_block, reduced to the theta moments:
/// sum_m pi_m [mu_3 (b^T J t_m) - rho_inf mu_4 (b^T J t_m)^2] t_m t_m^T.
Matrix dcsbm_expected_g(const DegreeCorrectedSbm& model, Index block, double theta, Regime regime);

/// Covariance Gamma(b) of the degree-corrected mixture component at the
/// support point (block, theta).
Matrix dcsbm_gamma(const DegreeCorrectedSbm& model, Index block, double theta, Regime regime);

struct MixtureCdfEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  Index samples = 0;
};

/// Monte Carlo estimate of the Gaussian-mixture CDF at `a`: draws
/// (block, theta) from the model, then g ~ N(0, Gamma) through a symmetric
/// square root, and counts g <= a coordinatewise.
MixtureCdfEstimate dcsbm_mixture_cdf(const DegreeCorrectedSbm& model, const Vector& a,
                                     Regime regime, Index samples, std::uint64_t seed);

/// Inverse with a condition-number guard: warns on stderr above 1e8 and
/// throws NumericalError above 1e12.
Matrix guarded_inverse(const Matrix& m, const char* what);

/// Symmetric PSD square root. Eigenvalues in [-1e-10 * scale, 0) are clipped
/// to zero; anything more negative throws NumericalError.
Matrix psd_sqrt(const Matrix& m);

/// Throws NumericalError unless m is symmetric and PSD within 1e-10 (relative).
void require_covariance(const Matrix& m, const char* what);

}  // namespace vsbm
