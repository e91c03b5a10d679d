#include "vsbm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "vsbm/errors.hpp"

namespace vsbm {

namespace {

constexpr double kSingularTolerance = 1e-10;
constexpr double kConditionWarn = 1e8;
constexpr double kConditionFail = 1e12;
constexpr double kPsdTolerance = 1e-10;

void check_block(Index block, Index k) {
  if (block < 0 || block >= k) {
    throw ValidationError("block index " + std::to_string(block) + " outside [0, " +
                          std::to_string(k) + ")");
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Sandwich M E M^T, symmetrized and checked.
Matrix sandwich(const Matrix& m, const Matrix& e, const char* what) {
  Matrix out = symmetrized(m * e * m.transpose());
  require_covariance(out, what);
  return out;
}

Vector inverse_sqrt(const Vector& v) { return v.array().rsqrt().matrix(); }

}  // namespace

Matrix guarded_inverse(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ValidationError(std::string(what) + ": not square");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  const double cond = smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
  if (!(cond <= kConditionFail)) {
    std::ostringstream msg;
    msg << what << ": singular or ill-conditioned matrix (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }
  if (cond > kConditionWarn) {
    std::clog << "warning: " << what << ": condition number " << cond << '\n';
  }
  return m.partialPivLu().inverse();
}

void require_covariance(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || !m.allFinite()) {
    throw NumericalError(std::string(what) + ": covariance is not a finite square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kPsdTolerance * scale) {
    throw NumericalError(std::string(what) + ": covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance * scale) {
    std::ostringstream msg;
    msg << what << ": covariance has eigenvalue " << eig.eigenvalues().minCoeff();
    throw NumericalError(msg.str());
  }
}

Matrix psd_sqrt(const Matrix& m) {
  require_covariance(m, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(m));
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

IndefiniteFactorization factorize_indefinite(const Matrix& b) {
  if (b.rows() != b.cols()) throw ValidationError("factorize_indefinite: B is not square");
  require_finite(b, "factorize_indefinite");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    throw ValidationError("factorize_indefinite: B is not symmetric");
  }
  const Index k = b.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(b));
  for (Index i = 0; i < k; ++i) {
    if (std::abs(eig.eigenvalues()(i)) <= kSingularTolerance) {
      std::ostringstream msg;
      msg << "factorize_indefinite: B is singular (eigenvalue " << eig.eigenvalues()(i) << ")";
      throw NumericalError(msg.str());
    }
  }
  // Descending by value puts the positive block first.
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    return eig.eigenvalues()(x) > eig.eigenvalues()(y);
  });

  IndefiniteFactorization out;
  out.t.resize(k, k);
  out.j.resize(k);
  out.eigenvalues.resize(k);
  for (Index r = 0; r < k; ++r) {
    const Index src = order[static_cast<std::size_t>(r)];
    const double lambda = eig.eigenvalues()(src);
    Vector u = eig.eigenvectors().col(src);
    Index pivot = 0;
    u.cwiseAbs().maxCoeff(&pivot);
    if (u(pivot) < 0) u = -u;
    out.t.row(r) = std::sqrt(std::abs(lambda)) * u.transpose();
    out.j(r) = lambda > 0 ? 1.0 : -1.0;
    out.eigenvalues(r) = lambda;
    (lambda > 0 ? out.positive : out.negative) += 1;
  }
  return out;
}

SvdFactorPair factorize_svd(const Matrix& b) {
  if (b.rows() != b.cols()) throw ValidationError("factorize_svd: B is not square");
  require_finite(b, "factorize_svd");
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  if (s(s.size() - 1) <= kSingularTolerance) {
    std::ostringstream msg;
    msg << "factorize_svd: B is singular (singular value " << s(s.size() - 1) << ")";
    throw NumericalError(msg.str());
  }
  SvdFactorPair out;
  const Vector root = s.cwiseSqrt();
  out.t_xi = root.asDiagonal() * svd.matrixU().transpose();
  out.t_upsilon = root.asDiagonal() * svd.matrixV().transpose();
  out.singular_values = s;
  return out;
}

Matrix g_matrix(const Vector& xi, const Vector& x, const Vector& j, Regime regime) {
  if (xi.size() != x.size() || j.size() != x.size()) throw ValidationError("g_matrix: size mismatch");
  const double s = x.dot(j.cwiseProduct(xi));
  return (s * (1.0 - rho_limit(regime) * s)) * (xi * xi.transpose());
}

Matrix sbm_covariance(const UndirectedSbm& model, Index block, Regime regime) {
  model.validate();
  const Index k = model.k();
  check_block(block, k);
  const IndefiniteFactorization f = factorize_indefinite(model.b);

  const Matrix delta = f.t * model.pi.asDiagonal() * f.t.transpose();
  const Vector x = f.t.col(block);
  Matrix expected_g = Matrix::Zero(k, k);
  for (Index m = 0; m < k; ++m) expected_g += model.pi(m) * g_matrix(f.t.col(m), x, f.j, regime);

  const Matrix coef = inverse_sqrt(model.pi).asDiagonal() * guarded_inverse(f.t, "T_B") *
                      f.j.asDiagonal() * guarded_inverse(delta, "Delta_X");
  return sandwich(coef, expected_g, "sbm_covariance");
}

TwoBlockCovariance two_block_closed_form(double a, double b, double pi1) {
  if (!(0.0 < b && b < a && a < 1.0)) throw ValidationError("two_block_closed_form: need 0 < b < a < 1");
  if (!(0.0 < pi1 && pi1 < 1.0)) throw ValidationError("two_block_closed_form: need 0 < pi1 < 1");
  const double q = 1.0 - pi1;
  const double d2 = std::pow(a * a - b * b, 2);
  const double cross = std::pow(pi1 * q, 1.5);

  TwoBlockCovariance out;
  out.sigma1.resize(2, 2);
  out.sigma1(0, 0) = (a * a * a * (1 - a) * q + b * b * b * (1 - b) * pi1) / (d2 * pi1 * pi1 * q);
  out.sigma1(0, 1) = -a * b * (a * (1 - a) + (a - b) * (a + b - 1) * pi1) / (d2 * cross);
  out.sigma1(1, 1) = (a * a * b * pi1 + a * b * b * (1 - a - pi1)) / (d2 * pi1 * q * q);
  out.sigma1(1, 0) = out.sigma1(0, 1);

  out.sigma2.resize(2, 2);
  out.sigma2(0, 0) = (a * b * b * pi1 + a * a * b * (1 - b - pi1)) / (d2 * pi1 * pi1 * q);
  out.sigma2(0, 1) = -a * b * (b * (1 - b) + (a - b) * (1 - a - b) * pi1) / (d2 * cross);
  out.sigma2(1, 1) = (a * a * a * (1 - a) * pi1 + b * b * b * (1 - b) * q) / (d2 * pi1 * q * q);
  out.sigma2(1, 0) = out.sigma2(0, 1);

  out.determinant = a * (1 - a) * b * (1 - b) / (d2 * pi1 * pi1 * q * q);
  return out;
}

Matrix disbm_covariance(const DirectedSbm& model, Index block, Side side, Regime regime) {
  model.validate();
  const Index k = model.k();
  check_block(block, k);
  const SvdFactorPair f = factorize_svd(model.b);
  const Vector ones = Vector::Ones(k);

  // Left: the embedded side uses (pi_Z, T_xi) and averages over the right
  // side's (pi_Y, T_upsilon); right swaps the roles.
  const bool left = side == Side::left;
  const Vector& pi_own = left ? model.pi_z : model.pi_y;
  const Vector& pi_other = left ? model.pi_y : model.pi_z;
  const Matrix& t_own = left ? f.t_xi : f.t_upsilon;
  const Matrix& t_other = left ? f.t_upsilon : f.t_xi;

  const Matrix delta = t_other * pi_other.asDiagonal() * t_other.transpose();
  const Vector x = t_own.col(block);
  Matrix expected_g = Matrix::Zero(k, k);
  for (Index m = 0; m < k; ++m) expected_g += pi_other(m) * g_matrix(t_other.col(m), x, ones, regime);

  const Matrix coef = inverse_sqrt(pi_own).asDiagonal() *
                      guarded_inverse(t_own, left ? "T_xi" : "T_upsilon") *
                      guarded_inverse(delta, left ? "Delta_upsilon" : "Delta_xi");
  return sandwich(coef, expected_g, "disbm_covariance");
}

namespace {

void check_theta(const DegreeCorrectedSbm& model, double theta) {
  if (!(theta >= model.theta.lo() && theta <= model.theta.hi())) {
    throw ValidationError("theta outside the support of the degree distribution");
  }
}

// Precomputed pieces of Gamma(block, theta) for repeated evaluation.
class DcsbmGammaTerms {
 public:
  DcsbmGammaTerms(const DegreeCorrectedSbm& model, Regime regime)
      : model_(model), regime_(regime), f_(factorize_indefinite(model.b)) {
    const double mu2 = model.theta.moment(2);
    const Matrix delta = mu2 * f_.t * model.pi.asDiagonal() * f_.t.transpose();
    coef_ = inverse_sqrt(model.eta()).asDiagonal() * guarded_inverse(f_.t, "T_B") * f_.j.asDiagonal() *
            guarded_inverse(delta, "Delta_X'");
  }

  Matrix expected_g(Index block, double theta) const {
    const Index k = model_.k();
    const double mu3 = model_.theta.moment(3);
    const double mu4 = model_.theta.moment(4);
    const Vector b = theta * f_.t.col(block);
    Matrix out = Matrix::Zero(k, k);
    for (Index m = 0; m < k; ++m) {
      const Vector tm = f_.t.col(m);
      const double s = b.dot(f_.j.cwiseProduct(tm));
      out += model_.pi(m) * (mu3 * s - rho_limit(regime_) * mu4 * s * s) * (tm * tm.transpose());
    }
    return out;
  }

  Matrix gamma(Index block, double theta) const {
    return sandwich(coef_, expected_g(block, theta), "dcsbm_gamma");
  }

 private:
  const DegreeCorrectedSbm& model_;
  Regime regime_;
  IndefiniteFactorization f_;
  Matrix coef_;
};

}  // namespace

Matrix dcsbm_expected_g(const DegreeCorrectedSbm& model, Index block, double theta, Regime regime) {
  model.validate();
  check_block(block, model.k());
  check_theta(model, theta);
  return DcsbmGammaTerms(model, regime).expected_g(block, theta);
}

Matrix dcsbm_gamma(const DegreeCorrectedSbm& model, Index block, double theta, Regime regime) {
  model.validate();
  check_block(block, model.k());
  check_theta(model, theta);
  return DcsbmGammaTerms(model, regime).gamma(block, theta);
}

MixtureCdfEstimate dcsbm_mixture_cdf(const DegreeCorrectedSbm& model, const Vector& a,
                                     Regime regime, Index samples, std::uint64_t seed) {
  model.validate();
  const Index k = model.k();
  if (a.size() != k) throw ValidationError("dcsbm_mixture_cdf: evaluation point has wrong length");
  if (samples < 1) throw ValidationError("dcsbm_mixture_cdf: need at least one sample");
  const DcsbmGammaTerms terms(model, regime);

  Vector cdf(k);
  double acc = 0.0;
  for (Index l = 0; l < k; ++l) cdf(l) = (acc += model.pi(l));

  Rng rng(seed, 0xcdfULL);
  Index hits = 0;
  Vector draw(k);
  for (Index s = 0; s < samples; ++s) {
    const double u = rng.uniform() * acc;
    Index block = 0;
    while (block + 1 < k && u >= cdf(block)) ++block;
    const double theta = model.theta.sample(rng);
    const Matrix root = psd_sqrt(terms.gamma(block, theta));
    for (Index i = 0; i < k; ++i) draw(i) = rng.normal();
    if (((root * draw).array() <= a.array()).all()) ++hits;
  }
  MixtureCdfEstimate out;
  out.samples = samples;
  out.probability = static_cast<double>(hits) / static_cast<double>(samples);
  out.standard_error = std::sqrt(out.probability * (1.0 - out.probability) / static_cast<double>(samples));
  return out;
}

}  // namespace vsbm
