#include "vsbm/models.hpp"

#include <cmath>
#include <string>

#include "vsbm/errors.hpp"

namespace vsbm {

namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kRankTolerance = 1e-10;

void validate_probabilities(const Vector& pi, const char* what) {
  if (pi.size() < 2) throw ValidationError(std::string(what) + ": need k >= 2 blocks");
  if (!pi.allFinite() || (pi.array() <= 0.0).any()) {
    throw ValidationError(std::string(what) + ": probabilities must be positive");
  }
  if (std::abs(pi.sum() - 1.0) > kProbabilityTolerance) {
    throw ValidationError(std::string(what) + ": probabilities must sum to one");
  }
}

void validate_connectivity(const Matrix& b, Index k, bool symmetric) {
  if (b.rows() != k || b.cols() != k) throw ValidationError("B must be k x k");
  if (!b.allFinite() || (b.array() <= 0.0).any() || (b.array() >= 1.0).any()) {
    throw ValidationError("B entries must lie in (0, 1)");
  }
  if (symmetric) {
    if (b != b.transpose()) throw ValidationError("B must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().cwiseAbs().minCoeff() <= kRankTolerance) {
      throw ValidationError("B is rank deficient (smallest |eigenvalue| <= 1e-10)");
    }
  } else {
    Eigen::JacobiSVD<Matrix> svd(b);
    if (svd.singularValues().minCoeff() <= kRankTolerance) {
      throw ValidationError("B is rank deficient (smallest singular value <= 1e-10)");
    }
  }
}

void validate_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in [0, 1]");
}

std::vector<int> draw_labels(const Vector& pi, Index n, Rng& rng) {
  Vector cdf(pi.size());
  double acc = 0.0;
  for (Index l = 0; l < pi.size(); ++l) cdf(l) = (acc += pi(l));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& label : labels) {
    const double u = rng.uniform() * acc;
    Index l = 0;
    while (l + 1 < cdf.size() && u >= cdf(l)) ++l;
    label = static_cast<int>(l);
  }
  return labels;
}

void check_sample_size(Index n, Index k) {
  if (n < k) throw ValidationError("sample size n must be at least k");
}

// Upper triangle (diagonal included unless hollow) drawn column by column,
// i <= j, then mirrored.
template <typename Prob>
Matrix symmetric_bernoulli(Index n, Rng& rng, bool hollow, Prob&& prob) {
  Matrix a = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index last = hollow ? j : j + 1;
    for (Index i = 0; i < last; ++i) a(i, j) = rng.bernoulli(prob(i, j)) ? 1.0 : 0.0;
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) a(i, j) = a(j, i);
  }
  return a;
}

}  // namespace

void UndirectedSbm::validate() const {
  validate_probabilities(pi, "pi");
  validate_connectivity(b, k(), true);
  validate_rho(rho);
}

void DirectedSbm::validate() const {
  validate_probabilities(pi_z, "pi_z");
  validate_probabilities(pi_y, "pi_y");
  if (pi_y.size() != pi_z.size()) throw ValidationError("pi_z and pi_y must have equal length");
  validate_connectivity(b, k(), false);
  validate_rho(rho);
}

void DegreeCorrectedSbm::validate() const {
  validate_probabilities(pi, "pi");
  validate_connectivity(b, k(), true);
  validate_rho(rho);
  theta.validate();
  if (rho * theta.hi() * theta.hi() * b.maxCoeff() > 1.0) {
    throw ValidationError("edge probability rho * hi^2 * max(B) exceeds one");
  }
}

Vector DegreeCorrectedSbm::eta() const { return theta.moment(2) * pi; }

ThetaDistribution ThetaDistribution::uniform(double lo, double hi) {
  ThetaDistribution d(Kind::uniform, lo, hi);
  if (lo == hi) {
    for (int j = 0; j < 4; ++j) d.moments_[static_cast<std::size_t>(j)] = std::pow(lo, j + 1);
  } else {
    for (int j = 1; j <= 4; ++j) {
      d.moments_[static_cast<std::size_t>(j - 1)] =
          (std::pow(hi, j + 1) - std::pow(lo, j + 1)) / ((j + 1) * (hi - lo));
    }
  }
  d.validate();
  return d;
}

ThetaDistribution ThetaDistribution::point(double t) {
  ThetaDistribution d(Kind::point, t, t);
  for (int j = 0; j < 4; ++j) d.moments_[static_cast<std::size_t>(j)] = std::pow(t, j + 1);
  d.validate();
  return d;
}

ThetaDistribution ThetaDistribution::custom(double lo, double hi, Sampler sampler,
                                            std::uint64_t seed, Index samples) {
  if (!sampler) throw ValidationError("theta sampler is empty");
  if (samples < 2) throw ValidationError("theta moment estimation needs at least two samples");
  ThetaDistribution d(Kind::custom, lo, hi);
  d.sampler_ = std::move(sampler);
  Rng rng(seed, 0x7e7aULL);
  std::array<double, 4> sum{}, sum_sq{};
  for (Index s = 0; s < samples; ++s) {
    const double t = d.sampler_(rng);
    if (!(t >= lo && t <= hi)) throw ValidationError("theta sampler drew a value outside its support");
    double power = 1.0;
    for (std::size_t j = 0; j < 4; ++j) {
      power *= t;
      sum[j] += power;
      sum_sq[j] += power * power;
    }
  }
  const double m = static_cast<double>(samples);
  for (std::size_t j = 0; j < 4; ++j) {
    d.moments_[j] = sum[j] / m;
    const double var = std::max(0.0, (sum_sq[j] - m * d.moments_[j] * d.moments_[j]) / (m - 1.0));
    d.moment_se_[j] = std::sqrt(var / m);
  }
  d.validate();
  return d;
}

double ThetaDistribution::moment(int j) const {
  if (j < 1 || j > 4) throw ValidationError("theta moment order must be 1..4");
  return moments_[static_cast<std::size_t>(j - 1)];
}

double ThetaDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::uniform:
      return lo_ + (hi_ - lo_) * rng.uniform();
    case Kind::point:
      return lo_;
    case Kind::custom:
      return sampler_(rng);
  }
  return lo_;
}

void ThetaDistribution::validate() const {
  if (!(lo_ > 0.0 && lo_ <= hi_ && hi_ < 1.0)) {
    throw ValidationError("theta support must satisfy 0 < lo <= hi < 1");
  }
  const double m1 = moments_[0], m2 = moments_[1], m3 = moments_[2], m4 = moments_[3];
  const double slack = 1e-12;
  if (m2 < m1 * m1 - slack || m4 < m2 * m2 - slack || m3 * m3 > m2 * m4 + slack) {
    throw ValidationError("theta moments are inconsistent");
  }
}

SampledGraph sample_undirected(const UndirectedSbm& model, Index n, std::uint64_t seed,
                               const SamplingOptions& options) {
  model.validate();
  check_sample_size(n, model.k());
  const Matrix prob = model.rho * model.b;
  Rng rng(seed);
  SampledGraph g;
  g.z = draw_labels(model.pi, n, rng);
  g.adjacency = symmetric_bernoulli(n, rng, options.hollow, [&](Index i, Index j) {
    return prob(g.z[static_cast<std::size_t>(i)], g.z[static_cast<std::size_t>(j)]);
  });
  return g;
}

SampledGraph sample_directed(const DirectedSbm& model, Index n, std::uint64_t seed,
                             const SamplingOptions& options) {
  model.validate();
  check_sample_size(n, model.k());
  const Matrix prob = model.rho * model.b;
  Rng rng(seed);
  SampledGraph g;
  g.directed = true;
  g.z = draw_labels(model.pi_z, n, rng);
  g.y = draw_labels(model.pi_y, n, rng);
  const auto& y = *g.y;
  g.adjacency = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const int yj = y[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      if (options.hollow && i == j) continue;
      g.adjacency(i, j) = rng.bernoulli(prob(g.z[static_cast<std::size_t>(i)], yj)) ? 1.0 : 0.0;
    }
  }
  return g;
}

SampledGraph sample_degree_corrected(const DegreeCorrectedSbm& model, Index n,
                                     std::uint64_t seed, const SamplingOptions& options) {
  model.validate();
  check_sample_size(n, model.k());
  const Matrix prob = model.rho * model.b;
  Rng rng(seed);
  SampledGraph g;
  g.z = draw_labels(model.pi, n, rng);
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (auto& t : theta) t = model.theta.sample(rng);
  g.adjacency = symmetric_bernoulli(n, rng, options.hollow, [&](Index i, Index j) {
    const auto si = static_cast<std::size_t>(i);
    const auto sj = static_cast<std::size_t>(j);
    return theta[si] * theta[sj] * prob(g.z[si], g.z[sj]);
  });
  g.theta = std::move(theta);
  return g;
}

SampledGraph sample_graph(const BlockModel& model, Index n, std::uint64_t seed,
                          const SamplingOptions& options) {
  return std::visit(
      [&](const auto& m) -> SampledGraph {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, UndirectedSbm>) return sample_undirected(m, n, seed, options);
        else if constexpr (std::is_same_v<T, DirectedSbm>) return sample_directed(m, n, seed, options);
        else return sample_degree_corrected(m, n, seed, options);
      },
      model);
}

Matrix membership_matrix(const std::vector<int>& labels, Index k) {
  Matrix z = Matrix::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw ValidationError("block label out of range");
    z(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return z;
}

Vector block_fractions(const std::vector<int>& labels, Index k) {
  if (labels.empty()) throw ValidationError("block_fractions: no labels");
  return membership_matrix(labels, k).colwise().mean().transpose();
}

Matrix expected_adjacency(const SampledGraph& graph, const BlockModel& model) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if (graph.z.size() != static_cast<std::size_t>(graph.n())) {
          throw ValidationError("expected_adjacency: Z memberships missing");
        }
        const Matrix z = membership_matrix(graph.z, m.k());
        if constexpr (std::is_same_v<T, DirectedSbm>) {
          if (!graph.y) throw ValidationError("expected_adjacency: Y memberships missing");
          return m.rho * z * m.b * membership_matrix(*graph.y, m.k()).transpose();
        } else if constexpr (std::is_same_v<T, DegreeCorrectedSbm>) {
          if (!graph.theta) throw ValidationError("expected_adjacency: theta missing");
          const Eigen::Map<const Vector> theta(graph.theta->data(), static_cast<Index>(graph.theta->size()));
          const Matrix scaled = theta.asDiagonal() * z;
          return m.rho * scaled * m.b * scaled.transpose();
        } else {
          return m.rho * z * m.b * z.transpose();
        }
      },
      model);
}

UndirectedSbm table1_model() {
  UndirectedSbm m;
  m.pi = Vector::Constant(4, 0.25);
  m.b.resize(4, 4);
  m.b << 0.6, 0.2, 0.1, 0.1,
         0.2, 0.7, 0.05, 0.05,
         0.1, 0.05, 0.6, 0.25,
         0.1, 0.05, 0.25, 0.6;
  m.rho = 1.0;
  return m;
}

DirectedSbm directed_figure_model() {
  DirectedSbm m;
  m.pi_z = Vector(2);
  m.pi_z << 0.25, 0.75;
  m.pi_y = Vector(2);
  m.pi_y << 0.667, 0.333;
  m.b.resize(2, 2);
  m.b << 0.4, 0.6,
         0.3, 0.7;
  m.rho = 1.0;
  return m;
}

DegreeCorrectedSbm dcsbm_figure_model() {
  DegreeCorrectedSbm m;
  m.pi = Vector::Constant(3, 1.0 / 3.0);
  m.b = Matrix::Constant(3, 3, 0.1);
  m.b.diagonal().setConstant(0.2);
  m.rho = 1.0;
  m.theta = ThetaDistribution::uniform(0.25, 0.75);
  return m;
}

}  // namespace vsbm
