#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "vsbm/rng.hpp"
#include "vsbm/spectral.hpp"

namespace vsbm {

/// Undirected blockmodel: E(A | Z) = rho Z B Z^T.
struct UndirectedSbm {
  Vector pi;
  Matrix b;
  double rho = 1.0;

  Index k() const { return pi.size(); }
  /// Throws ValidationError unless pi is a positive probability vector, B is
  /// symmetric with entries in (0,1) and smallest |eigenvalue| > 1e-10, and
  /// rho is in [0,1].
  void validate() const;
};

/// Directed blockmodel: E(A | Z, Y) = rho Z B Y^T with Z, Y independent.
struct DirectedSbm {
  Vector pi_z;
  Vector pi_y;
  Matrix b;
  double rho = 1.0;

  Index k() const { return pi_z.size(); }
  void validate() const;
};

/// Distribution of degree parameters, supported on [lo, hi] inside (0, 1).
/// Carries the raw moments mu_1..mu_4.
class ThetaDistribution {
 public:
  using Sampler = std::function<double(Rng&)>;

  /// Uniform[lo, hi]; moments are exact.
  static ThetaDistribution uniform(double lo, double hi);
  /// Point mass at t.
  static ThetaDistribution point(double t);
  /// Arbitrary sampler with declared support. Moments are estimated from
  /// `samples` draws; their standard errors are kept in moment_standard_errors().
  static ThetaDistribution custom(double lo, double hi, Sampler sampler,
                                  std::uint64_t seed, Index samples = 1'000'000);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Raw moment E(theta^j), j = 1..4.
  double moment(int j) const;
  const std::array<double, 4>& moment_standard_errors() const { return moment_se_; }
  bool is_uniform() const { return kind_ == Kind::uniform; }
  bool is_point() const { return kind_ == Kind::point; }

  double sample(Rng& rng) const;
  void validate() const;

 private:
  enum class Kind { uniform, point, custom };

  ThetaDistribution(Kind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {}

  Kind kind_;
  double lo_;
  double hi_;
  std::array<double, 4> moments_{};
  std::array<double, 4> moment_se_{};
  Sampler sampler_;
};

/// Degree-corrected blockmodel: E(A | Z, theta) = rho diag(theta) Z B Z^T diag(theta).
struct DegreeCorrectedSbm {
  Vector pi;
  Matrix b;
  double rho = 1.0;
  ThetaDistribution theta = ThetaDistribution::uniform(0.25, 0.75);

  Index k() const { return pi.size(); }
  void validate() const;
  /// eta = E(theta^2 Z) = mu_2 * pi.
  Vector eta() const;
};

using BlockModel = std::variant<UndirectedSbm, DirectedSbm, DegreeCorrectedSbm>;

/// Adjacency matrix plus the latent variables that generated it. Block
/// labels are 0-based in memory and 1-based in files.
struct SampledGraph {
  Matrix adjacency;
  std::vector<int> z;
  std::optional<std::vector<int>> y;
  std::optional<std::vector<double>> theta;
  bool directed = false;

  Index n() const { return adjacency.rows(); }
};

struct SamplingOptions {
  /// Zero the diagonal instead of drawing self-loops.
  bool hollow = false;
};

SampledGraph sample_undirected(const UndirectedSbm& model, Index n, std::uint64_t seed,
                               const SamplingOptions& options = {});
SampledGraph sample_directed(const DirectedSbm& model, Index n, std::uint64_t seed,
                             const SamplingOptions& options = {});
SampledGraph sample_degree_corrected(const DegreeCorrectedSbm& model, Index n,
                                     std::uint64_t seed, const SamplingOptions& options = {});
SampledGraph sample_graph(const BlockModel& model, Index n, std::uint64_t seed,
                          const SamplingOptions& options = {});

/// rho Z B Z^T, rho Z B Y^T or rho diag(theta) Z B Z^T diag(theta).
Matrix expected_adjacency(const SampledGraph& graph, const BlockModel& model);

/// n x k indicator matrix of 0-based labels.
Matrix membership_matrix(const std::vector<int>& labels, Index k);

/// Block fractions of 0-based labels.
Vector block_fractions(const std::vector<int>& labels, Index k);

/// Four-block undirected model with equal block sizes.
UndirectedSbm table1_model();
/// Two-block directed model with unequal left and right block sizes.
DirectedSbm directed_figure_model();
/// Three-block affinity model with theta ~ Uniform[0.25, 0.75].
DegreeCorrectedSbm dcsbm_figure_model();

}  // namespace vsbm
