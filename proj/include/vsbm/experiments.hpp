#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsbm/asymptotics.hpp"
#include "vsbm/models.hpp"
#include "vsbm/pipeline.hpp"

namespace vsbm {

enum class Estimator {
  /// Pool every node of block l within a graph (the conventional approach).
  pooled,
  /// Follow one node index across replicates, grouped by its block.
  fixed_index,
};

struct ExperimentConfig {
  BlockModel model = table1_model();
  Index n = 5000;
  Index reps = 100;
  /// Embedding dimension; defaults to the block count.
  std::optional<Index> rank;
  std::uint64_t seed = 1;
  Regime regime = Regime::dense;
  /// Directory for report and point-cloud files; empty writes nothing.
  std::string out_dir;
  bool hollow = false;
  /// Embed E(A | latents) instead of a sampled A. Plumbing diagnostic.
  bool noiseless = false;
  bool empirical_fractions = false;
  bool blind = false;
  Estimator estimator = Estimator::pooled;
  Index fixed_index = 0;
  /// Worker threads for replicates; 0 uses the hardware concurrency.
  int threads = 0;
  /// Draws for the mixture-CDF spot check.
  Index mixture_samples = 200'000;

  Index k() const;
  void validate() const;
};

/// One-component Gaussian fit: sample mean and maximum-likelihood covariance
/// (divisor = row count). Needs at least k + 1 rows.
struct GaussianFit {
  Vector mean;
  Matrix sigma;
  Index count = 0;
};

GaussianFit fit_block_covariance(const Matrix& rows);

/// ||estimate - truth||_F / ||truth||_F.
double relative_frobenius_error(const Matrix& estimate, const Matrix& truth);

struct BlockSummary {
  Index block = 0;
  Matrix theoretical_sigma;
  /// One fitted covariance per replicate.
  std::vector<Matrix> empirical_sigma;
  std::vector<double> rel_errors;
  /// Mean and sample standard error of rel_errors, both times 100.
  double mean_rel_error_x100 = 0.0;
  double se_rel_error_x100 = 0.0;
  /// Block centroid of the aligned embedding rows, averaged over replicates.
  Vector centroid;
  /// Diagonal of Sigma^{-1/2} Sigma_hat Sigma^{-1/2}, averaged over replicates.
  Vector whitened_variances;
};

struct FixedIndexSummary {
  Index block = 0;
  Index count = 0;
  Matrix empirical_sigma;
  double rel_error = 0.0;
};

struct CovarianceReport {
  std::string side = "left";
  std::vector<BlockSummary> blocks;
  /// Filled by the fixed-index estimator; blocks with fewer than k + 1
  /// observations are omitted.
  std::vector<FixedIndexSummary> fixed_index;
  double wall_seconds = 0.0;
};

/// Undirected covariance study: sample, embed at rank k, align to the true
/// breve factors, fit per-block covariances, compare to sbm_covariance.
CovarianceReport run_table1(const ExperimentConfig& config);

struct CentroidCheck {
  Index block = 0;
  /// Theoretical centroid: radius on the block's own axis.
  double theoretical_radius = 0.0;
  Vector centroid;
  /// || centroid - radius * e_block ||.
  double distance = 0.0;
};

struct SideGeometry {
  std::string side;
  /// Aligned embedding rows P * Zhat_i (uncentered) and their true labels.
  Matrix cloud;
  std::vector<int> labels;
  std::vector<CentroidCheck> centroids;
  std::vector<Matrix> theoretical_sigma;
  std::vector<Matrix> empirical_sigma;
  std::vector<double> rel_errors;
};

struct DirectedFigureReport {
  SideGeometry left;
  SideGeometry right;
  double wall_seconds = 0.0;
};

/// Single directed graph: aligned left and right point clouds, block
/// centroids against radii 1/sqrt(pi), covariance comparisons per side.
DirectedFigureReport run_directed_figure(const ExperimentConfig& config);

struct DcsbmBlockGeometry {
  Index block = 0;
  /// mu_1 / sqrt(eta_block).
  double theoretical_magnitude = 0.0;
  Vector centroid;
  double dominant = 0.0;
  double max_off_axis = 0.0;
};

struct DcsbmFigureReport {
  Matrix cloud;
  std::vector<int> labels;
  std::vector<DcsbmBlockGeometry> blocks;
  /// Mixture CDF at a = 0 and the empirical residual orthant frequency.
  MixtureCdfEstimate mixture_orthant;
  double empirical_orthant = 0.0;
  double empirical_orthant_se = 0.0;
  double wall_seconds = 0.0;
};

/// Single degree-corrected graph: centroid geometry and a mixture-CDF spot check.
DcsbmFigureReport run_dcsbm_figure(const ExperimentConfig& config);

struct PrintedExample {
  double a = 0.0;
  double b = 0.0;
  double pi1 = 0.0;
  Matrix sigma1;
  Matrix sigma2;
  /// Largest entrywise deviation from the printed matrices.
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = false;
  /// Every entry truncated toward zero at two decimals equals the printed value.
  bool truncation_match = false;
  bool passed = false;
};

struct GridReport {
  Index cases = 0;
  double max_rel_error = 0.0;
  double max_det_identity_error = 0.0;
  double max_det_formula_error = 0.0;
  std::vector<PrintedExample> printed;
  bool passed = false;
};

/// General undirected covariance vs the analytic two-block forms over the
/// grid a in {0.3..0.9}, b in {0.05..a-0.05}, pi1 in {0.1..0.9}, plus the
/// three printed examples.
GridReport run_closed_form_grid();

/// JSON/CSV writers used by the CLI. Reports are byte-identical for equal
/// inputs; wall-clock time goes to a separate timing.json.
void write_table1_outputs(const ExperimentConfig& config, const CovarianceReport& report);
void write_directed_outputs(const ExperimentConfig& config, const DirectedFigureReport& report);
void write_dcsbm_outputs(const ExperimentConfig& config, const DcsbmFigureReport& report);
void write_grid_outputs(const std::string& out_dir, const GridReport& report);

}  // namespace vsbm
