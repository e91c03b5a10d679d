#pragma once

#include <iosfwd>
#include <optional>

#include "vsbm/models.hpp"
#include "vsbm/spectral.hpp"
#include "vsbm/varimax.hpp"

namespace vsbm {

struct EmbedOptions {
  /// Embedding dimension; empty selects it from the spectral gap.
  std::optional<Index> rank;
  /// Number of leading singular values inspected when the rank is automatic.
  Index auto_rank_candidates = 20;
  TruncationOptions truncation;
  VarimaxOptions varimax;
};

/// Varimax-rotated spectral embedding: z_hat = n^{1/2} U R_U and
/// y_hat = m^{1/2} V R_V.
struct Embedding {
  Matrix z_hat;
  Matrix y_hat;
  Vector singular_values;
  Index rank = 0;
  RotationResult left_rotation;
  RotationResult right_rotation;
};

/// Truncated SVD of `a` followed by separate varimax rotations of the left
/// and right singular vectors.
Embedding embed(const Matrix& a, const EmbedOptions& options = {});

/// Identifiability-scaled targets the embedding estimates.
enum class TargetKind {
  /// diag(pi)^{-1/2} Z_i
  breve_z,
  /// diag(eta)^{-1/2} theta_i Z_i
  breve_z_prime,
};

struct ResidualOptions {
  /// Defaults to breve_z_prime for degree-corrected models, breve_z otherwise.
  std::optional<TargetKind> target;
  /// Scale targets with empirical block fractions (and empirical eta) rather
  /// than the population values.
  bool empirical_fractions = false;
  /// Skip ground-truth alignment: take labels from each row's dominant
  /// coordinate and align with the identity. Diagnostic only.
  bool blind = false;
};

/// Aligned residual rows (n rho)^{1/2} (P Zhat_i - Zbreve_i) for one side.
struct Residuals {
  Matrix rows;
  Matrix target;
  SignedPermutation alignment;
  /// Labels used to build the target (true labels unless blind).
  std::vector<int> labels;
};

struct ResidualSet {
  Residuals left;
  /// Present for directed graphs.
  std::optional<Residuals> right;
};

/// Targets for labels `labels` with block weights `scale` (pi or eta):
/// row i is e_{label_i} * weight_i / sqrt(scale_{label_i}).
Matrix breve_target(const std::vector<int>& labels, const Vector& scale, Index k,
                    const std::vector<double>* theta = nullptr);

ResidualSet residuals(const Embedding& embedding, const SampledGraph& graph,
                      const BlockModel& model, const ResidualOptions& options = {});

/// CSV with header `node,dim1,...,dimr`, 1-based node ids, 15 significant digits.
void write_embedding_csv(std::ostream& out, const Matrix& embedding);

}  // namespace vsbm
