#include "vsbm/pipeline.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "vsbm/errors.hpp"

namespace vsbm {

Embedding embed(const Matrix& a, const EmbedOptions& options) {
  require_finite(a, "embed");
  const Index max_rank = std::min(a.rows(), a.cols());
  if (max_rank < 1) throw ValidationError("embed: empty matrix");

  SpectralTruncation truncation;
  Index rank = 0;
  if (options.rank) {
    rank = *options.rank;
    if (rank < 1 || rank > max_rank) throw ValidationError("embed: rank outside [1, min(n, m)]");
    truncation = truncated_svd(a, rank, options.truncation);
  } else {
    const Index candidates = std::min(max_rank, std::max<Index>(2, options.auto_rank_candidates));
    if (candidates < 2) throw ValidationError("embed: automatic rank needs at least two singular values");
    truncation = truncated_svd(a, candidates, options.truncation);
    const Vector& s = truncation.singular_values;
    rank = select_rank(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
    truncation.left = truncation.left.leftCols(rank).eval();
    truncation.right = truncation.right.leftCols(rank).eval();
    truncation.singular_values = s.head(rank).eval();
  }

  Embedding out;
  out.rank = rank;
  out.singular_values = truncation.singular_values;
  out.left_rotation = varimax_rotate(truncation.left, options.varimax);
  out.right_rotation = varimax_rotate(truncation.right, options.varimax);
  out.z_hat = std::sqrt(static_cast<double>(a.rows())) * truncation.left * out.left_rotation.rotation;
  out.y_hat = std::sqrt(static_cast<double>(a.cols())) * truncation.right * out.right_rotation.rotation;
  return out;
}

Matrix breve_target(const std::vector<int>& labels, const Vector& scale, Index k,
                    const std::vector<double>* theta) {
  if (scale.size() != k) throw ValidationError("breve_target: scale has wrong length");
  if ((scale.array() <= 0.0).any()) throw ValidationError("breve_target: block scale must be positive");
  if (theta && theta->size() != labels.size()) throw ValidationError("breve_target: theta has wrong length");
  Matrix target = Matrix::Zero(static_cast<Index>(labels.size()), k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l < 0 || l >= k) throw ValidationError("breve_target: label out of range");
    const double weight = theta ? (*theta)[i] : 1.0;
    target(static_cast<Index>(i), l) = weight / std::sqrt(scale(l));
  }
  return target;
}

namespace {

struct SideInputs {
  const Matrix* estimate;
  const std::vector<int>* labels;
  Vector pi;
  double rho;
};

Residuals side_residuals(const SideInputs& side, Index k, TargetKind kind,
                         const std::optional<std::vector<double>>& theta, double mu2,
                         const ResidualOptions& options) {
  const Matrix& estimate = *side.estimate;
  const Index n = estimate.rows();
  if (side.labels->size() != static_cast<std::size_t>(n)) {
    throw ValidationError("residuals: membership count does not match embedding rows");
  }
  if (!(side.rho > 0.0)) throw ValidationError("residuals: rho must be positive");

  Residuals out;
  out.labels = *side.labels;
  if (options.blind) {
    out.labels.assign(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      estimate.row(i).maxCoeff(&best);
      out.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
  }

  Vector scale;
  const std::vector<double>* weights = nullptr;
  if (kind == TargetKind::breve_z_prime) {
    if (!theta) throw ValidationError("residuals: breve_z_prime target needs theta");
    weights = &*theta;
    if (options.empirical_fractions || options.blind) {
      scale = Vector::Zero(k);
      for (Index i = 0; i < n; ++i) {
        const double t = (*theta)[static_cast<std::size_t>(i)];
        scale(out.labels[static_cast<std::size_t>(i)]) += t * t;
      }
      scale /= static_cast<double>(n);
    } else {
      scale = mu2 * side.pi;
    }
  } else {
    scale = (options.empirical_fractions || options.blind) ? block_fractions(out.labels, k) : side.pi;
  }
  if ((scale.array() <= 0.0).any()) throw ValidationError("residuals: a block is empty");

  out.target = breve_target(out.labels, scale, k, weights);
  out.alignment = options.blind ? SignedPermutation::identity(static_cast<int>(k))
                                : align_signed_permutation(estimate, out.target);
  out.rows = std::sqrt(static_cast<double>(n) * side.rho) *
             (out.alignment.apply_rows(estimate) - out.target);
  return out;
}

}  // namespace

ResidualSet residuals(const Embedding& embedding, const SampledGraph& graph, const BlockModel& model,
                      const ResidualOptions& options) {
  return std::visit(
      [&](const auto& m) -> ResidualSet {
        using T = std::decay_t<decltype(m)>;
        const Index k = m.k();
        if (embedding.rank != k) {
          throw ValidationError("residuals: embedding rank " + std::to_string(embedding.rank) +
                                " differs from block count " + std::to_string(k));
        }
        if (graph.z.empty()) throw ValidationError("residuals: Z memberships missing");
        ResidualSet out;
        if constexpr (std::is_same_v<T, DirectedSbm>) {
          if (!graph.y) throw ValidationError("residuals: Y memberships missing");
          if (options.target == TargetKind::breve_z_prime) {
            throw ValidationError("residuals: directed models have no degree parameters");
          }
          out.left = side_residuals({&embedding.z_hat, &graph.z, m.pi_z, m.rho}, k, TargetKind::breve_z,
                                    std::nullopt, 0.0, options);
          out.right = side_residuals({&embedding.y_hat, &*graph.y, m.pi_y, m.rho}, k,
                                     TargetKind::breve_z, std::nullopt, 0.0, options);
        } else if constexpr (std::is_same_v<T, DegreeCorrectedSbm>) {
          const TargetKind kind = options.target.value_or(TargetKind::breve_z_prime);
          if (kind == TargetKind::breve_z_prime && !graph.theta) {
            throw ValidationError("residuals: degree parameters missing");
          }
          out.left = side_residuals({&embedding.z_hat, &graph.z, m.pi, m.rho}, k, kind, graph.theta,
                                    m.theta.moment(2), options);
        } else {
          const TargetKind kind = options.target.value_or(TargetKind::breve_z);
          if (kind == TargetKind::breve_z_prime) {
            throw ValidationError("residuals: undirected models have no degree parameters");
          }
          out.left = side_residuals({&embedding.z_hat, &graph.z, m.pi, m.rho}, k, kind, std::nullopt,
                                    0.0, options);
        }
        return out;
      },
      model);
}

void write_embedding_csv(std::ostream& out, const Matrix& embedding) {
  std::ostringstream buf;
  buf << std::setprecision(15);
  buf << "node";
  for (Index j = 0; j < embedding.cols(); ++j) buf << ",dim" << (j + 1);
  buf << '\n';
  for (Index i = 0; i < embedding.rows(); ++i) {
    buf << (i + 1);
    for (Index j = 0; j < embedding.cols(); ++j) buf << ',' << embedding(i, j);
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace vsbm
