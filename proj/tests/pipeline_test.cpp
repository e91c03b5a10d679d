#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "vsbm/errors.hpp"
#include "vsbm/pipeline.hpp"

namespace {

using vsbm::Index;
using vsbm::Matrix;
using vsbm::Vector;

double max_row_norm(const Matrix& m) { return m.rowwise().norm().maxCoeff(); }

vsbm::ResidualOptions empirical() {
  vsbm::ResidualOptions opt;
  opt.empirical_fractions = true;
  return opt;
}

TEST(Noiseless, UndirectedExact) {
  const auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 400, 3);
  const Matrix p = vsbm::expected_adjacency(g, model);
  vsbm::EmbedOptions opt;
  opt.rank = 4;
  const auto emb = vsbm::embed(p, opt);
  const auto res = vsbm::residuals(emb, g, model, empirical());
  const double scale = std::sqrt(static_cast<double>(g.n()) * model.rho);
  EXPECT_LT(max_row_norm(res.left.rows) / scale, 1e-6);
  EXPECT_FALSE(res.right.has_value());
  // Rows take exactly k distinct values.
  const Matrix aligned = res.left.alignment.apply_rows(emb.z_hat);
  for (Index i = 0; i < g.n(); ++i) {
    EXPECT_NEAR(aligned(i, g.z[i]), 1.0 / std::sqrt(vsbm::block_fractions(g.z, 4)(g.z[i])), 1e-6);
  }
}

TEST(Noiseless, DirectedExactBothSides) {
  const auto model = vsbm::directed_figure_model();
  const auto g = vsbm::sample_directed(model, 300, 5);
  const auto emb = vsbm::embed(vsbm::expected_adjacency(g, model), {.rank = 2});
  const auto res = vsbm::residuals(emb, g, model, empirical());
  ASSERT_TRUE(res.right.has_value());
  const double scale = std::sqrt(300.0);
  EXPECT_LT(max_row_norm(res.left.rows) / scale, 1e-6);
  EXPECT_LT(max_row_norm(res.right->rows) / scale, 1e-6);
}

TEST(Noiseless, DegreeCorrectedExact) {
  const auto model = vsbm::dcsbm_figure_model();
  const auto g = vsbm::sample_degree_corrected(model, 300, 6);
  const auto emb = vsbm::embed(vsbm::expected_adjacency(g, model), {.rank = 3});
  const auto res = vsbm::residuals(emb, g, model, empirical());
  EXPECT_LT(max_row_norm(res.left.rows) / std::sqrt(300.0), 1e-6);
}

TEST(Noiseless, PopulationTargetsDifferAtRootNRate) {
  const auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 400, 3);
  const auto emb = vsbm::embed(vsbm::expected_adjacency(g, model), {.rank = 4});
  const auto res = vsbm::residuals(emb, g, model);
  const Vector pi_hat = vsbm::block_fractions(g.z, 4);
  double expected = 0.0;
  for (Index l = 0; l < 4; ++l) {
    expected = std::max(expected, std::abs(1.0 / std::sqrt(pi_hat(l)) - 1.0 / std::sqrt(model.pi(l))));
  }
  EXPECT_NEAR(max_row_norm(res.left.rows) / std::sqrt(400.0), expected, 1e-6);
  EXPECT_GT(expected, 1e-3);
}

TEST(Embed, ScaleContract) {
  const auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 300, 8);
  const auto emb = vsbm::embed(g.adjacency, {.rank = 4});
  EXPECT_EQ(emb.rank, 4);
  EXPECT_NEAR(emb.z_hat.squaredNorm() / 300.0, 4.0, 1e-8);
  EXPECT_NEAR(emb.y_hat.squaredNorm() / 300.0, 4.0, 1e-8);
  const Matrix gram = emb.z_hat.transpose() * emb.z_hat / 300.0;
  EXPECT_LT((gram - Matrix::Identity(4, 4)).norm(), 1e-8);
  EXPECT_EQ(emb.singular_values.size(), 4);
}

TEST(Embed, RankOneIsLeadingVector) {
  const auto g = vsbm::sample_undirected(vsbm::table1_model(), 200, 2);
  const auto emb = vsbm::embed(g.adjacency, {.rank = 1});
  EXPECT_EQ(emb.left_rotation.rotation, Matrix::Identity(1, 1));
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.adjacency);
  const Index top = g.n() - 1;
  const Vector v = es.eigenvectors().col(top) * std::sqrt(200.0);
  EXPECT_NEAR(std::abs(v.dot(emb.z_hat.col(0))) / 200.0, 1.0, 1e-10);
}

TEST(Embed, SymmetricSidesAgreeUpToSignedPermutation) {
  const auto g = vsbm::sample_undirected(vsbm::table1_model(), 300, 12);
  const auto emb = vsbm::embed(g.adjacency, {.rank = 4});
  EXPECT_NEAR(oracle::brute_force_alignment_error(emb.y_hat, emb.z_hat), 0.0, 1e-8);
}

TEST(Embed, RowPermutationEquivariance) {
  const auto g = vsbm::sample_undirected(vsbm::table1_model(), 250, 4);
  std::vector<Index> order(250);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 gen(1);
  std::shuffle(order.begin(), order.end(), gen);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(250);
  for (Index i = 0; i < 250; ++i) perm.indices()(i) = static_cast<int>(order[i]);
  const Matrix permuted = perm.transpose() * g.adjacency * perm;
  const auto a = vsbm::embed(g.adjacency, {.rank = 4});
  const auto b = vsbm::embed(permuted, {.rank = 4});
  const Matrix expected = perm.transpose() * a.z_hat;
  EXPECT_NEAR(oracle::brute_force_alignment_error(b.z_hat, expected), 0.0, 1e-8);
}

TEST(Embed, AutoRankFindsBlockCount) {
  const auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 300, 1);
  Matrix p = vsbm::expected_adjacency(g, model);
  p += 1e-3 * oracle::random_symmetric(300, 2);
  const auto emb = vsbm::embed(p);
  EXPECT_EQ(emb.rank, 4);
}

TEST(Embed, RejectsBadRank) {
  const Matrix a = Matrix::Identity(5, 5);
  EXPECT_THROW(vsbm::embed(a, {.rank = 6}), vsbm::ValidationError);
  EXPECT_THROW(vsbm::embed(a, {.rank = 0}), vsbm::ValidationError);
}

TEST(Residuals, Validation) {
  auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 200, 2);
  const auto emb3 = vsbm::embed(g.adjacency, {.rank = 3});
  EXPECT_THROW(vsbm::residuals(emb3, g, model), vsbm::ValidationError);
  const auto emb = vsbm::embed(g.adjacency, {.rank = 4});
  vsbm::SampledGraph missing = g;
  missing.z.clear();
  EXPECT_THROW(vsbm::residuals(emb, missing, model), vsbm::ValidationError);
  model.rho = 0.0;
  EXPECT_THROW(vsbm::residuals(emb, g, model), vsbm::ValidationError);
}

TEST(Residuals, BlindModeOnNoiselessInput) {
  const auto model = vsbm::table1_model();
  const auto g = vsbm::sample_undirected(model, 300, 3);
  const auto emb = vsbm::embed(vsbm::expected_adjacency(g, model), {.rank = 4});
  vsbm::ResidualOptions opt;
  opt.blind = true;
  const auto res = vsbm::residuals(emb, g, model, opt);
  EXPECT_EQ(res.left.alignment, vsbm::SignedPermutation::identity(4));
  EXPECT_LT(max_row_norm(res.left.rows) / std::sqrt(300.0), 1e-6);
}

TEST(BreveTarget, Rows) {
  Vector pi(2);
  pi << 0.25, 0.75;
  const Matrix t = vsbm::breve_target({0, 1, 0}, pi, 2);
  EXPECT_DOUBLE_EQ(t(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(t(1, 1), 1.0 / std::sqrt(0.75));
  EXPECT_DOUBLE_EQ(t(1, 0), 0.0);
  const std::vector<double> theta{0.5, 0.2, 1.0};
  const Matrix tt = vsbm::breve_target({0, 1, 0}, pi, 2, &theta);
  EXPECT_DOUBLE_EQ(tt(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(tt(1, 1), 0.2 / std::sqrt(0.75));
}

TEST(EmbeddingCsv, Format) {
  Matrix m(2, 2);
  m << 1.0, -0.5, 1.0 / 3.0, 2.0;
  std::ostringstream out;
  vsbm::write_embedding_csv(out, m);
  EXPECT_EQ(out.str(), "node,dim1,dim2\n1,1,-0.5\n2,0.333333333333333,2\n");
}

}  // namespace
