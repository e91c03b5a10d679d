#include "vsbm/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "vsbm/errors.hpp"
#include "vsbm/graph_io.hpp"
#include "vsbm/rng.hpp"

namespace vsbm {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index model_k(const BlockModel& model) {
  return std::visit([](const auto& m) { return m.k(); }, model);
}

double model_rho(const BlockModel& model) {
  return std::visit([](const auto& m) { return m.rho; }, model);
}

// Runs body(r) for r in [0, count) on `threads` workers. Results must be
// written to per-index slots; the caller reduces in index order.
template <typename Body>
void parallel_for(Index count, int threads, Body&& body) {
  const int workers = static_cast<int>(std::min<Index>(count, std::max(1, threads)));
  if (workers <= 1) {
    for (Index r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index r = next++; r < count; r = next++) {
        try {
          body(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

Matrix rows_of_block(const Matrix& rows, const std::vector<int>& labels, int block) {
  std::vector<Index> picked;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == block) picked.push_back(static_cast<Index>(i));
  }
  Matrix out(static_cast<Index>(picked.size()), rows.cols());
  for (std::size_t r = 0; r < picked.size(); ++r) out.row(static_cast<Index>(r)) = rows.row(picked[r]);
  return out;
}

Matrix inverse_psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  if (eig.eigenvalues().minCoeff() <= 0.0) throw NumericalError("whitening: covariance is singular");
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

EmbedOptions embed_options(const ExperimentConfig& config) {
  EmbedOptions opt;
  opt.rank = config.rank.value_or(config.k());
  return opt;
}

ResidualOptions residual_options(const ExperimentConfig& config) {
  ResidualOptions opt;
  opt.empirical_fractions = config.empirical_fractions;
  opt.blind = config.blind;
  return opt;
}

Matrix embedding_input(const ExperimentConfig& config, const SampledGraph& graph) {
  return config.noiseless ? expected_adjacency(graph, config.model) : graph.adjacency;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

Index ExperimentConfig::k() const { return model_k(model); }

void ExperimentConfig::validate() const {
  std::visit([](const auto& m) { m.validate(); }, model);
  if (!(model_rho(model) > 0.0)) throw ValidationError("experiments need rho > 0");
  if (reps < 1) throw ValidationError("replicate count must be at least 1");
  if (n < k()) throw ValidationError("n must be at least k");
  if (rank && (*rank < 1 || *rank > n)) throw ValidationError("rank outside [1, n]");
  if (rank && *rank != k()) throw ValidationError("covariance experiments need rank equal to k");
  if (estimator == Estimator::fixed_index && (fixed_index < 0 || fixed_index >= n)) {
    throw ValidationError("fixed index outside [0, n)");
  }
  if (mixture_samples < 1) throw ValidationError("mixture sample count must be positive");
}

GaussianFit fit_block_covariance(const Matrix& rows) {
  const Index count = rows.rows();
  const Index k = rows.cols();
  if (count < k + 1) {
    throw ValidationError("fit_block_covariance: need at least k + 1 = " + std::to_string(k + 1) +
                          " rows, got " + std::to_string(count));
  }
  GaussianFit fit;
  fit.count = count;
  fit.mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - fit.mean.transpose();
  fit.sigma = (centered.transpose() * centered) / static_cast<double>(count);
  return fit;
}

double relative_frobenius_error(const Matrix& estimate, const Matrix& truth) {
  const double denom = truth.norm();
  if (denom == 0.0) throw ValidationError("relative error against a zero matrix");
  return (estimate - truth).norm() / denom;
}

CovarianceReport run_table1(const ExperimentConfig& config) {
  config.validate();
  const auto* model = std::get_if<UndirectedSbm>(&config.model);
  if (!model) throw ValidationError("run_table1 needs an undirected model");
  const auto start = Clock::now();
  const Index k = model->k();

  std::vector<Matrix> theory(static_cast<std::size_t>(k));
  std::vector<Matrix> whiten(static_cast<std::size_t>(k));
  for (Index l = 0; l < k; ++l) {
    theory[static_cast<std::size_t>(l)] = sbm_covariance(*model, l, config.regime);
    whiten[static_cast<std::size_t>(l)] = inverse_psd_sqrt(theory[static_cast<std::size_t>(l)]);
  }

  struct ReplicateResult {
    std::vector<Matrix> sigma;
    std::vector<Vector> centroid;
    Vector fixed_row;
    int fixed_label = -1;
  };
  std::vector<ReplicateResult> results(static_cast<std::size_t>(config.reps));
  const SamplingOptions sampling{config.hollow};

  parallel_for(config.reps, resolve_threads(config.threads), [&](Index r) {
    const SampledGraph graph = sample_undirected(*model, config.n, derive_seed(config.seed, static_cast<std::uint64_t>(r)), sampling);
    const Embedding emb = embed(embedding_input(config, graph), embed_options(config));
    const ResidualSet res = residuals(emb, graph, config.model, residual_options(config));
    const Matrix aligned = res.left.alignment.apply_rows(emb.z_hat);
    ReplicateResult& out = results[static_cast<std::size_t>(r)];
    for (Index l = 0; l < k; ++l) {
      const Matrix block_rows = rows_of_block(res.left.rows, res.left.labels, static_cast<int>(l));
      out.sigma.push_back(fit_block_covariance(block_rows).sigma);
      out.centroid.push_back(rows_of_block(aligned, res.left.labels, static_cast<int>(l)).colwise().mean().transpose());
    }
    out.fixed_row = res.left.rows.row(config.fixed_index).transpose();
    out.fixed_label = res.left.labels[static_cast<std::size_t>(config.fixed_index)];
  });

  CovarianceReport report;
  for (Index l = 0; l < k; ++l) {
    const auto sl = static_cast<std::size_t>(l);
    BlockSummary block;
    block.block = l;
    block.theoretical_sigma = theory[sl];
    block.centroid = Vector::Zero(k);
    block.whitened_variances = Vector::Zero(k);
    for (const auto& rep : results) {
      block.empirical_sigma.push_back(rep.sigma[sl]);
      block.rel_errors.push_back(relative_frobenius_error(rep.sigma[sl], theory[sl]));
      block.centroid += rep.centroid[sl];
      block.whitened_variances += (whiten[sl] * rep.sigma[sl] * whiten[sl]).diagonal();
    }
    block.centroid /= static_cast<double>(config.reps);
    block.whitened_variances /= static_cast<double>(config.reps);
    block.mean_rel_error_x100 = 100.0 * mean_of(block.rel_errors);
    block.se_rel_error_x100 = 100.0 * standard_error_of(block.rel_errors);
    report.blocks.push_back(std::move(block));
  }

  if (config.estimator == Estimator::fixed_index) {
    for (Index l = 0; l < k; ++l) {
      std::vector<Vector> rows;
      for (const auto& rep : results) {
        if (rep.fixed_label == l) rows.push_back(rep.fixed_row);
      }
      if (static_cast<Index>(rows.size()) < k + 1) continue;
      Matrix stacked(static_cast<Index>(rows.size()), k);
      for (std::size_t i = 0; i < rows.size(); ++i) stacked.row(static_cast<Index>(i)) = rows[i].transpose();
      FixedIndexSummary s;
      s.block = l;
      s.count = stacked.rows();
      s.empirical_sigma = fit_block_covariance(stacked).sigma;
      s.rel_error = relative_frobenius_error(s.empirical_sigma, theory[static_cast<std::size_t>(l)]);
      report.fixed_index.push_back(std::move(s));
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

namespace {

SideGeometry side_geometry(const std::string& name, const Matrix& estimate, const Residuals& res,
                           const Vector& pi, const std::vector<Matrix>& theory) {
  SideGeometry side;
  side.side = name;
  side.cloud = res.alignment.apply_rows(estimate);
  side.labels = res.labels;
  const Index k = pi.size();
  for (Index l = 0; l < k; ++l) {
    CentroidCheck c;
    c.block = l;
    c.theoretical_radius = 1.0 / std::sqrt(pi(l));
    c.centroid = rows_of_block(side.cloud, side.labels, static_cast<int>(l)).colwise().mean().transpose();
    Vector axis = Vector::Zero(k);
    axis(l) = c.theoretical_radius;
    c.distance = (c.centroid - axis).norm();
    side.centroids.push_back(std::move(c));

    const Matrix sigma = fit_block_covariance(rows_of_block(res.rows, res.labels, static_cast<int>(l))).sigma;
    side.theoretical_sigma.push_back(theory[static_cast<std::size_t>(l)]);
    side.empirical_sigma.push_back(sigma);
    side.rel_errors.push_back(relative_frobenius_error(sigma, theory[static_cast<std::size_t>(l)]));
  }
  return side;
}

}  // namespace

DirectedFigureReport run_directed_figure(const ExperimentConfig& config) {
  config.validate();
  const auto* model = std::get_if<DirectedSbm>(&config.model);
  if (!model) throw ValidationError("run_directed_figure needs a directed model");
  const auto start = Clock::now();
  const Index k = model->k();

  std::vector<Matrix> left_theory, right_theory;
  for (Index l = 0; l < k; ++l) {
    left_theory.push_back(disbm_covariance(*model, l, Side::left, config.regime));
    right_theory.push_back(disbm_covariance(*model, l, Side::right, config.regime));
  }

  Embedding emb;
  ResidualSet res;
  {
    const SampledGraph graph = sample_directed(*model, config.n, derive_seed(config.seed, 0), {config.hollow});
    emb = embed(embedding_input(config, graph), embed_options(config));
    res = residuals(emb, graph, config.model, residual_options(config));
  }
  DirectedFigureReport report;
  report.left = side_geometry("left", emb.z_hat, res.left, model->pi_z, left_theory);
  report.right = side_geometry("right", emb.y_hat, *res.right, model->pi_y, right_theory);
  report.wall_seconds = seconds_since(start);
  return report;
}

DcsbmFigureReport run_dcsbm_figure(const ExperimentConfig& config) {
  config.validate();
  const auto* model = std::get_if<DegreeCorrectedSbm>(&config.model);
  if (!model) throw ValidationError("run_dcsbm_figure needs a degree-corrected model");
  const auto start = Clock::now();
  const Index k = model->k();

  const SampledGraph graph =
      sample_degree_corrected(*model, config.n, derive_seed(config.seed, 0), {config.hollow});
  const Embedding emb = embed(embedding_input(config, graph), embed_options(config));
  const ResidualSet res = residuals(emb, graph, config.model, residual_options(config));

  DcsbmFigureReport report;
  report.cloud = res.left.alignment.apply_rows(emb.z_hat);
  report.labels = res.left.labels;
  const Vector eta = model->eta();
  for (Index l = 0; l < k; ++l) {
    DcsbmBlockGeometry g;
    g.block = l;
    g.theoretical_magnitude = model->theta.moment(1) / std::sqrt(eta(l));
    g.centroid = rows_of_block(report.cloud, report.labels, static_cast<int>(l)).colwise().mean().transpose();
    g.dominant = g.centroid(l);
    for (Index j = 0; j < k; ++j) {
      if (j != l) g.max_off_axis = std::max(g.max_off_axis, std::abs(g.centroid(j)));
    }
    report.blocks.push_back(std::move(g));
  }

  const Matrix& rows = res.left.rows;
  Index hits = 0;
  for (Index i = 0; i < rows.rows(); ++i) {
    if ((rows.row(i).array() <= 0.0).all()) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(rows.rows());
  report.empirical_orthant = p;
  report.empirical_orthant_se = std::sqrt(p * (1.0 - p) / static_cast<double>(rows.rows()));
  report.mixture_orthant = dcsbm_mixture_cdf(*model, Vector::Zero(k), config.regime, config.mixture_samples,
                                             derive_seed(config.seed, 1));
  report.wall_seconds = seconds_since(start);
  return report;
}

GridReport run_closed_form_grid() {
  GridReport report;
  report.passed = true;
  for (int ai = 3; ai <= 9; ++ai) {
    const double a = ai / 10.0;
    for (int bi = 1; bi * 5 <= ai * 10 - 5; ++bi) {
      const double b = bi * 0.05;
      for (int pi_i = 1; pi_i <= 9; ++pi_i) {
        const double pi1 = pi_i / 10.0;
        UndirectedSbm model;
        model.pi = Vector(2);
        model.pi << pi1, 1.0 - pi1;
        model.b.resize(2, 2);
        model.b << a, b, b, a;
        const TwoBlockCovariance closed = two_block_closed_form(a, b, pi1);
        const Matrix s1 = sbm_covariance(model, 0, Regime::dense);
        const Matrix s2 = sbm_covariance(model, 1, Regime::dense);
        report.max_rel_error = std::max({report.max_rel_error, relative_frobenius_error(s1, closed.sigma1),
                                         relative_frobenius_error(s2, closed.sigma2)});
        const double d1 = s1.determinant();
        const double d2 = s2.determinant();
        report.max_det_identity_error = std::max(report.max_det_identity_error, std::abs(d1 - d2) / std::abs(d1));
        report.max_det_formula_error =
            std::max({report.max_det_formula_error, std::abs(d1 - closed.determinant) / closed.determinant,
                      std::abs(d2 - closed.determinant) / closed.determinant});
        ++report.cases;
      }
    }
  }
  if (report.max_rel_error > 1e-10 || report.max_det_identity_error > 1e-10 ||
      report.max_det_formula_error > 1e-10) {
    report.passed = false;
  }

  struct Printed {
    double a, b, pi1;
    double s1[3];
    double s2[3];
    double tol;
  };
  const double root3 = std::sqrt(3.0);
  const Printed printed[] = {
      {0.75, 0.25, 0.25, {7.0, -root3, 1.0}, {7.0, -root3, 1.0}, 1e-10},
      {0.8, 0.6, 0.5, {9.63, -9.79, 10.77}, {10.77, -9.79, 9.63}, 0.005},
      {0.8, 0.3, 0.4, {2.37, -1.21, 1.43}, {2.97, -1.28, 1.20}, 0.005},
  };
  for (const auto& p : printed) {
    UndirectedSbm model;
    model.pi = Vector(2);
    model.pi << p.pi1, 1.0 - p.pi1;
    model.b.resize(2, 2);
    model.b << p.a, p.b, p.b, p.a;
    PrintedExample ex;
    ex.a = p.a;
    ex.b = p.b;
    ex.pi1 = p.pi1;
    ex.sigma1 = sbm_covariance(model, 0, Regime::dense);
    ex.sigma2 = sbm_covariance(model, 1, Regime::dense);
    ex.tolerance = p.tol;
    const double entries1[3] = {ex.sigma1(0, 0), ex.sigma1(0, 1), ex.sigma1(1, 1)};
    const double entries2[3] = {ex.sigma2(0, 0), ex.sigma2(0, 1), ex.sigma2(1, 1)};
    for (int i = 0; i < 3; ++i) {
      ex.max_deviation = std::max({ex.max_deviation, std::abs(entries1[i] - p.s1[i]), std::abs(entries2[i] - p.s2[i])});
    }
    ex.within_tolerance = ex.max_deviation <= ex.tolerance;
    // The displayed digits are cut, not rounded.
    ex.truncation_match = true;
    for (int i = 0; i < 3; ++i) {
      const auto cut = [](double x) { return std::trunc(x * 100.0) / 100.0; };
      ex.truncation_match = ex.truncation_match && std::abs(cut(entries1[i]) - p.s1[i]) < 1e-9 &&
                            std::abs(cut(entries2[i]) - p.s2[i]) < 1e-9;
    }
    ex.passed = ex.within_tolerance || (p.tol > 1e-9 && ex.truncation_match);
    report.passed = report.passed && ex.passed;
    report.printed.push_back(std::move(ex));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output files

namespace {

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json model_json(const BlockModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        json out;
        if constexpr (std::is_same_v<T, DirectedSbm>) {
          out["family"] = "directed";
          out["pi_z"] = to_json(m.pi_z);
          out["pi_y"] = to_json(m.pi_y);
        } else {
          out["family"] = std::is_same_v<T, UndirectedSbm> ? "undirected" : "degree-corrected";
          out["pi"] = to_json(m.pi);
        }
        out["B"] = to_json(m.b);
        out["rho"] = m.rho;
        if constexpr (std::is_same_v<T, DegreeCorrectedSbm>) {
          out["theta"] = {{"lo", m.theta.lo()}, {"hi", m.theta.hi()},
                          {"moments", {m.theta.moment(1), m.theta.moment(2), m.theta.moment(3), m.theta.moment(4)}}};
        }
        return out;
      },
      model);
}

json config_json(const ExperimentConfig& c) {
  json out;
  out["model"] = model_json(c.model);
  out["n"] = c.n;
  out["reps"] = c.reps;
  out["rank"] = c.rank.value_or(c.k());
  out["regime"] = c.regime == Regime::dense ? "dense" : "sparse";
  out["hollow"] = c.hollow;
  out["noiseless"] = c.noiseless;
  out["empirical_fractions"] = c.empirical_fractions;
  out["blind"] = c.blind;
  out["estimator"] = c.estimator == Estimator::pooled ? "pooled" : "fixed-index";
  if (c.estimator == Estimator::fixed_index) out["fixed_index"] = c.fixed_index + 1;
  return out;
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path path(dir);
  std::filesystem::create_directories(path);
  return path;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_report(const std::filesystem::path& dir, json report, double wall_seconds) {
  report["timing"] = "timing.json";
  write_text(dir / "report.json", report.dump(2) + "\n");
  json timing;
  timing["wall_seconds"] = wall_seconds;
  write_text(dir / "timing.json", timing.dump(2) + "\n");
}

void write_cloud(const std::filesystem::path& path, const Matrix& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_embedding_csv(out, cloud);
}

void write_label_file(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_labels(out, labels);
}

json side_json(const SideGeometry& side) {
  json blocks = json::array();
  for (std::size_t l = 0; l < side.centroids.size(); ++l) {
    const CentroidCheck& c = side.centroids[l];
    blocks.push_back({{"block", c.block + 1},
                      {"side", side.side},
                      {"theoretical_radius", c.theoretical_radius},
                      {"centroid", to_json(c.centroid)},
                      {"centroid_distance", c.distance},
                      {"theoretical_sigma", to_json(side.theoretical_sigma[l])},
                      {"empirical_sigma", to_json(side.empirical_sigma[l])},
                      {"rel_error", side.rel_errors[l]}});
  }
  return blocks;
}

}  // namespace

void write_table1_outputs(const ExperimentConfig& config, const CovarianceReport& report) {
  if (config.out_dir.empty()) return;
  const auto dir = prepare_dir(config.out_dir);
  json out;
  out["config"] = config_json(config);
  out["seed"] = config.seed;
  json blocks = json::array();
  for (const BlockSummary& b : report.blocks) {
    json rel = json::array();
    for (double e : b.rel_errors) rel.push_back(e);
    blocks.push_back({{"block", b.block + 1},
                      {"theoretical_sigma", to_json(b.theoretical_sigma)},
                      {"mean_rel_error", b.mean_rel_error_x100},
                      {"se_rel_error", b.se_rel_error_x100},
                      {"centroid", to_json(b.centroid)},
                      {"whitened_variances", to_json(b.whitened_variances)},
                      {"first_replicate_sigma", to_json(b.empirical_sigma.front())},
                      {"rel_errors", rel}});
  }
  out["per_block"] = blocks;
  out["error_scale"] = 100;
  if (!report.fixed_index.empty()) {
    json fixed = json::array();
    for (const auto& f : report.fixed_index) {
      fixed.push_back({{"block", f.block + 1},
                       {"count", f.count},
                       {"empirical_sigma", to_json(f.empirical_sigma)},
                       {"rel_error", f.rel_error}});
    }
    out["fixed_index"] = fixed;
  }
  write_report(dir, std::move(out), report.wall_seconds);
}

void write_directed_outputs(const ExperimentConfig& config, const DirectedFigureReport& report) {
  if (config.out_dir.empty()) return;
  const auto dir = prepare_dir(config.out_dir);
  write_cloud(dir / "z_hat.csv", report.left.cloud);
  write_cloud(dir / "y_hat.csv", report.right.cloud);
  write_label_file(dir / "z_labels.txt", report.left.labels);
  write_label_file(dir / "y_labels.txt", report.right.labels);
  json out;
  out["config"] = config_json(config);
  out["seed"] = config.seed;
  json blocks = side_json(report.left);
  for (auto& b : side_json(report.right)) blocks.push_back(std::move(b));
  out["per_block"] = blocks;
  write_report(dir, std::move(out), report.wall_seconds);
}

void write_dcsbm_outputs(const ExperimentConfig& config, const DcsbmFigureReport& report) {
  if (config.out_dir.empty()) return;
  const auto dir = prepare_dir(config.out_dir);
  write_cloud(dir / "z_hat.csv", report.cloud);
  write_label_file(dir / "z_labels.txt", report.labels);
  json out;
  out["config"] = config_json(config);
  out["seed"] = config.seed;
  json blocks = json::array();
  for (const auto& b : report.blocks) {
    blocks.push_back({{"block", b.block + 1},
                      {"theoretical_magnitude", b.theoretical_magnitude},
                      {"centroid", to_json(b.centroid)},
                      {"dominant", b.dominant},
                      {"max_off_axis", b.max_off_axis}});
  }
  out["per_block"] = blocks;
  out["orthant_check"] = {{"mixture_cdf", report.mixture_orthant.probability},
                          {"mixture_cdf_se", report.mixture_orthant.standard_error},
                          {"mixture_samples", report.mixture_orthant.samples},
                          {"empirical", report.empirical_orthant},
                          {"empirical_se", report.empirical_orthant_se}};
  write_report(dir, std::move(out), report.wall_seconds);
}

void write_grid_outputs(const std::string& out_dir, const GridReport& report) {
  if (out_dir.empty()) return;
  const auto dir = prepare_dir(out_dir);
  json out;
  out["cases"] = report.cases;
  out["max_rel_error"] = report.max_rel_error;
  out["max_det_identity_error"] = report.max_det_identity_error;
  out["max_det_formula_error"] = report.max_det_formula_error;
  json printed = json::array();
  for (const auto& p : report.printed) {
    printed.push_back({{"a", p.a}, {"b", p.b}, {"pi1", p.pi1},
                       {"sigma1", to_json(p.sigma1)}, {"sigma2", to_json(p.sigma2)},
                       {"max_deviation", p.max_deviation}, {"tolerance", p.tolerance},
                       {"within_tolerance", p.within_tolerance},
                       {"truncation_match", p.truncation_match}, {"passed", p.passed}});
  }
  out["printed"] = printed;
  out["passed"] = report.passed;
  write_text(dir / "report.json", out.dump(2) + "\n");
}

}  // namespace vsbm
