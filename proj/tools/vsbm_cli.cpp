// Command-line front end: sampling, embedding, covariance theory and the
// simulation studies. Exit codes: 0 success, 1 failed check, 2 validation
// error, 3 numerical-guard error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vsbm/asymptotics.hpp"
#include "vsbm/errors.hpp"
#include "vsbm/experiments.hpp"
#include "vsbm/graph_io.hpp"
#include "vsbm/models.hpp"
#include "vsbm/pipeline.hpp"

namespace {

using namespace vsbm;
using json = nlohmann::ordered_json;

std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
    values.push_back(v);
  }
  return values;
}

Vector parse_vector(const std::string& text) {
  const auto values = parse_list(text, ',');
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

// Rows separated by ';', entries by ','.
Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row, ','));
  if (rows.empty()) throw ValidationError("empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ValidationError("matrix rows have unequal length");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

struct Args {
  std::string model_family;
  std::string b, pi, pi_y;
  double rho = 1.0;
  double theta_lo = 0.25, theta_hi = 0.75;
  std::uint64_t seed = 1;
  long long n = -1;
  long long reps = -1;
  std::string rank = "k";
  std::string regime = "dense";
  std::string out;
  std::string input;
  std::string estimator = "pooled";
  long long fixed_index = 1;
  long long block = 0;
  std::string side = "left";
  double theta = -1.0;
  int threads = 0;
  long long mixture_samples = 200000;
  bool hollow = false;
  bool noiseless = false;
  bool empirical = false;
  bool blind = false;
};

Regime parse_regime(const std::string& s) {
  if (s == "dense") return Regime::dense;
  if (s == "sparse") return Regime::sparse;
  throw ValidationError("--regime must be dense or sparse");
}

// Model from flags; unset parameters fall back to the preset for the family.
BlockModel build_model(const Args& args, const std::string& default_family) {
  const std::string family = args.model_family.empty() ? default_family : args.model_family;
  if (family == "undirected") {
    UndirectedSbm m = table1_model();
    if (!args.b.empty()) m.b = parse_matrix(args.b);
    if (!args.pi.empty()) m.pi = parse_vector(args.pi);
    m.rho = args.rho;
    m.validate();
    return m;
  }
  if (family == "directed") {
    DirectedSbm m = directed_figure_model();
    if (!args.b.empty()) m.b = parse_matrix(args.b);
    if (!args.pi.empty()) m.pi_z = parse_vector(args.pi);
    if (!args.pi_y.empty()) m.pi_y = parse_vector(args.pi_y);
    m.rho = args.rho;
    m.validate();
    return m;
  }
  if (family == "dcsbm") {
    DegreeCorrectedSbm m = dcsbm_figure_model();
    if (!args.b.empty()) m.b = parse_matrix(args.b);
    if (!args.pi.empty()) m.pi = parse_vector(args.pi);
    m.rho = args.rho;
    m.theta = ThetaDistribution::uniform(args.theta_lo, args.theta_hi);
    m.validate();
    return m;
  }
  throw ValidationError("--model must be undirected, directed or dcsbm");
}

std::optional<Index> parse_rank(const std::string& text, Index k) {
  if (text == "k") return k;
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const long long r = std::stoll(text, &used);
    if (used != text.size() || r < 1) throw ValidationError("");
    return static_cast<Index>(r);
  } catch (const std::exception&) {
    throw ValidationError("--rank must be a positive integer, k or auto");
  }
}

ExperimentConfig build_config(const Args& args, const std::string& family, Index default_n, Index default_reps) {
  ExperimentConfig c;
  c.model = build_model(args, family);
  c.n = args.n > 0 ? args.n : default_n;
  c.reps = args.reps > 0 ? args.reps : default_reps;
  if (args.reps == 0) throw ValidationError("--reps must be at least 1");
  c.rank = parse_rank(args.rank, c.k());
  if (!c.rank) throw ValidationError("covariance experiments need a fixed rank");
  c.seed = args.seed;
  c.regime = parse_regime(args.regime);
  c.out_dir = args.out;
  c.hollow = args.hollow;
  c.noiseless = args.noiseless;
  c.empirical_fractions = args.empirical;
  c.blind = args.blind;
  if (args.estimator == "pooled") c.estimator = Estimator::pooled;
  else if (args.estimator == "fixed-index") c.estimator = Estimator::fixed_index;
  else throw ValidationError("--estimator must be pooled or fixed-index");
  c.fixed_index = args.fixed_index - 1;
  c.threads = args.threads;
  c.mixture_samples = args.mixture_samples;
  c.validate();
  return c;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int cmd_simulate(const Args& args) {
  const BlockModel model = build_model(args, "undirected");
  const Index n = args.n > 0 ? args.n : 1000;
  const SampledGraph g = sample_graph(model, n, args.seed, {args.hollow});
  if (args.out.empty()) {
    write_edge_list(std::cout, g.adjacency, g.directed);
    return 0;
  }
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  auto edges = open_out(dir / "graph.edgelist");
  write_edge_list(edges, g.adjacency, g.directed);
  auto z = open_out(dir / "z_labels.txt");
  write_labels(z, g.z);
  if (g.y) {
    auto y = open_out(dir / "y_labels.txt");
    write_labels(y, *g.y);
  }
  if (g.theta) {
    auto t = open_out(dir / "theta.txt");
    write_values(t, *g.theta);
  }
  std::cout << "wrote " << (dir / "graph.edgelist").string() << '\n';
  return 0;
}

int cmd_embed(const Args& args) {
  if (args.input.empty()) throw ValidationError("embed needs --input <edge list>");
  std::ifstream in(args.input);
  if (!in) throw ValidationError("cannot open " + args.input);
  const EdgeList graph = read_edge_list(in);
  EmbedOptions opt;
  opt.rank = args.rank == "k" ? std::nullopt : parse_rank(args.rank, 0);
  const Embedding emb = embed(graph.adjacency, opt);
  if (args.out.empty()) {
    write_embedding_csv(std::cout, emb.z_hat);
    return 0;
  }
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);
  auto z = open_out(dir / "z_hat.csv");
  write_embedding_csv(z, emb.z_hat);
  auto y = open_out(dir / "y_hat.csv");
  write_embedding_csv(y, emb.y_hat);
  json summary;
  summary["rank"] = emb.rank;
  json sv = json::array();
  for (Index i = 0; i < emb.singular_values.size(); ++i) sv.push_back(emb.singular_values(i));
  summary["singular_values"] = sv;
  summary["varimax"] = {{"left_objective", emb.left_rotation.objective_value},
                        {"left_sweeps", emb.left_rotation.sweeps_used},
                        {"right_objective", emb.right_rotation.objective_value},
                        {"right_sweeps", emb.right_rotation.sweeps_used}};
  auto s = open_out(dir / "embedding.json");
  s << summary.dump(2) << '\n';
  std::cout << "rank " << emb.rank << ", wrote " << (dir / "z_hat.csv").string() << '\n';
  return 0;
}

int cmd_theory(const Args& args) {
  const BlockModel model = build_model(args, "undirected");
  const Regime regime = parse_regime(args.regime);
  const Index k = std::visit([](const auto& m) { return m.k(); }, model);
  if (args.block < 0 || args.block > k) throw ValidationError("--block must lie in 1..k (0 for all)");
  json out = json::array();
  for (Index l = 0; l < k; ++l) {
    if (args.block != 0 && l != args.block - 1) continue;
    json entry;
    entry["block"] = l + 1;
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, UndirectedSbm>) {
            entry["sigma"] = matrix_json(sbm_covariance(m, l, regime));
          } else if constexpr (std::is_same_v<T, DirectedSbm>) {
            if (args.side != "left" && args.side != "right") throw ValidationError("--side must be left or right");
            entry["side"] = args.side;
            entry["sigma"] = matrix_json(disbm_covariance(m, l, args.side == "left" ? Side::left : Side::right, regime));
          } else {
            const double theta = args.theta >= 0 ? args.theta : m.theta.moment(1);
            entry["theta"] = theta;
            entry["gamma"] = matrix_json(dcsbm_gamma(m, l, theta, regime));
          }
        },
        model);
    out.push_back(entry);
  }
  std::cout << out.dump(2) << '\n';
  if (!args.out.empty()) {
    std::filesystem::create_directories(args.out);
    auto f = open_out(std::filesystem::path(args.out) / "theory.json");
    f << out.dump(2) << '\n';
  }
  return 0;
}

int cmd_table1(const Args& args) {
  const ExperimentConfig c = build_config(args, "undirected", 5000, 100);
  const CovarianceReport report = run_table1(c);
  write_table1_outputs(c, report);
  std::cout << "block  mean_rel_error_x100  (se_x100)\n";
  for (const auto& b : report.blocks) {
    std::cout << "  " << (b.block + 1) << "    " << b.mean_rel_error_x100 << "  (" << b.se_rel_error_x100 << ")\n";
  }
  for (const auto& f : report.fixed_index) {
    std::cout << "  fixed-index block " << (f.block + 1) << ": " << f.count << " obs, rel error " << f.rel_error << '\n';
  }
  return 0;
}

int cmd_fig_directed(const Args& args) {
  const ExperimentConfig c = build_config(args, "directed", 10000, 1);
  const DirectedFigureReport report = run_directed_figure(c);
  write_directed_outputs(c, report);
  for (const SideGeometry* side : {&report.left, &report.right}) {
    for (std::size_t l = 0; l < side->centroids.size(); ++l) {
      const auto& cc = side->centroids[l];
      std::cout << side->side << " block " << (cc.block + 1) << ": radius " << cc.theoretical_radius
                << ", centroid distance " << cc.distance << ", covariance rel error " << side->rel_errors[l] << '\n';
    }
  }
  return 0;
}

int cmd_fig_dcsbm(const Args& args) {
  const ExperimentConfig c = build_config(args, "dcsbm", 2000, 1);
  const DcsbmFigureReport report = run_dcsbm_figure(c);
  write_dcsbm_outputs(c, report);
  for (const auto& b : report.blocks) {
    std::cout << "block " << (b.block + 1) << ": theoretical " << b.theoretical_magnitude << ", dominant "
              << b.dominant << ", max off-axis " << b.max_off_axis << '\n';
  }
  std::cout << "orthant at 0: mixture " << report.mixture_orthant.probability << " (" << report.mixture_orthant.standard_error
            << "), empirical " << report.empirical_orthant << " (" << report.empirical_orthant_se << ")\n";
  return 0;
}

int cmd_grid_check(const Args& args) {
  const GridReport report = run_closed_form_grid();
  write_grid_outputs(args.out, report);
  std::cout << report.cases << " grid cases, max relative error " << report.max_rel_error
            << ", determinant identity error " << report.max_det_identity_error << '\n';
  for (const auto& p : report.printed) {
    std::cout << "(" << p.a << ", " << p.b << ", " << p.pi1 << "): max deviation " << p.max_deviation
              << (p.within_tolerance ? " within " : " outside ") << p.tolerance
              << (p.truncation_match ? ", digits match when truncated" : "")
              << (p.passed ? " ok" : " FAILED") << '\n';
  }
  std::cout << (report.passed ? "PASS" : "FAIL") << '\n';
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Varimax-rotated spectral embeddings of blockmodel graphs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (keys are option names)");

  Args args;
  app.add_option("--model", args.model_family, "Model family: undirected, directed, dcsbm");
  app.add_option("--B", args.b, "Connectivity matrix, rows separated by ';'");
  app.add_option("--pi", args.pi, "Block probabilities (left side for directed)");
  app.add_option("--pi-y", args.pi_y, "Right block probabilities (directed)");
  app.add_option("--rho", args.rho, "Sparsity factor in (0, 1]");
  app.add_option("--theta-lo", args.theta_lo, "Lower end of the Uniform theta support");
  app.add_option("--theta-hi", args.theta_hi, "Upper end of the Uniform theta support");
  app.add_option("--seed", args.seed, "Master seed");
  app.add_option("--n", args.n, "Number of nodes");
  app.add_option("--reps", args.reps, "Replicate graphs");
  app.add_option("--rank", args.rank, "Embedding dimension: integer, k, or auto");
  app.add_option("--regime", args.regime, "Sparsity regime of the theory: dense or sparse");
  app.add_option("--out", args.out, "Output directory");
  app.add_option("--input", args.input, "Edge list to embed");
  app.add_option("--estimator", args.estimator, "pooled or fixed-index");
  app.add_option("--fixed-index", args.fixed_index, "Node followed by the fixed-index estimator (1-based)");
  app.add_option("--block", args.block, "Block for theory output (1-based, 0 = all)");
  app.add_option("--side", args.side, "left or right (directed theory)");
  app.add_option("--theta", args.theta, "Degree parameter for dcsbm theory");
  app.add_option("--threads", args.threads, "Replicate worker threads (0 = hardware)");
  app.add_option("--mixture-samples", args.mixture_samples, "Draws for the mixture CDF check");
  app.add_flag("--hollow", args.hollow, "Zero the adjacency diagonal");
  app.add_flag("--noiseless", args.noiseless, "Embed the expected adjacency instead of a sample");
  app.add_flag("--empirical-fractions", args.empirical, "Scale targets with empirical block fractions");
  app.add_flag("--blind", args.blind, "Align without ground truth (diagnostic)");

  int status = 0;
  auto add = [&](const char* name, const char* help, int (*fn)(const Args&)) {
    app.add_subcommand(name, help)->fallthrough()->callback([&, fn] { status = fn(args); });
  };
  add("simulate", "Sample a graph and write its edge list and latent labels", cmd_simulate);
  add("embed", "Embed an edge list with varimax-rotated truncated SVD", cmd_embed);
  add("theory", "Print asymptotic covariance matrices", cmd_theory);
  add("table1", "Covariance estimation study for the undirected model", cmd_table1);
  add("fig-directed", "Directed point clouds, centroids and covariances", cmd_fig_directed);
  add("fig-dcsbm", "Degree-corrected point cloud and centroid geometry", cmd_fig_dcsbm);
  add("grid-check", "Check the general covariance against the two-block closed forms", cmd_grid_check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const vsbm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const vsbm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
