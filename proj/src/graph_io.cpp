#include "vsbm/graph_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "vsbm/errors.hpp"

namespace vsbm {

void write_edge_list(std::ostream& out, const Matrix& adjacency, bool directed) {
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) throw ValidationError("edge list export needs a square adjacency matrix");
  if (((adjacency.array() != 0.0) && (adjacency.array() != 1.0)).any()) {
    throw ValidationError("edge list export needs a binary adjacency matrix");
  }
  if (!directed && adjacency != adjacency.transpose()) {
    throw ValidationError("undirected edge list export needs a symmetric adjacency matrix");
  }
  std::ostringstream body;
  Index m = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = directed ? 0 : i; j < n; ++j) {
      if (adjacency(i, j) != 0.0) {
        body << (i + 1) << ' ' << (j + 1) << '\n';
        ++m;
      }
    }
  }
  out << n << ' ' << m << ' ' << (directed ? "directed" : "undirected") << '\n' << body.str();
}

EdgeList read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("edge list: missing header");
  std::istringstream header(line);
  long long n = -1, m = -1;
  std::string kind;
  if (!(header >> n >> m >> kind) || n < 1 || m < 0 || (kind != "directed" && kind != "undirected")) {
    throw ValidationError("edge list: header must be `n m directed|undirected`");
  }
  EdgeList out;
  out.directed = kind == "directed";
  out.adjacency = Matrix::Zero(n, n);
  for (long long e = 0; e < m; ++e) {
    long long i = 0, j = 0;
    if (!(in >> i >> j)) throw ValidationError("edge list: expected " + std::to_string(m) + " edges");
    if (i < 1 || j < 1 || i > n || j > n) throw ValidationError("edge list: node index out of range");
    out.adjacency(i - 1, j - 1) = 1.0;
    if (!out.directed) out.adjacency(j - 1, i - 1) = 1.0;
  }
  return out;
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int label : labels) out << (label + 1) << '\n';
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  long long label = 0;
  while (in >> label) {
    if (label < 1) throw ValidationError("labels must be positive (1-based)");
    labels.push_back(static_cast<int>(label - 1));
  }
  if (!in.eof()) throw ValidationError("labels: malformed line");
  return labels;
}

void write_values(std::ostream& out, const std::vector<double>& values) {
  out << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

}  // namespace vsbm
