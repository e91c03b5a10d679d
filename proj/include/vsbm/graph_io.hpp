#pragma once

#include <iosfwd>
#include <vector>

#include "vsbm/spectral.hpp"

namespace vsbm {

/// Binary adjacency matrix read from or written to an edge list.
///
/// Format: a header line `n m directed|undirected` (n nodes, m edge lines),
/// then m lines `i j` with 1-based node indices. Undirected graphs list each
/// edge once with i <= j; a line `i i` is a self-loop.
struct EdgeList {
  Matrix adjacency;
  bool directed = false;
};

void write_edge_list(std::ostream& out, const Matrix& adjacency, bool directed);
EdgeList read_edge_list(std::istream& in);

/// Membership sidecar: one 1-based label per line. In memory labels are 0-based.
void write_labels(std::ostream& out, const std::vector<int>& labels);
std::vector<int> read_labels(std::istream& in);

/// Degree-parameter sidecar: one value per line, 17 significant digits.
void write_values(std::ostream& out, const std::vector<double>& values);

}  // namespace vsbm
