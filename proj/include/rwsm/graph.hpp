#pragma once

// Undirected simple graphs, k-subpartitions and the Cheeger-type constant
//     gamma_k(G) = min over (A_1..A_k) of sum_i |boundary(A_i)| / sqrt(|A_i|)
// where the A_i are pairwise disjoint and nonempty but need not cover V.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rwsm {

/// Vertices are 1..n. Edges are stored as (u, v) with u < v, sorted.
class Graph {
 public:
  Graph(int n, std::vector<std::pair<int, int>> edges);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  int degree(int v) const { return degree_.at(v - 1); }
  /// Neighbors of v (1-based), ascending.
  const std::vector<int>& neighbors(int v) const { return adjacency_.at(v - 1); }

  /// Edge-list text in the `p`/`e` format accepted by load_graph.
  std::string to_text() const;

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> degree_;
  std::vector<std::vector<int>> adjacency_;
};

struct LoadedGraph {
  Graph graph;
  std::vector<std::string> warnings;
};

/// Parses edge-list text: `c ...` comments, a `p <n> <m>` header and
/// `e <u> <v>` lines, or bare `<u> <v>` lines when there is no header.
/// Duplicate edges are collapsed with a warning. Throws ParseError.
LoadedGraph load_graph(const std::string& text);
LoadedGraph load_graph_file(const std::string& path);

/// k pairwise disjoint nonempty vertex subsets (1-based vertex ids).
struct SubPartition {
  std::vector<std::vector<int>> parts;

  std::size_t k() const { return parts.size(); }
  /// Sorts each part and orders parts by their smallest vertex.
  SubPartition canonical() const;
  friend bool operator==(const SubPartition&, const SubPartition&) = default;
};

/// Throws std::invalid_argument when parts are empty, overlap, or use
/// vertices outside 1..n.
void validate_subpartition(const Graph& g, const SubPartition& parts);

/// Number of edges with exactly one endpoint in `set`.
int cut_boundary(const Graph& g, const std::vector<int>& set);

double cheeger_objective(const Graph& g, const SubPartition& parts);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 20'000'000;

struct ExactCheegerResult {
  double value = 0.0;
  SubPartition argmin;
  std::uint64_t assignments_visited = 0;
};

/// Exhaustive minimum over D_k(G). Assignments {0..k}^n are enumerated in
/// lexicographic order with labels in first-occurrence order (one
/// representative per part permutation); the first minimizer wins ties.
/// Throws BudgetExceeded when (k+1)^n > budget.
ExactCheegerResult exact_cheeger(const Graph& g, int k,
                                 std::uint64_t budget = kDefaultEnumerationBudget);

/// The same graph with vertex v renamed to perm[v-1].
Graph relabel(const Graph& g, const std::vector<int>& perm);

}  // namespace rwsm
