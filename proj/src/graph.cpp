#include "rwsm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rwsm/errors.hpp"

namespace rwsm {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  for (auto& [u, v] : edges) {
    if (u < 1 || v < 1 || u > n || v > n)
      throw std::invalid_argument("edge {" + std::to_string(u) + "," + std::to_string(v) +
                                  "} uses a vertex outside 1.." + std::to_string(n));
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");
  edges_ = std::move(edges);
  degree_.assign(n, 0);
  adjacency_.assign(n, {});
  for (const auto& [u, v] : edges_) {
    ++degree_[u - 1];
    ++degree_[v - 1];
    adjacency_[u - 1].push_back(v);
    adjacency_[v - 1].push_back(u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

std::string Graph::to_text() const {
  std::ostringstream os;
  os << "p " << n_ << " " << edges_.size() << "\n";
  for (const auto& [u, v] : edges_) os << "e " << u << " " << v << "\n";
  return os.str();
}

namespace {

int parse_int(const std::string& token, std::size_t line) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + token + "'");
  }
  if (used != token.size() || value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max())
    throw ParseError(line, "expected an integer, got '" + token + "'");
  return static_cast<int>(value);
}

}  // namespace

LoadedGraph load_graph(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  bool saw_bare = false;
  int n = 0;
  long declared_m = -1;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::size_t> edge_lines;

  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate header");
      if (!edges.empty()) throw ParseError(line_no, "header must precede edges");
      if (tok.size() != 3) throw ParseError(line_no, "header must be 'p <n> <m>'");
      n = parse_int(tok[1], line_no);
      declared_m = parse_int(tok[2], line_no);
      if (n < 1) throw ParseError(line_no, "vertex count must be positive");
      if (declared_m < 0) throw ParseError(line_no, "edge count must be nonnegative");
      have_header = true;
      continue;
    }
    std::pair<int, int> e;
    if (tok[0] == "e") {
      if (tok.size() != 3) throw ParseError(line_no, "edge line must be 'e <u> <v>'");
      e = {parse_int(tok[1], line_no), parse_int(tok[2], line_no)};
    } else if (tok.size() == 2) {
      if (have_header) throw ParseError(line_no, "bare edge lines are only accepted without a header");
      e = {parse_int(tok[0], line_no), parse_int(tok[1], line_no)};
      saw_bare = true;
    } else {
      throw ParseError(line_no, "unrecognized line '" + raw + "'");
    }
    if (e.first == e.second) throw ParseError(line_no, "self-loop at vertex " + std::to_string(e.first));
    if (e.first < 1 || e.second < 1) throw ParseError(line_no, "vertex index out of range");
    if (have_header && (e.first > n || e.second > n))
      throw ParseError(line_no, "vertex index out of range 1.." + std::to_string(n));
    edges.push_back(e);
    edge_lines.push_back(line_no);
  }
  (void)saw_bare;
  if (!have_header) {
    for (const auto& [u, v] : edges) n = std::max({n, u, v});
    if (n == 0) throw ParseError(line_no, "empty graph text");
  }

  std::vector<std::string> warnings;
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> unique;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) {
      warnings.push_back("line " + std::to_string(edge_lines[i]) + ": duplicate edge {" +
                         std::to_string(u) + "," + std::to_string(v) + "} collapsed");
      continue;
    }
    unique.emplace_back(u, v);
  }
  if (have_header && declared_m != static_cast<long>(edges.size()))
    warnings.push_back("header declares " + std::to_string(declared_m) + " edges, found " +
                       std::to_string(edges.size()));
  return LoadedGraph{Graph(n, std::move(unique)), std::move(warnings)};
}

LoadedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str());
}

SubPartition SubPartition::canonical() const {
  SubPartition out = *this;
  for (auto& p : out.parts) std::sort(p.begin(), p.end());
  std::sort(out.parts.begin(), out.parts.end(), [](const auto& a, const auto& b) {
    if (a.empty() || b.empty()) return a.size() < b.size();
    return a.front() < b.front();
  });
  return out;
}

void validate_subpartition(const Graph& g, const SubPartition& parts) {
  std::vector<char> used(g.n() + 1, 0);
  for (const auto& part : parts.parts) {
    if (part.empty()) throw std::invalid_argument("empty part in subpartition");
    for (int v : part) {
      if (v < 1 || v > g.n()) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
      if (used[v]) throw std::invalid_argument("vertex " + std::to_string(v) + " appears twice");
      used[v] = 1;
    }
  }
}

int cut_boundary(const Graph& g, const std::vector<int>& set) {
  std::vector<char> in(g.n() + 1, 0);
  for (int v : set) {
    if (v < 1 || v > g.n()) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
    in[v] = 1;
  }
  int cut = 0;
  for (const auto& [u, v] : g.edges()) cut += (in[u] != in[v]) ? 1 : 0;
  return cut;
}

double cheeger_objective(const Graph& g, const SubPartition& parts) {
  validate_subpartition(g, parts);
  double total = 0.0;
  for (const auto& part : parts.parts)
    total += cut_boundary(g, part) / std::sqrt(static_cast<double>(part.size()));
  return total;
}

namespace {

class Enumerator {
 public:
  Enumerator(const Graph& g, int k) : g_(g), k_(k), label_(g.n(), 0), cut_(k + 1, 0), size_(k + 1, 0) {
    inv_sqrt_.assign(g.n() + 1, 0.0);
    for (int s = 1; s <= g.n(); ++s) inv_sqrt_[s] = 1.0 / std::sqrt(static_cast<double>(s));
  }

  ExactCheegerResult run() {
    dfs(0, 0);
    ExactCheegerResult r;
    r.value = best_;
    r.assignments_visited = visited_;
    r.argmin.parts.assign(k_, {});
    for (int v = 0; v < g_.n(); ++v)
      if (best_label_[v] > 0) r.argmin.parts[best_label_[v] - 1].push_back(v + 1);
    return r;
  }

 private:
  void dfs(int v, int used) {
    const int n = g_.n();
    if (n - v < k_ - used) return;  // cannot open the remaining parts
    if (v == n) {
      ++visited_;
      double value = 0.0;
      for (int l = 1; l <= k_; ++l) value += cut_[l] * inv_sqrt_[size_[l]];
      if (value < best_ - 1e-12) {
        best_ = value;
        best_label_ = label_;
      }
      return;
    }
    const int top = std::min(k_, used + 1);
    for (int l = 0; l <= top; ++l) {
      int internal = 0;
      if (l > 0)
        for (int w : g_.neighbors(v + 1))
          if (w - 1 < v && label_[w - 1] == l) ++internal;
      label_[v] = l;
      if (l > 0) {
        cut_[l] += g_.degree(v + 1) - 2 * internal;
        ++size_[l];
      }
      dfs(v + 1, l == used + 1 ? used + 1 : used);
      if (l > 0) {
        cut_[l] -= g_.degree(v + 1) - 2 * internal;
        --size_[l];
      }
      label_[v] = 0;
    }
  }

  const Graph& g_;
  int k_;
  std::vector<int> label_;
  std::vector<int> cut_;
  std::vector<int> size_;
  std::vector<double> inv_sqrt_;
  std::vector<int> best_label_;
  double best_ = std::numeric_limits<double>::infinity();
  std::uint64_t visited_ = 0;
};

}  // namespace

ExactCheegerResult exact_cheeger(const Graph& g, int k, std::uint64_t budget) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k > g.n()) throw std::invalid_argument("k exceeds the number of vertices; D_k(G) is empty");
  // (k+1)^n <= budget, checked without overflow.
  std::uint64_t total = 1;
  for (int i = 0; i < g.n(); ++i) {
    if (total > budget / static_cast<std::uint64_t>(k + 1))
      throw BudgetExceeded("exact enumeration needs (k+1)^n = " + std::to_string(k + 1) + "^" +
                           std::to_string(g.n()) + " assignments, above the budget of " +
                           std::to_string(budget));
    total *= static_cast<std::uint64_t>(k + 1);
  }
  return Enumerator(g, k).run();
}

Graph relabel(const Graph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n()) throw std::invalid_argument("permutation size mismatch");
  std::vector<std::pair<int, int>> edges;
  for (const auto& [u, v] : g.edges()) edges.emplace_back(perm[u - 1], perm[v - 1]);
  return Graph(g.n(), std::move(edges));
}

}  // namespace rwsm
