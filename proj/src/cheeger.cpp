#include "rwsm/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rwsm/errors.hpp"

namespace rwsm {

namespace {

void require_rows(const Graph& g, const Eigen::MatrixXd& u) {
  if (u.rows() != g.n())
    throw ShapeError("matrix has " + std::to_string(u.rows()) + " rows, graph has " +
                     std::to_string(g.n()) + " vertices");
  if (u.cols() < 1) throw ShapeError("matrix has no columns");
}

bool is_stiefel_plus(const Eigen::MatrixXd& v) {
  return v.minCoeff() >= 0.0 && orthonormality_residual(v) <= kFeasibilityTol;
}

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& w) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::optional<Eigen::MatrixXd> alternating_projection(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd v = u;
  for (int it = 0; it < 500; ++it) {
    Eigen::MatrixXd c = v.cwiseMax(0.0);
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (!(c.col(j).norm() > 1e-12)) return std::nullopt;
    v = polar_factor(c);
    if (v.minCoeff() >= -1e-13) {
      v = v.cwiseMax(0.0);
      if (orthonormality_residual(v) <= kFeasibilityTol) return v;
    }
  }
  return std::nullopt;
}

// Each row joins the column of its largest positive entry; a column left
// empty takes the unassigned row with its largest entry, or steals one from
// a column holding several rows. Disjoint supports make the result
// orthonormal.
std::optional<Eigen::MatrixXd> support_assignment(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows(), k = u.cols();
  std::vector<int> owner(n, -1);
  std::vector<int> count(k, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    const double best = u.row(i).maxCoeff(&j);
    if (best > 0.0) {
      owner[i] = static_cast<int>(j);
      ++count[j];
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (count[j] > 0) continue;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (owner[i] < 0 && (pick < 0 || u(i, j) > u(pick, j))) pick = i;
    if (pick < 0) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (owner[i] >= 0 && count[owner[i]] > 1 && (pick < 0 || u(i, j) > u(pick, j))) pick = i;
      if (pick < 0) return std::nullopt;
      --count[owner[pick]];
    }
    owner[pick] = static_cast<int>(j);
    ++count[j];
  }
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    if (owner[i] >= 0) v(i, owner[i]) = std::max(u(i, owner[i]), 0.0);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(v.col(j).norm() > 0.0)) {
      Eigen::Index pick = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (owner[i] == j && (pick < 0 || u(i, j) > u(pick, j))) pick = i;
      v(pick, j) = 1.0;
    }
    v.col(j).normalize();
  }
  return v;
}

}  // namespace

double grad_norm_l1(const Graph& g, const Eigen::MatrixXd& u) {
  require_rows(g, u);
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (const auto& [a, b] : g.edges()) total += std::abs(u(a - 1, j) - u(b - 1, j));
  return total;
}

double penalty_h(const Eigen::MatrixXd& u, double beta) {
  if (!(beta > 0.0)) throw DomainError("penalty exponent must be positive");
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      if (u(i, j) < 0.0) total += std::pow(-u(i, j), beta);
  return total;
}

double negative_part_norm(const Eigen::MatrixXd& u) { return u.cwiseMin(0.0).norm(); }

double lipschitz_bound(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  double s = 0.0;
  for (int v = 1; v <= g.n(); ++v) s += static_cast<double>(g.degree(v)) * g.degree(v);
  return std::sqrt(k * s);
}

Eigen::MatrixXd indicator_matrix(int n, const SubPartition& parts) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(parts.k()));
  for (std::size_t j = 0; j < parts.k(); ++j) {
    const auto& part = parts.parts[j];
    if (part.empty()) throw std::invalid_argument("empty part in subpartition");
    const double w = 1.0 / std::sqrt(static_cast<double>(part.size()));
    for (int v : part) {
      if (v < 1 || v > n) throw std::invalid_argument("vertex " + std::to_string(v) + " out of range");
      if (u(v - 1, static_cast<Eigen::Index>(j)) != 0.0) throw std::invalid_argument("repeated vertex");
      u(v - 1, static_cast<Eigen::Index>(j)) = w;
    }
  }
  if (orthonormality_residual(u) > kFeasibilityTol) throw std::invalid_argument("parts overlap");
  return u;
}

std::optional<DistanceEstimate> dist_upper_estimate(const Eigen::MatrixXd& u) {
  if (u.cols() < 1 || u.rows() < u.cols()) throw ShapeError("need an n x k matrix with k <= n");
  if (orthonormality_residual(u) > kFeasibilityTol) throw DomainError("U is not a point of St(n,k)");
  DistanceEstimate best;
  best.lower = negative_part_norm(u);
  if (u.minCoeff() >= 0.0) {
    best.feasible = u;
    return best;
  }
  best.upper = std::numeric_limits<double>::infinity();
  for (const auto& candidate : {alternating_projection(u), support_assignment(u)}) {
    if (!candidate || !is_stiefel_plus(*candidate)) continue;
    const double d = (u - *candidate).norm();
    if (d < best.upper) {
      best.upper = d;
      best.feasible = *candidate;
    }
  }
  if (!std::isfinite(best.upper)) return std::nullopt;
  return best;
}

double penalized_objective(const Graph& g, const Eigen::MatrixXd& u, double beta, double c) {
  if (c < 0.0) throw DomainError("penalty weight must be nonnegative");
  const double h = c == 0.0 ? 0.0 : penalty_h(u, beta);
  return grad_norm_l1(g, u) + c * h;
}

Tangent riemannian_subgradient(const Graph& g, const Point& u, double beta, double c) {
  if (u.manifold().kind() != ManifoldKind::kStiefel) throw DomainError("expected a Stiefel point");
  if (beta < 1.0)
    throw DomainError("penalty exponent below 1 has no bounded subgradient; the solver needs beta >= 1");
  const Eigen::MatrixXd& x = u.coords();
  require_rows(g, x);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (const auto& [a, b] : g.edges()) {
      const double d = x(a - 1, j) - x(b - 1, j);
      const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      grad(a - 1, j) += s;
      grad(b - 1, j) -= s;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (x(i, j) < 0.0) grad(i, j) -= c * beta * std::pow(-x(i, j), beta - 1.0);
  }
  return tangent_project(u, grad);
}

SubPartition round_solution(const Graph& g, const Eigen::MatrixXd& u) {
  require_rows(g, u);
  const int n = g.n();
  const Eigen::Index k = u.cols();
  std::vector<std::vector<int>> pools(k);
  for (int v = 0; v < n; ++v) {
    Eigen::Index j = 0;
    const double m = u.row(v).cwiseAbs().maxCoeff(&j);  // first maximum
    if (m > 0.0) pools[j].push_back(v + 1);
  }
  SubPartition out;
  std::vector<char> in(n + 1, 0);
  for (Eigen::Index j = 0; j < k; ++j) {
    auto& pool = pools[j];
    if (pool.empty()) continue;
    std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) {
      return std::abs(u(a - 1, j)) > std::abs(u(b - 1, j));
    });
    int cut = 0;
    std::size_t best_size = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const int v = pool[i];
      int internal = 0;
      for (int w : g.neighbors(v)) internal += in[w];
      cut += g.degree(v) - 2 * internal;
      in[v] = 1;
      const bool group_end =
          i + 1 == pool.size() || std::abs(u(pool[i + 1] - 1, j)) != std::abs(u(v - 1, j));
      if (!group_end) continue;
      const double value = cut / std::sqrt(static_cast<double>(i + 1));
      if (value <= best) {
        best = value;
        best_size = i + 1;
      }
    }
    for (int v : pool) in[v] = 0;
    std::vector<int> part(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(best_size));
    std::sort(part.begin(), part.end());
    out.parts.push_back(std::move(part));
  }
  if (out.parts.empty()) throw NumericalError("rounding produced no parts (all-zero matrix)");
  return out;
}

SubPartition complete_subpartition(const Graph& g, SubPartition parts, int k) {
  validate_subpartition(g, parts);
  if (k > g.n()) throw std::invalid_argument("k exceeds the number of vertices");
  if (static_cast<int>(parts.k()) > k) throw std::invalid_argument("more parts than k");
  std::vector<char> used(g.n() + 1, 0);
  for (const auto& part : parts.parts)
    for (int v : part) used[v] = 1;
  while (static_cast<int>(parts.k()) < k) {
    // A singleton {v} costs deg(v) and leaves the other parts untouched.
    int pick = 0;
    for (int v = 1; v <= g.n(); ++v)
      if (!used[v] && (pick == 0 || g.degree(v) < g.degree(pick))) pick = v;
    if (pick != 0) {
      used[pick] = 1;
      parts.parts.push_back({pick});
      continue;
    }
    // Every vertex is used: split one vertex off some part.
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_part = 0;
    int best_vertex = 0;
    for (std::size_t pi = 0; pi < parts.k(); ++pi) {
      const auto& part = parts.parts[pi];
      if (part.size() < 2) continue;
      const double before = cut_boundary(g, part) / std::sqrt(static_cast<double>(part.size()));
      for (int v : part) {
        std::vector<int> rest;
        for (int w : part)
          if (w != v) rest.push_back(w);
        const double after = cut_boundary(g, rest) / std::sqrt(static_cast<double>(rest.size())) +
                             g.degree(v) - before;
        if (after < best) {
          best = after;
          best_part = pi;
          best_vertex = v;
        }
      }
    }
    if (best_vertex == 0) throw std::invalid_argument("cannot reach k parts");
    auto& part = parts.parts[best_part];
    part.erase(std::find(part.begin(), part.end(), best_vertex));
    parts.parts.push_back({best_vertex});
  }
  return parts;
}

}  // namespace rwsm
