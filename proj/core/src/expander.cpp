#include "dppmle/expander.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "dppmle/errors.hpp"

namespace dppmle {

std::vector<std::vector<int>> ExpanderSpec::adjacency() const {
  std::vector<std::vector<int>> adj(vertex_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

namespace {

bool is_connected(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

double second_adjacency_eigenvalue(int n,
                                   const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : edges) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(n - 2);  // eigenvalues are sorted ascending
}

// Average degree of the subgraph induced by `subset`.
double induced_avg_degree(const std::vector<int>& subset,
                          const std::vector<std::vector<int>>& adj) {
  if (subset.empty()) return 0.0;
  std::set<int> members(subset.begin(), subset.end());
  int internal_edge_ends = 0;
  for (int u : subset) {
    for (int v : adj[u]) {
      if (members.count(v)) ++internal_edge_ends;
    }
  }
  return static_cast<double>(internal_edge_ends) /
         static_cast<double>(subset.size());
}

}  // namespace

ExpanderSpec build_expander(int vertex_count, int degree, std::uint64_t seed,
                            int max_attempts) {
  if (vertex_count <= degree) {
    throw ParameterError("need more vertices than the degree: " +
                         std::to_string(vertex_count) + " <= " +
                         std::to_string(degree));
  }
  if (degree < 2) {
    throw ParameterError("degree must be at least 2 for connectivity");
  }
  if ((static_cast<long long>(vertex_count) * degree) % 2 != 0) {
    throw ParameterError("vertex count times degree must be even, got " +
                         std::to_string(vertex_count) + " * " +
                         std::to_string(degree));
  }

  std::mt19937_64 rng(seed);
  const double lambda_threshold = 2.0 * std::sqrt(degree - 1.0) + 0.5;

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    // Configuration-model pairing with stub rematching: repeatedly shuffle
    // the unmatched stubs and keep the pairs that stay simple. A pass that
    // makes no progress is a dead end and aborts the attempt.
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(vertex_count) * degree);
    for (int v = 0; v < vertex_count; ++v) {
      for (int s = 0; s < degree; ++s) stubs.push_back(v);
    }
    std::set<std::pair<int, int>> edge_set;
    bool simple = true;
    while (!stubs.empty()) {
      std::shuffle(stubs.begin(), stubs.end(), rng);
      std::vector<int> leftover;
      for (std::size_t p = 0; p + 1 < stubs.size(); p += 2) {
        int u = stubs[p];
        int v = stubs[p + 1];
        if (u > v) std::swap(u, v);
        if (u == v || !edge_set.emplace(u, v).second) {
          leftover.push_back(stubs[p]);
          leftover.push_back(stubs[p + 1]);
        }
      }
      if (leftover.size() == stubs.size()) {
        simple = false;
        break;
      }
      stubs = std::move(leftover);
    }
    if (!simple) continue;

    ExpanderSpec spec;
    spec.vertex_count = vertex_count;
    spec.degree = degree;
    spec.seed = seed;
    spec.edges.assign(edge_set.begin(), edge_set.end());

    const auto adj = spec.adjacency();
    if (!is_connected(vertex_count, adj)) continue;

    const double lambda2 = second_adjacency_eigenvalue(vertex_count, spec.edges);
    if (lambda2 > lambda_threshold) continue;

    spec.audit.min_degree = degree;
    spec.audit.second_eigenvalue = lambda2;
    spec.audit.connected = true;
    spec.audit.attempts = attempt;

    // Subgraph-density spot checks on seeded random subsets.
    std::mt19937_64 sampler(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<int> vertices(vertex_count);
    std::iota(vertices.begin(), vertices.end(), 0);
    const int samples = 32;
    spec.audit.density_samples = samples;
    for (int s = 0; s < samples; ++s) {
      std::shuffle(vertices.begin(), vertices.end(), sampler);
      const int tenth = std::max(1, vertex_count / 10);
      const int half = std::max(1, vertex_count / 2);
      std::vector<int> small(vertices.begin(), vertices.begin() + tenth);
      std::vector<int> large(vertices.begin(), vertices.begin() + half);
      spec.audit.max_avg_degree_tenth = std::max(
          spec.audit.max_avg_degree_tenth, induced_avg_degree(small, adj));
      spec.audit.max_avg_degree_half = std::max(
          spec.audit.max_avg_degree_half, induced_avg_degree(large, adj));
    }
    return spec;
  }
  throw QualityError("no simple connected graph passed the spectral audit in " +
                     std::to_string(max_attempts) + " attempts");
}

TrimResult trim_dense(const ExpanderSpec& expander,
                      const std::vector<std::pair<int, int>>& deleted) {
  std::set<std::pair<int, int>> edge_set(expander.edges.begin(),
                                         expander.edges.end());
  std::set<std::pair<int, int>> to_delete;
  for (auto [u, v] : deleted) {
    if (u > v) std::swap(u, v);
    if (!edge_set.count({u, v})) {
      throw StructuralError("deleted edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") is not an expander edge");
    }
    to_delete.emplace(u, v);
  }

  const int n = expander.vertex_count;
  std::vector<std::set<int>> adj(n);
  for (const auto& [u, v] : expander.edges) {
    if (to_delete.count({u, v})) continue;
    adj[u].insert(v);
    adj[v].insert(u);
  }

  // degree < 3d/4 + 2, kept exact: 4 deg < 3d + 8.
  std::vector<char> alive(n, 1);
  auto below_threshold = [&](int v) {
    return 4 * static_cast<int>(adj[v].size()) < 3 * expander.degree + 8;
  };
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    if (below_threshold(v)) queue.push_back(v);
  }
  std::vector<char> queued(n, 0);
  for (int v : queue) queued[v] = 1;
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    if (!alive[v]) continue;
    if (!below_threshold(v)) continue;
    alive[v] = 0;
    for (int u : adj[v]) {
      adj[u].erase(v);
      if (alive[u] && !queued[u] && below_threshold(u)) {
        queue.push_back(u);
        queued[u] = 1;
      }
    }
    adj[v].clear();
  }

  TrimResult result;
  for (int v = 0; v < n; ++v) {
    (alive[v] ? result.surviving : result.removed).push_back(v);
  }
  result.removal_bound = 15.0 * static_cast<double>(to_delete.size()) /
                         static_cast<double>(expander.degree);
  result.within_bound =
      static_cast<double>(result.removed.size()) <= result.removal_bound;
  return result;
}

}  // namespace dppmle
