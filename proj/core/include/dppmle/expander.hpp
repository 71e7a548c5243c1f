#ifndef DPPMLE_EXPANDER_HPP
#define DPPMLE_EXPANDER_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace dppmle {

struct ExpanderAudit {
  int min_degree = 0;
  double second_eigenvalue = 0.0;  // second-largest adjacency eigenvalue
  bool connected = false;
  int attempts = 0;  // pairing attempts before the audit passed
  // Random induced-subgraph spot checks of average degree, report-only.
  double max_avg_degree_tenth = 0.0;  // over sampled subsets of size <= n/10
  double max_avg_degree_half = 0.0;   // over sampled subsets of size <= n/2
  int density_samples = 0;
};

/// Seeded random d-regular simple connected graph with a spectral audit.
/// Stands in for an explicit strong-expander family at desk scale.
struct ExpanderSpec {
  int vertex_count = 0;
  int degree = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, lexicographic order
  ExpanderAudit audit;

  int edge_count() const { return static_cast<int>(edges.size()); }
  std::vector<std::vector<int>> adjacency() const;
};

/// Configuration-model pairing with rejection until the graph is simple,
/// connected, and passes the spectral-gap audit
/// (lambda_2 <= 2 sqrt(d-1) + 0.5). Deterministic per seed.
ExpanderSpec build_expander(int vertex_count, int degree, std::uint64_t seed,
                            int max_attempts = 200);

struct TrimResult {
  std::vector<int> surviving;  // sorted vertex ids
  std::vector<int> removed;    // sorted vertex ids
  // Report-only comparison against the 15 |E'| / d deletion bound that an
  // ideal strong expander would guarantee.
  double removal_bound = 0.0;
  bool within_bound = true;
};

/// Deletes the given edges, then repeatedly removes vertices of degree
/// smaller than 3d/4 + 2 until none remain. The rule is vacuous below
/// d = 8: with no deletions every vertex already falls under the
/// threshold and the whole graph trims away.
TrimResult trim_dense(const ExpanderSpec& expander,
                      const std::vector<std::pair<int, int>>& deleted);

}  // namespace dppmle

#endif  // DPPMLE_EXPANDER_HPP
