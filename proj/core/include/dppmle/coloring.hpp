#ifndef DPPMLE_COLORING_HPP
#define DPPMLE_COLORING_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "dppmle/reduction_graph.hpp"
#include "dppmle/kernel.hpp"

namespace dppmle {

/// Discrete coloring: one color in {1, 2, 3} per node.
using DiscreteColoring = std::vector<int>;

/// Vector coloring: one unit vector in R^3 per node. Antipodal vectors are
/// identified throughout; all angles are folded into [0, pi/2].
using VectorColoring = std::vector<Eigen::Vector3d>;

struct ProperCheck {
  bool proper = false;
  std::vector<std::pair<int, int>> monochromatic_edges;
};

ProperCheck check_proper(const SimpleGraph& graph, const DiscreteColoring& coloring);

/// Exact 3-coloring by backtracking search (minimum-remaining-values
/// ordering, forward checking, conflict-directed backjumping). Returns a
/// proper coloring or nullopt when none exists. The step guard aborts
/// pathological searches with an error instead of hanging.
std::optional<DiscreteColoring> find_three_coloring(
    const SimpleGraph& graph, long long step_limit = 200'000'000);

/// Proper coloring of the reduction graph induced by a satisfying
/// assignment: T/F/D nodes take colors 1/2/3, literal copies take the truth
/// color, gadget auxiliaries are completed by per-gadget backtracking.
DiscreteColoring assignment_to_coloring(const ReductionGraph& graph,
                                        const std::vector<bool>& assignment);

/// Exhaustive search for colors of the six clause-gadget auxiliaries
/// (u_a, u_b, u_c, v_a, v_b, v_c) given the T and literal colors.
/// Returns the lexicographically first completion, or nullopt when the
/// gadget admits none (e.g. all three literals carry the False color).
std::optional<std::array<int, 6>> complete_clause_auxiliaries(
    const std::array<int, 3>& true_colors,
    const std::array<int, 3>& literal_colors);

/// Rank-3 factor over the lifted ground set (vertices first, then edges):
/// vertex u embeds as sqrt(deg(u)/m) e_{color(u)}, the node of edge (u,v)
/// as sqrt(1/m) e_c with c the color missing on the edge.
GramFactor coloring_to_kernel(const SimpleGraph& graph,
                              const DiscreteColoring& coloring);

/// Closed-form optimal log-likelihood of the lifted dataset for graphs
/// admitting a proper 3-coloring:
///   3 log m - (1/m) sum_{(u,v)} (log deg(u) + log deg(v)).
double optimal_value(const SimpleGraph& graph);

/// Average squared inner product over edges; zero exactly for orthogonal
/// vector colorings.
double vector_error(const SimpleGraph& graph, const VectorColoring& coloring);

struct AngleLikelihood {
  double value = 0.0;
  std::vector<int> parallel_edges;  // edges with sin^2(theta) = 0
};

/// Log-likelihood of the lifted dataset as a function of edge angles,
///   3 log m - (1/m) sum (log deg(u) + log deg(v) + log sin^2 theta_uv),
/// assuming each edge-node direction orthogonal to its two endpoints.
/// Parallel endpoints give +infinity and are flagged.
AngleLikelihood likelihood_from_angles(const SimpleGraph& graph,
                                       const VectorColoring& coloring);

/// Assembles the factor realizing likelihood_from_angles: vertex columns
/// sqrt(deg/m) chi_u, edge-node columns sqrt(1/m) along the normalized
/// cross product of the endpoint directions.
GramFactor vectors_to_factor(const SimpleGraph& graph,
                             const VectorColoring& coloring);

/// Axis vectors e_1, e_2, e_3 for colors 1, 2, 3.
VectorColoring coloring_to_vectors(const DiscreteColoring& coloring);

/// Folded angle between two directions, in [0, pi/2].
double folded_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

struct DecoderParams {
  double good_edge_slack = 3.1415926535897932 / 600.0;
  double axis_tolerance = 3.1415926535897932 / 300.0;     // delta_p
  double literal_threshold = 3.1415926535897932 / 12.0;
  void validate() const;  // 0 < slack < delta_p < pi/12 < pi/4
};

struct RegionViolation {
  int node = -1;
  double angle = 0.0;
};

struct DecodeDiagnostics {
  int bad_edge_count = 0;
  int trimmed_blocks = 0;
  int survived_pair_count = 0;
  int anchor_var = -1;
  int anchor_copy = -1;
  std::vector<RegionViolation> region_violations;
  std::vector<int> free_variables;
};

struct DecodeResult {
  std::vector<bool> assignment;
  double satisfied_fraction = 0.0;
  DecodeDiagnostics diagnostics;
};

/// Decodes a truth assignment from a vector coloring of the reduction
/// graph: marks near-orthogonal edges good, maps bad edges to expander
/// deletions and trims, anchors T/F/D axes on the first survived literal
/// block, region-tests every survived block, then reads each variable off
/// the survived copies of its literals. Free variables default to false.
DecodeResult decode_assignment(const ReductionGraph& graph,
                               const VectorColoring& coloring,
                               const DecoderParams& params = {});

}  // namespace dppmle

#endif  // DPPMLE_COLORING_HPP
