#ifndef DPPMLE_RANK3_HPP
#define DPPMLE_RANK3_HPP

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

#include "dppmle/kernel.hpp"
#include "dppmle/lift.hpp"

namespace dppmle {

struct SphereSearchParams {
  double seed_spacing_deg = 2.0;  // full-sphere seed grid spacing
  int refine_passes = 3;          // local tangent-grid refinements
  double refine_factor = 0.25;    // radius shrink per pass
};

struct ProjectionParams {
  double epsilon0 = 0.1;  // edges with sin^2(theta) below this are bad
  // Max degree bound of the underlying graph; 0 means take it from the graph.
  int max_degree = 0;
  // Near-optimality slack; NaN means measure it from the input likelihood.
  double delta_override = std::numeric_limits<double>::quiet_NaN();
  // Guarantee mode enforces delta <= 1/(128 k)^2 and asserts the
  // residual-mass and bad-set cardinality bounds instead of only
  // reporting them.
  bool guarantee_mode = false;
  SphereSearchParams sphere;

  void validate() const;  // 0 < epsilon0 < 1/8
};

struct AnchorTriple {
  int sample_index = -1;
  std::vector<int> elements;
  double ratio = 0.0;  // Pr[Y = S] / prod_i ||q_i||^2
};

/// Picks the sample maximizing Pr[Y=S] over the product of its squared
/// column norms; geometric averaging makes this ratio at least
/// exp(-(l(K) - l*)) on near-optimal inputs. Ties break to the lowest index.
AnchorTriple find_anchor_triple(const GramFactor& factor, const Dataset& data);

/// Orthonormal basis (r x 3) of the span of the anchor columns.
/// Degenerate spans (dimension < 3) raise an error.
Eigen::MatrixXd anchor_basis(const GramFactor& factor, std::span<const int> anchor);

/// Total squared mass orthogonal to the anchor span over non-anchor
/// columns; equals the Gram-determinant ratio sum
/// sum_i det(K_{S+i}) / det(K_S).
double residual_mass(const GramFactor& factor, std::span<const int> anchor);

struct BadSets {
  std::vector<int> bad_edges;      // edge indices with sin^2(theta) < epsilon0
  std::vector<int> endpoint_bad;   // vertices incident to a bad edge (B1)
  std::vector<int> residual_bad;   // ground elements with large off-span mass (B2)
  std::vector<int> bad_vertices;   // B1 union the vertex part of B2
  std::vector<int> bad_edge_nodes; // edge indices whose edge-node column is in B2
  double delta = 0.0;              // slack the thresholds were computed at
  double bad_edge_bound = 0.0;     // delta m / log 8 + 1
  double residual_bad_bound = 0.0; // sqrt(delta) m
  bool within_bounds = false;
};

/// Membership per the two bad-set definitions: edges whose endpoint
/// directions are far from orthogonal, and columns (including edge-node
/// columns) holding at least sqrt(delta) of their squared norm outside
/// the anchor span.
BadSets classify_bad(const GramFactor& factor, const LiftedInstance& lift,
                     std::span<const int> anchor, const ProjectionParams& params);

/// argmax over the unit sphere of min over the given directions of
/// sin^2(theta); recursive grid refinement, deterministic. The achieved
/// minimum is written to achieved_out when given. With no directions the
/// objective is 1 everywhere and the first grid point wins.
Eigen::Vector3d sphere_argmax_min_sin2(
    const std::vector<Eigen::Vector3d>& directions,
    const SphereSearchParams& params = {}, double* achieved_out = nullptr);

struct ReassignReport {
  double tau_hat = 1.0;  // min sin^2 over edges incident to a bad column
  int sphere_searches = 0;
};

/// Dimension-3 factor: good columns project onto the anchor span; bad
/// vertex columns keep their norm and take the sphere-search direction
/// against previously placed neighbors, in vertex order; bad edge-node
/// columns keep their norm orthogonal to their two endpoints.
GramFactor greedy_reassign(const GramFactor& factor, const LiftedInstance& lift,
                           const Eigen::MatrixXd& basis, const BadSets& bad,
                           const SphereSearchParams& params = {},
                           ReassignReport* report = nullptr);

/// K' = beta Q'^T Q' with beta = min(1, 1/sigma_1(Q')^2), the exact scale
/// rather than an analytic worst-case bound.
MarginalKernel rescale_and_assemble(const GramFactor& factor,
                                    double* beta_out = nullptr);

struct ProjectionReport {
  double input_likelihood = 0.0;
  double output_likelihood = 0.0;
  double optimal = 0.0;     // closed-form optimum of the lifted dataset
  double delta_hat = 0.0;   // input likelihood minus the optimum
  double anchor_ratio = 0.0;
  int anchor_sample = -1;
  double residual = 0.0;
  int bad_edge_count = 0;
  int endpoint_bad_count = 0;
  int residual_bad_count = 0;
  double beta = 1.0;
  double tau_hat = 1.0;
  bool early_exit = false;  // input already had rank <= 3
};

/// Full projection pipeline: anchor, residual, bad sets, greedy
/// reassignment, rescale. Rank <= 3 inputs pass through untouched except
/// for the beta clamp.
std::pair<MarginalKernel, ProjectionReport> project_to_rank3(
    const GramFactor& factor, const LiftedInstance& lift,
    const ProjectionParams& params = {});

}  // namespace dppmle

#endif  // DPPMLE_RANK3_HPP
