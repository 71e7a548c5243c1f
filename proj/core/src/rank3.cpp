#include "dppmle/rank3.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dppmle/coloring.hpp"
#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

constexpr double kPi = 3.14159265358979323846;

int numerical_rank(const Eigen::MatrixXd& q) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0) return 0;
  const double cutoff =
      sigma(0) * std::max(q.rows(), q.cols()) * 1e-13 + 1e-300;
  int rank = 0;
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++rank;
  }
  return rank;
}

double sin2_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;  // degenerate column: treat as parallel
  const double c = std::min(1.0, std::abs(a.dot(b)) / (na * nb));
  return 1.0 - c * c;
}

double max_graph_degree(const SimpleGraph& graph) {
  const auto deg = graph.degrees();
  int best = 0;
  for (int d : deg) best = std::max(best, d);
  return static_cast<double>(best);
}

}  // namespace

void ProjectionParams::validate() const {
  if (!(epsilon0 > 0.0 && epsilon0 < 0.125)) {
    throw ValidationError("epsilon0 must lie in (0, 1/8), got " +
                          std::to_string(epsilon0));
  }
  if (!(sphere.seed_spacing_deg > 0.0 && sphere.refine_passes >= 0 &&
        sphere.refine_factor > 0.0 && sphere.refine_factor < 1.0)) {
    throw ValidationError("sphere search parameters out of range");
  }
}

AnchorTriple find_anchor_triple(const GramFactor& factor, const Dataset& data) {
  if (factor.ground_set_size() != data.ground_set_size()) {
    throw StructuralError("factor and dataset ground sets differ");
  }
  if (numerical_rank(factor.columns()) < 3) {
    throw StructuralError("anchor selection needs a factor of rank at least 3");
  }
  for (int t = 0; t < data.sample_count(); ++t) {
    if (data.sample(t).size() != 3) {
      throw StructuralError("sample " + std::to_string(t) +
                            " has size " + std::to_string(data.sample(t).size()) +
                            "; anchor selection needs size-3 samples");
    }
  }
  AnchorTriple best;
  for (int t = 0; t < data.sample_count(); ++t) {
    const auto& sample = data.sample(t);
    double norm_product = 1.0;
    for (int i : sample) {
      const double norm = factor.column_norm(i);
      norm_product *= norm * norm;
    }
    if (norm_product == 0.0) continue;
    const double ratio = point_probability(factor, sample) / norm_product;
    if (ratio > best.ratio) {
      best.ratio = ratio;
      best.sample_index = t;
      best.elements = sample;
    }
  }
  if (best.sample_index < 0) {
    throw DegenerateError("every sample has zero probability ratio");
  }
  return best;
}

Eigen::MatrixXd anchor_basis(const GramFactor& factor, std::span<const int> anchor) {
  if (anchor.size() != 3) {
    throw StructuralError("anchor must have exactly 3 elements");
  }
  Eigen::MatrixXd cols(factor.rank(), 3);
  for (int p = 0; p < 3; ++p) cols.col(p) = factor.column(anchor[p]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  const double cutoff = sigma(0) * 3 * 1e-12 + 1e-300;
  if (sigma.size() < 3 || sigma(2) <= cutoff) {
    throw DegenerateError("anchor span has dimension below 3");
  }
  return svd.matrixU().leftCols(3);
}

double residual_mass(const GramFactor& factor, std::span<const int> anchor) {
  const Eigen::MatrixXd basis = anchor_basis(factor, anchor);
  std::set<int> inside(anchor.begin(), anchor.end());
  double total = 0.0;
  for (int i = 0; i < factor.ground_set_size(); ++i) {
    if (inside.count(i)) continue;
    const Eigen::VectorXd q = factor.column(i);
    total += (q - basis * (basis.transpose() * q)).squaredNorm();
  }
  return total;
}

BadSets classify_bad(const GramFactor& factor, const LiftedInstance& lift,
                     std::span<const int> anchor, const ProjectionParams& params) {
  params.validate();
  if (factor.ground_set_size() != lift.ground_size()) {
    throw StructuralError("factor does not match the lifted ground set");
  }
  const Eigen::MatrixXd basis = anchor_basis(factor, anchor);
  const SimpleGraph& graph = lift.graph;
  const int m = graph.edge_count();

  double delta = params.delta_override;
  if (std::isnan(delta)) {
    delta = log_likelihood(factor, lift.dataset) - optimal_value(graph);
  }
  // A floor keeps the sqrt(delta) threshold meaningful at the exact
  // optimum, where delta vanishes and nothing should be bad.
  delta = std::max(delta, 1e-12);

  BadSets bad;
  bad.delta = delta;
  std::set<int> b1;
  for (int e = 0; e < m; ++e) {
    const auto& [u, v] = graph.edges[e];
    if (sin2_between(factor.column(u), factor.column(v)) < params.epsilon0) {
      bad.bad_edges.push_back(e);
      b1.insert(u);
      b1.insert(v);
    }
  }
  bad.endpoint_bad.assign(b1.begin(), b1.end());

  const double threshold = std::sqrt(delta);
  std::set<int> bad_vertex_set(b1.begin(), b1.end());
  for (int i = 0; i < factor.ground_set_size(); ++i) {
    const Eigen::VectorXd q = factor.column(i);
    const double residual = (q - basis * (basis.transpose() * q)).squaredNorm();
    if (residual >= threshold * q.squaredNorm() && q.squaredNorm() > 0.0) {
      bad.residual_bad.push_back(i);
      if (i < graph.vertex_count) {
        bad_vertex_set.insert(i);
      } else {
        bad.bad_edge_nodes.push_back(i - graph.vertex_count);
      }
    }
  }
  bad.bad_vertices.assign(bad_vertex_set.begin(), bad_vertex_set.end());

  bad.bad_edge_bound = delta * m / std::log(8.0) + 1.0;
  bad.residual_bad_bound = std::sqrt(delta) * m;
  bad.within_bounds =
      static_cast<double>(bad.bad_edges.size()) <= bad.bad_edge_bound &&
      static_cast<double>(bad.residual_bad.size()) <= bad.residual_bad_bound;
  return bad;
}

Eigen::Vector3d sphere_argmax_min_sin2(
    const std::vector<Eigen::Vector3d>& directions,
    const SphereSearchParams& params, double* achieved_out) {
  auto objective = [&](const Eigen::Vector3d& z) {
    double worst = 1.0;
    for (const auto& dir : directions) {
      const double c = z.dot(dir);
      worst = std::min(worst, 1.0 - c * c);
    }
    return worst;
  };

  const double spacing = params.seed_spacing_deg * kPi / 180.0;
  struct Candidate {
    Eigen::Vector3d z;
    double value;
  };
  // Latitude-longitude seed grid over the upper hemisphere (directions are
  // sign-folded).
  std::vector<Candidate> top;
  const int lat_steps = static_cast<int>(std::ceil(kPi / 2.0 / spacing));
  auto consider = [&](const Eigen::Vector3d& z, double value) {
    constexpr std::size_t keep = 8;
    if (top.size() < keep) {
      top.push_back({z, value});
      std::sort(top.begin(), top.end(),
                [](const Candidate& a, const Candidate& b) {
                  return a.value > b.value;
                });
    } else if (value > top.back().value) {
      top.back() = {z, value};
      std::sort(top.begin(), top.end(),
                [](const Candidate& a, const Candidate& b) {
                  return a.value > b.value;
                });
    }
  };
  for (int a = 0; a <= lat_steps; ++a) {
    const double polar = a * spacing;
    const int lon_steps = std::max(
        1, static_cast<int>(std::ceil(2.0 * kPi * std::sin(polar) / spacing)));
    for (int b = 0; b < lon_steps; ++b) {
      const double azimuth = 2.0 * kPi * b / lon_steps;
      const Eigen::Vector3d z(std::sin(polar) * std::cos(azimuth),
                              std::sin(polar) * std::sin(azimuth),
                              std::cos(polar));
      consider(z, objective(z));
    }
  }

  Candidate best = top.front();
  for (Candidate cand : top) {
    double radius = spacing;
    for (int pass = 0; pass < params.refine_passes; ++pass) {
      // Hill-climb on a 7x7 tangent-plane grid at this radius, re-centering
      // until stationary, then shrink.
      bool improved = true;
      while (improved) {
        improved = false;
        Eigen::Vector3d tangent_u = cand.z.cross(Eigen::Vector3d::UnitX());
        if (tangent_u.norm() < 1e-9) {
          tangent_u = cand.z.cross(Eigen::Vector3d::UnitY());
        }
        tangent_u.normalize();
        const Eigen::Vector3d tangent_w = cand.z.cross(tangent_u).normalized();
        Candidate local = cand;
        for (int i = -3; i <= 3; ++i) {
          for (int j = -3; j <= 3; ++j) {
            const Eigen::Vector3d z =
                (cand.z + radius * (i / 3.0) * tangent_u +
                 radius * (j / 3.0) * tangent_w)
                    .normalized();
            const double value = objective(z);
            if (value > local.value) local = {z, value};
          }
        }
        if (local.value > cand.value + 1e-15) {
          cand = local;
          improved = true;
        }
      }
      radius *= params.refine_factor;
    }
    if (cand.value > best.value) best = cand;
  }

  if (achieved_out != nullptr) *achieved_out = best.value;
  return best.z;
}

GramFactor greedy_reassign(const GramFactor& factor, const LiftedInstance& lift,
                           const Eigen::MatrixXd& basis, const BadSets& bad,
                           const SphereSearchParams& params,
                           ReassignReport* report) {
  const SimpleGraph& graph = lift.graph;
  const int n_vertices = graph.vertex_count;
  const int total = lift.ground_size();
  if (factor.ground_set_size() != total) {
    throw StructuralError("factor does not match the lifted ground set");
  }

  std::vector<char> is_bad(total, 0);
  for (int v : bad.bad_vertices) is_bad[v] = 1;
  for (int e : bad.bad_edge_nodes) is_bad[n_vertices + e] = 1;

  const auto adjacency = graph.adjacency();
  ReassignReport local_report;

  Eigen::MatrixXd q3(3, total);
  // Vertices in construction order: good ones project, bad ones take the
  // best direction against already placed neighbors.
  std::vector<char> placed(n_vertices, 0);
  for (int v = 0; v < n_vertices; ++v) {
    if (!is_bad[v]) {
      q3.col(v) = basis.transpose() * factor.column(v);
    } else {
      std::vector<Eigen::Vector3d> neighbor_dirs;
      for (int u : adjacency[v]) {
        if (u < v && placed[u] && q3.col(u).norm() > 0.0) {
          neighbor_dirs.push_back(Eigen::Vector3d(q3.col(u)).normalized());
        }
      }
      double achieved = 1.0;
      const Eigen::Vector3d z =
          sphere_argmax_min_sin2(neighbor_dirs, params, &achieved);
      ++local_report.sphere_searches;
      if (achieved == 0.0 && neighbor_dirs.size() < 3) {
        throw InternalError(
            "sphere search found no free direction against fewer than 3 "
            "neighbors");
      }
      q3.col(v) = factor.column_norm(v) * z;
    }
    placed[v] = 1;
  }
  // Edge nodes: good ones project, bad ones go orthogonal to both endpoints.
  for (int e = 0; e < graph.edge_count(); ++e) {
    const int element = n_vertices + e;
    if (!is_bad[element]) {
      q3.col(element) = basis.transpose() * factor.column(element);
      continue;
    }
    const auto& [u, v] = graph.edges[e];
    Eigen::Vector3d normal =
        Eigen::Vector3d(q3.col(u)).cross(Eigen::Vector3d(q3.col(v)));
    if (normal.norm() < 1e-12) {
      normal = Eigen::Vector3d(q3.col(u)).cross(Eigen::Vector3d::UnitX());
      if (normal.norm() < 1e-12) {
        normal = Eigen::Vector3d(q3.col(u)).cross(Eigen::Vector3d::UnitY());
      }
      if (normal.norm() < 1e-12) normal = Eigen::Vector3d::UnitZ();
    }
    q3.col(element) = factor.column_norm(element) * normal.normalized();
  }

  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [u, v] = graph.edges[e];
    if (is_bad[u] || is_bad[v] || is_bad[n_vertices + e]) {
      local_report.tau_hat = std::min(
          local_report.tau_hat, sin2_between(q3.col(u), q3.col(v)));
    }
  }
  if (report != nullptr) *report = local_report;
  return GramFactor(std::move(q3));
}

MarginalKernel rescale_and_assemble(const GramFactor& factor, double* beta_out) {
  const double sigma = factor.spectral_norm();
  const double beta = sigma > 1.0 ? 1.0 / (sigma * sigma) : 1.0;
  if (beta_out != nullptr) *beta_out = beta;
  Eigen::MatrixXd k =
      beta * (factor.columns().transpose() * factor.columns());
  return MarginalKernel(0.5 * (k + k.transpose()));
}

std::pair<MarginalKernel, ProjectionReport> project_to_rank3(
    const GramFactor& factor, const LiftedInstance& lift,
    const ProjectionParams& params) {
  params.validate();
  ProjectionReport report;
  report.optimal = optimal_value(lift.graph);
  report.input_likelihood = log_likelihood(factor, lift.dataset);
  report.delta_hat = report.input_likelihood - report.optimal;

  if (numerical_rank(factor.columns()) <= 3) {
    report.early_exit = true;
    GramFactor compact = factor;
    if (factor.rank() > 3) {
      // Compress the row space to 3 dimensions; column geometry unchanged.
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(factor.columns(),
                                            Eigen::ComputeThinU);
      Eigen::MatrixXd u3 = svd.matrixU().leftCols(3);
      compact = GramFactor(u3.transpose() * factor.columns());
    } else if (factor.rank() < 3) {
      Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(3, factor.ground_set_size());
      padded.topRows(factor.rank()) = factor.columns();
      compact = GramFactor(std::move(padded));
    }
    MarginalKernel kernel = rescale_and_assemble(compact, &report.beta);
    report.output_likelihood = log_likelihood(
        GramFactor(std::sqrt(report.beta) * compact.columns()), lift.dataset);
    return {std::move(kernel), report};
  }

  const double k_bound =
      params.max_degree > 0 ? params.max_degree : max_graph_degree(lift.graph);
  if (params.guarantee_mode) {
    const double cap = 1.0 / ((128.0 * k_bound) * (128.0 * k_bound));
    if (!(report.delta_hat <= cap)) {
      throw ValidationError("guarantee mode needs a near-optimal input: slack " +
                            std::to_string(report.delta_hat) + " exceeds " +
                            std::to_string(cap));
    }
  }

  const AnchorTriple anchor = find_anchor_triple(factor, lift.dataset);
  report.anchor_ratio = anchor.ratio;
  report.anchor_sample = anchor.sample_index;
  const Eigen::MatrixXd basis = anchor_basis(factor, anchor.elements);
  report.residual = residual_mass(factor, anchor.elements);
  if (params.guarantee_mode &&
      report.residual > -std::log(anchor.ratio) + 1e-9) {
    throw InternalError("residual mass exceeds the anchor-ratio bound");
  }

  const BadSets bad = classify_bad(factor, lift, anchor.elements, params);
  report.bad_edge_count = static_cast<int>(bad.bad_edges.size());
  report.endpoint_bad_count = static_cast<int>(bad.endpoint_bad.size());
  report.residual_bad_count = static_cast<int>(bad.residual_bad.size());

  ReassignReport reassign;
  const GramFactor q3 =
      greedy_reassign(factor, lift, basis, bad, params.sphere, &reassign);
  report.tau_hat = reassign.tau_hat;

  MarginalKernel kernel = rescale_and_assemble(q3, &report.beta);
  report.output_likelihood = log_likelihood(
      GramFactor(std::sqrt(report.beta) * q3.columns()), lift.dataset);
  return {std::move(kernel), report};
}

}  // namespace dppmle
