#include "dppmle/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_total_coloring(const SimpleGraph& graph,
                            const DiscreteColoring& coloring) {
  if (static_cast<int>(coloring.size()) != graph.vertex_count) {
    throw ValidationError("coloring covers " + std::to_string(coloring.size()) +
                          " nodes, graph has " +
                          std::to_string(graph.vertex_count));
  }
  for (int v = 0; v < graph.vertex_count; ++v) {
    if (coloring[v] < 1 || coloring[v] > 3) {
      throw ValidationError("node " + std::to_string(v) +
                            " has no color in {1, 2, 3}");
    }
  }
}

void require_unit_vectors(const SimpleGraph& graph, const VectorColoring& chi) {
  if (static_cast<int>(chi.size()) != graph.vertex_count) {
    throw ValidationError("vector coloring covers " +
                          std::to_string(chi.size()) + " nodes, graph has " +
                          std::to_string(graph.vertex_count));
  }
  for (int v = 0; v < graph.vertex_count; ++v) {
    if (std::abs(chi[v].norm() - 1.0) > 1e-6) {
      throw ValidationError("vector of node " + std::to_string(v) +
                            " has norm " + std::to_string(chi[v].norm()));
    }
  }
}

// Backtracking 3-coloring with minimum-remaining-values ordering, forward
// checking, and conflict-directed backjumping. On top of plain forward
// checking the propagator applies the triangle rule: two adjacent
// unassigned nodes sharing the same two-value domain force every common
// neighbor off both values. The gadget-heavy reduction graphs are nearly
// decided by propagation alone under this rule.
//
// Every pruned (node, color) records the set of decision levels it was
// derived from, so the backjumps stay sound for derived prunes. Root-level
// symmetry pins carry an empty cause and are not revisable.
class ThreeColoringSearch {
 public:
  ThreeColoringSearch(const SimpleGraph& graph, long long step_limit)
      : n_(graph.vertex_count),
        adj_(graph.adjacency()),
        step_limit_(step_limit) {
    for (auto& neighbors : adj_) std::sort(neighbors.begin(), neighbors.end());
    domain_.assign(n_, 0b111);
    value_.assign(n_, -1);
    level_of_.assign(n_, 0);
    cause_.assign(n_, {});
  }

  std::optional<std::vector<int>> run() {
    if (n_ == 0) return std::vector<int>{};
    pin_symmetry();
    Cause conf;
    if (search(1, conf) == kSolved) {
      std::vector<int> colors(n_);
      for (int v = 0; v < n_; ++v) colors[v] = value_[v] + 1;
      return colors;
    }
    return std::nullopt;
  }

 private:
  static constexpr int kSolved = -2;
  using Cause = std::vector<int>;  // sorted decision levels
  struct Prune {
    int node;
    int color;
  };

  static void merge_into(Cause& into, const Cause& from) {
    Cause merged;
    merged.reserve(into.size() + from.size());
    std::set_union(into.begin(), into.end(), from.begin(), from.end(),
                   std::back_inserter(merged));
    into = std::move(merged);
  }

  // Union of the causes of every color currently pruned from y.
  Cause cause_union(int y) const {
    Cause out;
    for (int c = 0; c < 3; ++c) {
      if (!(domain_[y] & (1 << c))) merge_into(out, cause_[y][c]);
    }
    return out;
  }

  // Any proper coloring can be permuted to match a pinned triangle, or a
  // pinned vertex plus one of its neighbors.
  void pin_symmetry() {
    for (int u = 0; u < n_; ++u) {
      for (int v : adj_[u]) {
        if (v < u) continue;
        for (int w : adj_[v]) {
          if (w > v && std::binary_search(adj_[u].begin(), adj_[u].end(), w)) {
            domain_[u] = 0b001;
            domain_[v] = 0b010;
            domain_[w] = 0b100;
            return;
          }
        }
      }
    }
    int best = -1;
    for (int v = 0; v < n_; ++v) {
      if (best == -1 || adj_[v].size() > adj_[best].size()) best = v;
    }
    if (best >= 0) {
      domain_[best] = 0b001;
      if (!adj_[best].empty()) domain_[adj_[best][0]] = 0b010;
    }
  }

  int pick() const {
    int best = -1;
    int best_size = 4;
    for (int v = 0; v < n_; ++v) {
      if (value_[v] != -1) continue;
      const int size = __builtin_popcount(domain_[v]);
      if (size < best_size ||
          (size == best_size && adj_[v].size() > adj_[best].size())) {
        best = v;
        best_size = size;
      }
    }
    return best;
  }

  // Removes a color from y; returns the conflict cause when y dies or is
  // already assigned that color.
  std::optional<Cause> prune_color(int y, int color, const Cause& why,
                                   std::vector<Prune>& trail,
                                   std::vector<int>& dirty) {
    if (value_[y] != -1) {
      if (value_[y] != color) return std::nullopt;
      Cause conflict = why;
      merge_into(conflict, Cause{level_of_[y]});
      return conflict;
    }
    if (!(domain_[y] & (1 << color))) return std::nullopt;
    domain_[y] &= ~(1 << color);
    cause_[y][color] = why;
    trail.push_back({y, color});
    dirty.push_back(y);
    if (domain_[y] == 0) return cause_union(y);
    return std::nullopt;
  }

  // Forward checking plus the triangle-rule cascade for x := c.
  std::optional<Cause> propagate(int x, int c, int level,
                                 std::vector<Prune>& trail) {
    std::vector<int> dirty;
    const Cause direct{level};
    for (int y : adj_[x]) {
      if (auto conflict = prune_color(y, c, direct, trail, dirty)) {
        return conflict;
      }
    }
    for (std::size_t at = 0; at < dirty.size(); ++at) {
      const int p = dirty[at];
      if (value_[p] != -1 || __builtin_popcount(domain_[p]) != 2) continue;
      for (int q : adj_[p]) {
        if (value_[q] != -1 || domain_[q] != domain_[p]) continue;
        Cause why = cause_union(p);
        merge_into(why, cause_union(q));
        // p and q exhaust their shared pair, so common neighbors lose both.
        for (int r : adj_[p]) {
          if (r == q ||
              !std::binary_search(adj_[q].begin(), adj_[q].end(), r)) {
            continue;
          }
          for (int color = 0; color < 3; ++color) {
            if (!(domain_[p] & (1 << color))) continue;
            if (auto conflict = prune_color(r, color, why, trail, dirty)) {
              return conflict;
            }
          }
        }
      }
    }
    return std::nullopt;
  }

  void undo(int x, const std::vector<Prune>& trail) {
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
      domain_[it->node] |= 1 << it->color;
      cause_[it->node][it->color].clear();
    }
    value_[x] = -1;
  }

  int search(int level, Cause& conf_out) {
    if (++steps_ > step_limit_) {
      throw SizeGuardError("coloring search exceeded " +
                           std::to_string(step_limit_) + " steps");
    }
    const int x = pick();
    if (x == -1) return kSolved;

    Cause conf;
    for (int c = 0; c < 3; ++c) {
      if (!(domain_[x] & (1 << c))) continue;
      value_[x] = c;
      level_of_[x] = level;
      std::vector<Prune> trail;
      const auto conflict = propagate(x, c, level, trail);
      if (conflict) {
        merge_into(conf, *conflict);
      } else {
        Cause child_conf;
        const int status = search(level + 1, child_conf);
        if (status == kSolved) return kSolved;
        if (child_conf.empty()) {
          undo(x, trail);
          conf_out.clear();
          return 0;
        }
        const int target = child_conf.back();
        if (target < level) {
          undo(x, trail);
          conf_out = std::move(child_conf);
          return target;
        }
        child_conf.pop_back();  // drop this level from the culprits
        merge_into(conf, child_conf);
      }
      undo(x, trail);
    }

    merge_into(conf, cause_union(x));
    // The frame's own level is not a culprit for its exhaustion.
    if (!conf.empty() && conf.back() == level) conf.pop_back();
    conf_out = std::move(conf);
    return conf_out.empty() ? 0 : conf_out.back();
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> domain_;
  std::vector<int> value_;
  std::vector<int> level_of_;
  std::vector<std::array<Cause, 3>> cause_;
  long long steps_ = 0;
  long long step_limit_;
};

}  // namespace

std::optional<std::array<int, 6>> complete_clause_auxiliaries(
    const std::array<int, 3>& true_colors,
    const std::array<int, 3>& literal_colors) {
  std::array<int, 6> colors{};
  auto consistent = [&](int filled) {
    for (int p = 0; p < 3; ++p) {
      if (filled > p &&
          (colors[p] == true_colors[p] || colors[p] == literal_colors[p])) {
        return false;
      }
      if (filled > p + 3 && colors[p + 3] == colors[p]) return false;
    }
    if (filled > 4 && colors[4] == colors[3]) return false;
    if (filled > 5 && (colors[5] == colors[3] || colors[5] == colors[4])) {
      return false;
    }
    return true;
  };
  std::function<bool(int)> fill = [&](int slot) {
    if (slot == 6) return true;
    for (int c = 1; c <= 3; ++c) {
      colors[slot] = c;
      if (consistent(slot + 1) && fill(slot + 1)) return true;
    }
    colors[slot] = 0;
    return false;
  };
  if (fill(0)) return colors;
  return std::nullopt;
}

ProperCheck check_proper(const SimpleGraph& graph,
                         const DiscreteColoring& coloring) {
  require_total_coloring(graph, coloring);
  ProperCheck check;
  for (const auto& [u, v] : graph.edges) {
    if (coloring[u] == coloring[v]) check.monochromatic_edges.emplace_back(u, v);
  }
  check.proper = check.monochromatic_edges.empty();
  return check;
}

std::optional<DiscreteColoring> find_three_coloring(const SimpleGraph& graph,
                                                    long long step_limit) {
  return ThreeColoringSearch(graph, step_limit).run();
}

DiscreteColoring assignment_to_coloring(const ReductionGraph& graph,
                                        const std::vector<bool>& assignment) {
  if (static_cast<int>(assignment.size()) != graph.meta.n_vars) {
    throw ValidationError("assignment covers " +
                          std::to_string(assignment.size()) + " variables, " +
                          "formula has " + std::to_string(graph.meta.n_vars));
  }
  for (const auto& gadget : graph.clause_gadgets) {
    bool satisfied = false;
    for (int node : gadget.literal_nodes) {
      const ReductionNode& lit = graph.nodes[node];
      if (assignment[lit.var] != lit.negated) satisfied = true;
    }
    if (!satisfied) {
      throw ValidationError("assignment violates clause " +
                            std::to_string(gadget.clause));
    }
  }

  DiscreteColoring colors(graph.node_count(), 0);
  for (const ReductionNode& node : graph.nodes) {
    switch (node.role) {
      case NodeRole::ColorT: colors[node.id] = 1; break;
      case NodeRole::ColorF: colors[node.id] = 2; break;
      case NodeRole::ColorD: colors[node.id] = 3; break;
      case NodeRole::Literal:
        colors[node.id] = (assignment[node.var] != node.negated) ? 1 : 2;
        break;
      default: break;
    }
  }

  for (const EqualityGadget& gadget : graph.equality_gadgets) {
    const int ca = colors[gadget.endpoint_a];
    const int cb = colors[gadget.endpoint_b];
    if (ca != cb || ca == 0) {
      throw InternalError("equality gadget " + std::to_string(gadget.id) +
                          " endpoints colored " + std::to_string(ca) + "/" +
                          std::to_string(cb));
    }
    int first = 0;
    for (int c = 1; c <= 3; ++c) {
      if (c != ca) {
        if (first == 0) {
          first = c;
        } else {
          colors[gadget.aux_u] = first;
          colors[gadget.aux_v] = c;
        }
      }
    }
  }

  for (const ClauseGadget& gadget : graph.clause_gadgets) {
    std::array<int, 3> t_colors{};
    std::array<int, 3> l_colors{};
    for (int p = 0; p < 3; ++p) {
      t_colors[p] = colors[gadget.true_nodes[p]];
      l_colors[p] = colors[gadget.literal_nodes[p]];
    }
    const auto aux = complete_clause_auxiliaries(t_colors, l_colors);
    if (!aux) {
      throw InternalError("clause gadget " + std::to_string(gadget.clause) +
                          " admits no auxiliary coloring");
    }
    for (int p = 0; p < 3; ++p) {
      colors[gadget.aux_u[p]] = (*aux)[p];
      colors[gadget.aux_v[p]] = (*aux)[p + 3];
    }
  }
  return colors;
}

GramFactor coloring_to_kernel(const SimpleGraph& graph,
                              const DiscreteColoring& coloring) {
  const auto check = check_proper(graph, coloring);
  if (!check.proper) {
    const auto& [u, v] = check.monochromatic_edges.front();
    throw ValidationError("coloring is not proper: edge (" +
                          std::to_string(u) + ", " + std::to_string(v) +
                          ") is monochromatic");
  }
  const int m = graph.edge_count();
  if (m == 0) throw DegenerateError("graph has no edges");
  const auto deg = graph.degrees();

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, graph.vertex_count + m);
  for (int u = 0; u < graph.vertex_count; ++u) {
    q(coloring[u] - 1, u) = std::sqrt(static_cast<double>(deg[u]) / m);
  }
  for (int e = 0; e < m; ++e) {
    const auto& [u, v] = graph.edges[e];
    const int missing = 6 - coloring[u] - coloring[v];
    q(missing - 1, graph.vertex_count + e) = std::sqrt(1.0 / m);
  }
  return GramFactor(std::move(q));
}

double optimal_value(const SimpleGraph& graph) {
  const int m = graph.edge_count();
  if (m == 0) throw DegenerateError("optimal value undefined without edges");
  const auto deg = graph.degrees();
  double sum = 0.0;
  for (const auto& [u, v] : graph.edges) {
    sum += std::log(static_cast<double>(deg[u])) +
           std::log(static_cast<double>(deg[v]));
  }
  return 3.0 * std::log(static_cast<double>(m)) - sum / m;
}

double vector_error(const SimpleGraph& graph, const VectorColoring& coloring) {
  require_unit_vectors(graph, coloring);
  if (graph.edge_count() == 0) {
    throw DegenerateError("vector error undefined without edges");
  }
  double sum = 0.0;
  for (const auto& [u, v] : graph.edges) {
    const double ip = coloring[u].dot(coloring[v]);
    sum += ip * ip;
  }
  return sum / graph.edge_count();
}

double folded_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double denom = a.norm() * b.norm();
  const double cosine = std::min(1.0, std::abs(a.dot(b)) / denom);
  return std::acos(cosine);
}

AngleLikelihood likelihood_from_angles(const SimpleGraph& graph,
                                       const VectorColoring& coloring) {
  require_unit_vectors(graph, coloring);
  const int m = graph.edge_count();
  if (m == 0) throw DegenerateError("likelihood undefined without edges");
  const auto deg = graph.degrees();

  AngleLikelihood out;
  double sum = 0.0;
  for (int e = 0; e < m; ++e) {
    const auto& [u, v] = graph.edges[e];
    const double ip = std::min(1.0, std::abs(coloring[u].dot(coloring[v])));
    const double sin2 = 1.0 - ip * ip;
    if (sin2 <= 0.0) {
      out.parallel_edges.push_back(e);
      continue;
    }
    sum += std::log(static_cast<double>(deg[u])) +
           std::log(static_cast<double>(deg[v])) + std::log(sin2);
  }
  if (!out.parallel_edges.empty()) {
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.value = 3.0 * std::log(static_cast<double>(m)) - sum / m;
  }
  return out;
}

GramFactor vectors_to_factor(const SimpleGraph& graph,
                             const VectorColoring& coloring) {
  require_unit_vectors(graph, coloring);
  const int m = graph.edge_count();
  if (m == 0) throw DegenerateError("graph has no edges");
  const auto deg = graph.degrees();

  Eigen::MatrixXd q(3, graph.vertex_count + m);
  for (int u = 0; u < graph.vertex_count; ++u) {
    q.col(u) = std::sqrt(static_cast<double>(deg[u]) / m) * coloring[u];
  }
  for (int e = 0; e < m; ++e) {
    const auto& [u, v] = graph.edges[e];
    Eigen::Vector3d normal = coloring[u].cross(coloring[v]);
    if (normal.norm() < 1e-12) {
      // Parallel endpoints: the hyperedge probability is zero whatever
      // direction we pick, so use any unit vector orthogonal to chi_u.
      normal = coloring[u].cross(Eigen::Vector3d::UnitX());
      if (normal.norm() < 1e-12) {
        normal = coloring[u].cross(Eigen::Vector3d::UnitY());
      }
    }
    q.col(graph.vertex_count + e) = std::sqrt(1.0 / m) * normal.normalized();
  }
  return GramFactor(std::move(q));
}

VectorColoring coloring_to_vectors(const DiscreteColoring& coloring) {
  VectorColoring chi(coloring.size());
  for (std::size_t v = 0; v < coloring.size(); ++v) {
    if (coloring[v] < 1 || coloring[v] > 3) {
      throw ValidationError("node " + std::to_string(v) +
                            " has no color in {1, 2, 3}");
    }
    chi[v] = Eigen::Vector3d::Zero();
    chi[v](coloring[v] - 1) = 1.0;
  }
  return chi;
}

void DecoderParams::validate() const {
  if (!(0.0 < good_edge_slack && good_edge_slack < axis_tolerance &&
        axis_tolerance < literal_threshold && literal_threshold < kPi / 4.0)) {
    throw ValidationError(
        "decoder thresholds must satisfy 0 < slack < axis tolerance < literal "
        "threshold < pi/4");
  }
}

DecodeResult decode_assignment(const ReductionGraph& graph,
                               const VectorColoring& coloring,
                               const DecoderParams& params) {
  params.validate();
  const SimpleGraph simple = graph.to_simple_graph();
  require_unit_vectors(simple, coloring);

  DecodeResult result;
  auto& diag = result.diagnostics;

  // 1. Good edges are those within the angular slack of orthogonality.
  std::vector<int> bad_edges;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const ReductionEdge& edge = graph.edges[e];
    const double theta = folded_angle(coloring[edge.u], coloring[edge.v]);
    if (theta < kPi / 2.0 - params.good_edge_slack) bad_edges.push_back(e);
  }
  diag.bad_edge_count = static_cast<int>(bad_edges.size());

  // 2. Bad edges inside block-equality gadgets delete the expander edge.
  std::set<int> bad_expander_edges;
  for (int e : bad_edges) {
    const ReductionEdge& edge = graph.edges[e];
    if (edge.tag != EdgeTag::EqualityGadget) continue;
    const EqualityGadget& gadget = graph.equality_gadgets[edge.gadget];
    if (gadget.cls != EqualityClass::LiteralClique) {
      bad_expander_edges.insert(gadget.expander_edge);
    }
  }
  std::vector<std::pair<int, int>> deleted_expander;
  for (int e : bad_expander_edges) deleted_expander.push_back(graph.expander.edges[e]);

  // 3. Trim the expander down to its dense core.
  const TrimResult trim = trim_dense(graph.expander, deleted_expander);
  std::set<int> removed_blocks(trim.removed.begin(), trim.removed.end());
  diag.trimmed_blocks = static_cast<int>(trim.removed.size());

  // 4. Gadgets on expander edges touching a trimmed block go away too.
  std::set<std::pair<int, int>> doomed;
  for (int e : bad_edges) doomed.emplace(graph.edges[e].u, graph.edges[e].v);
  for (const EqualityGadget& gadget : graph.equality_gadgets) {
    if (gadget.cls == EqualityClass::LiteralClique) continue;
    const auto [ba, bb] = graph.expander.edges[gadget.expander_edge];
    if (!removed_blocks.count(ba) && !removed_blocks.count(bb)) continue;
    for (auto [a, b] : {std::pair{gadget.endpoint_a, gadget.aux_u},
                        std::pair{gadget.endpoint_a, gadget.aux_v},
                        std::pair{gadget.endpoint_b, gadget.aux_u},
                        std::pair{gadget.endpoint_b, gadget.aux_v},
                        std::pair{gadget.aux_u, gadget.aux_v}}) {
      if (a > b) std::swap(a, b);
      doomed.emplace(a, b);
    }
  }
  const DamageReport damage = classify_damage(
      graph, std::vector<std::pair<int, int>>(doomed.begin(), doomed.end()));
  std::set<std::pair<int, int>> damaged(damage.damaged_pairs.begin(),
                                        damage.damaged_pairs.end());

  // 5. A pair survives when undamaged and with both blocks untrimmed.
  const int n = graph.meta.n_vars;
  const int k = graph.meta.k;
  std::vector<std::vector<int>> survived(n);  // copies per variable
  int anchor_var = -1;
  int anchor_copy = -1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      if (damaged.count({i, j})) continue;
      if (removed_blocks.count(graph.block_id(i, false, j)) ||
          removed_blocks.count(graph.block_id(i, true, j))) {
        continue;
      }
      survived[i].push_back(j);
      if (anchor_var == -1) {
        anchor_var = i;
        anchor_copy = j;
      }
      ++diag.survived_pair_count;
    }
  }
  if (anchor_var == -1) {
    throw DecodeFailure("no literal block survived; every edge class is bad");
  }
  diag.anchor_var = anchor_var;
  diag.anchor_copy = anchor_copy;

  // 6. Axes from the anchor block, orthonormalized against the T vector.
  const Eigen::Vector3d t_axis =
      coloring[graph.color_node(NodeRole::ColorT, anchor_var, false, anchor_copy)]
          .normalized();
  Eigen::Vector3d f_raw =
      coloring[graph.color_node(NodeRole::ColorF, anchor_var, false, anchor_copy)];
  Eigen::Vector3d f_perp = f_raw - t_axis.dot(f_raw) * t_axis;
  if (f_perp.norm() < 1e-9) {
    diag.region_violations.push_back(RegionViolation{
        graph.color_node(NodeRole::ColorF, anchor_var, false, anchor_copy),
        0.0});
    f_perp = t_axis.cross(Eigen::Vector3d::UnitX());
    if (f_perp.norm() < 1e-9) f_perp = t_axis.cross(Eigen::Vector3d::UnitY());
  }
  const Eigen::Vector3d f_axis = f_perp.normalized();
  const Eigen::Vector3d d_axis = t_axis.cross(f_axis);

  // 7. Region test: survived T/F/D vectors must hug their axes.
  for (int i = 0; i < n; ++i) {
    for (int j : survived[i]) {
      for (int s = 0; s < 2; ++s) {
        const bool neg = s == 1;
        const struct {
          NodeRole role;
          const Eigen::Vector3d& axis;
        } checks[] = {{NodeRole::ColorT, t_axis},
                      {NodeRole::ColorF, f_axis},
                      {NodeRole::ColorD, d_axis}};
        for (const auto& check : checks) {
          const int node = graph.color_node(check.role, i, neg, j);
          const double angle = folded_angle(coloring[node], check.axis);
          if (angle > params.axis_tolerance) {
            diag.region_violations.push_back(RegionViolation{node, angle});
          }
        }
      }
    }
  }

  // 8. Read each variable off its survived copies.
  result.assignment.assign(n, false);
  for (int i = 0; i < n; ++i) {
    bool all_pos_true = !survived[i].empty();
    bool all_neg_true = !survived[i].empty();
    for (int j : survived[i]) {
      if (folded_angle(coloring[graph.literal_node(i, false, j)], t_axis) >
          params.literal_threshold) {
        all_pos_true = false;
      }
      if (folded_angle(coloring[graph.literal_node(i, true, j)], t_axis) >
          params.literal_threshold) {
        all_neg_true = false;
      }
    }
    if (all_pos_true) {
      result.assignment[i] = true;
    } else if (all_neg_true) {
      result.assignment[i] = false;
    } else {
      result.assignment[i] = false;
      diag.free_variables.push_back(i);
    }
  }

  int satisfied = 0;
  for (const ClauseGadget& gadget : graph.clause_gadgets) {
    for (int node : gadget.literal_nodes) {
      const ReductionNode& lit = graph.nodes[node];
      if (result.assignment[lit.var] != lit.negated) {
        ++satisfied;
        break;
      }
    }
  }
  result.satisfied_fraction =
      static_cast<double>(satisfied) / graph.meta.m_clauses;
  return result;
}

}  // namespace dppmle
