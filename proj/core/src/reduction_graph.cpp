#include "dppmle/reduction_graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "dppmle/errors.hpp"

namespace dppmle {

std::vector<int> SimpleGraph::degrees() const {
  std::vector<int> deg(vertex_count, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

std::vector<std::vector<int>> SimpleGraph::adjacency() const {
  std::vector<std::vector<int>> adj(vertex_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

namespace {

int pair_index(const ReductionMeta& meta, int var, int copy) {
  return var * meta.k + copy;
}

}  // namespace

int ReductionGraph::block_id(int var, bool negated, int copy) const {
  return pair_index(meta, var, copy) * 2 + (negated ? 1 : 0);
}

int ReductionGraph::literal_node(int var, bool negated, int copy) const {
  return block_id(var, negated, copy);
}

int ReductionGraph::color_node(NodeRole role, int var, bool negated, int copy) const {
  int offset = 0;
  switch (role) {
    case NodeRole::ColorT: offset = 0; break;
    case NodeRole::ColorF: offset = 1; break;
    case NodeRole::ColorD: offset = 2; break;
    default:
      throw InternalError("color_node expects a color role");
  }
  return 2 * meta.n_vars * meta.k + block_id(var, negated, copy) * 3 + offset;
}

std::vector<int> ReductionGraph::degrees() const {
  std::vector<int> deg(node_count(), 0);
  for (const auto& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

SimpleGraph ReductionGraph::to_simple_graph() const {
  SimpleGraph g;
  g.vertex_count = node_count();
  g.edges.reserve(edges.size());
  for (const auto& e : edges) g.edges.emplace_back(e.u, e.v);
  return g;
}

ReductionGraph build_reduction_graph(const CnfFormula& formula, const ExpanderSpec& expander) {
  const int n = formula.variable_count;
  const int m = formula.clause_count();
  if (expander.vertex_count % (2 * n) != 0) {
    throw StructuralError("expander vertex count " +
                          std::to_string(expander.vertex_count) +
                          " is not a multiple of 2n = " + std::to_string(2 * n));
  }
  const int k = expander.vertex_count / (2 * n);

  ReductionGraph g;
  g.meta = ReductionMeta{n, m, k, expander.degree, expander.seed};
  g.expander = expander;

  // Literal nodes, ids 0 .. 2nk-1; the id of x_i^(j) doubles as the
  // expander vertex of its block.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int s = 0; s < 2; ++s) {
        ReductionNode node;
        node.id = static_cast<int>(g.nodes.size());
        node.role = NodeRole::Literal;
        node.var = i;
        node.negated = s == 1;
        node.copy = j;
        g.nodes.push_back(node);
      }
    }
  }
  // Color nodes T, F, D per block.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int s = 0; s < 2; ++s) {
        for (NodeRole role :
             {NodeRole::ColorT, NodeRole::ColorF, NodeRole::ColorD}) {
          ReductionNode node;
          node.id = static_cast<int>(g.nodes.size());
          node.role = role;
          node.var = i;
          node.negated = s == 1;
          node.copy = j;
          g.nodes.push_back(node);
        }
      }
    }
  }

  auto add_edge = [&g](int u, int v, EdgeTag tag, int gadget) {
    if (u == v) throw InternalError("self-loop in construction");
    if (u > v) std::swap(u, v);
    g.edges.push_back(ReductionEdge{u, v, tag, gadget});
  };

  // Block edges: per literal pair, two block triangles, the literal-negation
  // edge and the two literal-dummy edges.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      const int pair = pair_index(g.meta, i, j);
      for (int s = 0; s < 2; ++s) {
        const bool neg = s == 1;
        const int t = g.color_node(NodeRole::ColorT, i, neg, j);
        const int f = g.color_node(NodeRole::ColorF, i, neg, j);
        const int d = g.color_node(NodeRole::ColorD, i, neg, j);
        add_edge(d, f, EdgeTag::BlockInternal, pair);
        add_edge(f, t, EdgeTag::BlockInternal, pair);
        add_edge(t, d, EdgeTag::BlockInternal, pair);
      }
      const int x = g.literal_node(i, false, j);
      const int xb = g.literal_node(i, true, j);
      add_edge(x, xb, EdgeTag::BlockInternal, pair);
      add_edge(x, g.color_node(NodeRole::ColorD, i, false, j),
               EdgeTag::BlockInternal, pair);
      add_edge(xb, g.color_node(NodeRole::ColorD, i, true, j),
               EdgeTag::BlockInternal, pair);
    }
  }

  auto add_equality_gadget = [&](EqualityClass cls, int a, int b,
                                 int expander_edge) {
    EqualityGadget gadget;
    gadget.id = static_cast<int>(g.equality_gadgets.size());
    gadget.cls = cls;
    gadget.endpoint_a = a;
    gadget.endpoint_b = b;
    gadget.expander_edge = expander_edge;

    ReductionNode aux_u;
    aux_u.id = static_cast<int>(g.nodes.size());
    aux_u.role = NodeRole::EqualityAux;
    aux_u.gadget = gadget.id;
    aux_u.slot = 'u';
    g.nodes.push_back(aux_u);
    ReductionNode aux_v = aux_u;
    aux_v.id = static_cast<int>(g.nodes.size());
    aux_v.slot = 'v';
    g.nodes.push_back(aux_v);

    gadget.aux_u = aux_u.id;
    gadget.aux_v = aux_v.id;
    add_edge(a, gadget.aux_u, EdgeTag::EqualityGadget, gadget.id);
    add_edge(a, gadget.aux_v, EdgeTag::EqualityGadget, gadget.id);
    add_edge(b, gadget.aux_u, EdgeTag::EqualityGadget, gadget.id);
    add_edge(b, gadget.aux_v, EdgeTag::EqualityGadget, gadget.id);
    add_edge(gadget.aux_u, gadget.aux_v, EdgeTag::EqualityGadget, gadget.id);
    g.equality_gadgets.push_back(gadget);
  };

  // Equality cliques among the k copies of each literal.
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 2; ++s) {
      for (int j1 = 0; j1 < k; ++j1) {
        for (int j2 = j1 + 1; j2 < k; ++j2) {
          add_equality_gadget(EqualityClass::LiteralClique,
                              g.literal_node(i, s == 1, j1),
                              g.literal_node(i, s == 1, j2), -1);
        }
      }
    }
  }

  // Clause gadgets; every clause consumes a fresh copy of each literal.
  std::vector<std::array<int, 2>> next_copy(n, {0, 0});
  for (int c = 0; c < m; ++c) {
    const auto& clause = formula.clauses[c];
    ClauseGadget gadget;
    gadget.clause = c;
    std::array<int, 3> copies{};
    for (int p = 0; p < 3; ++p) {
      const Literal lit = clause[p];
      int& counter = next_copy[lit.var][lit.negated ? 1 : 0];
      if (counter >= k) {
        throw CapacityError("clause " + std::to_string(c) + " needs copy " +
                            std::to_string(counter + 1) + " of variable " +
                            std::to_string(lit.var + 1) + " but only " +
                            std::to_string(k) + " copies exist");
      }
      copies[p] = counter++;
      gadget.literal_nodes[p] = g.literal_node(lit.var, lit.negated, copies[p]);
      gadget.true_nodes[p] =
          g.color_node(NodeRole::ColorT, lit.var, lit.negated, copies[p]);
    }
    for (int p = 0; p < 3; ++p) {
      ReductionNode aux;
      aux.id = static_cast<int>(g.nodes.size());
      aux.role = NodeRole::ClauseAux;
      aux.gadget = c;
      aux.slot = 'u';
      aux.position = p;
      g.nodes.push_back(aux);
      gadget.aux_u[p] = aux.id;
    }
    for (int p = 0; p < 3; ++p) {
      ReductionNode aux;
      aux.id = static_cast<int>(g.nodes.size());
      aux.role = NodeRole::ClauseAux;
      aux.gadget = c;
      aux.slot = 'v';
      aux.position = p;
      g.nodes.push_back(aux);
      gadget.aux_v[p] = aux.id;
    }
    for (int p = 0; p < 3; ++p) {
      add_edge(gadget.true_nodes[p], gadget.aux_u[p], EdgeTag::ClauseGadget, c);
      add_edge(gadget.literal_nodes[p], gadget.aux_u[p], EdgeTag::ClauseGadget,
               c);
    }
    add_edge(gadget.aux_v[0], gadget.aux_v[1], EdgeTag::ClauseGadget, c);
    add_edge(gadget.aux_v[1], gadget.aux_v[2], EdgeTag::ClauseGadget, c);
    add_edge(gadget.aux_v[2], gadget.aux_v[0], EdgeTag::ClauseGadget, c);
    for (int p = 0; p < 3; ++p) {
      add_edge(gadget.aux_v[p], gadget.aux_u[p], EdgeTag::ClauseGadget, c);
    }
    g.clause_gadgets.push_back(gadget);
    g.clause_copy.push_back(copies);
  }

  // Consistency layer: three equality gadgets per expander edge, joining
  // the T, F and D nodes of the two blocks.
  for (std::size_t e = 0; e < expander.edges.size(); ++e) {
    const auto [ba, bb] = expander.edges[e];
    // Copies, not references: adding gadget nodes reallocates g.nodes.
    const ReductionNode na = g.nodes[ba];  // block id == literal node id
    const ReductionNode nb = g.nodes[bb];
    add_equality_gadget(
        EqualityClass::ExpanderT,
        g.color_node(NodeRole::ColorT, na.var, na.negated, na.copy),
        g.color_node(NodeRole::ColorT, nb.var, nb.negated, nb.copy),
        static_cast<int>(e));
    add_equality_gadget(
        EqualityClass::ExpanderF,
        g.color_node(NodeRole::ColorF, na.var, na.negated, na.copy),
        g.color_node(NodeRole::ColorF, nb.var, nb.negated, nb.copy),
        static_cast<int>(e));
    add_equality_gadget(
        EqualityClass::ExpanderD,
        g.color_node(NodeRole::ColorD, na.var, na.negated, na.copy),
        g.color_node(NodeRole::ColorD, nb.var, nb.negated, nb.copy),
        static_cast<int>(e));
  }

  // The construction must yield a simple graph.
  std::set<std::pair<int, int>> seen;
  for (const auto& e : g.edges) {
    if (!seen.emplace(e.u, e.v).second) {
      throw InternalError("parallel edge (" + std::to_string(e.u) + ", " +
                          std::to_string(e.v) + ") in construction");
    }
  }
  return g;
}

CountAudit count_audit(const ReductionGraph& graph) {
  const long long n = graph.meta.n_vars;
  const long long m = graph.meta.m_clauses;
  const long long k = graph.meta.k;
  const long long d = graph.meta.d;

  CountAudit audit;
  auto count_nodes = [&](auto&& pred) {
    return static_cast<long long>(
        std::count_if(graph.nodes.begin(), graph.nodes.end(), pred));
  };
  auto count_edges = [&](EdgeTag tag) {
    return static_cast<long long>(
        std::count_if(graph.edges.begin(), graph.edges.end(),
                      [tag](const ReductionEdge& e) { return e.tag == tag; }));
  };
  const long long clique_gadgets =
      static_cast<long long>(std::count_if(
          graph.equality_gadgets.begin(), graph.equality_gadgets.end(),
          [](const EqualityGadget& q) {
            return q.cls == EqualityClass::LiteralClique;
          }));
  const long long expander_gadgets =
      static_cast<long long>(graph.equality_gadgets.size()) - clique_gadgets;

  audit.lines.push_back({"literal nodes", 2 * n * k,
                         count_nodes([](const ReductionNode& v) {
                           return v.role == NodeRole::Literal;
                         })});
  audit.lines.push_back({"color nodes", 6 * n * k,
                         count_nodes([](const ReductionNode& v) {
                           return v.role == NodeRole::ColorT ||
                                  v.role == NodeRole::ColorF ||
                                  v.role == NodeRole::ColorD;
                         })});
  audit.lines.push_back({"clique equality aux nodes", 2 * n * k * (k - 1),
                         2 * clique_gadgets});
  audit.lines.push_back({"clause aux nodes", 6 * m,
                         count_nodes([](const ReductionNode& v) {
                           return v.role == NodeRole::ClauseAux;
                         })});
  audit.lines.push_back(
      {"expander equality aux nodes", 6 * n * k * d, 2 * expander_gadgets});
  audit.lines.push_back(
      {"block edges", 9 * n * k, count_edges(EdgeTag::BlockInternal)});
  audit.lines.push_back({"clique equality edges", 5 * n * k * (k - 1),
                         5 * clique_gadgets});
  audit.lines.push_back(
      {"clause gadget edges", 12 * m, count_edges(EdgeTag::ClauseGadget)});
  audit.lines.push_back({"expander equality edges", 15 * n * k * d,
                         count_edges(EdgeTag::EqualityGadget) -
                             5 * clique_gadgets});

  audit.expected_nodes =
      8 * n * k + 2 * n * k * (k - 1) + 6 * n * k * d + 6 * m;
  audit.actual_nodes = graph.node_count();
  audit.expected_edges =
      9 * n * k + 5 * n * k * (k - 1) + 15 * n * k * d + 12 * m;
  audit.actual_edges = graph.edge_count();

  const auto deg = graph.degrees();
  audit.max_degree = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  audit.degree_cap = std::max<int>(2 * graph.meta.d + 3, 2 * graph.meta.k + 1);

  audit.exact_match = audit.expected_nodes == audit.actual_nodes &&
                      audit.expected_edges == audit.actual_edges;
  for (const auto& line : audit.lines) {
    if (line.expected != line.actual) {
      audit.exact_match = false;
      if (audit.mismatch.empty()) audit.mismatch = line.what;
    }
  }
  if (!audit.exact_match && audit.mismatch.empty()) audit.mismatch = "totals";
  return audit;
}

DamageReport classify_damage(const ReductionGraph& graph,
                             const std::vector<std::pair<int, int>>& deleted) {
  std::map<std::pair<int, int>, int> edge_index;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    edge_index[{graph.edges[e].u, graph.edges[e].v}] = static_cast<int>(e);
  }
  std::set<int> deleted_edges;
  for (auto [u, v] : deleted) {
    if (u > v) std::swap(u, v);
    auto it = edge_index.find({u, v});
    if (it == edge_index.end()) {
      throw StructuralError("deleted edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") is not a graph edge");
    }
    deleted_edges.insert(it->second);
  }

  DamageReport report;
  std::set<int> broken;
  std::set<int> damaged_pair_ids;  // pair_index values
  for (int e : deleted_edges) {
    const ReductionEdge& edge = graph.edges[e];
    if (edge.tag == EdgeTag::EqualityGadget) broken.insert(edge.gadget);
    if (edge.tag == EdgeTag::BlockInternal) damaged_pair_ids.insert(edge.gadget);
  }
  report.broken_gadgets.assign(broken.begin(), broken.end());

  const int n = graph.meta.n_vars;
  const int k = graph.meta.k;

  // Clique connections per literal node and expander connections per block.
  std::map<int, std::vector<int>> clique_gadgets_of;     // literal node -> ids
  std::map<int, std::vector<int>> expander_edge_gadgets;  // exp edge -> ids
  for (const auto& q : graph.equality_gadgets) {
    if (q.cls == EqualityClass::LiteralClique) {
      clique_gadgets_of[q.endpoint_a].push_back(q.id);
      clique_gadgets_of[q.endpoint_b].push_back(q.id);
    } else {
      expander_edge_gadgets[q.expander_edge].push_back(q.id);
    }
  }
  auto expander_connection_broken = [&](int expander_edge) {
    for (int id : expander_edge_gadgets[expander_edge]) {
      if (broken.count(id)) return true;
    }
    return false;
  };
  std::vector<std::vector<int>> block_expander_edges(graph.expander.vertex_count);
  for (std::size_t e = 0; e < graph.expander.edges.size(); ++e) {
    block_expander_edges[graph.expander.edges[e].first].push_back(
        static_cast<int>(e));
    block_expander_edges[graph.expander.edges[e].second].push_back(
        static_cast<int>(e));
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int s = 0; s < 2; ++s) {
        const int node = graph.literal_node(i, s == 1, j);
        bool isolated = false;
        // A literal with at least one clique connection is isolated once
        // all of them break; with k = 1 there are none to break.
        const auto& cliques = clique_gadgets_of[node];
        if (!cliques.empty()) {
          isolated = std::all_of(cliques.begin(), cliques.end(),
                                 [&](int id) { return broken.count(id) > 0; });
        }
        if (!isolated) {
          const auto& exp_edges = block_expander_edges[graph.block_id(i, s == 1, j)];
          if (!exp_edges.empty() &&
              std::all_of(exp_edges.begin(), exp_edges.end(),
                          expander_connection_broken)) {
            isolated = true;
          }
        }
        if (isolated) {
          report.isolated_literal_nodes.push_back(node);
          damaged_pair_ids.insert(pair_index(graph.meta, i, j));
        }
      }
    }
  }

  for (int pair : damaged_pair_ids) {
    report.damaged_pairs.emplace_back(pair / k, pair % k);
  }

  std::set<int> destroyed;
  for (int e : deleted_edges) {
    const ReductionEdge& edge = graph.edges[e];
    if (edge.tag == EdgeTag::ClauseGadget) destroyed.insert(edge.gadget);
  }
  for (int c = 0; c < graph.meta.m_clauses; ++c) {
    const auto& gadget = graph.clause_gadgets[c];
    for (int p = 0; p < 3; ++p) {
      const ReductionNode& lit = graph.nodes[gadget.literal_nodes[p]];
      if (damaged_pair_ids.count(pair_index(graph.meta, lit.var, lit.copy))) {
        destroyed.insert(c);
      }
    }
  }
  report.destroyed_clauses.assign(destroyed.begin(), destroyed.end());
  report.survived_clauses =
      graph.meta.m_clauses - static_cast<int>(destroyed.size());
  report.claim_floor =
      graph.meta.m_clauses - 2 * static_cast<int>(deleted_edges.size());
  report.meets_claim_floor = report.survived_clauses >= report.claim_floor;
  return report;
}

}  // namespace dppmle
