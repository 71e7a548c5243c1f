#ifndef DPPMLE_REDUCTION_GRAPH_HPP
#define DPPMLE_REDUCTION_GRAPH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dppmle/cnf.hpp"
#include "dppmle/expander.hpp"

namespace dppmle {

/// Plain undirected graph; the common currency between the reduction,
/// the hypergraph lift and the coloring operations.
struct SimpleGraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // u < v

  int edge_count() const { return static_cast<int>(edges.size()); }
  std::vector<int> degrees() const;
  std::vector<std::vector<int>> adjacency() const;
};

enum class NodeRole {
  Literal,      // x_i^(j) or its negation
  ColorT,       // per-block True node
  ColorF,       // per-block False node
  ColorD,       // per-block Dummy node
  EqualityAux,  // u/v leg of an equality gadget
  ClauseAux,    // u_a..u_c / v_a..v_c of a clause gadget
};

struct ReductionNode {
  int id = -1;
  NodeRole role = NodeRole::Literal;
  int var = -1;          // literal and color nodes
  bool negated = false;  // literal and color nodes
  int copy = -1;         // literal and color nodes
  int gadget = -1;       // equality gadget id or clause index for aux nodes
  char slot = 0;         // 'u' or 'v' for aux nodes
  int position = -1;     // 0..2 literal position within a clause gadget
};

enum class EdgeTag {
  BlockInternal,   // the nine per-copy edges of a literal-pair block
  EqualityGadget,  // one of the five edges of an equality gadget
  ClauseGadget,    // one of the twelve edges of a clause gadget
};

struct ReductionEdge {
  int u = -1;
  int v = -1;  // u < v
  EdgeTag tag = EdgeTag::BlockInternal;
  int gadget = -1;  // pair id / equality gadget id / clause index
};

enum class EqualityClass {
  LiteralClique,  // joins two copies of the same literal
  ExpanderT,      // joins the T nodes of two expander-adjacent blocks
  ExpanderF,
  ExpanderD,
};

struct EqualityGadget {
  int id = -1;
  EqualityClass cls = EqualityClass::LiteralClique;
  int endpoint_a = -1;  // the two equated nodes
  int endpoint_b = -1;
  int aux_u = -1;
  int aux_v = -1;
  int expander_edge = -1;  // index into the expander edge list, if any
};

struct ClauseGadget {
  int clause = -1;
  std::array<int, 3> literal_nodes{};  // the consumed literal copies
  std::array<int, 3> true_nodes{};     // T nodes of the same blocks
  std::array<int, 3> aux_u{};
  std::array<int, 3> aux_v{};
};

struct ReductionMeta {
  int n_vars = 0;
  int m_clauses = 0;
  int k = 0;  // copies per literal
  int d = 0;  // expander degree
  std::uint64_t seed = 0;
};

/// Role-annotated graph produced by the reduction. Node ids are assigned
/// in construction order: all literal nodes, then color nodes, then
/// clique-equality aux, then clause aux, then expander-equality aux.
/// Blocks double as expander vertices under block_id().
struct ReductionGraph {
  ReductionMeta meta;
  std::vector<ReductionNode> nodes;
  std::vector<ReductionEdge> edges;
  ExpanderSpec expander;
  std::vector<EqualityGadget> equality_gadgets;
  std::vector<ClauseGadget> clause_gadgets;
  // clause_copy[c][p] = copy index consumed by literal position p of clause c
  std::vector<std::array<int, 3>> clause_copy;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }

  int literal_node(int var, bool negated, int copy) const;
  int color_node(NodeRole role, int var, bool negated, int copy) const;
  /// Expander vertex of the (var, negated, copy) block.
  int block_id(int var, bool negated, int copy) const;

  std::vector<int> degrees() const;
  SimpleGraph to_simple_graph() const;
};

/// Builds the reduction graph from a 3-CNF formula and an expander on
/// 2 k n vertices: per-copy literal blocks, equality cliques among the
/// copies of each literal, one gadget per clause, and T/F/D equality
/// gadgets along every expander edge.
ReductionGraph build_reduction_graph(const CnfFormula& formula, const ExpanderSpec& expander);

struct CountAudit {
  // expected (closed form) vs actual, per gadget class
  struct Line {
    std::string what;
    long long expected = 0;
    long long actual = 0;
  };
  std::vector<Line> lines;
  long long expected_nodes = 0;
  long long actual_nodes = 0;
  long long expected_edges = 0;
  long long actual_edges = 0;
  int max_degree = 0;
  int degree_cap = 0;  // max(2d + 3, 2k + 1)
  bool exact_match = false;
  std::string mismatch;  // first offending gadget class, empty when exact
};

/// Recomputes the closed-form node/edge tallies
///   |V| = 8nk + 2nk(k-1) + 6nkd + 6m
///   |E| = 9nk + 5nk(k-1) + 15nkd + 12m
/// and compares them class by class against the constructed graph.
CountAudit count_audit(const ReductionGraph& graph);

struct DamageReport {
  std::vector<int> broken_gadgets;                 // equality gadget ids
  std::vector<int> isolated_literal_nodes;         // node ids
  std::vector<std::pair<int, int>> damaged_pairs;  // (var, copy)
  std::vector<int> destroyed_clauses;
  int survived_clauses = 0;
  int claim_floor = 0;  // m - 2 |E'|
  bool meets_claim_floor = false;
};

/// Classifies the effect of deleting the given edges: broken equality
/// gadgets, isolated literal nodes (all clique connections gone, or all
/// expander connections gone), damaged literal pairs, and the clauses
/// destroyed with them.
DamageReport classify_damage(const ReductionGraph& graph,
                             const std::vector<std::pair<int, int>>& deleted);

}  // namespace dppmle

#endif  // DPPMLE_REDUCTION_GRAPH_HPP
