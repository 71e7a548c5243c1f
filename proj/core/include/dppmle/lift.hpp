#ifndef DPPMLE_LIFT_HPP
#define DPPMLE_LIFT_HPP

#include <vector>

#include "dppmle/reduction_graph.hpp"
#include "dppmle/dataset.hpp"

namespace dppmle {

/// 3-uniform hypergraph lift of a graph: one fresh ground element per
/// edge, one size-3 sample {u, v, edge-node} per edge. Ground elements
/// are ordered vertices first, then edges in construction order, so
/// element i < vertex_count is vertex i and element vertex_count + e is
/// the node of edge e.
struct LiftedInstance {
  SimpleGraph graph;
  Dataset dataset;

  int ground_size() const { return dataset.ground_set_size(); }
  int vertex_element(int v) const { return v; }
  int edge_element(int e) const { return graph.vertex_count + e; }
};

LiftedInstance lift_to_hypergraph(const SimpleGraph& graph);

}  // namespace dppmle

#endif  // DPPMLE_LIFT_HPP
