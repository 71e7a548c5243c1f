#include "dppmle/lift.hpp"

#include "dppmle/errors.hpp"

namespace dppmle {

LiftedInstance lift_to_hypergraph(const SimpleGraph& graph) {
  if (graph.edge_count() == 0) {
    throw DegenerateError("cannot lift a graph without edges");
  }
  const int v_count = graph.vertex_count;
  std::vector<std::vector<int>> samples;
  samples.reserve(graph.edges.size());
  for (int e = 0; e < graph.edge_count(); ++e) {
    const auto& [u, v] = graph.edges[e];
    samples.push_back({u, v, v_count + e});
  }
  return LiftedInstance{graph,
                        Dataset(v_count + graph.edge_count(), std::move(samples))};
}

}  // namespace dppmle
