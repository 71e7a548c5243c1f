#ifndef DPPMLE_IO_HPP
#define DPPMLE_IO_HPP

#include <optional>
#include <string>
#include <string_view>

#include "dppmle/reduction_graph.hpp"
#include "dppmle/coloring.hpp"
#include "dppmle/kernel.hpp"

namespace dppmle {

// Kernel file: {"n": int, "matrix": [[row-major reals]]}; doubles are
// emitted with round-trip precision.
MarginalKernel parse_kernel(std::string_view text);
std::string serialize_kernel(const MarginalKernel& kernel);

// Factor file: {"n": int, "rank": int, "columns": [[r reals] x n]}.
GramFactor parse_factor(std::string_view text);
std::string serialize_factor(const GramFactor& factor);

// Graph file: {"meta": {...}, "nodes": [...], "edges": [[u,v]...],
// "expander_edges": [[b1,b2]...]}; all ids 0-indexed. Gadget provenance
// is rebuilt from node roles on load.
ReductionGraph parse_reduction_graph(std::string_view text);
std::string serialize_reduction_graph(const ReductionGraph& graph);

// Plain graph (accepted by the graph-consuming commands that do not need
// reduction roles): {"vertex_count": int, "edges": [[u,v]...]}.
SimpleGraph parse_simple_graph(std::string_view text);
std::string serialize_simple_graph(const SimpleGraph& graph);

// Coloring file: {"colors": {"<id>": 1|2|3}} or {"vectors": {"<id>": [x,y,z]}}.
struct ColoringFile {
  std::optional<DiscreteColoring> colors;
  std::optional<VectorColoring> vectors;
};
ColoringFile parse_coloring(std::string_view text, int node_count);
std::string serialize_discrete_coloring(const DiscreteColoring& coloring);
std::string serialize_vector_coloring(const VectorColoring& coloring);

// Assignment file: {"assignment": [true, false, ...]} indexed by variable.
std::vector<bool> parse_assignment(std::string_view text);
std::string serialize_assignment(const std::vector<bool>& assignment);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace dppmle

#endif  // DPPMLE_IO_HPP
