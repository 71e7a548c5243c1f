#include "dppmle/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

using nlohmann::json;

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

const char* role_name(const ReductionNode& node) {
  switch (node.role) {
    case NodeRole::Literal: return "literal";
    case NodeRole::ColorT: return "T";
    case NodeRole::ColorF: return "F";
    case NodeRole::ColorD: return "D";
    case NodeRole::EqualityAux: return node.slot == 'u' ? "eq-u" : "eq-v";
    case NodeRole::ClauseAux: {
      static const char* names[2][3] = {{"cl-u-a", "cl-u-b", "cl-u-c"},
                                        {"cl-v-a", "cl-v-b", "cl-v-c"}};
      return names[node.slot == 'v' ? 1 : 0][node.position];
    }
  }
  return "?";
}

ReductionNode node_from_role(int id, const std::string& role, const json& raw) {
  ReductionNode node;
  node.id = id;
  auto get_int = [&raw](const char* key) {
    return raw.contains(key) && !raw[key].is_null() ? raw[key].get<int>() : -1;
  };
  if (role == "literal" || role == "T" || role == "F" || role == "D") {
    node.role = role == "literal" ? NodeRole::Literal
               : role == "T"      ? NodeRole::ColorT
               : role == "F"      ? NodeRole::ColorF
                                  : NodeRole::ColorD;
    node.var = get_int("var");
    node.copy = get_int("copy");
    node.negated = raw.contains("negated") && !raw["negated"].is_null() &&
                   raw["negated"].get<bool>();
    if (node.var < 0 || node.copy < 0) {
      throw ValidationError("graph node " + std::to_string(id) +
                            " lacks var/copy fields");
    }
    return node;
  }
  if (role == "eq-u" || role == "eq-v") {
    node.role = NodeRole::EqualityAux;
    node.slot = role == "eq-u" ? 'u' : 'v';
    node.gadget = get_int("gadget");
    return node;
  }
  if (role.rfind("cl-", 0) == 0 && role.size() == 6) {
    node.role = NodeRole::ClauseAux;
    node.slot = role[3];
    node.position = role[5] - 'a';
    node.gadget = get_int("gadget");
    if ((node.slot != 'u' && node.slot != 'v') || node.position < 0 ||
        node.position > 2) {
      throw ValidationError("graph node " + std::to_string(id) +
                            " has unknown role " + role);
    }
    return node;
  }
  throw ValidationError("graph node " + std::to_string(id) +
                        " has unknown role " + role);
}

}  // namespace

MarginalKernel parse_kernel(std::string_view text) {
  const json doc = parse_json(text, "kernel");
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("matrix")) {
    throw ParseError("kernel: expected object with n and matrix");
  }
  const int n = doc["n"].get<int>();
  const auto& rows = doc["matrix"];
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    throw ParseError("kernel: matrix must have n rows");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n) {
      throw ParseError("kernel: row " + std::to_string(i) +
                       " must have n entries");
    }
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return MarginalKernel(std::move(m));
}

std::string serialize_kernel(const MarginalKernel& kernel) {
  json doc;
  doc["n"] = kernel.size();
  auto& rows = doc["matrix"] = json::array();
  for (int i = 0; i < kernel.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < kernel.size(); ++j) row.push_back(kernel(i, j));
    rows.push_back(std::move(row));
  }
  return doc.dump();
}

GramFactor parse_factor(std::string_view text) {
  const json doc = parse_json(text, "factor");
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("rank") ||
      !doc.contains("columns")) {
    throw ParseError("factor: expected object with n, rank and columns");
  }
  const int n = doc["n"].get<int>();
  const int rank = doc["rank"].get<int>();
  const auto& cols = doc["columns"];
  if (!cols.is_array() || static_cast<int>(cols.size()) != n) {
    throw ParseError("factor: columns must list n vectors");
  }
  Eigen::MatrixXd q(rank, n);
  for (int i = 0; i < n; ++i) {
    if (!cols[i].is_array() || static_cast<int>(cols[i].size()) != rank) {
      throw ParseError("factor: column " + std::to_string(i) +
                       " must have rank entries");
    }
    for (int r = 0; r < rank; ++r) q(r, i) = cols[i][r].get<double>();
  }
  return GramFactor(std::move(q));
}

std::string serialize_factor(const GramFactor& factor) {
  json doc;
  doc["n"] = factor.ground_set_size();
  doc["rank"] = factor.rank();
  auto& cols = doc["columns"] = json::array();
  for (int i = 0; i < factor.ground_set_size(); ++i) {
    json col = json::array();
    for (int r = 0; r < factor.rank(); ++r) col.push_back(factor.columns()(r, i));
    cols.push_back(std::move(col));
  }
  return doc.dump();
}

std::string serialize_reduction_graph(const ReductionGraph& graph) {
  json doc;
  doc["meta"] = {{"n_vars", graph.meta.n_vars},
                 {"m_clauses", graph.meta.m_clauses},
                 {"k", graph.meta.k},
                 {"d", graph.meta.d},
                 {"seed", graph.meta.seed}};
  auto& nodes = doc["nodes"] = json::array();
  for (const ReductionNode& node : graph.nodes) {
    json entry;
    entry["id"] = node.id;
    entry["role"] = role_name(node);
    if (node.role == NodeRole::Literal || node.role == NodeRole::ColorT ||
        node.role == NodeRole::ColorF || node.role == NodeRole::ColorD) {
      entry["var"] = node.var;
      entry["negated"] = node.negated;
      entry["copy"] = node.copy;
      entry["gadget"] = nullptr;
    } else {
      entry["var"] = nullptr;
      entry["negated"] = nullptr;
      entry["copy"] = nullptr;
      entry["gadget"] = node.gadget;
    }
    nodes.push_back(std::move(entry));
  }
  auto& edges = doc["edges"] = json::array();
  for (const ReductionEdge& edge : graph.edges) {
    edges.push_back(json::array({edge.u, edge.v}));
  }
  auto& expander_edges = doc["expander_edges"] = json::array();
  for (const auto& [a, b] : graph.expander.edges) {
    expander_edges.push_back(json::array({a, b}));
  }
  return doc.dump();
}

ReductionGraph parse_reduction_graph(std::string_view text) {
  const json doc = parse_json(text, "graph");
  for (const char* key : {"meta", "nodes", "edges", "expander_edges"}) {
    if (!doc.contains(key)) {
      throw ParseError(std::string("graph: missing ") + key);
    }
  }
  ReductionGraph graph;
  const auto& meta = doc["meta"];
  graph.meta.n_vars = meta.at("n_vars").get<int>();
  graph.meta.m_clauses = meta.at("m_clauses").get<int>();
  graph.meta.k = meta.at("k").get<int>();
  graph.meta.d = meta.at("d").get<int>();
  graph.meta.seed = meta.at("seed").get<std::uint64_t>();

  for (const auto& raw : doc["nodes"]) {
    const int id = raw.at("id").get<int>();
    if (id != static_cast<int>(graph.nodes.size())) {
      throw ValidationError("graph: node ids must be 0-indexed and contiguous");
    }
    graph.nodes.push_back(node_from_role(id, raw.at("role").get<std::string>(), raw));
  }

  // Expander: the audit is recomputed rather than stored.
  graph.expander.vertex_count = 2 * graph.meta.n_vars * graph.meta.k;
  graph.expander.degree = graph.meta.d;
  graph.expander.seed = graph.meta.seed;
  for (const auto& raw : doc["expander_edges"]) {
    int a = raw.at(0).get<int>();
    int b = raw.at(1).get<int>();
    if (a > b) std::swap(a, b);
    graph.expander.edges.emplace_back(a, b);
  }

  // Rebuild gadget tables from node roles before tagging edges.
  std::vector<std::vector<int>> adj(graph.nodes.size());
  std::vector<std::pair<int, int>> plain_edges;
  for (const auto& raw : doc["edges"]) {
    int u = raw.at(0).get<int>();
    int v = raw.at(1).get<int>();
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= static_cast<int>(graph.nodes.size()) || u == v) {
      throw ValidationError("graph: bad edge (" + std::to_string(u) + ", " +
                            std::to_string(v) + ")");
    }
    plain_edges.emplace_back(u, v);
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  std::map<int, EqualityGadget> equality;
  std::map<int, ClauseGadget> clauses;
  std::map<std::pair<int, int>, int> expander_index;
  for (std::size_t e = 0; e < graph.expander.edges.size(); ++e) {
    expander_index[graph.expander.edges[e]] = static_cast<int>(e);
  }
  for (const ReductionNode& node : graph.nodes) {
    if (node.role == NodeRole::EqualityAux) {
      auto& gadget = equality[node.gadget];
      gadget.id = node.gadget;
      (node.slot == 'u' ? gadget.aux_u : gadget.aux_v) = node.id;
    } else if (node.role == NodeRole::ClauseAux) {
      auto& gadget = clauses[node.gadget];
      gadget.clause = node.gadget;
      (node.slot == 'u' ? gadget.aux_u : gadget.aux_v)[node.position] = node.id;
    }
  }
  for (auto& [id, gadget] : equality) {
    // Endpoints are the non-aux neighbors of the u leg.
    std::vector<int> ends;
    for (int w : adj[gadget.aux_u]) {
      if (w != gadget.aux_v) ends.push_back(w);
    }
    std::sort(ends.begin(), ends.end());
    if (ends.size() != 2) {
      throw ValidationError("graph: equality gadget " + std::to_string(id) +
                            " has " + std::to_string(ends.size()) +
                            " endpoints");
    }
    gadget.endpoint_a = ends[0];
    gadget.endpoint_b = ends[1];
    const ReductionNode& na = graph.nodes[gadget.endpoint_a];
    const ReductionNode& nb = graph.nodes[gadget.endpoint_b];
    if (na.role == NodeRole::Literal) {
      gadget.cls = EqualityClass::LiteralClique;
    } else {
      gadget.cls = na.role == NodeRole::ColorT   ? EqualityClass::ExpanderT
                   : na.role == NodeRole::ColorF ? EqualityClass::ExpanderF
                                                 : EqualityClass::ExpanderD;
      const int pair_a = (na.var * graph.meta.k + na.copy) * 2 + (na.negated ? 1 : 0);
      const int pair_b = (nb.var * graph.meta.k + nb.copy) * 2 + (nb.negated ? 1 : 0);
      auto it = expander_index.find({std::min(pair_a, pair_b),
                                     std::max(pair_a, pair_b)});
      if (it == expander_index.end()) {
        throw ValidationError("graph: equality gadget " + std::to_string(id) +
                              " joins blocks without an expander edge");
      }
      gadget.expander_edge = it->second;
    }
  }
  for (auto& [c, gadget] : clauses) {
    for (int p = 0; p < 3; ++p) {
      int literal = -1;
      int true_node = -1;
      for (int w : adj[gadget.aux_u[p]]) {
        if (graph.nodes[w].role == NodeRole::Literal) literal = w;
        if (graph.nodes[w].role == NodeRole::ColorT) true_node = w;
      }
      if (literal < 0 || true_node < 0) {
        throw ValidationError("graph: clause gadget " + std::to_string(c) +
                              " is missing its literal or T neighbor");
      }
      gadget.literal_nodes[p] = literal;
      gadget.true_nodes[p] = true_node;
    }
  }
  for (const auto& [id, gadget] : equality) graph.equality_gadgets.push_back(gadget);
  std::sort(graph.equality_gadgets.begin(), graph.equality_gadgets.end(),
            [](const EqualityGadget& a, const EqualityGadget& b) {
              return a.id < b.id;
            });
  graph.clause_copy.resize(clauses.size());
  for (const auto& [c, gadget] : clauses) {
    graph.clause_gadgets.push_back(gadget);
    for (int p = 0; p < 3; ++p) {
      graph.clause_copy[c][p] = graph.nodes[gadget.literal_nodes[p]].copy;
    }
  }
  std::sort(graph.clause_gadgets.begin(), graph.clause_gadgets.end(),
            [](const ClauseGadget& a, const ClauseGadget& b) {
              return a.clause < b.clause;
            });

  // Tag edges: anything touching an aux node belongs to that gadget; the
  // rest are block edges of the (var, copy) pair.
  for (const auto& [u, v] : plain_edges) {
    const ReductionNode& nu = graph.nodes[u];
    const ReductionNode& nv = graph.nodes[v];
    ReductionEdge edge;
    edge.u = u;
    edge.v = v;
    if (nu.role == NodeRole::EqualityAux || nv.role == NodeRole::EqualityAux) {
      edge.tag = EdgeTag::EqualityGadget;
      edge.gadget = nu.role == NodeRole::EqualityAux ? nu.gadget : nv.gadget;
    } else if (nu.role == NodeRole::ClauseAux || nv.role == NodeRole::ClauseAux) {
      edge.tag = EdgeTag::ClauseGadget;
      edge.gadget = nu.role == NodeRole::ClauseAux ? nu.gadget : nv.gadget;
    } else {
      edge.tag = EdgeTag::BlockInternal;
      edge.gadget = nu.var * graph.meta.k + nu.copy;
    }
    graph.edges.push_back(edge);
  }
  return graph;
}

SimpleGraph parse_simple_graph(std::string_view text) {
  const json doc = parse_json(text, "graph");
  if (doc.contains("nodes")) {
    return parse_reduction_graph(text).to_simple_graph();
  }
  if (!doc.contains("vertex_count") || !doc.contains("edges")) {
    throw ParseError("graph: expected vertex_count and edges");
  }
  SimpleGraph graph;
  graph.vertex_count = doc["vertex_count"].get<int>();
  std::set<std::pair<int, int>> seen;
  for (const auto& raw : doc["edges"]) {
    int u = raw.at(0).get<int>();
    int v = raw.at(1).get<int>();
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= graph.vertex_count || u == v || !seen.emplace(u, v).second) {
      throw ValidationError("graph: bad or repeated edge (" +
                            std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    graph.edges.emplace_back(u, v);
  }
  return graph;
}

std::string serialize_simple_graph(const SimpleGraph& graph) {
  json doc;
  doc["vertex_count"] = graph.vertex_count;
  auto& edges = doc["edges"] = json::array();
  for (const auto& [u, v] : graph.edges) edges.push_back(json::array({u, v}));
  return doc.dump();
}

ColoringFile parse_coloring(std::string_view text, int node_count) {
  const json doc = parse_json(text, "coloring");
  ColoringFile file;
  if (doc.contains("colors")) {
    DiscreteColoring colors(node_count, 0);
    for (const auto& [key, value] : doc["colors"].items()) {
      const int id = std::stoi(key);
      if (id < 0 || id >= node_count) {
        throw ValidationError("coloring: node id " + key + " out of range");
      }
      colors[id] = value.get<int>();
    }
    file.colors = std::move(colors);
  } else if (doc.contains("vectors")) {
    VectorColoring vectors(node_count, Eigen::Vector3d::Zero());
    for (const auto& [key, value] : doc["vectors"].items()) {
      const int id = std::stoi(key);
      if (id < 0 || id >= node_count) {
        throw ValidationError("coloring: node id " + key + " out of range");
      }
      if (!value.is_array() || value.size() != 3) {
        throw ParseError("coloring: vector of node " + key +
                         " must have 3 entries");
      }
      vectors[id] = Eigen::Vector3d(value[0].get<double>(),
                                    value[1].get<double>(),
                                    value[2].get<double>());
    }
    file.vectors = std::move(vectors);
  } else {
    throw ParseError("coloring: expected colors or vectors");
  }
  return file;
}

std::string serialize_discrete_coloring(const DiscreteColoring& coloring) {
  json doc;
  auto& colors = doc["colors"] = json::object();
  for (std::size_t id = 0; id < coloring.size(); ++id) {
    colors[std::to_string(id)] = coloring[id];
  }
  return doc.dump();
}

std::string serialize_vector_coloring(const VectorColoring& coloring) {
  json doc;
  auto& vectors = doc["vectors"] = json::object();
  for (std::size_t id = 0; id < coloring.size(); ++id) {
    vectors[std::to_string(id)] =
        json::array({coloring[id].x(), coloring[id].y(), coloring[id].z()});
  }
  return doc.dump();
}

std::vector<bool> parse_assignment(std::string_view text) {
  const json doc = parse_json(text, "assignment");
  if (!doc.contains("assignment") || !doc["assignment"].is_array()) {
    throw ParseError("assignment: expected an assignment array");
  }
  std::vector<bool> out;
  for (const auto& value : doc["assignment"]) {
    if (!value.is_boolean()) {
      throw ParseError("assignment: entries must be booleans");
    }
    out.push_back(value.get<bool>());
  }
  return out;
}

std::string serialize_assignment(const std::vector<bool>& assignment) {
  json doc;
  auto& arr = doc["assignment"] = json::array();
  for (bool value : assignment) arr.push_back(value);
  return doc.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

}  // namespace dppmle
