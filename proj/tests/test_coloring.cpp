#include <doctest.h>

#include <cmath>
#include <random>

#include "dppmle/cnf.hpp"
#include "dppmle/coloring.hpp"
#include "dppmle/errors.hpp"
#include "dppmle/kernel.hpp"
#include "dppmle/lift.hpp"
#include "oracles.hpp"

using namespace dppmle;

namespace {

constexpr double kPi = 3.14159265358979323846;

SimpleGraph triangle() { return SimpleGraph{3, {{0, 1}, {1, 2}, {0, 2}}}; }

ReductionGraph small_reduction_graph(const char* dimacs = "p cnf 3 1\n1 2 3 0\n",
                         int d = 2, std::uint64_t seed = 7) {
  const CnfFormula phi = parse_dimacs(dimacs);
  const int k = std::max(1, phi.max_occurrences);
  const ExpanderSpec expander =
      build_expander(2 * k * phi.variable_count, d, seed);
  return build_reduction_graph(phi, expander);
}

}  // namespace

TEST_CASE("check_proper") {
  CHECK(check_proper(triangle(), {1, 2, 3}).proper);
  const auto bad = check_proper(triangle(), {1, 1, 2});
  CHECK_FALSE(bad.proper);
  REQUIRE(bad.monochromatic_edges.size() == 1);
  CHECK(bad.monochromatic_edges[0] == std::pair<int, int>{0, 1});
  CHECK(check_proper(SimpleGraph{1, {}}, {2}).proper);
  CHECK_THROWS_AS(check_proper(triangle(), {1, 2}), ValidationError);
  CHECK_THROWS_AS(check_proper(triangle(), {1, 2, 4}), ValidationError);
}

TEST_CASE("find_three_coloring agrees with brute force") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 40; ++round) {
    const int n = 3 + static_cast<int>(rng() % 6);
    SimpleGraph g;
    g.vertex_count = n;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng() % 100 < 55) g.edges.emplace_back(u, v);
      }
    }
    const bool expected = testing::three_colorable_oracle(n, g.edges);
    const auto found = find_three_coloring(g);
    CHECK(found.has_value() == expected);
    if (found) CHECK(check_proper(g, *found).proper);
  }
}

TEST_CASE("assignment_to_coloring produces a proper coloring") {
  const ReductionGraph g = small_reduction_graph();
  const std::vector<bool> all_true{true, true, true};
  const DiscreteColoring colors = assignment_to_coloring(g, all_true);
  CHECK(check_proper(g.to_simple_graph(), colors).proper);
  CHECK(static_cast<int>(colors.size()) == 66);

  // The decoding convention: true literals share the T color.
  CHECK(colors[g.literal_node(0, false, 0)] == 1);
  CHECK(colors[g.literal_node(0, true, 0)] == 2);
  CHECK(colors[g.color_node(NodeRole::ColorT, 0, false, 0)] == 1);
  CHECK(colors[g.color_node(NodeRole::ColorF, 0, false, 0)] == 2);
  CHECK(colors[g.color_node(NodeRole::ColorD, 0, false, 0)] == 3);
}

TEST_CASE("assignment_to_coloring rejects non-satisfying assignments") {
  const ReductionGraph g = small_reduction_graph();
  CHECK_THROWS_WITH_AS(assignment_to_coloring(g, {false, false, false}),
                       doctest::Contains("clause 0"), ValidationError);
}

TEST_CASE("equality gadget auxiliaries take the two spare colors") {
  const ReductionGraph g = small_reduction_graph();
  const DiscreteColoring colors = assignment_to_coloring(g, {true, true, true});
  for (const auto& gadget : g.equality_gadgets) {
    const int base = colors[gadget.endpoint_a];
    CHECK(colors[gadget.endpoint_b] == base);
    CHECK(colors[gadget.aux_u] != base);
    CHECK(colors[gadget.aux_v] != base);
    CHECK(colors[gadget.aux_u] != colors[gadget.aux_v]);
  }
}

TEST_CASE("clause gadget admits no completion when all literals are false") {
  CHECK_FALSE(complete_clause_auxiliaries({1, 1, 1}, {2, 2, 2}).has_value());
  CHECK(complete_clause_auxiliaries({1, 1, 1}, {1, 2, 2}).has_value());
  CHECK(complete_clause_auxiliaries({1, 1, 1}, {2, 2, 1}).has_value());
  CHECK(complete_clause_auxiliaries({1, 1, 1}, {1, 1, 1}).has_value());
}

TEST_CASE("satisfiability transfers to colorability on reduction graphs") {
  // Satisfiable: the search must find a coloring.
  const ReductionGraph sat_graph = small_reduction_graph("p cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n");
  const auto coloring = find_three_coloring(sat_graph.to_simple_graph());
  REQUIRE(coloring.has_value());
  CHECK(check_proper(sat_graph.to_simple_graph(), *coloring).proper);
}

TEST_CASE("coloring_to_kernel on the triangle lift") {
  const GramFactor factor = coloring_to_kernel(triangle(), {1, 2, 3});
  const double expected_norm2[] = {2.0 / 3, 2.0 / 3, 2.0 / 3,
                                   1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (int i = 0; i < 6; ++i) {
    CHECK(factor.column_norm(i) * factor.column_norm(i) ==
          doctest::Approx(expected_norm2[i]).epsilon(1e-12));
  }
  const auto report = validate_kernel(factor_to_kernel(factor));
  CHECK(report.pass);
  CHECK(report.max_eigenvalue == doctest::Approx(1.0).epsilon(1e-9));

  // Per-color mass is exactly one.
  Eigen::Vector3d mass = Eigen::Vector3d::Zero();
  for (int i = 0; i < 6; ++i) {
    mass += factor.column(i).cwiseProduct(factor.column(i));
  }
  for (int c = 0; c < 3; ++c) CHECK(mass(c) == doctest::Approx(1.0));

  CHECK_THROWS_AS(coloring_to_kernel(triangle(), {1, 1, 2}), ValidationError);
}

TEST_CASE("single-edge lift with m = 1 gives unit norms and zero likelihood") {
  const SimpleGraph path{2, {{0, 1}}};
  const GramFactor factor = coloring_to_kernel(path, {1, 2});
  for (int i = 0; i < 3; ++i) {
    CHECK(factor.column_norm(i) == doctest::Approx(1.0));
  }
  const LiftedInstance lift = lift_to_hypergraph(path);
  CHECK(log_likelihood(factor_to_kernel(factor), lift.dataset) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimal_value closed forms") {
  CHECK(optimal_value(triangle()) ==
        doctest::Approx(3.0 * std::log(3.0) - 2.0 * std::log(2.0)));
  CHECK(optimal_value(SimpleGraph{2, {{0, 1}}}) == doctest::Approx(0.0));
  // Star K_{1,3}: center degree 3, leaves degree 1.
  CHECK(optimal_value(SimpleGraph{4, {{0, 1}, {0, 2}, {0, 3}}}) ==
        doctest::Approx(2.0 * std::log(3.0)));
  CHECK_THROWS_AS(optimal_value(SimpleGraph{3, {}}), DegenerateError);
}

TEST_CASE("coloring kernel achieves the optimal value") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 10; ++round) {
    // Random 3-partite graph: colorable by construction.
    const int n = 4 + static_cast<int>(rng() % 5);
    DiscreteColoring planted(n);
    for (int v = 0; v < n; ++v) planted[v] = 1 + static_cast<int>(rng() % 3);
    SimpleGraph g;
    g.vertex_count = n;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (planted[u] != planted[v] && rng() % 100 < 60) {
          g.edges.emplace_back(u, v);
        }
      }
    }
    if (g.edge_count() == 0) continue;
    const auto coloring = find_three_coloring(g);
    REQUIRE(coloring.has_value());
    const GramFactor factor = coloring_to_kernel(g, *coloring);
    const MarginalKernel kernel = factor_to_kernel(factor);
    const LiftedInstance lift = lift_to_hypergraph(g);
    CHECK(log_likelihood(kernel, lift.dataset) ==
          doctest::Approx(optimal_value(g)).epsilon(1e-9));

    // Top eigenvalue exactly one, diagonal exactly the lift frequencies.
    CHECK(validate_kernel(kernel).max_eigenvalue ==
          doctest::Approx(1.0).epsilon(1e-9));
    const auto deg = g.degrees();
    const int m = g.edge_count();
    for (int u = 0; u < g.vertex_count; ++u) {
      CHECK(kernel(u, u) ==
            doctest::Approx(static_cast<double>(deg[u]) / m).epsilon(1e-12));
    }
    for (int e = 0; e < m; ++e) {
      CHECK(kernel(g.vertex_count + e, g.vertex_count + e) ==
            doctest::Approx(1.0 / m).epsilon(1e-12));
    }
    for (const auto& sample : lift.dataset.samples()) {
      CHECK(point_probability(kernel, sample) ==
            doctest::Approx(subset_marginal(kernel, sample)).epsilon(1e-10));
    }
  }
}

TEST_CASE("vector_error") {
  VectorColoring same(3, Eigen::Vector3d::UnitZ());
  CHECK(vector_error(triangle(), same) == doctest::Approx(1.0));

  const VectorColoring axes = coloring_to_vectors({1, 2, 3});
  CHECK(vector_error(triangle(), axes) == doctest::Approx(0.0));

  const SimpleGraph edge{2, {{0, 1}}};
  VectorColoring tilted{Eigen::Vector3d::UnitX(),
                        Eigen::Vector3d(std::sqrt(0.5), std::sqrt(0.5), 0.0)};
  CHECK(vector_error(edge, tilted) == doctest::Approx(0.5));

  VectorColoring overlong{Eigen::Vector3d(2, 0, 0), Eigen::Vector3d(0, 1, 0)};
  CHECK_THROWS_AS(vector_error(edge, overlong), ValidationError);
}

TEST_CASE("zero vector error iff all edges orthogonal") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 20; ++round) {
    Eigen::Vector3d a = Eigen::Vector3d::Random().normalized();
    Eigen::Vector3d b = a.cross(Eigen::Vector3d::Random()).normalized();
    const SimpleGraph edge{2, {{0, 1}}};
    CHECK(vector_error(edge, {a, b}) <= 1e-12);
    const double angle = folded_angle(a, b);
    CHECK(std::abs(angle - kPi / 2.0) <= 1e-6);
  }
}

TEST_CASE("likelihood_from_angles matches the determinant route") {
  // Proper-coloring axes reproduce the optimum.
  const VectorColoring axes = coloring_to_vectors({1, 2, 3});
  CHECK(likelihood_from_angles(triangle(), axes).value ==
        doctest::Approx(optimal_value(triangle())).epsilon(1e-12));

  // Rotate one endpoint to pi/3 against its neighbor.
  VectorColoring tilted = axes;
  tilted[1] = Eigen::Vector3d(std::cos(kPi / 3.0), std::sin(kPi / 3.0), 0.0);
  const auto from_angles = likelihood_from_angles(triangle(), tilted);

  const GramFactor assembled = vectors_to_factor(triangle(), tilted);
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  const double via_dets =
      log_likelihood(factor_to_kernel(assembled), lift.dataset);
  CHECK(from_angles.value == doctest::Approx(via_dets).epsilon(1e-9));

  // Closed form: the tilted edge costs -(1/3) log sin^2(pi/3) extra, and
  // the other tilted-incident edge angle changed too; recompute directly.
  double manual = 3.0 * std::log(3.0);
  const auto deg = triangle().degrees();
  for (const auto& [u, v] : triangle().edges) {
    const double ip = std::abs(tilted[u].dot(tilted[v]));
    manual -= (std::log(2.0) + std::log(2.0) + std::log1p(-ip * ip)) / 3.0;
  }
  CHECK(from_angles.value == doctest::Approx(manual).epsilon(1e-12));

  // Parallel endpoints blow up.
  VectorColoring parallel = axes;
  parallel[1] = axes[0];
  const auto degenerate = likelihood_from_angles(triangle(), parallel);
  CHECK(std::isinf(degenerate.value));
  CHECK(degenerate.parallel_edges == std::vector<int>{0});
}

TEST_CASE("decoder params validation") {
  DecoderParams params;
  CHECK_NOTHROW(params.validate());
  params.good_edge_slack = params.axis_tolerance * 2.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
}

TEST_CASE("decode recovers the assignment from exact coloring vectors") {
  // Five variables so the block count supports a degree-8 expander.
  const char* dimacs = "p cnf 5 3\n1 2 3 0\n-1 4 5 0\n2 -3 4 0\n";
  const ReductionGraph g = small_reduction_graph(dimacs, 8, 21);
  const CnfFormula phi = parse_dimacs(dimacs);
  const auto assignment = solve_sat(phi);
  REQUIRE(assignment.has_value());

  const DiscreteColoring colors = assignment_to_coloring(g, *assignment);
  const VectorColoring vectors = coloring_to_vectors(colors);

  const DecodeResult exact = decode_assignment(g, vectors);
  CHECK(exact.satisfied_fraction == doctest::Approx(1.0));
  CHECK(exact.diagnostics.bad_edge_count == 0);
  CHECK(exact.diagnostics.region_violations.empty());
  CHECK(satisfied_fraction(phi, exact.assignment) == doctest::Approx(1.0));

  // Small angular noise must not change the outcome.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorColoring noisy = vectors;
  for (auto& v : noisy) {
    Eigen::Vector3d jitter(gauss(rng), gauss(rng), gauss(rng));
    jitter -= jitter.dot(v) * v;
    v = (v + 1e-3 * jitter.normalized()).normalized();
  }
  const DecodeResult wobbly = decode_assignment(g, noisy);
  CHECK(satisfied_fraction(phi, wobbly.assignment) == doctest::Approx(1.0));
}

TEST_CASE("decode fails when every edge is bad") {
  const ReductionGraph g = small_reduction_graph("p cnf 5 1\n1 2 3 0\n", 8, 21);
  const VectorColoring all_same(g.node_count(), Eigen::Vector3d::UnitZ());
  CHECK_THROWS_AS(decode_assignment(g, all_same), DecodeFailure);
}
