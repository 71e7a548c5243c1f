#include <doctest.h>

#include <cmath>
#include <random>

#include "dppmle/coloring.hpp"
#include "dppmle/errors.hpp"
#include "dppmle/kernel.hpp"
#include "dppmle/lift.hpp"
#include "dppmle/rank3.hpp"
#include "oracles.hpp"

using namespace dppmle;

namespace {

SimpleGraph triangle() { return SimpleGraph{3, {{0, 1}, {1, 2}, {0, 2}}}; }

GramFactor triangle_factor() {
  return coloring_to_kernel(triangle(), {1, 2, 3});
}

// Rotates the direction of one column by the given angle inside a plane.
GramFactor rotate_column(const GramFactor& factor, int column, double angle) {
  Eigen::MatrixXd q = factor.columns();
  Eigen::Vector3d dir = q.col(column).normalized();
  Eigen::Vector3d other =
      std::abs(dir.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d ortho = dir.cross(other).normalized().cross(dir).normalized();
  q.col(column) =
      q.col(column).norm() * (std::cos(angle) * dir + std::sin(angle) * ortho);
  return GramFactor(q);
}

}  // namespace

TEST_CASE("find_anchor_triple on the exact factor") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  const AnchorTriple anchor = find_anchor_triple(triangle_factor(), lift.dataset);
  CHECK(anchor.sample_index == 0);  // ties break to the first sample
  CHECK(anchor.ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("anchor avoids a perturbed hyperedge") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  // Rotating vertex 0 by 10 degrees hurts hyperedges 0 and 2.
  const GramFactor perturbed =
      rotate_column(triangle_factor(), 0, 10.0 * 3.14159265 / 180.0);
  const AnchorTriple anchor = find_anchor_triple(perturbed, lift.dataset);
  CHECK(anchor.sample_index == 1);
  CHECK(anchor.ratio < 1.0 + 1e-12);
  CHECK(anchor.ratio >= std::exp(-(log_likelihood(factor_to_kernel(perturbed),
                                                  lift.dataset) -
                                   optimal_value(triangle()))) -
                            1e-9);
}

TEST_CASE("anchor selection rejects low-rank factors") {
  Eigen::MatrixXd q(2, 6);
  q.setRandom();
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  CHECK_THROWS_AS(find_anchor_triple(GramFactor(q), lift.dataset),
                  StructuralError);
}

TEST_CASE("residual_mass") {
  SUBCASE("exact coloring factor has zero residual") {
    const LiftedInstance lift = lift_to_hypergraph(triangle());
    const auto& anchor = lift.dataset.sample(0);
    CHECK(residual_mass(triangle_factor(), anchor) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("a small fourth-dimension column contributes its squared norm") {
    const GramFactor base = triangle_factor();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 7);
    q.topLeftCorner(3, 6) = base.columns();
    const double eps = 0.05;
    q(3, 6) = eps;
    const std::vector<int> anchor{0, 1, 3};
    CHECK(residual_mass(GramFactor(q), anchor) ==
          doctest::Approx(eps * eps).epsilon(1e-12));
  }

  SUBCASE("matches the brute-force determinant ratio on random factors") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int round = 0; round < 8; ++round) {
      Eigen::MatrixXd q(5, 8);
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 8; ++c) q(r, c) = 0.5 * gauss(rng);
      }
      const GramFactor factor(q);
      const std::vector<int> anchor{0, 1, 2};
      const Eigen::MatrixXd k = q.transpose() * q;
      const double det_s = testing::principal_minor_oracle(k, anchor);
      if (std::abs(det_s) < 1e-10) continue;
      double ratio_sum = 0.0;
      for (int i = 3; i < 8; ++i) {
        std::vector<int> extended = anchor;
        extended.push_back(i);
        ratio_sum += testing::principal_minor_oracle(k, extended) / det_s;
      }
      CHECK(residual_mass(factor, anchor) ==
            doctest::Approx(ratio_sum).epsilon(1e-8));
    }
  }

  SUBCASE("degenerate anchor span is rejected") {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 4);
    q(0, 0) = 1.0;
    q(0, 1) = 1.0;
    q(1, 2) = 1.0;
    q(2, 3) = 1.0;
    CHECK_THROWS_AS(residual_mass(GramFactor(q), std::vector<int>{0, 1, 2}),
                    DegenerateError);
  }
}

TEST_CASE("classify_bad") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());

  SUBCASE("exact factor: all sets empty") {
    const auto& anchor = lift.dataset.sample(0);
    const BadSets bad =
        classify_bad(triangle_factor(), lift, anchor, ProjectionParams{});
    CHECK(bad.bad_edges.empty());
    CHECK(bad.endpoint_bad.empty());
    CHECK(bad.residual_bad.empty());
  }

  SUBCASE("a nearly parallel edge lands in the bad-edge set") {
    ProjectionParams params;
    params.epsilon0 = 0.1;
    // Angle asin(sqrt(eps0))/2: sin^2 falls below eps0.
    const double angle = std::asin(std::sqrt(params.epsilon0)) / 2.0;
    GramFactor factor = triangle_factor();
    Eigen::MatrixXd q = factor.columns();
    // Move vertex 1 to be almost parallel with vertex 0.
    q.col(1) = q.col(1).norm() *
               (std::cos(angle) * Eigen::Vector3d(q.col(0)).normalized() +
                std::sin(angle) * Eigen::Vector3d::UnitY());
    const GramFactor moved(q);
    const auto& anchor = lift.dataset.sample(1);
    const BadSets bad = classify_bad(moved, lift, anchor, params);
    REQUIRE(bad.bad_edges.size() == 1);
    CHECK(bad.bad_edges[0] == 0);  // edge (0, 1)
    CHECK(bad.endpoint_bad == std::vector<int>{0, 1});
  }

  SUBCASE("column with one fifth of its mass off the span joins B2") {
    ProjectionParams params;
    params.delta_override = 0.01;  // threshold sqrt(delta) = 0.1
    GramFactor base = triangle_factor();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 6);
    q.topRows(3) = base.columns();
    // Vertex 2: put 20% of the squared norm into the fourth dimension.
    const double norm = base.column_norm(2);
    q.col(2).setZero();
    q(2, 2) = norm * std::sqrt(0.8);
    q(3, 2) = norm * std::sqrt(0.2);
    const std::vector<int> anchor{0, 1, 3};
    const BadSets bad = classify_bad(GramFactor(q), lift, anchor, params);
    CHECK(bad.residual_bad == std::vector<int>{2});
  }
}

TEST_CASE("sphere search maximizes the worst sine") {
  SUBCASE("one occupied direction") {
    double achieved = 0.0;
    sphere_argmax_min_sin2({Eigen::Vector3d::UnitX()}, {}, &achieved);
    CHECK(achieved == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("two occupied directions leave the cross product") {
    double achieved = 0.0;
    const Eigen::Vector3d z = sphere_argmax_min_sin2(
        {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()}, {}, &achieved);
    CHECK(achieved == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(z.z()) == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("three orthonormal directions cap the value at two thirds") {
    double achieved = 0.0;
    const Eigen::Vector3d z = sphere_argmax_min_sin2(
        {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
         Eigen::Vector3d::UnitZ()},
        {}, &achieved);
    CHECK(achieved == doctest::Approx(2.0 / 3.0).epsilon(1.5e-3));
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(z(c)) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.05));
    }
  }
  SUBCASE("refinement passes never lower the achieved value") {
    const std::vector<Eigen::Vector3d> dirs{
        Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.3, 0.9, 0).normalized(),
        Eigen::Vector3d(0.2, 0.4, 0.89).normalized()};
    double previous = -1.0;
    for (int passes = 0; passes <= 4; ++passes) {
      SphereSearchParams params;
      params.refine_passes = passes;
      double achieved = 0.0;
      sphere_argmax_min_sin2(dirs, params, &achieved);
      CHECK(achieved >= previous - 1e-15);
      previous = achieved;
    }
  }
}

TEST_CASE("rescale_and_assemble") {
  double beta = 0.0;
  rescale_and_assemble(triangle_factor(), &beta);
  CHECK(beta == doctest::Approx(1.0));

  Eigen::MatrixXd q = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  const MarginalKernel k = rescale_and_assemble(GramFactor(q), &beta);
  CHECK(beta == doctest::Approx(0.25));
  CHECK(validate_kernel(k).max_eigenvalue <= 1.0 + 1e-12);
}

TEST_CASE("project_to_rank3 fixed point on exact kernels") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  const auto [kernel, report] = project_to_rank3(triangle_factor(), lift);
  CHECK(report.early_exit);
  CHECK(report.beta == doctest::Approx(1.0));
  CHECK(report.output_likelihood ==
        doctest::Approx(optimal_value(triangle())).epsilon(1e-9));
  CHECK((kernel.matrix() -
         factor_to_kernel(triangle_factor()).matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("projection never drops below the optimum") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  std::mt19937_64 rng(77);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int round = 0; round < 6; ++round) {
    // Full-rank factor: exact directions plus small noise in 6 dimensions.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(6, 6);
    q.topRows(3) = triangle_factor().columns();
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) q(r, c) += 0.01 * gauss(rng);
    }
    const GramFactor factor(q);
    const auto [kernel, report] = project_to_rank3(factor, lift);
    CHECK_FALSE(report.early_exit);
    CHECK(report.output_likelihood >= optimal_value(triangle()) - 1e-9);
    CHECK(validate_kernel(kernel).max_eigenvalue <= 1.0 + 1e-9);
  }
}

TEST_CASE("norm handling in greedy reassignment") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  // Force vertex 1 bad through a rotation toward vertex 0.
  ProjectionParams params;
  params.epsilon0 = 0.1;
  GramFactor factor = triangle_factor();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(5, 6);
  q.topRows(3) = factor.columns();
  const double angle = 0.05;
  q.col(1) = Eigen::VectorXd::Zero(5);
  q(0, 1) = std::cos(angle) * std::sqrt(2.0 / 3.0);
  q(1, 1) = std::sin(angle) * std::sqrt(2.0 / 3.0);
  // Give vertex 2 an off-span component so B2 is populated too.
  q(4, 2) = 0.4 * std::sqrt(2.0 / 3.0);
  q(2, 2) = std::sqrt(2.0 / 3.0 - q(4, 2) * q(4, 2));
  const GramFactor wide(q);

  const std::vector<int> anchor = lift.dataset.sample(1);
  const Eigen::MatrixXd basis = anchor_basis(wide, anchor);
  params.delta_override = 0.04;
  const BadSets bad = classify_bad(wide, lift, anchor, params);
  REQUIRE(!bad.bad_vertices.empty());

  ReassignReport reassign;
  const GramFactor q3 = greedy_reassign(wide, lift, basis, bad, {}, &reassign);
  CHECK(q3.rank() == 3);
  for (int v : bad.bad_vertices) {
    CHECK(q3.column_norm(v) ==
          doctest::Approx(wide.column_norm(v)).epsilon(1e-14));
  }
  for (int i = 0; i < q3.ground_set_size(); ++i) {
    CHECK(q3.column_norm(i) <= wide.column_norm(i) + 1e-12);
  }
  CHECK(reassign.tau_hat > 0.0);
}

TEST_CASE("rank-3 inputs pass through with only the beta clamp") {
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  Eigen::MatrixXd q = 1.5 * triangle_factor().columns();
  const auto [kernel, report] = project_to_rank3(GramFactor(q), lift);
  CHECK(report.early_exit);
  CHECK(report.beta == doctest::Approx(1.0 / 2.25));
}
