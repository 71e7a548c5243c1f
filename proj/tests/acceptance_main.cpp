// Acceptance suite: one integration check per shipped guarantee, each
// printed as a PASS/FAIL line with its measured quantity. Exit code 0 only
// when every criterion passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dppmle/reduction_graph.hpp"
#include "dppmle/cnf.hpp"
#include "dppmle/coloring.hpp"
#include "dppmle/diagonal.hpp"
#include "dppmle/expander.hpp"
#include "dppmle/kernel.hpp"
#include "dppmle/lift.hpp"
#include "dppmle/optimize.hpp"
#include "dppmle/rank3.hpp"
#include "oracles.hpp"

using namespace dppmle;

namespace {

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

class Criterion {
 public:
  explicit Criterion(std::string name)
      : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (first_failure_.empty()) first_failure_ = detail;
    }
  }

  ~Criterion() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    std::printf("%s %-55s (%lld ms)%s%s\n", ok_ ? "PASS" : "FAIL",
                name_.c_str(), static_cast<long long>(elapsed),
                ok_ ? "" : " -- ", ok_ ? "" : first_failure_.c_str());
    std::fflush(stdout);
    if (!ok_) ++failures;
  }

 private:
  std::string name_;
  bool ok_ = true;
  std::string first_failure_;
  std::chrono::steady_clock::time_point start_;
};

SimpleGraph triangle() { return SimpleGraph{3, {{0, 1}, {1, 2}, {0, 2}}}; }

SimpleGraph path4() { return SimpleGraph{4, {{0, 1}, {1, 2}, {2, 3}}}; }

std::string fmt(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.3e", x);
  return buffer;
}

// 1. Normalization and marginal consistency on random kernels.
void criterion_normalization() {
  Criterion crit("1 normalization & marginal consistency");
  std::mt19937_64 rng(1001);
  for (int round = 0; round < 100; ++round) {
    const int n = 2 + static_cast<int>(rng() % 9);  // 2..10
    const MarginalKernel k = testing::random_kernel(n, 5000 + round);
    const auto table = enumerate_distribution(k);
    double total = 0.0;
    for (double p : table) total += p;
    crit.check(std::abs(total - 1.0) <= 1e-8,
               "total " + fmt(total) + " at n=" + std::to_string(n));

    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> s;
      std::uint32_t mask = 0;
      for (int i = 0; i < n; ++i) {
        if (coin(rng)) {
          s.push_back(i);
          mask |= 1u << i;
        }
      }
      double containment = 0.0;
      for (std::uint32_t sub = 0; sub < table.size(); ++sub) {
        if ((sub & mask) == mask) containment += table[sub];
      }
      const double marginal = subset_marginal(k, s);
      crit.check(std::abs(containment - marginal) <= 1e-8,
                 "marginal gap " + fmt(std::abs(containment - marginal)));
    }
  }
}

// 2. Coloring kernels achieve the closed-form optimum with unit top
// eigenvalue.
void criterion_completeness() {
  Criterion crit("2 coloring kernel completeness equality");
  std::vector<SimpleGraph> graphs{triangle(), path4()};
  std::mt19937_64 rng(2002);
  while (graphs.size() < 22) {
    const int n = 4 + static_cast<int>(rng() % 5);  // 4..8
    DiscreteColoring planted(n);
    for (int v = 0; v < n; ++v) planted[v] = 1 + static_cast<int>(rng() % 3);
    SimpleGraph g;
    g.vertex_count = n;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (planted[u] != planted[v] && rng() % 100 < 55) g.edges.emplace_back(u, v);
      }
    }
    if (g.edge_count() == 0) continue;
    graphs.push_back(g);
  }

  for (const auto& g : graphs) {
    const auto coloring = find_three_coloring(g);
    crit.check(coloring.has_value(), "no coloring found");
    if (!coloring) continue;
    const GramFactor factor = coloring_to_kernel(g, *coloring);
    const MarginalKernel kernel = factor_to_kernel(factor);
    const LiftedInstance lift = lift_to_hypergraph(g);
    const double likelihood = log_likelihood(kernel, lift.dataset);
    const double optimum = optimal_value(g);
    crit.check(std::abs(likelihood - optimum) <= 1e-9,
               "likelihood gap " + fmt(std::abs(likelihood - optimum)));
    const auto report = validate_kernel(kernel);
    crit.check(std::abs(report.max_eigenvalue - 1.0) <= 1e-9,
               "top eigenvalue " + fmt(report.max_eigenvalue));
  }

  const GramFactor k3 = coloring_to_kernel(triangle(), {1, 2, 3});
  const double k3_value = log_likelihood(
      factor_to_kernel(k3), lift_to_hypergraph(triangle()).dataset);
  crit.check(std::abs(k3_value - 1.909543) <= 1e-6,
             "triangle value " + fmt(k3_value));
}

// 3. Optimizer reproduces the diagonal structure and exhibited optima.
void criterion_oracle_diagonal() {
  Criterion crit("3 optimizer diagonal structure & optima");
  OptimizerConfig config;
  config.restarts = 20;
  config.seed = 33;

  {
    const auto check = verify_frequency_diagonal(Dataset(3, {{0}, {1}, {2}}), config);
    crit.check(check.pass, "singleton deviation " + fmt(check.max_deviation));
  }
  {
    const auto check =
        verify_frequency_diagonal(Dataset(3, {{0, 1}, {1, 2}}), config);
    crit.check(check.pass, "pair deviation " + fmt(check.max_deviation));
  }
  {
    const LiftedInstance lift = lift_to_hypergraph(triangle());
    OptimizerConfig lift_config = config;
    lift_config.rank = 3;
    const auto check = verify_frequency_diagonal(lift.dataset, lift_config);
    crit.check(check.pass, "lift deviation " + fmt(check.max_deviation));
    const double optimum = optimal_value(triangle());
    crit.check(std::abs(check.report.best_objective - optimum) <= 1e-3,
               "lift objective gap " +
                   fmt(check.report.best_objective - optimum));
    crit.check(check.report.best_objective >= optimum - 1e-9,
               "objective below the optimum");
  }
  {
    const auto report = optimize(Dataset(2, {{0}, {1}}), config);
    crit.check(std::abs(report.best_objective - std::log(2.0)) <= 1e-3,
               "two-singleton gap " +
                   fmt(report.best_objective - std::log(2.0)));
    crit.check(report.best_objective >= std::log(2.0) - 1e-9,
               "objective below log 2");
  }
}

// 4. Diagonal-kernel certificates on random datasets.
void criterion_certificates() {
  Criterion crit("4 approximation certificates");
  std::mt19937_64 rng(4004);
  int produced = 0;
  std::uint64_t seed = 0;
  while (produced < 200) {
    ++seed;
    const int n = 2 + static_cast<int>(rng() % 7);   // 2..8
    const int m = 2 + static_cast<int>(rng() % 11);  // 2..12
    const Dataset raw = testing::random_dataset(n, m, 9000 + seed);
    const FactoredDataset factored = factor_full_elements(raw);
    const EmpiricalStats stats = empirical_stats(factored.residual);
    if (stats.max_frequency == 0 || stats.max_frequency >= stats.sample_count) {
      continue;
    }
    ++produced;
    const ApproxCertificate cert = certificate(factored.residual);
    crit.check(cert.lower_bound <= cert.diag_log_likelihood + 1e-12,
               "bound above likelihood");
    crit.check(cert.achieved_ratio <= cert.ratio_bound_conditional + 1e-9,
               "ratio " + fmt(cert.achieved_ratio) + " above bound " +
                   fmt(cert.ratio_bound_conditional));
  }

  const ApproxCertificate tight = certificate(Dataset(2, {{0}, {1}}));
  crit.check(std::abs(tight.achieved_ratio - 2.0) <= 1e-9,
             "two-singleton ratio " + fmt(tight.achieved_ratio));
  crit.check(std::abs(tight.ratio_bound_conditional - 2.0) <= 1e-9,
             "two-singleton bound " + fmt(tight.ratio_bound_conditional));
}

// 5. Reduction integrity: exact tallies, degree cap, and colorability in
// both directions at desk scale.
void criterion_reduction() {
  Criterion crit("5 reduction integrity");
  std::mt19937_64 rng(5005);
  int produced = 0;
  while (produced < 50) {
    const int n = 5 + static_cast<int>(rng() % 6);  // 5..10
    const int clause_target = 2 + static_cast<int>(rng() % 6);
    std::vector<int> occurrences(n, 0);
    std::string text;
    int written = 0;
    for (int c = 0; c < clause_target; ++c) {
      std::vector<int> vars(n);
      std::iota(vars.begin(), vars.end(), 1);
      std::shuffle(vars.begin(), vars.end(), rng);
      if (occurrences[vars[0] - 1] >= 4 || occurrences[vars[1] - 1] >= 4 ||
          occurrences[vars[2] - 1] >= 4) {
        continue;
      }
      for (int p = 0; p < 3; ++p) {
        ++occurrences[vars[p] - 1];
        text += std::to_string(rng() % 2 ? vars[p] : -vars[p]) + " ";
      }
      text += "0\n";
      ++written;
    }
    if (written == 0) continue;
    const CnfFormula phi = parse_dimacs(text);
    if (2 * phi.max_occurrences * phi.variable_count <= 8) continue;
    ++produced;
    const ExpanderSpec expander = build_expander(
        2 * phi.max_occurrences * phi.variable_count, 8, 7000 + produced);
    const ReductionGraph graph = build_reduction_graph(phi, expander);
    const auto audit = count_audit(graph);
    crit.check(audit.exact_match, "count audit mismatch: " + audit.mismatch);
    crit.check(audit.max_degree <= audit.degree_cap,
               "degree " + std::to_string(audit.max_degree) + " above cap");
  }

  // Satisfiable direction at small n: the backtracker must color the graph.
  int colored = 0;
  for (std::uint64_t seed = 1; colored < 4; ++seed) {
    const int n = 5 + static_cast<int>(seed % 2);
    std::mt19937_64 gen(seed * 31 + 7);
    std::string text;
    for (int c = 0; c < 4; ++c) {
      std::vector<int> vars(n);
      std::iota(vars.begin(), vars.end(), 1);
      std::shuffle(vars.begin(), vars.end(), gen);
      for (int p = 0; p < 3; ++p) {
        text += std::to_string(gen() % 2 ? vars[p] : -vars[p]) + " ";
      }
      text += "0\n";
    }
    const CnfFormula phi = parse_dimacs(text);
    const auto sat = solve_sat(phi);
    if (!sat) continue;
    ++colored;
    const ExpanderSpec expander = build_expander(
        2 * std::max(1, phi.max_occurrences) * phi.variable_count, 8,
        800 + seed);
    const ReductionGraph graph = build_reduction_graph(phi, expander);
    const auto coloring = find_three_coloring(graph.to_simple_graph());
    crit.check(coloring.has_value(), "satisfiable formula gave uncolorable graph");
    if (coloring) {
      crit.check(check_proper(graph.to_simple_graph(), *coloring).proper,
                 "improper coloring returned");
    }
  }

  // Unsatisfiable direction: all eight sign patterns on three variables.
  std::string unsat_text;
  for (int mask = 0; mask < 8; ++mask) {
    for (int v = 0; v < 3; ++v) {
      unsat_text += std::to_string((mask >> v) & 1 ? -(v + 1) : (v + 1)) + " ";
    }
    unsat_text += "0\n";
  }
  const CnfFormula unsat = parse_dimacs(unsat_text);
  crit.check(!solve_sat(unsat).has_value(), "oracle thinks the pattern is sat");
  const ExpanderSpec expander =
      build_expander(2 * unsat.max_occurrences * 3, 8, 66);
  const ReductionGraph graph = build_reduction_graph(unsat, expander);
  const auto coloring = find_three_coloring(graph.to_simple_graph());
  crit.check(!coloring.has_value(),
             "unsatisfiable formula produced a 3-colorable graph");
}

// 6. Full pipeline equality plus decoding, with and without noise.
void criterion_pipeline() {
  Criterion crit("6 end-to-end pipeline & decoding");
  const char* dimacs = "p cnf 5 3\n1 2 3 0\n-1 4 5 0\n2 -3 4 0\n";
  const CnfFormula phi = parse_dimacs(dimacs);
  const auto assignment = solve_sat(phi);
  crit.check(assignment.has_value(), "pipeline formula unsatisfiable");
  if (!assignment) return;

  const ExpanderSpec expander =
      build_expander(2 * std::max(1, phi.max_occurrences) * 5, 8, 606);
  const ReductionGraph graph = build_reduction_graph(phi, expander);
  const DiscreteColoring coloring = assignment_to_coloring(graph, *assignment);
  const SimpleGraph simple = graph.to_simple_graph();
  const GramFactor factor = coloring_to_kernel(simple, coloring);
  const LiftedInstance lift = lift_to_hypergraph(simple);
  const double likelihood = log_likelihood(factor, lift.dataset);
  const double optimum = optimal_value(simple);
  crit.check(std::abs(likelihood - optimum) <= 1e-9,
             "pipeline gap " + fmt(std::abs(likelihood - optimum)));

  const VectorColoring vectors = coloring_to_vectors(coloring);
  const DecodeResult exact = decode_assignment(graph, vectors);
  crit.check(satisfied_fraction(phi, exact.assignment) == 1.0,
             "exact decode satisfied " + fmt(exact.satisfied_fraction));

  std::mt19937_64 rng(6006);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorColoring noisy = vectors;
  for (auto& v : noisy) {
    Eigen::Vector3d jitter(gauss(rng), gauss(rng), gauss(rng));
    jitter -= jitter.dot(v) * v;
    v = (v + 1e-3 * jitter.normalized()).normalized();
  }
  const DecodeResult wobbly = decode_assignment(graph, noisy);
  crit.check(satisfied_fraction(phi, wobbly.assignment) == 1.0,
             "noisy decode satisfied " + fmt(wobbly.satisfied_fraction));
}

// 7. Rank-3 projection: fixed point, optimum floor, residual oracle.
void criterion_projection() {
  Criterion crit("7 rank-3 projection");
  const LiftedInstance lift = lift_to_hypergraph(triangle());
  const GramFactor exact = coloring_to_kernel(triangle(), {1, 2, 3});

  {
    const auto [kernel, report] = project_to_rank3(exact, lift);
    crit.check(std::abs(report.output_likelihood - report.optimal) <= 1e-9,
               "fixed point gap " +
                   fmt(std::abs(report.output_likelihood - report.optimal)));
    crit.check(report.beta == 1.0, "beta " + fmt(report.beta));
  }

  std::mt19937_64 rng(7007);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int round = 0; round < 5; ++round) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(6, 6);
    q.topRows(3) = exact.columns();
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) q(r, c) += 0.02 * gauss(rng);
    }
    const auto [kernel, report] = project_to_rank3(GramFactor(q), lift);
    crit.check(report.output_likelihood >= report.optimal - 1e-9,
               "projection dipped below the optimum by " +
                   fmt(report.optimal - report.output_likelihood));
  }

  // Residual mass equals the Gram-determinant ratio on random factors.
  for (int round = 0; round < 10; ++round) {
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
    const double residual = residual_mass(factor, anchor);
    crit.check(std::abs(residual - ratio_sum) <= 1e-8,
               "residual gap " + fmt(std::abs(residual - ratio_sum)));
  }
}

// 8. Analytic gradient against central finite differences.
void criterion_gradient() {
  Criterion crit("8 gradient correctness");
  std::mt19937_64 rng(8008);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int produced = 0;
  std::uint64_t attempt = 0;
  while (produced < 50) {
    ++attempt;
    const int n = 3 + static_cast<int>(rng() % 4);  // 3..6
    const Dataset data = testing::random_dataset(n, 5, 8800 + attempt);
    const int rank = n;  // samples larger than the rank are always singular
    Eigen::MatrixXd q(rank, n);
    for (int r = 0; r < rank; ++r) {
      for (int c = 0; c < n; ++c) q(r, c) = gauss(rng);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
    q *= 0.9 / svd.singularValues()(0);
    const GradientResult g = likelihood_gradient(data, q);
    if (!g.singular_samples.empty()) continue;
    bool well_conditioned = true;
    for (const auto& sample : data.samples()) {
      Eigen::MatrixXd m = q.transpose() * q;
      std::vector<char> in(n, 0);
      for (int i : sample) in[i] = 1;
      for (int i = 0; i < n; ++i) {
        if (!in[i]) m(i, i) -= 1.0;
      }
      if (std::abs(m.determinant()) < 1e-5) well_conditioned = false;
    }
    if (!well_conditioned) continue;
    ++produced;

    const double h = 1e-5;
    Eigen::MatrixXd fd(rank, n);
    for (int r = 0; r < rank; ++r) {
      for (int c = 0; c < n; ++c) {
        Eigen::MatrixXd plus = q;
        Eigen::MatrixXd minus = q;
        plus(r, c) += h;
        minus(r, c) -= h;
        fd(r, c) = (penalized_objective(data, plus) -
                    penalized_objective(data, minus)) /
                   (2.0 * h);
      }
    }
    const double rel = (g.gradient - fd).norm() / std::max(1e-12, fd.norm());
    crit.check(rel <= 1e-5, "relative error " + fmt(rel));
  }
}

// 9. Geometry: the frame-pinning claim and the symmetric sphere argmax.
void criterion_geometry() {
  Criterion crit("9 geometry claims");
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> t_draw(1e-4, 0.2);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  int violations = 0;
  for (int round = 0; round < 100000; ++round) {
    const double t = t_draw(rng);
    Eigen::Vector3d b;
    do {
      b = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
    } while (b.norm() < 1e-3 || b.norm() > 1.0);
    b.normalize();
    Eigen::Vector3d p = b.cross(Eigen::Vector3d::UnitX());
    if (p.norm() < 1e-6) p = b.cross(Eigen::Vector3d::UnitY());
    p.normalize();
    const Eigen::Vector3d qv = b.cross(p);
    std::uniform_real_distribution<double> within(-t, t);
    const double sc = within(rng);
    const double phic = angle(rng);
    const Eigen::Vector3d c =
        sc * b +
        std::sqrt(1.0 - sc * sc) * (std::cos(phic) * p + std::sin(phic) * qv);
    auto place = [&](double s, double g) {
      const double r = std::sqrt(1.0 - s * s);
      const double cosine = (g - s * sc) / (r * std::sqrt(1.0 - sc * sc));
      const double offset = std::acos(std::clamp(cosine, -1.0, 1.0));
      const double phi = phic + (rng() % 2 == 0 ? offset : -offset);
      return Eigen::Vector3d(s * b +
                             r * (std::cos(phi) * p + std::sin(phi) * qv));
    };
    const Eigen::Vector3d a = place(within(rng), within(rng));
    const Eigen::Vector3d d = place(within(rng), within(rng));
    if (std::abs(a.dot(d)) < 1.0 - 5.0 * t * t) ++violations;
  }
  crit.check(violations == 0,
             std::to_string(violations) + " frame-pinning violations");

  double achieved = 0.0;
  sphere_argmax_min_sin2({Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                          Eigen::Vector3d::UnitZ()},
                         {}, &achieved);
  crit.check(std::abs(achieved - 2.0 / 3.0) <= 1e-3,
             "symmetric argmax " + fmt(achieved));
}

}  // namespace

int main() {
  criterion_normalization();
  criterion_completeness();
  criterion_oracle_diagonal();
  criterion_certificates();
  criterion_reduction();
  criterion_pipeline();
  criterion_projection();
  criterion_gradient();
  criterion_geometry();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
