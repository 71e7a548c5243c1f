#ifndef DPPMLE_OPTIMIZE_HPP
#define DPPMLE_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dppmle/dataset.hpp"
#include "dppmle/kernel.hpp"

namespace dppmle {

/// Numerical maximum-likelihood search over kernels of bounded ground-set
/// size: projected gradient descent on the factor parametrization
/// K = Q^T Q with the spectral constraint sigma_1(Q) <= 1.
struct OptimizerConfig {
  int rank = 0;  // 0 means full rank (r = n)
  int restarts = 20;
  int max_iterations = 3000;
  double initial_step = 0.5;
  double backtrack_factor = 0.5;
  double tolerance = 1e-10;  // convergence threshold on the objective
  std::uint64_t seed = 1;
  double underflow_floor = 1e-300;
};

struct RestartTrace {
  std::vector<double> objectives;  // accepted iterates, non-increasing
  double final_objective = 0.0;
  double projected_gradient_norm = 0.0;
  bool diverged = false;  // ended with a dead sample
};

struct OptReport {
  double best_objective = 0.0;
  GramFactor best_factor;
  MarginalKernel best_kernel;
  int best_restart = -1;
  std::vector<RestartTrace> traces;
  Eigen::VectorXd diagonal_deviation;  // K_ii - a_i / m over the best kernel
  bool failed = false;                 // every restart diverged
};

/// Deterministic per seed; guarded at 12 ground-set elements.
OptReport optimize(const Dataset& data, const OptimizerConfig& config);

struct GradientResult {
  Eigen::MatrixXd gradient;
  std::vector<int> singular_samples;  // samples whose matrix was singular
};

/// Analytic gradient of the log-likelihood in Q:
///   d/dQ [-(1/m) sum_t log |det(Q^T Q - I_complement)|]
///     = -(2/m) sum_t Q M_t^{-1}.
GradientResult likelihood_gradient(const Dataset& data, const Eigen::MatrixXd& q,
                                   double underflow_floor = 1e-300);

/// Objective used inside line search: dead samples contribute the log of
/// the underflow floor as a large finite penalty instead of infinity, so
/// the search can move off rank-deficient iterates.
double penalized_objective(const Dataset& data, const Eigen::MatrixXd& q,
                           double underflow_floor = 1e-300);

/// Norm of the gradient with outward-pointing components removed along
/// singular directions sitting on the sigma = 1 boundary; zero at
/// constrained stationary points.
double projected_gradient_norm(const Eigen::MatrixXd& q,
                               const Eigen::MatrixXd& gradient,
                               double boundary_tol = 1e-7);

struct DiagonalCheck {
  Eigen::VectorXd kernel_diagonal;
  Eigen::VectorXd empirical_frequency;
  double max_deviation = 0.0;
  bool pass = false;  // max deviation at most 1e-2
  OptReport report;
};

/// Optimizes and compares the best kernel's diagonal against the
/// empirical frequencies a_i / m. Guarded at 8 elements.
DiagonalCheck verify_frequency_diagonal(const Dataset& data,
                                      OptimizerConfig config = {});

}  // namespace dppmle

#endif  // DPPMLE_OPTIMIZE_HPP
