#include "dppmle/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

Eigen::MatrixXd clip_spectrum(const Eigen::MatrixXd& q) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 1.0) return q;
  for (int i = 0; i < sigma.size(); ++i) sigma(i) = std::min(sigma(i), 1.0);
  return svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

// M_t = Q^T Q - I_complement for sample t, restricted to nothing: full size.
Eigen::MatrixXd sample_matrix(const Eigen::MatrixXd& q,
                              const std::vector<int>& sample) {
  const int n = static_cast<int>(q.cols());
  Eigen::MatrixXd m = q.transpose() * q;
  std::vector<char> inside(n, 0);
  for (int i : sample) inside[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (!inside[i]) m(i, i) -= 1.0;
  }
  return m;
}

}  // namespace

double penalized_objective(const Dataset& data, const Eigen::MatrixXd& q,
                           double underflow_floor) {
  double total = 0.0;
  for (const auto& sample : data.samples()) {
    const Eigen::MatrixXd m = sample_matrix(q, sample);
    const double det =
        std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant());
    total += std::log(std::max(det, underflow_floor));
  }
  return -total / static_cast<double>(data.sample_count());
}

GradientResult likelihood_gradient(const Dataset& data, const Eigen::MatrixXd& q,
                                   double underflow_floor) {
  GradientResult result;
  result.gradient = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  const double m_count = static_cast<double>(data.sample_count());
  for (int t = 0; t < data.sample_count(); ++t) {
    const Eigen::MatrixXd m = sample_matrix(q, data.sample(t));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double det = std::abs(lu.determinant());
    if (det <= underflow_floor || !std::isfinite(det)) {
      result.singular_samples.push_back(t);
      continue;
    }
    const Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) {
      result.singular_samples.push_back(t);
      continue;
    }
    result.gradient.noalias() -= (2.0 / m_count) * (q * inv);
  }
  return result;
}

double projected_gradient_norm(const Eigen::MatrixXd& q,
                               const Eigen::MatrixXd& gradient,
                               double boundary_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd projected = gradient;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) < 1.0 - boundary_tol) continue;
    const Eigen::MatrixXd normal =
        svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
    const double along = (gradient.array() * normal.array()).sum();
    // Descent moves along -gradient; drop the component pushing outward.
    if (along < 0.0) projected -= along * normal;
  }
  return projected.norm();
}

OptReport optimize(const Dataset& data, const OptimizerConfig& config) {
  const int n = data.ground_set_size();
  if (n > 12) {
    throw SizeGuardError("numerical search guarded at 12 elements, got " +
                         std::to_string(n));
  }
  const int rank = config.rank > 0 ? std::min(config.rank, n) : n;

  OptReport report;
  report.best_objective = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < config.restarts; ++restart) {
    std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ULL *
                                          static_cast<std::uint64_t>(restart));
    std::uniform_real_distribution<double> uniform(-1.0 / std::sqrt(n),
                                                   1.0 / std::sqrt(n));
    Eigen::MatrixXd q(rank, n);
    for (int r = 0; r < rank; ++r) {
      for (int c = 0; c < n; ++c) q(r, c) = uniform(rng);
    }
    q = clip_spectrum(q);

    RestartTrace trace;
    double objective = penalized_objective(data, q, config.underflow_floor);
    trace.objectives.push_back(objective);
    double step = config.initial_step;
    int stale = 0;

    Eigen::MatrixXd gradient;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
      const GradientResult g =
          likelihood_gradient(data, q, config.underflow_floor);
      gradient = g.gradient;
      if (gradient.norm() == 0.0) break;

      bool accepted = false;
      double trial_step = step;
      for (int shrink = 0; shrink < 45; ++shrink) {
        const Eigen::MatrixXd candidate = clip_spectrum(q - trial_step * gradient);
        const double value =
            penalized_objective(data, candidate, config.underflow_floor);
        if (value < objective - 1e-15) {
          q = candidate;
          const double drop = objective - value;
          objective = value;
          trace.objectives.push_back(objective);
          step = std::min(trial_step * 1.5, 1e3);
          accepted = true;
          stale = drop <= config.tolerance * std::max(1.0, std::abs(value))
                      ? stale + 1
                      : 0;
          break;
        }
        trial_step *= config.backtrack_factor;
      }
      if (!accepted || stale >= 3) break;
    }

    trace.final_objective = objective;
    const GradientResult g_final =
        likelihood_gradient(data, q, config.underflow_floor);
    trace.projected_gradient_norm = projected_gradient_norm(q, g_final.gradient);
    trace.diverged = !g_final.singular_samples.empty();

    if (objective < report.best_objective ||
        (objective == report.best_objective && report.best_restart < 0)) {
      report.best_objective = objective;
      report.best_factor = GramFactor(q);
      report.best_restart = restart;
    }
    report.traces.push_back(std::move(trace));
  }

  report.failed = true;
  for (const auto& trace : report.traces) {
    if (!trace.diverged) report.failed = false;
  }
  report.best_kernel = factor_to_kernel(report.best_factor);

  const EmpiricalStats stats = empirical_stats(data);
  report.diagonal_deviation.resize(n);
  for (int i = 0; i < n; ++i) {
    report.diagonal_deviation(i) =
        report.best_kernel(i, i) -
        static_cast<double>(stats.frequency[i]) / stats.sample_count;
  }
  return report;
}

DiagonalCheck verify_frequency_diagonal(const Dataset& data,
                                      OptimizerConfig config) {
  if (data.ground_set_size() > 8) {
    throw SizeGuardError("diagonal check guarded at 8 elements");
  }
  if (config.restarts < 20) config.restarts = 20;
  DiagonalCheck check;
  check.report = optimize(data, config);
  const int n = data.ground_set_size();
  check.kernel_diagonal.resize(n);
  check.empirical_frequency.resize(n);
  const EmpiricalStats stats = empirical_stats(data);
  for (int i = 0; i < n; ++i) {
    check.kernel_diagonal(i) = check.report.best_kernel(i, i);
    check.empirical_frequency(i) =
        static_cast<double>(stats.frequency[i]) / stats.sample_count;
  }
  check.max_deviation =
      (check.kernel_diagonal - check.empirical_frequency).cwiseAbs().maxCoeff();
  check.pass = check.max_deviation <= 1e-2;
  return check;
}

}  // namespace dppmle
