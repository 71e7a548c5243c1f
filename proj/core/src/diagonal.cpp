#include "dppmle/diagonal.hpp"

#include <cmath>

#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

// x log(x/m) with integer x, and 0 log 0 = 0.
double count_log_ratio(int x, int m) {
  if (x == 0) return 0.0;
  return static_cast<double>(x) *
         std::log(static_cast<double>(x) / static_cast<double>(m));
}

}  // namespace

MarginalKernel diagonal_kernel(const Dataset& data) {
  const EmpiricalStats stats = empirical_stats(data);
  const int n = data.ground_set_size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    // Exact integer ratio; rounding happens once, here.
    k(i, i) = static_cast<double>(stats.frequency[i]) /
              static_cast<double>(stats.sample_count);
  }
  return MarginalKernel(std::move(k));
}

double diag_log_likelihood(const Dataset& data) {
  const EmpiricalStats stats = empirical_stats(data);
  const int m = stats.sample_count;
  double sum = 0.0;
  for (int a : stats.frequency) {
    sum += count_log_ratio(a, m) + count_log_ratio(m - a, m);
  }
  return -sum / static_cast<double>(m);
}

double hadamard_lower_bound(const Dataset& data) {
  const EmpiricalStats stats = empirical_stats(data);
  const int m = stats.sample_count;
  double sum = 0.0;
  for (int a : stats.frequency) sum += count_log_ratio(a, m);
  return -sum / static_cast<double>(m);
}

double ratio_function_f(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    throw DomainError("ratio function defined on (0, 1), got " +
                      std::to_string(x));
  }
  return (1.0 - x) * std::log1p(-x) / (x * std::log(x));
}

ApproxCertificate certificate(const Dataset& data) {
  const EmpiricalStats stats = empirical_stats(data);
  const int m = stats.sample_count;
  if (m < 2) {
    throw DegenerateError(
        "certificate needs at least two samples; the unconditional bound is "
        "undefined for m = 1");
  }
  if (stats.max_frequency >= m) {
    throw DegenerateError(
        "certificate requires a_max <= m - 1; factor full-frequency elements "
        "first");
  }
  if (stats.max_frequency == 0) {
    throw DegenerateError("certificate undefined: no element ever appears");
  }

  ApproxCertificate cert;
  cert.sample_count = m;
  cert.max_frequency = stats.max_frequency;
  cert.diag_log_likelihood = diag_log_likelihood(data);
  cert.lower_bound = hadamard_lower_bound(data);
  cert.ratio_bound_conditional =
      1.0 + ratio_function_f(static_cast<double>(stats.max_frequency) /
                             static_cast<double>(m));
  cert.ratio_bound_unconditional =
      1.0 + (1.0 + 1.0 / static_cast<double>(m - 1)) *
                std::log(static_cast<double>(m));
  cert.achieved_ratio = cert.diag_log_likelihood / cert.lower_bound;
  return cert;
}

FactoredDataset factor_full_elements(const Dataset& data) {
  const EmpiricalStats stats = empirical_stats(data);
  const int m = stats.sample_count;
  FactoredDataset out{data, {}};
  for (int i = 0; i < data.ground_set_size(); ++i) {
    if (stats.frequency[i] == m) out.factored_elements.push_back(i);
  }
  if (out.factored_elements.empty()) return out;

  std::vector<std::vector<int>> residual_samples;
  residual_samples.reserve(data.sample_count());
  for (const auto& sample : data.samples()) {
    std::vector<int> kept;
    for (int i : sample) {
      if (stats.frequency[i] != m) kept.push_back(i);
    }
    residual_samples.push_back(std::move(kept));
  }
  out.residual = Dataset(data.ground_set_size(), std::move(residual_samples));
  return out;
}

}  // namespace dppmle
