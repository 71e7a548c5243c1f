#ifndef DPPMLE_DIAGONAL_HPP
#define DPPMLE_DIAGONAL_HPP

#include <vector>

#include "dppmle/dataset.hpp"
#include "dppmle/kernel.hpp"

namespace dppmle {

/// The diagonal approximation kernel: K_ii = a_i / m, the empirical
/// frequency of element i.
MarginalKernel diagonal_kernel(const Dataset& data);

/// Log-likelihood of the diagonal kernel in closed form,
///   -(1/m) * sum_i [ a_i log(a_i/m) + (m - a_i) log(1 - a_i/m) ],
/// with the 0 log 0 = 0 convention. Matches log_likelihood of the
/// constructed kernel.
double diag_log_likelihood(const Dataset& data);

/// Frequency-only lower bound on the optimal log-likelihood,
///   -(1/m) * sum_i a_i log(a_i/m),
/// valid for every marginal kernel by Hadamard's inequality.
double hadamard_lower_bound(const Dataset& data);

/// f(x) = (1-x) log(1-x) / (x log x) on (0,1). Positive, increasing,
/// and bounded by -1/log x; governs the conditional approximation ratio.
double ratio_function_f(double x);

struct ApproxCertificate {
  double diag_log_likelihood = 0.0;       // likelihood achieved by the algorithm
  double lower_bound = 0.0;               // frequency lower bound on the optimum
  double ratio_bound_conditional = 0.0;   // 1 + f(a_max / m)
  double ratio_bound_unconditional = 0.0; // 1 + (1 + 1/(m-1)) log m
  double achieved_ratio = 0.0;            // diag likelihood / lower bound
  int max_frequency = 0;
  int sample_count = 0;
};

/// Approximation-ratio certificate. Requires m >= 2 and a_max <= m - 1
/// (factor full-frequency elements out first).
ApproxCertificate certificate(const Dataset& data);

struct FactoredDataset {
  Dataset residual;
  std::vector<int> factored_elements;  // 0-based; elements with a_i == m
};

/// Removes elements that appear in every sample. Such elements take
/// probability 1 in any optimal kernel and contribute 0 to the likelihood,
/// so the split is additive.
FactoredDataset factor_full_elements(const Dataset& data);

}  // namespace dppmle

#endif  // DPPMLE_DIAGONAL_HPP
