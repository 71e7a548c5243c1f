#ifndef DPPMLE_KERNEL_HPP
#define DPPMLE_KERNEL_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "dppmle/dataset.hpp"

namespace dppmle {

/// Module-level numeric tolerances. The defaults apply everywhere a
/// function does not take an explicit override.
struct Tolerances {
  double validation = 1e-9;       // spectrum bounds and symmetry checks
  double identity = 1e-8;         // algebraic identities and round trips
  double underflow_floor = 1e-300;  // probabilities at or below count as zero
};

/// Marginal kernel of a determinantal point process: a real symmetric
/// n-by-n matrix whose eigenvalues lie in [0, 1]. Construction only
/// enforces shape and finiteness; spectral validity is checked by
/// validate_kernel, which reports and never mutates.
class MarginalKernel {
 public:
  MarginalKernel() = default;
  explicit MarginalKernel(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// Rank-r column factorization K = Q^T Q. Column i embeds ground-set
/// element i in R^r; its squared norm is the induced kernel diagonal.
class GramFactor {
 public:
  GramFactor() = default;
  explicit GramFactor(Eigen::MatrixXd columns);  // r x n

  int ground_set_size() const { return static_cast<int>(columns_.cols()); }
  int rank() const { return static_cast<int>(columns_.rows()); }
  const Eigen::MatrixXd& columns() const { return columns_; }
  Eigen::VectorXd column(int i) const { return columns_.col(i); }
  double column_norm(int i) const { return columns_.col(i).norm(); }
  /// Unit direction of column i; zero columns map to the zero vector.
  Eigen::VectorXd direction(int i) const;
  double spectral_norm() const;
  /// True when the induced kernel is a valid marginal kernel at tol.
  bool kernel_ready(double tol = Tolerances{}.validation) const;

 private:
  Eigen::MatrixXd columns_;
};

/// L-ensemble kernel L = K (I - K)^{-1}; positive definite.
class EnsembleKernel {
 public:
  EnsembleKernel() = default;
  explicit EnsembleKernel(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

struct ValidationReport {
  int n = 0;
  double symmetry_defect = 0.0;  // max |K_ij - K_ji|
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  bool diagonal_in_unit_interval = false;
  bool pass = false;
  std::string message;
};

/// Checks symmetry, the diagonal pre-test, and the eigenvalue range
/// [-tol, 1 + tol]. Reports; never mutates the kernel.
ValidationReport validate_kernel(const MarginalKernel& kernel,
                                 double tol = Tolerances{}.validation);

/// Pr[S subseteq Y] = det(K_S). The empty principal minor is 1.
double subset_marginal(const MarginalKernel& kernel, std::span<const int> subset);

/// Pr[Y = X] = |det(K - I_complement)| via inclusion-exclusion.
double point_probability(const MarginalKernel& kernel, std::span<const int> subset);

/// Negated average log probability of the samples under the kernel,
/// weighted by multiplicity. Returns +infinity when any sample
/// probability falls at or below the underflow floor.
double log_likelihood(const MarginalKernel& kernel, const Dataset& data,
                      double underflow_floor = Tolerances{}.underflow_floor);

/// Point probability evaluated through the factor:
///   Pr[Y = X] = |det(I_r - B)| |det(Q_X^T (I_r - B)^{-1} Q_X)|,
/// with B the Gram matrix of the complement columns. Costs O(r^3) per call
/// after an O(N r^2) precomputation instead of an N x N determinant; falls
/// back to the dense route when I_r - B is singular. Agrees with
/// point_probability on the induced kernel.
double point_probability(const GramFactor& factor, std::span<const int> subset);

/// log_likelihood through the factor identity above; the fast path for
/// low-rank kernels over large ground sets.
double log_likelihood(const GramFactor& factor, const Dataset& data,
                      double underflow_floor = Tolerances{}.underflow_floor);

/// All 2^n point probabilities, indexed by subset bitmask (bit i set when
/// element i is in the subset). Guarded at n <= 20.
std::vector<double> enumerate_distribution(const MarginalKernel& kernel);

/// L = K (I - K)^{-1}. Requires every eigenvalue <= 1 - margin.
EnsembleKernel to_l_ensemble(const MarginalKernel& kernel, double margin = 1e-9);

/// Inverse map K = L (I + L)^{-1}.
MarginalKernel to_marginal(const EnsembleKernel& ensemble);

/// K = Q^T Q. With clamp set and sigma_1(Q) > 1, scales the induced kernel
/// by 1/sigma_1^2 first; the applied scale is written to scale_out when given
/// (1.0 when no rescaling happened).
MarginalKernel factor_to_kernel(const GramFactor& factor, bool clamp = false,
                                double* scale_out = nullptr);

}  // namespace dppmle

#endif  // DPPMLE_KERNEL_HPP
