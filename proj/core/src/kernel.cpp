#include "dppmle/kernel.hpp"

#include <cmath>
#include <limits>

#include "dppmle/errors.hpp"

namespace dppmle {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw StructuralError(std::string(what) + " has non-finite entries");
  }
}

void require_subset(std::span<const int> subset, int n) {
  for (int i : subset) {
    if (i < 0 || i >= n) {
      throw StructuralError("subset index " + std::to_string(i) +
                            " outside ground set of size " + std::to_string(n));
    }
  }
}

// det of the principal submatrix indexed by subset, via pivoted elimination.
double principal_minor(const Eigen::MatrixXd& m, std::span<const int> subset) {
  const int s = static_cast<int>(subset.size());
  if (s == 0) return 1.0;
  if (s == 1) return m(subset[0], subset[0]);
  Eigen::MatrixXd sub(s, s);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) sub(a, b) = m(subset[a], subset[b]);
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(sub).determinant();
}

}  // namespace

MarginalKernel::MarginalKernel(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw StructuralError("kernel matrix must be square, got " +
                          std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()));
  }
  if (entries_.rows() == 0) {
    throw StructuralError("kernel matrix must be non-empty");
  }
  require_finite(entries_, "kernel matrix");
}

GramFactor::GramFactor(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1) {
    throw StructuralError("factor must have positive rank and ground set size");
  }
  require_finite(columns_, "factor matrix");
}

Eigen::VectorXd GramFactor::direction(int i) const {
  Eigen::VectorXd q = columns_.col(i);
  const double norm = q.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(rank());
  return q / norm;
}

double GramFactor::spectral_norm() const {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(columns_).singularValues()(0);
}

bool GramFactor::kernel_ready(double tol) const {
  return spectral_norm() <= 1.0 + tol;
}

EnsembleKernel::EnsembleKernel(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw StructuralError("ensemble kernel must be square and non-empty");
  }
  require_finite(entries_, "ensemble kernel");
}

ValidationReport validate_kernel(const MarginalKernel& kernel, double tol) {
  const Eigen::MatrixXd& k = kernel.matrix();
  ValidationReport report;
  report.n = kernel.size();
  report.symmetry_defect = (k - k.transpose()).cwiseAbs().maxCoeff();

  report.diagonal_in_unit_interval = true;
  for (int i = 0; i < report.n; ++i) {
    if (k(i, i) < -tol || k(i, i) > 1.0 + tol) {
      report.diagonal_in_unit_interval = false;
    }
  }

  // Tridiagonalization-based symmetric eigensolve on the symmetric part.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.max_eigenvalue = es.eigenvalues().maxCoeff();

  report.pass = report.symmetry_defect == 0.0 &&
                report.diagonal_in_unit_interval &&
                report.min_eigenvalue >= -tol &&
                report.max_eigenvalue <= 1.0 + tol;
  if (report.pass) {
    report.message = "valid marginal kernel";
  } else if (report.symmetry_defect != 0.0) {
    report.message =
        "asymmetric: max defect " + std::to_string(report.symmetry_defect);
  } else if (report.max_eigenvalue > 1.0 + tol) {
    report.message =
        "max eigenvalue " + std::to_string(report.max_eigenvalue) + " > 1";
  } else if (report.min_eigenvalue < -tol) {
    report.message =
        "min eigenvalue " + std::to_string(report.min_eigenvalue) + " < 0";
  } else {
    report.message = "diagonal entry outside [0, 1]";
  }
  return report;
}

double subset_marginal(const MarginalKernel& kernel, std::span<const int> subset) {
  require_subset(subset, kernel.size());
  return principal_minor(kernel.matrix(), subset);
}

double point_probability(const MarginalKernel& kernel, std::span<const int> subset) {
  require_subset(subset, kernel.size());
  const int n = kernel.size();
  Eigen::MatrixXd m = kernel.matrix();
  std::vector<char> inside(n, 0);
  for (int i : subset) inside[i] = 1;
  for (int i = 0; i < n; ++i) {
    if (!inside[i]) m(i, i) -= 1.0;
  }
  return std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant());
}

double log_likelihood(const MarginalKernel& kernel, const Dataset& data,
                      double underflow_floor) {
  if (data.ground_set_size() != kernel.size()) {
    throw StructuralError("dataset ground set size " +
                          std::to_string(data.ground_set_size()) +
                          " does not match kernel size " +
                          std::to_string(kernel.size()));
  }
  // Fixed summation order keeps the result independent of any parallelism.
  double total = 0.0;
  for (const auto& sample : data.samples()) {
    const double p = point_probability(kernel, sample);
    if (p <= underflow_floor) return std::numeric_limits<double>::infinity();
    total += std::log(p);
  }
  return -total / static_cast<double>(data.sample_count());
}

namespace {

double factor_point_probability(const GramFactor& factor,
                                const Eigen::MatrixXd& gram,
                                std::span<const int> subset) {
  const int r = factor.rank();
  const int s = static_cast<int>(subset.size());
  Eigen::MatrixXd inside(r, s);
  for (int p = 0; p < s; ++p) inside.col(p) = factor.column(subset[p]);
  // I_r minus the Gram matrix of the complement columns.
  Eigen::MatrixXd m_c = Eigen::MatrixXd::Identity(r, r) -
                        (gram - inside * inside.transpose());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m_c);
  const double det_c = lu.determinant();
  if (std::abs(det_c) < 1e-250 || !std::isfinite(det_c)) {
    // Singular complement block: take the dense inclusion-exclusion route.
    return point_probability(factor_to_kernel(factor), subset);
  }
  if (s == 0) return std::abs(det_c);
  const Eigen::MatrixXd inner = inside.transpose() * lu.solve(inside);
  const double det_x =
      Eigen::PartialPivLU<Eigen::MatrixXd>(inner).determinant();
  return std::abs(det_c) * std::abs(det_x);
}

}  // namespace

double point_probability(const GramFactor& factor, std::span<const int> subset) {
  require_subset(subset, factor.ground_set_size());
  const Eigen::MatrixXd gram = factor.columns() * factor.columns().transpose();
  return factor_point_probability(factor, gram, subset);
}

double log_likelihood(const GramFactor& factor, const Dataset& data,
                      double underflow_floor) {
  if (data.ground_set_size() != factor.ground_set_size()) {
    throw StructuralError("dataset ground set size " +
                          std::to_string(data.ground_set_size()) +
                          " does not match factor size " +
                          std::to_string(factor.ground_set_size()));
  }
  const Eigen::MatrixXd gram = factor.columns() * factor.columns().transpose();
  double total = 0.0;
  for (const auto& sample : data.samples()) {
    const double p = factor_point_probability(factor, gram, sample);
    if (p <= underflow_floor) return std::numeric_limits<double>::infinity();
    total += std::log(p);
  }
  return -total / static_cast<double>(data.sample_count());
}

std::vector<double> enumerate_distribution(const MarginalKernel& kernel) {
  const int n = kernel.size();
  if (n > 20) {
    throw SizeGuardError("enumeration over 2^" + std::to_string(n) +
                         " subsets exceeds the n <= 20 guard");
  }
  std::vector<double> table(std::size_t(1) << n);
  std::vector<int> subset;
  subset.reserve(n);
  for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
    subset.clear();
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    table[mask] = point_probability(kernel, subset);
  }
  return table;
}

EnsembleKernel to_l_ensemble(const MarginalKernel& kernel, double margin) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel.matrix());
  const double top = es.eigenvalues().maxCoeff();
  if (top > 1.0 - margin) {
    throw NotLEnsembleError("eigenvalue " + std::to_string(top) +
                            " is too close to 1; kernel is not an L-ensemble");
  }
  const int n = kernel.size();
  // L = K (I - K)^{-1} via the shared eigenbasis: lambda -> lambda/(1-lambda).
  Eigen::VectorXd mapped(n);
  for (int i = 0; i < n; ++i) {
    const double lambda = es.eigenvalues()(i);
    mapped(i) = lambda / (1.0 - lambda);
  }
  Eigen::MatrixXd l =
      es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
  return EnsembleKernel(0.5 * (l + l.transpose()));
}

MarginalKernel to_marginal(const EnsembleKernel& ensemble) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ensemble.matrix());
  const int n = ensemble.size();
  Eigen::VectorXd mapped(n);
  for (int i = 0; i < n; ++i) {
    const double mu = es.eigenvalues()(i);
    mapped(i) = mu / (1.0 + mu);
  }
  Eigen::MatrixXd k =
      es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
  return MarginalKernel(0.5 * (k + k.transpose()));
}

MarginalKernel factor_to_kernel(const GramFactor& factor, bool clamp,
                                double* scale_out) {
  double scale = 1.0;
  Eigen::MatrixXd k = factor.columns().transpose() * factor.columns();
  if (clamp) {
    const double sigma = factor.spectral_norm();
    if (sigma > 1.0) {
      scale = 1.0 / (sigma * sigma);
      k *= scale;
    }
  }
  if (scale_out != nullptr) *scale_out = scale;
  return MarginalKernel(0.5 * (k + k.transpose()));
}

}  // namespace dppmle
