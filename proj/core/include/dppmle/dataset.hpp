#ifndef DPPMLE_DATASET_HPP
#define DPPMLE_DATASET_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dppmle {

/// Training set: a ground set of size n and an ordered multiset of subsets.
///
/// Elements are 0-indexed internally and 1-indexed in files. Duplicate
/// samples are preserved; empty samples are legal but tracked, since a
/// dataset containing the empty set forces any optimal kernel to be an
/// L-ensemble.
class Dataset {
 public:
  // Samples must be strictly increasing lists of indices in [0, n).
  Dataset(int ground_set_size, std::vector<std::vector<int>> samples);

  int ground_set_size() const { return n_; }
  int sample_count() const { return static_cast<int>(samples_.size()); }
  const std::vector<std::vector<int>>& samples() const { return samples_; }
  const std::vector<int>& sample(int t) const { return samples_.at(t); }
  bool has_empty_sample() const { return has_empty_sample_; }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> samples_;
  bool has_empty_sample_ = false;
};

/// Per-element frequencies and the empirical distribution over distinct samples.
struct EmpiricalStats {
  std::vector<int> frequency;  // a_i = #samples containing element i
  int sample_count = 0;        // m
  int max_frequency = 0;       // a_max
  // Distinct samples with their empirical probability (multiplicity / m).
  std::vector<std::pair<std::vector<int>, double>> distribution;
  std::vector<int> full_frequency_elements;  // elements with a_i == m
};

EmpiricalStats empirical_stats(const Dataset& data);

/// Parses the dataset file format: {"ground_set_size": n, "samples": [[...]]}
/// with 1-indexed, strictly increasing inner lists.
Dataset parse_dataset(std::string_view text);

/// Canonical serialization; parse followed by serialize is byte-identical
/// for canonically formatted input.
std::string serialize_dataset(const Dataset& data);

}  // namespace dppmle

#endif  // DPPMLE_DATASET_HPP
