#include "dppmle/dataset.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dppmle/errors.hpp"

namespace dppmle {

Dataset::Dataset(int ground_set_size, std::vector<std::vector<int>> samples)
    : n_(ground_set_size), samples_(std::move(samples)) {
  if (n_ <= 0) {
    throw StructuralError("ground set size must be positive, got " +
                          std::to_string(n_));
  }
  if (samples_.empty()) {
    throw StructuralError("dataset needs at least one sample");
  }
  for (std::size_t t = 0; t < samples_.size(); ++t) {
    const auto& sample = samples_[t];
    for (std::size_t p = 0; p < sample.size(); ++p) {
      if (sample[p] < 0 || sample[p] >= n_) {
        throw StructuralError("sample " + std::to_string(t) + " element " +
                              std::to_string(sample[p]) +
                              " outside ground set of size " +
                              std::to_string(n_));
      }
      if (p > 0 && sample[p] <= sample[p - 1]) {
        throw StructuralError("sample " + std::to_string(t) +
                              " is not strictly increasing");
      }
    }
    if (sample.empty()) has_empty_sample_ = true;
  }
}

EmpiricalStats empirical_stats(const Dataset& data) {
  EmpiricalStats stats;
  stats.sample_count = data.sample_count();
  stats.frequency.assign(data.ground_set_size(), 0);
  for (const auto& sample : data.samples()) {
    for (int i : sample) ++stats.frequency[i];
  }
  stats.max_frequency = 0;
  for (int i = 0; i < data.ground_set_size(); ++i) {
    stats.max_frequency = std::max(stats.max_frequency, stats.frequency[i]);
    if (stats.frequency[i] == stats.sample_count) {
      stats.full_frequency_elements.push_back(i);
    }
  }
  // Multiplicities of distinct samples, first-occurrence order.
  std::vector<std::vector<int>> distinct;
  std::vector<int> multiplicity;
  for (const auto& sample : data.samples()) {
    auto it = std::find(distinct.begin(), distinct.end(), sample);
    if (it == distinct.end()) {
      distinct.push_back(sample);
      multiplicity.push_back(1);
    } else {
      ++multiplicity[static_cast<std::size_t>(it - distinct.begin())];
    }
  }
  const double m = static_cast<double>(stats.sample_count);
  for (std::size_t j = 0; j < distinct.size(); ++j) {
    stats.distribution.emplace_back(distinct[j], multiplicity[j] / m);
  }
  return stats;
}

Dataset parse_dataset(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("dataset: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("ground_set_size") ||
      !doc.contains("samples")) {
    throw ParseError("dataset: expected object with ground_set_size and samples");
  }
  if (!doc["ground_set_size"].is_number_integer()) {
    throw ParseError("dataset: ground_set_size must be an integer");
  }
  const int n = doc["ground_set_size"].get<int>();
  if (!doc["samples"].is_array()) {
    throw ParseError("dataset: samples must be an array");
  }
  std::vector<std::vector<int>> samples;
  int t = 0;
  for (const auto& raw : doc["samples"]) {
    if (!raw.is_array()) {
      throw ParseError("dataset: sample " + std::to_string(t) +
                       " is not an array");
    }
    std::vector<int> sample;
    for (const auto& v : raw) {
      if (!v.is_number_integer()) {
        throw ParseError("dataset: sample " + std::to_string(t) +
                         " has a non-integer element");
      }
      const int e = v.get<int>();
      if (e < 1 || e > n) {
        throw ValidationError("dataset: sample " + std::to_string(t) +
                              " element " + std::to_string(e) +
                              " outside [1, " + std::to_string(n) +
                              "] (elements are 1-indexed)");
      }
      sample.push_back(e - 1);  // 1-indexed in files, 0-indexed internally
    }
    for (std::size_t p = 1; p < sample.size(); ++p) {
      if (sample[p] <= sample[p - 1]) {
        throw ValidationError("dataset: sample " + std::to_string(t) +
                              " must be strictly increasing");
      }
    }
    samples.push_back(std::move(sample));
    ++t;
  }
  try {
    return Dataset(n, std::move(samples));
  } catch (const StructuralError& e) {
    throw ValidationError(e.what());
  }
}

std::string serialize_dataset(const Dataset& data) {
  nlohmann::json doc;
  doc["ground_set_size"] = data.ground_set_size();
  auto& samples = doc["samples"] = nlohmann::json::array();
  for (const auto& sample : data.samples()) {
    nlohmann::json row = nlohmann::json::array();
    for (int i : sample) row.push_back(i + 1);
    samples.push_back(std::move(row));
  }
  return doc.dump();
}

}  // namespace dppmle
