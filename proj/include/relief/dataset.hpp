#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relief {

/// Raised for invalid or degenerate input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeatureKind { discrete, continuous };

inline const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::discrete ? "discrete" : "continuous";
}

/// A cell is either a value or missing (std::nullopt).
using Cell = std::optional<double>;

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::discrete;
  // Continuous only; recomputed from data.
  double observed_min = 0.0;
  double observed_max = 0.0;
  // Discrete only; sorted distinct non-missing values.
  std::vector<double> value_domain;
  // Optional display names for discrete codes, indexed by code value.
  std::vector<std::string> levels;
  // Continuous feature with observed_min == observed_max. Its diff is 0.
  bool constant = false;

  bool operator==(const FeatureDescriptor&) const = default;
};

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  bool constant = false;
};

/// Immutable table of instances x features plus class labels.
///
/// Values are stored row-major. Discrete values are numeric codes; missing
/// cells hold NaN and are flagged in the missing mask. Classes are opaque
/// tokens, indexed in lexicographic order.
class Dataset {
 public:
  std::size_t instances() const noexcept { return labels_.size(); }
  std::size_t features() const noexcept { return features_.size(); }
  std::size_t classes() const noexcept { return class_names_.size(); }

  const FeatureDescriptor& feature(std::size_t f) const { return features_.at(f); }
  const std::vector<FeatureDescriptor>& descriptors() const noexcept { return features_; }

  double value(std::size_t i, std::size_t f) const noexcept { return values_[i * features() + f]; }
  bool missing(std::size_t i, std::size_t f) const noexcept { return missing_[i * features() + f] != 0; }
  bool row_has_missing(std::size_t i) const noexcept { return row_missing_[i] != 0; }
  bool has_missing() const noexcept { return any_missing_; }
  Cell cell(std::size_t i, std::size_t f) const {
    return missing(i, f) ? Cell{} : Cell{value(i, f)};
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * features(), features()};
  }

  /// Class index of instance i (into class_names()).
  std::size_t label(std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<std::uint32_t>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::size_t class_count(std::size_t c) const noexcept { return class_counts_[c]; }
  const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }

  std::vector<std::vector<Cell>> cells() const {
    std::vector<std::vector<Cell>> out(instances(), std::vector<Cell>(features()));
    for (std::size_t i = 0; i < instances(); ++i)
      for (std::size_t f = 0; f < features(); ++f) out[i][f] = cell(i, f);
    return out;
  }

  std::vector<std::string> label_tokens() const {
    std::vector<std::string> out;
    out.reserve(instances());
    for (auto c : labels_) out.push_back(class_names_[c]);
    return out;
  }

  /// Dataset restricted to the given feature columns, in the given order.
  Dataset select_features(std::span<const std::size_t> keep) const {
    Dataset out;
    out.labels_ = labels_;
    out.class_names_ = class_names_;
    out.class_counts_ = class_counts_;
    const std::size_t n = instances();
    const std::size_t a = keep.size();
    out.features_.reserve(a);
    for (auto f : keep) out.features_.push_back(features_.at(f));
    out.values_.resize(n * a);
    out.missing_.resize(n * a);
    out.row_missing_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < a; ++k) {
        out.values_[i * a + k] = value(i, keep[k]);
        out.missing_[i * a + k] = missing_[i * features() + keep[k]];
        if (out.missing_[i * a + k]) out.row_missing_[i] = 1;
      }
      out.any_missing_ = out.any_missing_ || out.row_missing_[i];
    }
    return out;
  }

  /// Equal shape, descriptors, labels, class names and cells (missing cells
  /// compare equal to each other).
  bool operator==(const Dataset& o) const {
    if (features_ != o.features_ || labels_ != o.labels_ || class_names_ != o.class_names_ || missing_ != o.missing_)
      return false;
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (!missing_[k] && values_[k] != o.values_[k]) return false;
    return true;
  }

 private:
  friend Dataset build_dataset(const std::vector<std::vector<Cell>>&, std::vector<FeatureDescriptor>,
                               const std::vector<std::string>&);
  Dataset() = default;

  std::vector<FeatureDescriptor> features_;
  std::vector<double> values_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::uint8_t> row_missing_;
  bool any_missing_ = false;
  std::vector<std::uint32_t> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::size_t> class_counts_;
};

/// Validates the grid and builds a Dataset. Descriptor statistics are
/// recomputed from the data; feature kinds are taken verbatim.
inline Dataset build_dataset(const std::vector<std::vector<Cell>>& rows, std::vector<FeatureDescriptor> descriptors,
                             const std::vector<std::string>& labels) {
  const std::size_t n = rows.size();
  const std::size_t a = descriptors.size();
  if (labels.size() != n)
    throw DataError("dimension mismatch: " + std::to_string(n) + " rows but " + std::to_string(labels.size()) +
                    " labels");
  if (a == 0) throw DataError("dataset needs at least one feature");
  if (n < 2) throw DataError("dataset needs at least 2 instances");
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != a)
      throw DataError("dimension mismatch: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " cells, expected " + std::to_string(a));
  }

  Dataset d;
  std::map<std::string, std::uint32_t> class_index;
  for (const auto& label : labels) class_index.emplace(label, 0);
  if (class_index.size() < 2) throw DataError("fewer than 2 classes");
  for (auto& [name, idx] : class_index) {
    idx = static_cast<std::uint32_t>(d.class_names_.size());
    d.class_names_.push_back(name);
  }
  d.class_counts_.assign(d.class_names_.size(), 0);
  d.labels_.reserve(n);
  for (const auto& label : labels) {
    const auto c = class_index.at(label);
    d.labels_.push_back(c);
    ++d.class_counts_[c];
  }

  d.values_.assign(n * a, std::numeric_limits<double>::quiet_NaN());
  d.missing_.assign(n * a, 0);
  d.row_missing_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < a; ++f) {
      const auto& c = rows[i][f];
      if (c && std::isnan(*c)) throw DataError("NaN value at row " + std::to_string(i) + ", feature " +
                                               descriptors[f].name + " (use a missing cell instead)");
      if (c) {
        d.values_[i * a + f] = *c;
      } else {
        d.missing_[i * a + f] = 1;
        d.row_missing_[i] = 1;
        d.any_missing_ = true;
      }
    }
  }

  for (std::size_t f = 0; f < a; ++f) {
    auto& desc = descriptors[f];
    std::vector<double> seen;
    seen.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!d.missing_[i * a + f]) seen.push_back(d.values_[i * a + f]);
    if (seen.empty()) throw DataError("feature '" + desc.name + "' (column " + std::to_string(f) + ") is entirely missing");
    const auto [lo, hi] = std::minmax_element(seen.begin(), seen.end());
    desc.value_domain.clear();
    desc.constant = false;
    if (desc.kind == FeatureKind::continuous) {
      desc.observed_min = *lo;
      desc.observed_max = *hi;
      desc.constant = desc.observed_min == desc.observed_max;
    } else {
      desc.observed_min = 0.0;
      desc.observed_max = 0.0;
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      desc.value_domain = std::move(seen);
    }
  }
  d.features_ = std::move(descriptors);
  return d;
}

/// Empirical class frequencies n_C / n, indexed like Dataset::class_names().
struct ClassPriors {
  std::vector<std::string> classes;
  std::vector<double> probability;

  double of(std::size_t c) const { return probability.at(c); }
};

inline ClassPriors class_priors(const Dataset& d) {
  ClassPriors p;
  p.classes = d.class_names();
  const auto n = static_cast<double>(d.instances());
  for (auto count : d.class_counts()) p.probability.push_back(static_cast<double>(count) / n);
  return p;
}

inline ValueRange observed_range(const Dataset& d, std::size_t feature) {
  const auto& desc = d.feature(feature);
  if (desc.kind != FeatureKind::continuous)
    throw DataError("observed_range: feature '" + desc.name + "' is discrete");
  return {desc.observed_min, desc.observed_max, desc.constant};
}

/// Per-feature relevance scores.
///
/// `tier` separates scored features (tier 0) from features a wrapper did not
/// score in its final round (eliminated or never sampled). Higher tiers rank
/// strictly below lower ones regardless of score.
struct WeightVector {
  std::vector<double> scores;
  std::vector<std::string> names;
  std::vector<int> tier;
  std::string algorithm;
  std::map<std::string, std::string> params;
  std::optional<int> iteration;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return scores.size(); }
  bool scored(std::size_t f) const { return tier.empty() || tier.at(f) == 0; }
};

inline WeightVector make_weights(const Dataset& d, std::vector<double> scores, std::string algorithm) {
  WeightVector w;
  w.scores = std::move(scores);
  w.tier.assign(w.scores.size(), 0);
  w.names.reserve(d.features());
  for (const auto& desc : d.descriptors()) w.names.push_back(desc.name);
  w.algorithm = std::move(algorithm);
  return w;
}

}  // namespace relief
