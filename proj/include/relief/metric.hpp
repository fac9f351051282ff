#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relief/dataset.hpp"
#include "relief/parallel.hpp"

namespace relief {

struct EngineOptions {
  std::size_t threads = 1;
  // Above this many instances the distance matrix is not materialized and
  // rows are recomputed on demand (8 * n^2 bytes otherwise).
  std::size_t dense_limit = 20000;
};

/// Class-conditional value frequencies for one feature, used by the
/// missing-value diff. Every distinct observed value is its own category,
/// including for continuous features.
struct FrequencyTable {
  std::vector<double> values;                    // sorted distinct
  std::vector<std::vector<std::size_t>> counts;  // [class][value]
  std::vector<std::size_t> class_totals;
  std::vector<std::size_t> overall;
  std::size_t total = 0;

  std::size_t index_of(double v) const {
    const auto it = std::lower_bound(values.begin(), values.end(), v);
    return static_cast<std::size_t>(it - values.begin());
  }

  /// P(value | class), falling back to the unconditional frequency when the
  /// class has no observed values for this feature.
  double probability(std::size_t value_index, std::size_t cls) const {
    if (class_totals[cls] > 0)
      return static_cast<double>(counts[cls][value_index]) / static_cast<double>(class_totals[cls]);
    return static_cast<double>(overall[value_index]) / static_cast<double>(total);
  }
};

inline FrequencyTable build_frequency_table(const Dataset& d, std::size_t f) {
  FrequencyTable t;
  for (std::size_t i = 0; i < d.instances(); ++i)
    if (!d.missing(i, f)) t.values.push_back(d.value(i, f));
  std::sort(t.values.begin(), t.values.end());
  t.values.erase(std::unique(t.values.begin(), t.values.end()), t.values.end());
  t.counts.assign(d.classes(), std::vector<std::size_t>(t.values.size(), 0));
  t.class_totals.assign(d.classes(), 0);
  t.overall.assign(t.values.size(), 0);
  for (std::size_t i = 0; i < d.instances(); ++i) {
    if (d.missing(i, f)) continue;
    const auto v = t.index_of(d.value(i, f));
    ++t.counts[d.label(i)][v];
    ++t.class_totals[d.label(i)];
    ++t.overall[v];
    ++t.total;
  }
  return t;
}

/// diff for a missing cell: one side missing uses 1 - P(known | class of the
/// missing instance); both missing uses 1 - sum_v P(v | C1) P(v | C2).
inline double missing_diff(const FrequencyTable& t, bool missing1, std::size_t value_index1, std::size_t class1,
                           bool missing2, std::size_t value_index2, std::size_t class2) {
  if (missing1 && missing2) {
    double agree = 0.0;
    for (std::size_t v = 0; v < t.values.size(); ++v) agree += t.probability(v, class1) * t.probability(v, class2);
    return 1.0 - agree;
  }
  if (missing1) return 1.0 - t.probability(value_index2, class1);
  return 1.0 - t.probability(value_index1, class2);
}

inline double diff_discrete(const Dataset& d, std::size_t feature, std::size_t i1, std::size_t i2) {
  if (d.feature(feature).kind != FeatureKind::discrete)
    throw DataError("diff_discrete: feature '" + d.feature(feature).name + "' is continuous");
  if (d.missing(i1, feature) || d.missing(i2, feature))
    throw DataError("diff_discrete: missing value present; use diff_with_missing");
  return d.value(i1, feature) == d.value(i2, feature) ? 0.0 : 1.0;
}

inline double diff_continuous(const Dataset& d, std::size_t feature, std::size_t i1, std::size_t i2) {
  const auto& desc = d.feature(feature);
  if (desc.kind != FeatureKind::continuous)
    throw DataError("diff_continuous: feature '" + desc.name + "' is discrete");
  if (d.missing(i1, feature) || d.missing(i2, feature))
    throw DataError("diff_continuous: missing value present; use diff_with_missing");
  if (desc.constant) return 0.0;
  return std::abs(d.value(i1, feature) - d.value(i2, feature)) / (desc.observed_max - desc.observed_min);
}

inline double diff_with_missing(const Dataset& d, std::size_t feature, std::size_t i1, std::size_t i2) {
  const bool m1 = d.missing(i1, feature);
  const bool m2 = d.missing(i2, feature);
  if (!m1 && !m2) throw std::invalid_argument("diff_with_missing: neither cell is missing");
  const auto table = build_frequency_table(d, feature);
  const auto v1 = m1 ? 0 : table.index_of(d.value(i1, feature));
  const auto v2 = m2 ? 0 : table.index_of(d.value(i2, feature));
  return missing_diff(table, m1, v1, d.label(i1), m2, v2, d.label(i2));
}

/// Precomputed per-feature state for fast diff/distance evaluation. Owns
/// copies of what it needs so it can outlive the Dataset it was built from.
class DiffKernel {
 public:
  explicit DiffKernel(const Dataset& d)
      : n_(d.instances()), a_(d.features()), labels_(d.labels()), has_missing_(d.has_missing()) {
    values_.reserve(n_ * a_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto r = d.row(i);
      values_.insert(values_.end(), r.begin(), r.end());
    }
    discrete_.resize(a_);
    range_.resize(a_);
    for (std::size_t f = 0; f < a_; ++f) {
      const auto& desc = d.feature(f);
      discrete_[f] = desc.kind == FeatureKind::discrete;
      range_[f] = (discrete_[f] || desc.constant) ? 0.0 : desc.observed_max - desc.observed_min;
    }
    if (has_missing_) {
      missing_.resize(n_ * a_);
      row_missing_.resize(n_);
      value_index_.assign(n_ * a_, 0);
      tables_.resize(a_);
      for (std::size_t i = 0; i < n_; ++i) {
        row_missing_[i] = d.row_has_missing(i);
        for (std::size_t f = 0; f < a_; ++f) missing_[i * a_ + f] = d.missing(i, f);
      }
      for (std::size_t f = 0; f < a_; ++f) {
        bool any = false;
        for (std::size_t i = 0; i < n_ && !any; ++i) any = d.missing(i, f);
        if (!any) continue;
        tables_[f] = std::make_unique<FrequencyTable>(build_frequency_table(d, f));
        for (std::size_t i = 0; i < n_; ++i)
          if (!d.missing(i, f)) value_index_[i * a_ + f] = tables_[f]->index_of(d.value(i, f));
      }
    }
  }

  std::size_t instances() const noexcept { return n_; }
  std::size_t features() const noexcept { return a_; }

  double diff(std::size_t f, std::size_t i, std::size_t j) const {
    if (has_missing_) {
      const bool mi = missing_[i * a_ + f];
      const bool mj = missing_[j * a_ + f];
      if (mi || mj)
        return missing_diff(*tables_[f], mi, value_index_[i * a_ + f], labels_[i], mj, value_index_[j * a_ + f],
                            labels_[j]);
    }
    return present_diff(f, values_[i * a_ + f], values_[j * a_ + f]);
  }

  /// Fills out[f] = diff(f, i, j) for every feature.
  void diff_row(std::size_t i, std::size_t j, std::span<double> out) const {
    if (!has_missing_ || (!row_missing_[i] && !row_missing_[j])) {
      const double* vi = values_.data() + i * a_;
      const double* vj = values_.data() + j * a_;
      for (std::size_t f = 0; f < a_; ++f) out[f] = present_diff(f, vi[f], vj[f]);
      return;
    }
    for (std::size_t f = 0; f < a_; ++f) out[f] = diff(f, i, j);
  }

  /// Manhattan distance: sum of diffs over features, in feature order.
  double distance(std::size_t i, std::size_t j) const {
    double sum = 0.0;
    if (!has_missing_ || (!row_missing_[i] && !row_missing_[j])) {
      const double* vi = values_.data() + i * a_;
      const double* vj = values_.data() + j * a_;
      for (std::size_t f = 0; f < a_; ++f) sum += present_diff(f, vi[f], vj[f]);
      return sum;
    }
    for (std::size_t f = 0; f < a_; ++f) sum += diff(f, i, j);
    return sum;
  }

  /// sum_f phi_f * diff_f / sum_f phi_f.
  double weighted_distance(std::size_t i, std::size_t j, std::span<const double> phi, double phi_total) const {
    double sum = 0.0;
    for (std::size_t f = 0; f < a_; ++f)
      if (phi[f] != 0.0) sum += phi[f] * diff(f, i, j);
    return sum / phi_total;
  }

 private:
  double present_diff(std::size_t f, double x, double y) const noexcept {
    if (discrete_[f]) return x == y ? 0.0 : 1.0;
    if (range_[f] == 0.0) return 0.0;
    return std::abs(x - y) / range_[f];
  }

  std::size_t n_;
  std::size_t a_;
  std::vector<double> values_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint8_t> discrete_;
  std::vector<double> range_;
  bool has_missing_;
  std::vector<std::uint8_t> missing_;
  std::vector<std::uint8_t> row_missing_;
  std::vector<std::size_t> value_index_;
  std::vector<std::unique_ptr<FrequencyTable>> tables_;
};

inline double instance_distance(const Dataset& d, std::size_t i1, std::size_t i2) {
  return DiffKernel(d).distance(i1, i2);
}

/// Symmetric pairwise instance distances with global and per-target
/// statistics. Large inputs use a streaming mode where rows are recomputed
/// from the kernel on each request.
class DistanceMatrix {
 public:
  std::size_t size() const noexcept { return n_; }
  bool dense() const noexcept { return !dist_.empty() || n_ == 0; }

  /// Row i. In dense mode this points into the matrix; otherwise the row is
  /// computed into scratch.
  std::span<const double> row(std::size_t i, std::vector<double>& scratch) const {
    if (!dist_.empty()) return {dist_.data() + i * n_, n_};
    scratch.resize(n_);
    fill_row(i, scratch);
    return scratch;
  }

  double at(std::size_t i, std::size_t j) const {
    if (!dist_.empty()) return dist_[i * n_ + j];
    return i == j ? 0.0 : pair_distance(i, j);
  }

  double global_mean() const noexcept { return global_mean_; }
  double global_std() const noexcept { return global_std_; }
  const std::vector<double>& target_mean() const noexcept { return target_mean_; }
  const std::vector<double>& target_std() const noexcept { return target_std_; }

  const DiffKernel& kernel() const noexcept { return *kernel_; }

 private:
  friend DistanceMatrix pairwise_distances(const Dataset&, const EngineOptions&, std::span<const double>);
  DistanceMatrix() = default;

  double pair_distance(std::size_t i, std::size_t j) const {
    return phi_.empty() ? kernel_->distance(i, j) : kernel_->weighted_distance(i, j, phi_, phi_total_);
  }

  void fill_row(std::size_t i, std::span<double> out) const {
    for (std::size_t j = 0; j < n_; ++j) out[j] = i == j ? 0.0 : pair_distance(i, j);
  }

  std::size_t n_ = 0;
  std::shared_ptr<const DiffKernel> kernel_;
  std::vector<double> phi_;
  double phi_total_ = 0.0;
  std::vector<double> dist_;
  double global_mean_ = 0.0;
  double global_std_ = 0.0;
  std::vector<double> target_mean_;
  std::vector<double> target_std_;
};

/// Computes all pairwise distances. When `feature_weights` is non-empty and
/// has a positive sum, distances are the phi-weighted mean of the diffs;
/// otherwise the plain Manhattan distance is used.
inline DistanceMatrix pairwise_distances(const Dataset& d, const EngineOptions& opts = {},
                                         std::span<const double> feature_weights = {}) {
  constexpr std::size_t kRowBlock = 16;
  DistanceMatrix m;
  const std::size_t n = d.instances();
  m.n_ = n;
  m.kernel_ = std::make_shared<const DiffKernel>(d);
  if (!feature_weights.empty()) {
    if (feature_weights.size() != d.features())
      throw std::invalid_argument("pairwise_distances: feature weight count does not match feature count");
    double total = 0.0;
    for (double w : feature_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("pairwise_distances: weights must be finite and >= 0");
      total += w;
    }
    if (total > 0.0) {
      m.phi_.assign(feature_weights.begin(), feature_weights.end());
      m.phi_total_ = total;
    }
  }
  const std::size_t blocks = block_count(n, kRowBlock);

  if (n <= opts.dense_limit) {
    m.dist_.assign(n * n, 0.0);
    for_each_block(blocks, opts.threads, [&](std::size_t b) {
      const std::size_t end = std::min(n, (b + 1) * kRowBlock);
      for (std::size_t i = b * kRowBlock; i < end; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double v = m.pair_distance(i, j);
          m.dist_[i * n + j] = v;
          m.dist_[j * n + i] = v;
        }
    });
  }

  // Per-row partial sums, reduced in row order below.
  m.target_mean_.assign(n, 0.0);
  m.target_std_.assign(n, 0.0);
  std::vector<double> upper_sum(n, 0.0);
  auto row_pass = [&](auto&& per_row) {
    for_each_block(blocks, opts.threads, [&](std::size_t b) {
      std::vector<double> scratch;
      const std::size_t end = std::min(n, (b + 1) * kRowBlock);
      for (std::size_t i = b * kRowBlock; i < end; ++i) per_row(i, m.row(i, scratch));
    });
  };
  row_pass([&](std::size_t i, std::span<const double> r) {
    double all = 0.0;
    double upper = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      all += r[j];
      if (j > i) upper += r[j];
    }
    upper_sum[i] = upper;
    const double mean = n > 1 ? all / static_cast<double>(n - 1) : 0.0;
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) ss += (r[j] - mean) * (r[j] - mean);
    m.target_mean_[i] = mean;
    m.target_std_[i] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  });
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  double total = 0.0;
  for (double s : upper_sum) total += s;
  m.global_mean_ = pairs > 0 ? total / pairs : 0.0;
  row_pass([&](std::size_t i, std::span<const double> r) {
    double ss = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) ss += (r[j] - m.global_mean_) * (r[j] - m.global_mean_);
    upper_sum[i] = ss;
  });
  double ss_total = 0.0;
  for (double s : upper_sum) ss_total += s;
  m.global_std_ = pairs > 0 ? std::sqrt(ss_total / pairs) : 0.0;
  return m;
}

}  // namespace relief
