#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relief/dataset.hpp"

namespace relief {

struct RankedEntry {
  std::size_t index = 0;
  std::string name;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  int tier = 0;          // 0 = scored in the final round

  bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
  std::vector<RankedEntry> entries;
  std::string algorithm;
  std::map<std::string, std::string> params;
  std::optional<int> iteration;

  std::size_t size() const noexcept { return entries.size(); }
  bool operator==(const RankedList&) const = default;
};

/// Orders by tier, then score descending, then feature index ascending.
inline RankedList rank_features(const WeightVector& w) {
  RankedList out;
  out.algorithm = w.algorithm;
  out.params = w.params;
  out.iteration = w.iteration;
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  auto tier = [&](std::size_t f) { return w.tier.empty() ? 0 : w.tier[f]; };
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (tier(x) != tier(y)) return tier(x) < tier(y);
    if (w.scores[x] != w.scores[y]) return w.scores[x] > w.scores[y];
    return x < y;
  });
  out.entries.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto f = order[r];
    out.entries.push_back({f, f < w.names.size() ? w.names[f] : "A" + std::to_string(f + 1), w.scores[f], r + 1,
                           tier(f)});
  }
  return out;
}

/// Chebyshev-derived upper bound on the relevance threshold, 1/sqrt(alpha*m),
/// capped at 1.
inline double chebyshev_tau(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("chebyshev_tau: alpha must be in (0, 1)");
  if (m == 0) throw std::invalid_argument("chebyshev_tau: m must be positive");
  return std::min(1.0, 1.0 / std::sqrt(alpha * static_cast<double>(m)));
}

/// Every scored feature with score >= tau, in rank order.
inline RankedList select_by_threshold(const RankedList& r, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("select_by_threshold: tau must be in (0, 1]");
  RankedList out = r;
  out.entries.clear();
  for (const auto& e : r.entries)
    if (e.tier == 0 && e.score >= tau) out.entries.push_back(e);
  return out;
}

inline RankedList select_top_n(const RankedList& r, std::size_t n_select) {
  if (n_select == 0 || n_select > r.size())
    throw std::invalid_argument("select_top_n: n must be in [1, " + std::to_string(r.size()) + "]");
  RankedList out = r;
  out.entries.resize(n_select);
  return out;
}

/// Rank of each feature (1-based), indexed by feature.
inline std::vector<std::size_t> feature_ranks(const RankedList& r) {
  std::vector<std::size_t> rank(r.size(), 0);
  for (const auto& e : r.entries) rank.at(e.index) = e.rank;
  return rank;
}

}  // namespace relief
