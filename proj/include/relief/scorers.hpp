#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relief/dataset.hpp"
#include "relief/metric.hpp"
#include "relief/parallel.hpp"
#include "relief/rng.hpp"

namespace relief {

enum class Algorithm { relief, relieff, surf, surf_star, swrf_star, multisurf_star, multisurf, reliefseq };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::relief,         Algorithm::relieff,   Algorithm::surf,
                                                Algorithm::surf_star,      Algorithm::swrf_star, Algorithm::multisurf_star,
                                                Algorithm::multisurf,      Algorithm::reliefseq};

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::relief: return "relief";
    case Algorithm::relieff: return "relieff";
    case Algorithm::surf: return "surf";
    case Algorithm::surf_star: return "surfstar";
    case Algorithm::swrf_star: return "swrfstar";
    case Algorithm::multisurf_star: return "multisurfstar";
    case Algorithm::multisurf: return "multisurf";
    case Algorithm::reliefseq: return "reliefseq";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto a : kAllAlgorithms)
    if (s == algorithm_name(a)) return a;
  if (s == "surf_star") return Algorithm::surf_star;
  if (s == "swrf_star") return Algorithm::swrf_star;
  if (s == "multisurf_star") return Algorithm::multisurf_star;
  return std::nullopt;
}

struct AlgoConfig {
  Algorithm algorithm = Algorithm::multisurf;
  std::size_t k = 10;            // relieff
  std::optional<std::size_t> m;  // relief only; default n
  std::size_t k_max = 10;        // reliefseq
  std::uint64_t seed = 0;
  // swrf*: logistic half-width as a multiple of the pairwise distance std.
  double sigmoid_width = 0.5;
};

enum class Role { near, far };

struct NeighborEntry {
  std::size_t neighbor;
  Role role;
  double weight;  // in (0, 1]
};

struct NeighborAssignment {
  std::size_t target = 0;
  std::vector<NeighborEntry> entries;
};

/// How far instances contribute: diff with the sign flipped, or agreement
/// (1 - diff) with the sign flipped.
enum class FarScoring { opposite, inverted };

/// Per-side sums. Each target adds its mass-normalized side averages, so the
/// masses count contributing targets and the finalized score lies in [-1, 1].
struct Accumulator {
  std::vector<double> hit_sum;
  std::vector<double> miss_sum;
  double hit_mass = 0.0;
  double miss_mass = 0.0;

  explicit Accumulator(std::size_t features = 0) : hit_sum(features, 0.0), miss_sum(features, 0.0) {}

  void merge(const Accumulator& o) {
    for (std::size_t f = 0; f < hit_sum.size(); ++f) {
      hit_sum[f] += o.hit_sum[f];
      miss_sum[f] += o.miss_sum[f];
    }
    hit_mass += o.hit_mass;
    miss_mass += o.miss_mass;
  }

  std::vector<double> finalize() const {
    std::vector<double> w(hit_sum.size(), 0.0);
    for (std::size_t f = 0; f < w.size(); ++f) {
      const double miss = miss_mass > 0 ? miss_sum[f] / miss_mass : 0.0;
      const double hit = hit_mass > 0 ? hit_sum[f] / hit_mass : 0.0;
      w[f] = miss - hit;
    }
    return w;
  }
};

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr std::size_t kTargetBlock = 32;

/// Prior weight of a miss from class `other` for a target of class `own`:
/// P(other) / (1 - P(own)), computed from counts.
inline std::vector<double> miss_factors(const Dataset& d) {
  const std::size_t c = d.classes();
  const auto n = static_cast<double>(d.instances());
  std::vector<double> f(c * c, 0.0);
  for (std::size_t own = 0; own < c; ++own)
    for (std::size_t other = 0; other < c; ++other)
      if (own != other)
        f[own * c + other] = static_cast<double>(d.class_count(other)) / (n - static_cast<double>(d.class_count(own)));
  return f;
}

/// Target loop shared by every core scorer. `model(target, row, out)` fills
/// the neighbor assignment for one target from its distance row.
template <class Model>
Accumulator accumulate(const Dataset& d, const DistanceMatrix& D, std::span<const std::size_t> targets,
                       FarScoring far, const EngineOptions& opts, Model&& model) {
  const std::size_t a = d.features();
  const std::size_t c = d.classes();
  const auto factors = miss_factors(d);
  const DiffKernel& kernel = D.kernel();
  const std::size_t blocks = block_count(targets.size(), kTargetBlock);
  std::vector<Accumulator> partial(blocks, Accumulator(a));

  for_each_block(blocks, opts.threads, [&](std::size_t b) {
    auto local_model = model;  // models may carry mutable scratch space
    Accumulator& acc = partial[b];
    NeighborAssignment na;
    std::vector<double> scratch, diffs(a), pos(a), neg(a);
    const std::size_t end = std::min(targets.size(), (b + 1) * kTargetBlock);
    for (std::size_t t = b * kTargetBlock; t < end; ++t) {
      const std::size_t i = targets[t];
      const std::size_t ci = d.label(i);
      na.target = i;
      na.entries.clear();
      local_model(i, D.row(i, scratch), na);
      std::fill(pos.begin(), pos.end(), 0.0);
      std::fill(neg.begin(), neg.end(), 0.0);
      double pos_mass = 0.0;
      double neg_mass = 0.0;
      for (const auto& e : na.entries) {
        const std::size_t cj = d.label(e.neighbor);
        const bool hit = cj == ci;
        const double w = hit ? e.weight : e.weight * factors[ci * c + cj];
        const bool near = e.role == Role::near;
        const bool positive = near != hit;  // near miss or far hit
        const bool agreement = !near && far == FarScoring::inverted;
        kernel.diff_row(i, e.neighbor, diffs);
        auto& side = positive ? pos : neg;
        if (agreement) {
          for (std::size_t f = 0; f < a; ++f) side[f] += w * (1.0 - diffs[f]);
        } else {
          for (std::size_t f = 0; f < a; ++f) side[f] += w * diffs[f];
        }
        (positive ? pos_mass : neg_mass) += w;
      }
      if (pos_mass > 0) {
        for (std::size_t f = 0; f < a; ++f) acc.miss_sum[f] += pos[f] / pos_mass;
        acc.miss_mass += 1.0;
      }
      if (neg_mass > 0) {
        for (std::size_t f = 0; f < a; ++f) acc.hit_sum[f] += neg[f] / neg_mass;
        acc.hit_mass += 1.0;
      }
    }
  });

  Accumulator total(a);
  for (const auto& p : partial) total.merge(p);
  return total;
}

inline std::vector<std::size_t> all_targets(std::size_t n) {
  std::vector<std::size_t> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = i;
  return t;
}

/// Appends the k nearest instances of class `cls` (excluding the target),
/// ordered by (distance, index).
inline void nearest_of_class(const Dataset& d, std::size_t target, std::span<const double> row, std::size_t cls,
                             std::size_t k, std::vector<std::pair<double, std::size_t>>& buf,
                             std::vector<NeighborEntry>& out) {
  buf.clear();
  for (std::size_t j = 0; j < row.size(); ++j)
    if (j != target && d.label(j) == cls) buf.emplace_back(row[j], j);
  k = std::min(k, buf.size());
  std::partial_sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(k), buf.end());
  for (std::size_t r = 0; r < k; ++r) out.push_back({buf[r].second, Role::near, 1.0});
}

inline std::string singleton_warning(const Dataset& d) {
  std::string names;
  for (std::size_t c = 0; c < d.classes(); ++c)
    if (d.class_count(c) == 1) names += (names.empty() ? "" : ", ") + d.class_names()[c];
  if (names.empty()) return {};
  return "single-instance class (" + names + "): hit side skipped for its targets";
}

}  // namespace detail

struct ScoreDetail {
  Accumulator accumulator;
  WeightVector weights;
};

/// Original Relief: one nearest hit and one nearest miss (any other class)
/// for m targets drawn without replacement. Ties go to the lowest index.
inline ScoreDetail score_relief_detailed(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                         const EngineOptions& opts = {}) {
  const std::size_t n = d.instances();
  const std::size_t m = cfg.m.value_or(n);
  if (m == 0 || m > n) throw std::invalid_argument("relief: m must be in [1, n]");
  std::vector<std::size_t> targets;
  if (m == n) {
    targets = detail::all_targets(n);
  } else {
    Rng rng(cfg.seed);
    targets = rng.sample(n, m);
    std::sort(targets.begin(), targets.end());
  }
  auto acc = detail::accumulate(d, D, targets, FarScoring::opposite, opts,
                                [&](std::size_t i, std::span<const double> row, NeighborAssignment& out) {
                                  const std::size_t ci = d.label(i);
                                  std::size_t hit = n, miss = n;
                                  for (std::size_t j = 0; j < n; ++j) {
                                    if (j == i) continue;
                                    auto& best = d.label(j) == ci ? hit : miss;
                                    if (best == n || row[j] < row[best]) best = j;
                                  }
                                  if (hit != n) out.entries.push_back({hit, Role::near, 1.0});
                                  if (miss != n) out.entries.push_back({miss, Role::near, 1.0});
                                });
  auto w = make_weights(d, acc.finalize(), "relief");
  w.params["m"] = std::to_string(m);
  if (m < n) w.params["seed"] = std::to_string(cfg.seed);
  if (auto msg = detail::singleton_warning(d); !msg.empty()) w.warnings.push_back(msg);
  return {std::move(acc), std::move(w)};
}

/// ReliefF: k nearest hits and k nearest misses from each other class, the
/// misses weighted by P(C) / (1 - P(class of target)).
inline ScoreDetail score_relieff_detailed(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                          const EngineOptions& opts = {}) {
  if (cfg.k == 0) throw std::invalid_argument("relieff: k must be >= 1");
  const auto targets = detail::all_targets(d.instances());
  auto acc = detail::accumulate(d, D, targets, FarScoring::opposite, opts,
                                [&, buf = std::vector<std::pair<double, std::size_t>>{}](
                                    std::size_t i, std::span<const double> row, NeighborAssignment& out) mutable {
                                  for (std::size_t c = 0; c < d.classes(); ++c)
                                    detail::nearest_of_class(d, i, row, c, cfg.k, buf, out.entries);
                                });
  auto w = make_weights(d, acc.finalize(), "relieff");
  std::size_t k_eff = cfg.k;
  for (std::size_t c = 0; c < d.classes(); ++c) {
    const std::size_t hits = d.class_count(c) - 1;
    if (hits > 0) k_eff = std::min(k_eff, hits);
    k_eff = std::min(k_eff, d.class_count(c));
  }
  w.params["k"] = std::to_string(cfg.k);
  w.params["k_effective"] = std::to_string(k_eff);
  if (k_eff < cfg.k)
    w.warnings.push_back("k=" + std::to_string(cfg.k) + " exceeds available neighbors; effective k=" +
                         std::to_string(k_eff));
  if (auto msg = detail::singleton_warning(d); !msg.empty()) w.warnings.push_back(msg);
  return {std::move(acc), std::move(w)};
}

/// SURF: every instance closer than the mean pairwise distance is a neighbor.
inline ScoreDetail score_surf_detailed(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts = {}) {
  const double T = D.global_mean();
  const auto targets = detail::all_targets(d.instances());
  auto acc = detail::accumulate(d, D, targets, FarScoring::opposite, opts,
                                [&](std::size_t i, std::span<const double> row, NeighborAssignment& out) {
                                  for (std::size_t j = 0; j < row.size(); ++j)
                                    if (j != i && row[j] < T) out.entries.push_back({j, Role::near, 1.0});
                                });
  auto w = make_weights(d, acc.finalize(), "surf");
  w.params["threshold"] = detail::format_real(T);
  return {std::move(acc), std::move(w)};
}

/// SURF*: SURF neighbors score normally; every other instance scores with
/// the opposite sign.
inline ScoreDetail score_surf_star_detailed(const Dataset& d, const DistanceMatrix& D,
                                            const EngineOptions& opts = {}) {
  const double T = D.global_mean();
  const auto targets = detail::all_targets(d.instances());
  auto acc = detail::accumulate(d, D, targets, FarScoring::opposite, opts,
                                [&](std::size_t i, std::span<const double> row, NeighborAssignment& out) {
                                  for (std::size_t j = 0; j < row.size(); ++j)
                                    if (j != i) out.entries.push_back({j, row[j] < T ? Role::near : Role::far, 1.0});
                                });
  auto w = make_weights(d, acc.finalize(), "surfstar");
  w.params["threshold"] = detail::format_real(T);
  return {std::move(acc), std::move(w)};
}

/// Signed SWRF* instance weight 2 / (1 + exp((dist - T) / width)) - 1.
inline double swrf_weight(double dist, double threshold, double width) {
  return 2.0 / (1.0 + std::exp((dist - threshold) / width)) - 1.0;
}

/// SWRF*: sigmoid instance weights centred on the mean pairwise distance;
/// positive weights score normally, negative weights score oppositely.
inline ScoreDetail score_swrf_star_detailed(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                            const EngineOptions& opts = {}) {
  if (!(cfg.sigmoid_width > 0.0)) throw std::invalid_argument("swrfstar: sigmoid width must be > 0");
  const double sigma = D.global_std();
  if (sigma == 0.0) {
    auto out = score_surf_star_detailed(d, D, opts);
    out.weights.algorithm = "swrfstar";
    out.weights.params["sigmoid_width"] = detail::format_real(cfg.sigmoid_width);
    out.weights.warnings.push_back("pairwise distance std is 0; swrfstar fell back to the surfstar threshold");
    return out;
  }
  const double T = D.global_mean();
  const double width = cfg.sigmoid_width * sigma;
  const auto targets = detail::all_targets(d.instances());
  auto acc = detail::accumulate(d, D, targets, FarScoring::opposite, opts,
                                [&](std::size_t i, std::span<const double> row, NeighborAssignment& out) {
                                  for (std::size_t j = 0; j < row.size(); ++j) {
                                    if (j == i) continue;
                                    const double s = swrf_weight(row[j], T, width);
                                    if (s > 0) out.entries.push_back({j, Role::near, s});
                                    else if (s < 0) out.entries.push_back({j, Role::far, -s});
                                  }
                                });
  auto w = make_weights(d, acc.finalize(), "swrfstar");
  w.params["threshold"] = detail::format_real(T);
  w.params["sigmoid_width"] = detail::format_real(cfg.sigmoid_width);
  return {std::move(acc), std::move(w)};
}

namespace detail {

inline ScoreDetail multisurf_common(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts,
                                    bool with_far, const char* name) {
  const auto& mean = D.target_mean();
  const auto& sd = D.target_std();
  const auto targets = all_targets(d.instances());
  auto acc = accumulate(d, D, targets, FarScoring::inverted, opts,
                        [&](std::size_t i, std::span<const double> row, NeighborAssignment& out) {
                          const double near_below = mean[i] - sd[i] / 2.0;
                          const double far_above = mean[i] + sd[i] / 2.0;
                          for (std::size_t j = 0; j < row.size(); ++j) {
                            if (j == i) continue;
                            if (row[j] < near_below) out.entries.push_back({j, Role::near, 1.0});
                            else if (with_far && row[j] > far_above) out.entries.push_back({j, Role::far, 1.0});
                          }
                        });
  auto w = make_weights(d, acc.finalize(), name);
  return {std::move(acc), std::move(w)};
}

}  // namespace detail

/// MultiSURF*: per-target threshold T_i with a dead-band of +-sigma_i/2.
/// Far instances score agreement with the sign flipped.
inline ScoreDetail score_multisurf_star_detailed(const Dataset& d, const DistanceMatrix& D,
                                                 const EngineOptions& opts = {}) {
  return detail::multisurf_common(d, D, opts, true, "multisurfstar");
}

/// MultiSURF: MultiSURF* near neighbors only.
inline ScoreDetail score_multisurf_detailed(const Dataset& d, const DistanceMatrix& D,
                                            const EngineOptions& opts = {}) {
  return detail::multisurf_common(d, D, opts, false, "multisurf");
}

struct ReliefSeqResult {
  WeightVector weights;
  std::vector<std::size_t> best_k;  // per feature, smallest k attaining the max
};

/// ReliefSeq: per feature, the largest ReliefF score over k = 1..k_max.
inline ReliefSeqResult score_reliefseq_detailed(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                                const EngineOptions& opts = {}) {
  if (cfg.k_max == 0) throw std::invalid_argument("reliefseq: k_max must be >= 1");
  const std::size_t largest_class = *std::max_element(d.class_counts().begin(), d.class_counts().end());
  const std::size_t k_max = std::min(cfg.k_max, largest_class);
  ReliefSeqResult out;
  out.best_k.assign(d.features(), 1);
  std::vector<double> best;
  AlgoConfig per_k = cfg;
  for (std::size_t k = 1; k <= k_max; ++k) {
    per_k.k = k;
    const auto w = score_relieff_detailed(d, D, per_k, opts).weights;
    if (k == 1) {
      best = w.scores;
      continue;
    }
    for (std::size_t f = 0; f < best.size(); ++f)
      if (w.scores[f] > best[f]) {
        best[f] = w.scores[f];
        out.best_k[f] = k;
      }
  }
  out.weights = make_weights(d, std::move(best), "reliefseq");
  out.weights.params["k_max"] = std::to_string(cfg.k_max);
  std::string ks;
  for (std::size_t f = 0; f < out.best_k.size(); ++f) ks += (f ? "," : "") + std::to_string(out.best_k[f]);
  out.weights.params["best_k"] = ks;
  if (k_max < cfg.k_max) {
    out.weights.params["k_max_effective"] = std::to_string(k_max);
    out.weights.warnings.push_back("k_max=" + std::to_string(cfg.k_max) + " exceeds available neighbors; capped at " +
                                   std::to_string(k_max));
  }
  if (auto msg = detail::singleton_warning(d); !msg.empty()) out.weights.warnings.push_back(msg);
  return out;
}

inline WeightVector score_relief(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                 const EngineOptions& opts = {}) {
  return score_relief_detailed(d, D, cfg, opts).weights;
}
inline WeightVector score_relieff(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                  const EngineOptions& opts = {}) {
  return score_relieff_detailed(d, D, cfg, opts).weights;
}
inline WeightVector score_surf(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts = {}) {
  return score_surf_detailed(d, D, opts).weights;
}
inline WeightVector score_surf_star(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts = {}) {
  return score_surf_star_detailed(d, D, opts).weights;
}
inline WeightVector score_swrf_star(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                    const EngineOptions& opts = {}) {
  return score_swrf_star_detailed(d, D, cfg, opts).weights;
}
inline WeightVector score_multisurf_star(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts = {}) {
  return score_multisurf_star_detailed(d, D, opts).weights;
}
inline WeightVector score_multisurf(const Dataset& d, const DistanceMatrix& D, const EngineOptions& opts = {}) {
  return score_multisurf_detailed(d, D, opts).weights;
}
inline WeightVector score_reliefseq(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                                    const EngineOptions& opts = {}) {
  return score_reliefseq_detailed(d, D, cfg, opts).weights;
}

inline void validate(const AlgoConfig& cfg) {
  if (cfg.m && cfg.algorithm != Algorithm::relief)
    throw std::invalid_argument("m applies to relief only; other algorithms use every instance as a target");
  if (cfg.algorithm == Algorithm::relieff && cfg.k == 0) throw std::invalid_argument("k must be >= 1");
  if (cfg.algorithm == Algorithm::reliefseq && cfg.k_max == 0) throw std::invalid_argument("k_max must be >= 1");
}

/// Scores with a precomputed distance matrix.
inline WeightVector score_with(const Dataset& d, const DistanceMatrix& D, const AlgoConfig& cfg,
                               const EngineOptions& opts = {}) {
  validate(cfg);
  switch (cfg.algorithm) {
    case Algorithm::relief: return score_relief(d, D, cfg, opts);
    case Algorithm::relieff: return score_relieff(d, D, cfg, opts);
    case Algorithm::surf: return score_surf(d, D, opts);
    case Algorithm::surf_star: return score_surf_star(d, D, opts);
    case Algorithm::swrf_star: return score_swrf_star(d, D, cfg, opts);
    case Algorithm::multisurf_star: return score_multisurf_star(d, D, opts);
    case Algorithm::multisurf: return score_multisurf(d, D, opts);
    case Algorithm::reliefseq: return score_reliefseq(d, D, cfg, opts);
  }
  throw std::invalid_argument("unknown algorithm");
}

inline WeightVector score(const Dataset& d, const AlgoConfig& cfg, const EngineOptions& opts = {}) {
  validate(cfg);
  return score_with(d, pairwise_distances(d, opts), cfg, opts);
}

}  // namespace relief
