#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relief/dataset.hpp"
#include "relief/metric.hpp"
#include "relief/parallel.hpp"
#include "relief/rng.hpp"
#include "relief/scorers.hpp"
#include "relief/selection.hpp"

namespace relief {

// ---------------------------------------------------------------------------
// TuRF
// ---------------------------------------------------------------------------

struct TurfConfig {
  AlgoConfig core;
  std::size_t iterations = 1;
  // Fraction of the current survivors removed per iteration; defaults to
  // 1/iterations. Zero disables removal.
  std::optional<double> removal_fraction;

  double fraction() const { return removal_fraction.value_or(1.0 / static_cast<double>(iterations)); }
};

struct TurfRound {
  int iteration = 0;
  std::vector<std::size_t> features;  // original indices scored this round
  std::vector<double> scores;         // parallel to `features`
  std::vector<std::size_t> removed;   // original indices eliminated after scoring
};

struct TurfResult {
  WeightVector weights;
  std::vector<std::size_t> survivors;  // original indices, ascending
  std::vector<TurfRound> trace;
};

/// Survivor count after one elimination round: floor(remaining * (1 - f)),
/// removing at least one feature and keeping at least one.
inline std::size_t turf_survivors(std::size_t remaining, double fraction) {
  if (fraction == 0.0 || remaining <= 1) return remaining;
  auto keep = static_cast<std::size_t>(std::floor(static_cast<double>(remaining) * (1.0 - fraction) + 1e-9));
  keep = std::min(keep, remaining - 1);
  return std::max<std::size_t>(keep, 1);
}

/// Survivor counts after each iteration. Throws if the schedule would have
/// to remove a feature from a single survivor.
inline std::vector<std::size_t> turf_schedule(std::size_t features, std::size_t iterations, double fraction) {
  if (iterations == 0) throw std::invalid_argument("turf: iterations must be >= 1");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("turf: removal fraction must be in [0, 1]");
  std::vector<std::size_t> counts;
  std::size_t remaining = features;
  for (std::size_t it = 0; it < iterations; ++it) {
    if (fraction > 0.0 && remaining < 2)
      throw std::invalid_argument("turf: " + std::to_string(iterations) + " iterations cannot run on " +
                                  std::to_string(features) + " features (need at least one removal per iteration)");
    remaining = turf_survivors(remaining, fraction);
    counts.push_back(remaining);
  }
  return counts;
}

using SubsetScorer = std::function<WeightVector(const Dataset& subset, std::span<const std::size_t> original,
                                                int iteration)>;

namespace detail {

inline TurfResult turf_loop(const Dataset& d, std::size_t iterations, double fraction, const SubsetScorer& scorer,
                            const std::string& name) {
  turf_schedule(d.features(), iterations, fraction);
  const std::size_t a = d.features();
  std::vector<std::size_t> alive(a);
  for (std::size_t f = 0; f < a; ++f) alive[f] = f;

  TurfResult out;
  out.weights = make_weights(d, std::vector<double>(a, 0.0), name);
  std::vector<int> inner_tier(a, 0);
  std::vector<int> removed_round(a, 0);
  for (std::size_t it = 1; it <= iterations; ++it) {
    const auto sub = d.select_features(alive);
    auto w = scorer(sub, alive, static_cast<int>(it));
    auto ranked = rank_features(w);
    TurfRound round;
    round.iteration = static_cast<int>(it);
    round.features = alive;
    round.scores = w.scores;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      out.weights.scores[alive[k]] = w.scores[k];
      inner_tier[alive[k]] = w.tier.empty() ? 0 : w.tier[k];
    }
    for (const auto& msg : w.warnings) out.weights.warnings.push_back("iteration " + std::to_string(it) + ": " + msg);
    const std::size_t keep = turf_survivors(alive.size(), fraction);
    std::vector<std::size_t> next;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      const auto original = alive[ranked.entries[r].index];
      if (r < keep) {
        next.push_back(original);
      } else {
        round.removed.push_back(original);
        removed_round[original] = static_cast<int>(it);
      }
    }
    std::sort(next.begin(), next.end());
    alive = std::move(next);
    out.trace.push_back(std::move(round));
  }
  const int p = static_cast<int>(iterations);
  for (std::size_t f = 0; f < a; ++f)
    out.weights.tier[f] = removed_round[f] == 0 ? inner_tier[f] : p - removed_round[f] + 2;
  out.weights.iteration = p;
  out.weights.params["iterations"] = std::to_string(iterations);
  out.weights.params["removal_fraction"] = detail::format_real(fraction);
  out.survivors = alive;
  return out;
}

}  // namespace detail

/// Recursive elimination: score the survivors, drop the lowest-ranked
/// fraction, repeat. Distances are recomputed over survivors every round.
inline TurfResult run_turf(const Dataset& d, const TurfConfig& cfg, const EngineOptions& opts = {}) {
  validate(cfg.core);
  const auto scorer = [&](const Dataset& sub, std::span<const std::size_t>, int) { return score(sub, cfg.core, opts); };
  auto out = detail::turf_loop(d, cfg.iterations, cfg.fraction(), scorer,
                               std::string("turf(") + algorithm_name(cfg.core.algorithm) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// VLSReliefF
// ---------------------------------------------------------------------------

struct VlsConfig {
  AlgoConfig core{.algorithm = Algorithm::relieff};
  std::size_t subset_size = 2;
  std::size_t num_subsets = 1;
  std::uint64_t seed = 0;
  // When non-empty these subsets (original feature indices) are used instead
  // of random draws.
  std::vector<std::vector<std::size_t>> subsets;
};

struct VlsResult {
  WeightVector weights;
  std::vector<std::vector<std::size_t>> subsets;
  std::size_t covered = 0;  // features sampled at least once
};

/// Probability that a fixed feature pair co-occurs in at least one of S
/// random subsets of size a_s drawn from a features.
inline double pair_coverage_probability(std::size_t a, std::size_t a_s, std::size_t S) {
  if (a_s < 2 || a_s > a || S == 0) throw std::invalid_argument("pair_coverage_probability: need 2 <= a_s <= a, S >= 1");
  const double q = (static_cast<double>(a_s) * static_cast<double>(a_s - 1)) /
                   (static_cast<double>(a) * static_cast<double>(a - 1));
  return 1.0 - std::pow(1.0 - q, static_cast<double>(S));
}

inline std::vector<std::vector<std::size_t>> draw_subsets(std::size_t a, std::size_t a_s, std::size_t S,
                                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto sub = rng.sample(a, a_s);
    std::sort(sub.begin(), sub.end());
    out.push_back(std::move(sub));
  }
  return out;
}

/// Scores each subset with the core algorithm and keeps, per feature, the
/// maximum local weight. Features never sampled are marked unscored (tier 1).
inline VlsResult run_vls_relieff(const Dataset& d, const VlsConfig& cfg, const EngineOptions& opts = {}) {
  validate(cfg.core);
  const std::size_t a = d.features();
  VlsResult out;
  if (!cfg.subsets.empty()) {
    out.subsets = cfg.subsets;
    for (auto& s : out.subsets) {
      if (s.empty()) throw std::invalid_argument("vls: empty subset");
      for (auto f : s)
        if (f >= a) throw std::invalid_argument("vls: subset feature index " + std::to_string(f) + " out of range");
    }
  } else {
    if (cfg.subset_size < 2 || cfg.subset_size >= a)
      throw std::invalid_argument("vls: subset size must satisfy 2 <= a_s < a (a=" + std::to_string(a) + ")");
    if (cfg.num_subsets == 0) throw std::invalid_argument("vls: number of subsets must be >= 1");
    out.subsets = draw_subsets(a, cfg.subset_size, cfg.num_subsets, cfg.seed);
  }

  std::vector<WeightVector> local(out.subsets.size());
  EngineOptions inner = opts;
  inner.threads = 1;
  for_each_block(out.subsets.size(), opts.threads, [&](std::size_t s) {
    local[s] = score(d.select_features(out.subsets[s]), cfg.core, inner);
  });

  std::vector<double> best(a, 0.0);
  std::vector<bool> seen(a, false);
  for (std::size_t s = 0; s < out.subsets.size(); ++s)
    for (std::size_t k = 0; k < out.subsets[s].size(); ++k) {
      const auto f = out.subsets[s][k];
      const double v = local[s].scores[k];
      if (!seen[f] || v > best[f]) best[f] = v;
      seen[f] = true;
    }
  out.weights = make_weights(d, std::move(best), std::string("vls(") + algorithm_name(cfg.core.algorithm) + ")");
  for (std::size_t f = 0; f < a; ++f) {
    out.weights.tier[f] = seen[f] ? 0 : 1;
    out.covered += seen[f] ? 1 : 0;
  }
  out.weights.params["subsets"] = std::to_string(out.subsets.size());
  if (cfg.subsets.empty()) {
    out.weights.params["subset_size"] = std::to_string(cfg.subset_size);
    out.weights.params["seed"] = std::to_string(cfg.seed);
  }
  out.weights.params["covered"] = std::to_string(out.covered);
  if (out.covered < a)
    out.weights.warnings.push_back("vls: " + std::to_string(a - out.covered) + " of " + std::to_string(a) +
                                   " features never sampled (covered " + std::to_string(out.covered) + ")");
  return out;
}

/// TuRF elimination where every round is scored by VLSReliefF on the
/// survivors. Explicit subsets are restricted to survivors each round.
inline TurfResult run_ivls_relieff(const Dataset& d, const VlsConfig& vls, const TurfConfig& turf,
                                   const EngineOptions& opts = {}) {
  validate(vls.core);
  const auto scorer = [&](const Dataset& sub, std::span<const std::size_t> original, int iteration) {
    VlsConfig cfg = vls;
    cfg.seed = iteration == 1 ? vls.seed : derive_seed(vls.seed, static_cast<std::uint64_t>(iteration));
    std::vector<std::string> notes;
    if (!vls.subsets.empty()) {
      cfg.subsets.clear();
      for (const auto& s : vls.subsets) {
        std::vector<std::size_t> mapped;
        for (auto f : s) {
          const auto it = std::find(original.begin(), original.end(), f);
          if (it != original.end()) mapped.push_back(static_cast<std::size_t>(it - original.begin()));
        }
        if (!mapped.empty()) cfg.subsets.push_back(std::move(mapped));
      }
      if (cfg.subsets.empty()) cfg.subsets.push_back(detail::all_targets(sub.features()));
    } else if (cfg.subset_size >= sub.features()) {
      cfg.subset_size = sub.features() - 1;
      if (cfg.subset_size < 2) {
        cfg.subsets = {detail::all_targets(sub.features())};
        notes.push_back("subset size exceeds survivors; scored all survivors as one subset");
      } else {
        notes.push_back("subset size capped at " + std::to_string(cfg.subset_size));
      }
    }
    auto w = run_vls_relieff(sub, cfg, opts).weights;
    w.warnings.insert(w.warnings.end(), notes.begin(), notes.end());
    return w;
  };
  return detail::turf_loop(d, turf.iterations, turf.fraction(), scorer,
                           std::string("ivls(") + algorithm_name(vls.core.algorithm) + ")");
}

// ---------------------------------------------------------------------------
// Iterative distance reweighting
// ---------------------------------------------------------------------------

struct IterativeConfig {
  AlgoConfig core;
  std::size_t max_iterations = 10;
  double tolerance = 1e-3;  // L-infinity change in W
};

struct IterativeResult {
  WeightVector weights;
  std::size_t iterations_used = 0;
  bool converged = false;
  std::vector<WeightVector> history;
};

/// Rescores with distances weighted by phi_A = max(W_prev[A], 0) until the
/// weights move less than the tolerance. W_0 is all zeros, which (like any
/// all-zero phi) falls back to the unweighted distance.
inline IterativeResult run_iterative_reweighting(const Dataset& d, const IterativeConfig& cfg,
                                                 const EngineOptions& opts = {}) {
  validate(cfg.core);
  if (cfg.max_iterations == 0) throw std::invalid_argument("iterate: max iterations must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("iterate: tolerance must be > 0");
  IterativeResult out;
  std::vector<double> prev(d.features(), 0.0);
  std::vector<double> phi(d.features(), 0.0);
  for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
    for (std::size_t f = 0; f < phi.size(); ++f) phi[f] = std::max(prev[f], 0.0);
    const auto D = pairwise_distances(d, opts, phi);
    auto w = score_with(d, D, cfg.core, opts);
    double delta = 0.0;
    for (std::size_t f = 0; f < prev.size(); ++f) delta = std::max(delta, std::abs(w.scores[f] - prev[f]));
    prev = w.scores;
    w.iteration = static_cast<int>(t);
    out.history.push_back(w);
    out.iterations_used = t;
    if (delta < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.weights = out.history.back();
  out.weights.algorithm = std::string("iterate(") + algorithm_name(cfg.core.algorithm) + ")";
  out.weights.params["max_iterations"] = std::to_string(cfg.max_iterations);
  out.weights.params["tolerance"] = detail::format_real(cfg.tolerance);
  out.weights.params["converged"] = out.converged ? "true" : "false";
  if (!out.converged)
    out.weights.warnings.push_back("iterate: no convergence after " + std::to_string(cfg.max_iterations) +
                                   " iterations");
  return out;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// A core scorer with optional wrappers. TuRF + VLS composes to iVLSReliefF;
/// iterative reweighting wraps the core alone.
struct Pipeline {
  struct Turf {
    std::size_t iterations = 1;
    std::optional<double> fraction;
  };
  struct Vls {
    std::size_t num_subsets = 1;
    std::size_t subset_size = 2;
    std::uint64_t seed = 0;
  };
  struct Iterate {
    std::size_t max_iterations = 10;
    double tolerance = 1e-3;
  };

  AlgoConfig core;
  std::optional<Turf> turf;
  std::optional<Vls> vls;
  std::optional<Iterate> iterate;

  std::string label() const {
    std::string s = algorithm_name(core.algorithm);
    if (core.algorithm == Algorithm::relieff) s += "(k=" + std::to_string(core.k) + ")";
    if (core.algorithm == Algorithm::reliefseq) s += "(k_max=" + std::to_string(core.k_max) + ")";
    if (vls) s = "vls" + std::to_string(vls->num_subsets) + "x" + std::to_string(vls->subset_size) + "(" + s + ")";
    if (turf) s = "turf" + std::to_string(turf->iterations) + "(" + s + ")";
    if (iterate) s = "iterate(" + s + ")";
    return s;
  }
};

inline void validate(const Pipeline& p) {
  validate(p.core);
  if (p.iterate && (p.turf || p.vls))
    throw std::invalid_argument("iterative reweighting cannot be combined with turf or vls");
}

inline WeightVector run_pipeline(const Dataset& d, const Pipeline& p, const EngineOptions& opts = {}) {
  validate(p);
  if (p.iterate)
    return run_iterative_reweighting(d, {p.core, p.iterate->max_iterations, p.iterate->tolerance}, opts).weights;
  std::optional<VlsConfig> vls;
  if (p.vls) vls = VlsConfig{p.core, p.vls->subset_size, p.vls->num_subsets, p.vls->seed, {}};
  if (p.turf) {
    TurfConfig turf{p.core, p.turf->iterations, p.turf->fraction};
    return vls ? run_ivls_relieff(d, *vls, turf, opts).weights : run_turf(d, turf, opts).weights;
  }
  if (vls) return run_vls_relieff(d, *vls, opts).weights;
  return score(d, p.core, opts);
}

}  // namespace relief
