#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "relief/dataset.hpp"
#include "relief/rng.hpp"
#include "relief/scorers.hpp"
#include "relief/selection.hpp"
#include "relief/wrappers.hpp"

namespace relief {

enum class SimModel { parity_k, main_effect, heterogeneous, boolean_concept };

struct SimulationSpec {
  SimModel model = SimModel::parity_k;
  std::size_t n = 200;
  std::size_t a = 20;
  std::size_t relevant_count = 2;  // parity order for parity_k
  double flip_prob = 0.0;          // label-noise probability in [0, 0.5)
  std::uint64_t seed = 0;
  // 2 = binary features; 3 = genotype-style {0, 1, 2}, uniform frequencies.
  int levels = 2;
  // Binary only: feature f of instance i is bit f of i, so every value
  // combination appears equally often (when n is a multiple of 2^a).
  bool enumerate = false;
};

/// A simulated dataset plus the indices of its ground-truth relevant features.
struct SimulatedData {
  Dataset data;
  std::vector<std::size_t> relevant;
};

inline std::string model_name(const SimulationSpec& s) {
  switch (s.model) {
    case SimModel::parity_k: return "parity" + std::to_string(s.relevant_count);
    case SimModel::main_effect: return "main";
    case SimModel::heterogeneous: return "het";
    case SimModel::boolean_concept: return "boolean";
  }
  return "?";
}

/// Parses "parity2", "parity3", ..., "main", "het", "boolean".
inline std::optional<SimulationSpec> parse_model(std::string_view s) {
  SimulationSpec spec;
  if (s == "main") {
    spec.model = SimModel::main_effect;
    spec.relevant_count = 1;
  } else if (s == "het") {
    spec.model = SimModel::heterogeneous;
    spec.relevant_count = 4;
  } else if (s == "boolean") {
    spec.model = SimModel::boolean_concept;
    spec.relevant_count = 3;
    spec.a = 8;
  } else if (s.starts_with("parity") && s.size() > 6) {
    std::size_t k = 0;
    for (char ch : s.substr(6)) {
      if (ch < '0' || ch > '9') return std::nullopt;
      k = k * 10 + static_cast<std::size_t>(ch - '0');
    }
    if (k < 2) return std::nullopt;
    spec.model = SimModel::parity_k;
    spec.relevant_count = k;
  } else {
    return std::nullopt;
  }
  return spec;
}

namespace detail {

inline void check_common(const SimulationSpec& s) {
  if (s.n < 2) throw std::invalid_argument("simulation: n must be >= 2");
  if (!(s.flip_prob >= 0.0 && s.flip_prob < 0.5)) throw std::invalid_argument("simulation: flip probability must be in [0, 0.5)");
  if (s.levels != 2 && s.levels != 3) throw std::invalid_argument("simulation: levels must be 2 or 3");
  if (s.enumerate && s.levels != 2) throw std::invalid_argument("simulation: enumerate mode needs binary features");
  if (s.relevant_count >= s.a) throw std::invalid_argument("simulation: relevant_count must be < a");
}

inline std::vector<FeatureDescriptor> binary_descriptors(std::size_t a) {
  std::vector<FeatureDescriptor> out(a);
  for (std::size_t f = 0; f < a; ++f) {
    out[f].name = "A" + std::to_string(f + 1);
    out[f].kind = FeatureKind::discrete;
  }
  return out;
}

/// Fills instance features (uniform draws or enumeration) row by row and
/// labels each row with `concept(row) XOR flip`.
template <class Concept>
SimulatedData simulate(const SimulationSpec& s, std::vector<std::size_t> relevant, Concept&& concept_of) {
  Rng rng(s.seed);
  std::vector<std::vector<Cell>> rows(s.n, std::vector<Cell>(s.a));
  std::vector<std::string> labels(s.n);
  std::vector<int> values(s.a);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t f = 0; f < s.a; ++f) {
      if (s.enumerate && f < 63) values[f] = static_cast<int>((i >> f) & 1U);
      else values[f] = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.levels)));
      rows[i][f] = static_cast<double>(values[f]);
    }
    int cls = concept_of(i, std::span<const int>(values)) & 1;
    if (s.flip_prob > 0.0 && rng.bernoulli(s.flip_prob)) cls ^= 1;
    labels[i] = std::to_string(cls);
  }
  return {build_dataset(rows, binary_descriptors(s.a), labels), std::move(relevant)};
}

inline int parity_of(std::span<const int> v, std::size_t from, std::size_t count) {
  int sum = 0;
  for (std::size_t f = from; f < from + count; ++f) sum += v[f];
  return sum & 1;
}

}  // namespace detail

/// Class = parity of the first k features (XOR for binary data), each label
/// flipped with probability flip_prob. The remaining features are noise.
inline SimulatedData gen_parity(const SimulationSpec& s) {
  if (s.model != SimModel::parity_k) throw std::invalid_argument("gen_parity: model must be parity_k");
  if (s.relevant_count < 2) throw std::invalid_argument("gen_parity: parity order must be >= 2");
  detail::check_common(s);
  std::vector<std::size_t> relevant(s.relevant_count);
  for (std::size_t f = 0; f < relevant.size(); ++f) relevant[f] = f;
  const std::size_t k = s.relevant_count;
  return detail::simulate(s, relevant, [k](std::size_t, std::span<const int> v) { return detail::parity_of(v, 0, k); });
}

/// One relevant feature; class = its value mod 2, flipped with flip_prob.
inline SimulatedData gen_main_effect(const SimulationSpec& s) {
  if (s.model != SimModel::main_effect) throw std::invalid_argument("gen_main_effect: model must be main_effect");
  SimulationSpec spec = s;
  spec.relevant_count = 1;
  detail::check_common(spec);
  return detail::simulate(spec, {0}, [](std::size_t, std::span<const int> v) { return v[0]; });
}

/// Two independent parity pairs: the first ceil(n/2) instances follow
/// features (0, 1), the rest follow features (2, 3).
inline SimulatedData gen_heterogeneous(const SimulationSpec& s) {
  if (s.model != SimModel::heterogeneous) throw std::invalid_argument("gen_heterogeneous: model must be heterogeneous");
  SimulationSpec spec = s;
  spec.relevant_count = 4;
  detail::check_common(spec);
  const std::size_t first_half = (s.n + 1) / 2;
  return detail::simulate(spec, {0, 1, 2, 3}, [first_half](std::size_t i, std::span<const int> v) {
    return i < first_half ? detail::parity_of(v, 0, 2) : detail::parity_of(v, 2, 2);
  });
}

/// Class = (A1 and A2) or (A1 and A3) over binary A1..A3, plus five
/// irrelevant binary features.
inline SimulatedData gen_boolean_concept(std::size_t n, std::uint64_t seed, bool enumerate = false) {
  if (n < 8) throw std::invalid_argument("gen_boolean_concept: n must be >= 8");
  SimulationSpec s;
  s.model = SimModel::boolean_concept;
  s.n = n;
  s.a = 8;
  s.relevant_count = 3;
  s.seed = seed;
  s.enumerate = enumerate;
  return detail::simulate(s, {0, 1, 2},
                          [](std::size_t, std::span<const int> v) { return (v[0] & v[1]) | (v[0] & v[2]); });
}

inline SimulatedData generate(const SimulationSpec& s) {
  switch (s.model) {
    case SimModel::parity_k: return gen_parity(s);
    case SimModel::main_effect: return gen_main_effect(s);
    case SimModel::heterogeneous: return gen_heterogeneous(s);
    case SimModel::boolean_concept:
      if (s.flip_prob != 0.0) throw std::invalid_argument("boolean concept model has no noise parameter");
      return gen_boolean_concept(s.n, s.seed, s.enumerate);
  }
  throw std::invalid_argument("unknown simulation model");
}

// ---------------------------------------------------------------------------
// Power analysis
// ---------------------------------------------------------------------------

struct PowerRow {
  std::string model;
  std::string algorithm;
  std::size_t replicates = 0;
  std::size_t success_count = 0;
  double success_rate = 0.0;
  std::string criterion;
  std::vector<std::string> diagnostics;
};

struct PowerReport {
  std::vector<PowerRow> rows;
};

/// Seed of replicate r for a spec seeded with `seed`.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) {
  return derive_seed(seed, static_cast<std::uint64_t>(replicate));
}

inline std::size_t top_cutoff(double top_fraction, std::size_t features) {
  const auto cut = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(features) - 1e-9));
  return std::clamp<std::size_t>(cut, 1, features);
}

/// True iff every relevant feature ranks within the top `cutoff`.
inline bool all_within_top(const WeightVector& w, std::span<const std::size_t> relevant, std::size_t cutoff) {
  const auto rank = feature_ranks(rank_features(w));
  return std::all_of(relevant.begin(), relevant.end(), [&](std::size_t f) { return rank.at(f) <= cutoff; });
}

/// For every (spec, pipeline): scores `replicates` datasets generated with
/// derived seeds and counts replicates where all relevant features rank
/// within ceil(top_fraction * a). Every pipeline sees the same datasets.
inline PowerReport power_analysis(std::span<const SimulationSpec> specs, std::span<const Pipeline> pipelines,
                                  std::size_t replicates, double top_fraction, const EngineOptions& opts = {}) {
  if (replicates == 0) throw std::invalid_argument("power_analysis: replicates must be >= 1");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw std::invalid_argument("power_analysis: top_fraction must be in (0, 1]");
  PowerReport report;
  for (const auto& spec : specs) {
    const std::size_t first = report.rows.size();
    const std::size_t cutoff = top_cutoff(top_fraction, spec.model == SimModel::boolean_concept ? 8 : spec.a);
    for (const auto& p : pipelines) {
      PowerRow row;
      row.model = model_name(spec);
      row.algorithm = p.label();
      row.replicates = replicates;
      row.criterion = "all relevant in top " + std::to_string(cutoff);
      report.rows.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < replicates; ++r) {
      SimulationSpec child = spec;
      child.seed = replicate_seed(spec.seed, r);
      const auto sim = generate(child);
      for (std::size_t k = 0; k < pipelines.size(); ++k) {
        auto& row = report.rows[first + k];
        try {
          if (all_within_top(run_pipeline(sim.data, pipelines[k], opts), sim.relevant, cutoff)) ++row.success_count;
        } catch (const std::exception& e) {
          row.diagnostics.push_back("replicate " + std::to_string(r) + ": " + e.what());
        }
      }
    }
    for (std::size_t k = first; k < report.rows.size(); ++k)
      report.rows[k].success_rate =
          static_cast<double>(report.rows[k].success_count) / static_cast<double>(report.rows[k].replicates);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Empirical scaling
// ---------------------------------------------------------------------------

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct ScalingSeries {
  std::vector<double> sizes;
  std::vector<double> seconds;
  double slope = 0.0;
};

struct ScalingResult {
  ScalingSeries over_n;  // fixed a
  ScalingSeries over_a;  // fixed n
};

/// Best-of-`repeats` wall time of `fn`.
template <class Fn>
double time_best(std::size_t repeats, Fn&& fn) {
  double best = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r == 0 || s < best) best = s;
  }
  return best;
}

/// Times MultiSURF (distance matrix included) on parity-2 data over a grid
/// of n at fixed a and a grid of a at fixed n.
inline ScalingResult scaling_benchmark(std::span<const std::size_t> ns, std::size_t fixed_a,
                                       std::span<const std::size_t> as, std::size_t fixed_n, std::size_t repeats = 3,
                                       const EngineOptions& opts = {}) {
  ScalingResult out;
  AlgoConfig cfg{.algorithm = Algorithm::multisurf};
  auto run = [&](std::size_t n, std::size_t a) {
    SimulationSpec s{.model = SimModel::parity_k, .n = n, .a = a, .relevant_count = 2, .flip_prob = 0.1, .seed = 7};
    const auto sim = gen_parity(s);
    volatile double sink = 0.0;
    const double t = time_best(repeats, [&] { sink = score(sim.data, cfg, opts).scores[0]; });
    (void)sink;
    return t;
  };
  for (auto n : ns) {
    out.over_n.sizes.push_back(static_cast<double>(n));
    out.over_n.seconds.push_back(run(n, fixed_a));
  }
  for (auto a : as) {
    out.over_a.sizes.push_back(static_cast<double>(a));
    out.over_a.seconds.push_back(run(fixed_n, a));
  }
  out.over_n.slope = loglog_slope(out.over_n.sizes, out.over_n.seconds);
  out.over_a.slope = loglog_slope(out.over_a.sizes, out.over_a.seconds);
  return out;
}

}  // namespace relief
