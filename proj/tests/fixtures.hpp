#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "relief/dataset.hpp"
#include "relief/rng.hpp"

namespace fixtures {

using relief::Cell;
using relief::Dataset;
using relief::FeatureDescriptor;
using relief::FeatureKind;

inline std::vector<FeatureDescriptor> descriptors(std::size_t a, FeatureKind kind = FeatureKind::discrete) {
  std::vector<FeatureDescriptor> out(a);
  for (std::size_t f = 0; f < a; ++f) {
    out[f].name = "A" + std::to_string(f + 1);
    out[f].kind = kind;
  }
  return out;
}

inline Dataset from_values(const std::vector<std::vector<double>>& v, const std::vector<std::string>& labels,
                           FeatureKind kind = FeatureKind::discrete) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& r : v) rows.emplace_back(r.begin(), r.end());
  return relief::build_dataset(rows, descriptors(v.front().size(), kind), labels);
}

/// Eight binary instances, three features, class = A1 XOR A2.
inline Dataset xor8() {
  return from_values({{1, 0, 1}, {1, 0, 0}, {0, 1, 1}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}, {1, 1, 1}, {1, 1, 0}},
                     {"1", "1", "1", "1", "0", "0", "0", "0"});
}

/// Random dataset with mixed feature kinds and randomly placed missing cells.
/// Every column keeps at least one observed value; every class is present.
inline Dataset random_mixed(std::uint64_t seed, std::size_t n, std::size_t a, std::size_t classes,
                            double missing_rate, double continuous_share = 0.5) {
  relief::Rng rng(seed);
  auto desc = descriptors(a);
  for (auto& d : desc)
    if (rng.bernoulli(continuous_share)) d.kind = FeatureKind::continuous;
  std::vector<std::vector<Cell>> rows(n, std::vector<Cell>(a));
  for (std::size_t f = 0; f < a; ++f) {
    const std::size_t levels = 2 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      if (desc[f].kind == FeatureKind::continuous)
        rows[i][f] = std::round(rng.uniform() * 1000.0) / 100.0;
      else
        rows[i][f] = static_cast<double>(rng.below(levels));
      if (i > 0 && rng.bernoulli(missing_rate)) rows[i][f].reset();
    }
  }
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i)
    labels[i] = "c" + std::to_string(i < classes ? i : rng.below(classes));
  return relief::build_dataset(rows, desc, labels);
}

}  // namespace fixtures
