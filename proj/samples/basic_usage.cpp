// Scores the interaction example with a few algorithms and prints rankings.
#include <cstdio>

#include "relief/relief.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "samples/xor8.tsv";
  const auto data = relief::load_delimited(path);
  for (auto algo : {relief::Algorithm::relief, relief::Algorithm::relieff, relief::Algorithm::multisurf}) {
    relief::AlgoConfig cfg;
    cfg.algorithm = algo;
    cfg.k = 1;
    const auto ranked = relief::rank_features(relief::score(data, cfg));
    std::printf("%s:", relief::algorithm_name(algo));
    for (const auto& e : ranked.entries) std::printf("  %s=%.4f", e.name.c_str(), e.score);
    std::printf("\n");
  }
}
