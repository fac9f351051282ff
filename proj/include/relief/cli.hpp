#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relief/dataset.hpp"
#include "relief/io.hpp"
#include "relief/scorers.hpp"
#include "relief/selection.hpp"
#include "relief/simbench.hpp"
#include "relief/wrappers.hpp"

namespace relief {

/// Bad flags or flag values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cli {

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline double to_real(const std::string& flag, const std::string& s) {
  if (auto v = detail::parse_number(s)) return *v;
  throw UsageError(flag + ": '" + s + "' is not a number");
}

inline std::size_t to_count(const std::string& flag, const std::string& s) {
  const auto v = detail::parse_number(s);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
    throw UsageError(flag + ": '" + s + "' is not a non-negative integer");
  return static_cast<std::size_t>(*v);
}

inline ScoreFormat parse_format(const std::string& s) {
  if (s == "tsv") return ScoreFormat::tsv;
  if (s == "json" || s == "json-like" || s == "structured") return ScoreFormat::structured;
  throw UsageError("--format: expected tsv or json, got '" + s + "'");
}

struct WrapperFlags {
  std::string turf, vls, iterate;
};

inline Pipeline build_pipeline(AlgoConfig core, const WrapperFlags& w) {
  Pipeline p;
  p.core = core;
  if (!w.turf.empty()) {
    const auto parts = split_list(w.turf, ':');
    if (parts.empty() || parts.size() > 2) throw UsageError("--turf: expected ITER[:FRACTION]");
    Pipeline::Turf t;
    t.iterations = to_count("--turf", parts[0]);
    if (t.iterations == 0) throw UsageError("--turf: iterations must be >= 1");
    if (parts.size() == 2) {
      t.fraction = to_real("--turf", parts[1]);
      if (!(*t.fraction >= 0.0 && *t.fraction < 1.0)) throw UsageError("--turf: fraction must be in [0, 1)");
    }
    p.turf = t;
  }
  if (!w.vls.empty()) {
    const auto parts = split_list(w.vls, ':');
    if (parts.size() != 2) throw UsageError("--vls: expected S:A_S");
    p.vls = Pipeline::Vls{to_count("--vls", parts[0]), to_count("--vls", parts[1]), core.seed};
    if (p.vls->num_subsets == 0 || p.vls->subset_size < 2) throw UsageError("--vls: need S >= 1 and A_S >= 2");
  }
  if (!w.iterate.empty()) {
    const auto parts = split_list(w.iterate, ':');
    if (parts.size() != 2) throw UsageError("--iterate: expected MAX:TOL");
    p.iterate = Pipeline::Iterate{to_count("--iterate", parts[0]), to_real("--iterate", parts[1])};
    if (p.iterate->max_iterations == 0 || !(p.iterate->tolerance > 0.0))
      throw UsageError("--iterate: need MAX >= 1 and TOL > 0");
    if (p.turf || p.vls) throw UsageError("--iterate cannot be combined with --turf or --vls");
  }
  return p;
}

inline Algorithm algorithm_or_throw(const std::string& name) {
  if (auto a = parse_algorithm(name)) return *a;
  throw UsageError("--algo: unknown algorithm '" + name + "'");
}

/// Writes to --output when given, else to `fallback`.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  write(f);
}

}  // namespace cli

/// Entry point of the command-line tool. `args` excludes the program name.
/// Returns 0 on success, 2 for usage errors, 1 for data errors.
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
  CLI::App app("Relief-based feature selection", "relief");
  app.require_subcommand(1);

  // score
  auto* score_cmd = app.add_subcommand("score", "Score features of a delimited dataset");
  std::string algo, input, class_col, missing = "NA", output, format = "tsv", force_disc, force_cont;
  std::size_t k = 10, k_max = 10, threads = 1, max_card = 10;
  std::optional<std::size_t> m;
  std::uint64_t seed = 0;
  double sigmoid_width = 0.5;
  bool no_header = false;
  cli::WrapperFlags wrap;
  score_cmd->add_option("--algo", algo, "relief|relieff|surf|surfstar|swrfstar|multisurfstar|multisurf|reliefseq")
      ->required();
  score_cmd->add_option("--input", input, "TSV or CSV dataset")->required();
  score_cmd->add_option("--k", k, "neighbors for relieff")->check(CLI::PositiveNumber);
  score_cmd->add_option("--k-max", k_max, "largest k for reliefseq")->check(CLI::PositiveNumber);
  score_cmd->add_option("--m", m, "targets for relief (default n)")->check(CLI::PositiveNumber);
  score_cmd->add_option("--seed", seed);
  score_cmd->add_option("--class-col", class_col, "class column name or 0-based index");
  score_cmd->add_option("--missing", missing, "missing-value token");
  score_cmd->add_option("--output", output);
  score_cmd->add_option("--format", format, "tsv|json");
  score_cmd->add_option("--turf", wrap.turf, "ITER[:FRACTION]");
  score_cmd->add_option("--vls", wrap.vls, "S:A_S");
  score_cmd->add_option("--iterate", wrap.iterate, "MAX:TOL");
  score_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);
  score_cmd->add_option("--force-discrete", force_disc, "comma-separated columns");
  score_cmd->add_option("--force-continuous", force_cont, "comma-separated columns");
  score_cmd->add_option("--max-discrete-cardinality", max_card);
  score_cmd->add_option("--sigmoid-width", sigmoid_width, "swrfstar width as a multiple of sigma");
  score_cmd->add_flag("--no-header", no_header);

  // select
  auto* select_cmd = app.add_subcommand("select", "Select a feature subset from a score file");
  std::string scores_path, select_out, select_format = "tsv";
  std::optional<std::size_t> top, select_m;
  std::optional<double> tau, alpha;
  select_cmd->add_option("--scores", scores_path)->required();
  auto* top_opt = select_cmd->add_option("--top", top)->check(CLI::PositiveNumber);
  auto* tau_opt = select_cmd->add_option("--tau", tau);
  auto* alpha_opt = select_cmd->add_option("--alpha", alpha);
  top_opt->excludes(tau_opt)->excludes(alpha_opt);
  tau_opt->excludes(alpha_opt);
  select_cmd->add_option("--m", select_m, "instances used for scoring (for --alpha)");
  select_cmd->add_option("--output", select_out);
  select_cmd->add_option("--format", select_format);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic dataset");
  std::string model, sim_out;
  std::size_t sim_n = 200, sim_a = 20;
  double flip = 0.0;
  std::uint64_t sim_seed = 0;
  int levels = 2;
  sim_cmd->add_option("--model", model, "parity2|parity3|main|het|boolean")->required();
  sim_cmd->add_option("--n", sim_n);
  sim_cmd->add_option("--a", sim_a);
  sim_cmd->add_option("--flip", flip);
  sim_cmd->add_option("--seed", sim_seed);
  sim_cmd->add_option("--levels", levels, "2 (binary) or 3 (genotype)");
  sim_cmd->add_option("--output", sim_out);

  // power
  auto* power_cmd = app.add_subcommand("power", "Power analysis over simulated replicates");
  std::string power_models, algos, power_out, power_format = "tsv";
  std::size_t replicates = 10, power_n = 800, power_a = 100, power_k = 10, power_kmax = 10, power_threads = 1;
  double top_fraction = 0.1, power_flip = 0.1;
  std::uint64_t power_seed = 0;
  cli::WrapperFlags power_wrap;
  power_cmd->add_option("--model", power_models, "comma-separated models")->required();
  power_cmd->add_option("--algos", algos, "comma-separated algorithms")->required();
  power_cmd->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  power_cmd->add_option("--top-fraction", top_fraction);
  power_cmd->add_option("--n", power_n);
  power_cmd->add_option("--a", power_a);
  power_cmd->add_option("--flip", power_flip);
  power_cmd->add_option("--seed", power_seed);
  power_cmd->add_option("--k", power_k)->check(CLI::PositiveNumber);
  power_cmd->add_option("--k-max", power_kmax)->check(CLI::PositiveNumber);
  power_cmd->add_option("--turf", power_wrap.turf);
  power_cmd->add_option("--vls", power_wrap.vls);
  power_cmd->add_option("--threads", power_threads)->check(CLI::PositiveNumber);
  power_cmd->add_option("--output", power_out);
  power_cmd->add_option("--format", power_format);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Empirical runtime scaling of multisurf");
  bool scaling = false, quick = false;
  std::size_t repeats = 3;
  bench_cmd->add_flag("--scaling", scaling, "fit log-log runtime slopes over n and a");
  bench_cmd->add_flag("--quick", quick, "smaller grids");
  bench_cmd->add_option("--repeats", repeats)->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"relief"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (score_cmd->parsed()) {
      AlgoConfig core;
      core.algorithm = cli::algorithm_or_throw(algo);
      core.k = k;
      core.k_max = k_max;
      core.seed = seed;
      core.sigmoid_width = sigmoid_width;
      if (m) {
        if (core.algorithm != Algorithm::relief) throw UsageError("--m applies to --algo relief only");
        core.m = m;
      }
      const auto fmt = cli::parse_format(format);
      const auto pipeline = cli::build_pipeline(core, wrap);
      LoadOptions lo;
      if (!class_col.empty()) lo.class_column = class_col;
      lo.missing_token = missing;
      lo.header = !no_header;
      lo.max_discrete_cardinality = max_card;
      lo.force_discrete = cli::split_list(force_disc, ',');
      lo.force_continuous = cli::split_list(force_cont, ',');
      const auto data = load_delimited(input, lo);
      EngineOptions eo;
      eo.threads = threads;
      auto w = run_pipeline(data, pipeline, eo);
      w.params.emplace("n", std::to_string(data.instances()));
      for (const auto& msg : w.warnings) err << "warning: " << msg << '\n';
      const auto ranked = rank_features(w);
      cli::emit(output, out, [&](std::ostream& o) { write_scores(ranked, fmt, o); });
      return 0;
    }

    if (select_cmd->parsed()) {
      const auto fmt = cli::parse_format(select_format);
      if (!top && !tau && !alpha) throw UsageError("select: one of --top, --tau or --alpha is required");
      std::ifstream in(scores_path);
      if (!in) throw DataError("cannot open '" + scores_path + "'");
      const auto ranked = read_scores(in);
      RankedList chosen;
      if (top) {
        if (*top > ranked.size())
          throw UsageError("--top: " + std::to_string(*top) + " exceeds feature count " + std::to_string(ranked.size()));
        chosen = select_top_n(ranked, *top);
      } else {
        double threshold = 0.0;
        if (tau) {
          if (!(*tau > 0.0 && *tau <= 1.0)) throw UsageError("--tau: must be in (0, 1]");
          threshold = *tau;
        } else {
          if (!(*alpha > 0.0 && *alpha < 1.0)) throw UsageError("--alpha: must be in (0, 1)");
          std::optional<std::size_t> mm = select_m;
          for (const char* key : {"m", "n"}) {
            if (mm) break;
            if (auto it = ranked.params.find(key); it != ranked.params.end()) mm = std::stoull(it->second);
          }
          if (!mm) throw UsageError("--alpha needs --m (or a structured score file recording n)");
          threshold = chebyshev_tau(*alpha, *mm);
          err << "tau=" << threshold << '\n';
        }
        chosen = select_by_threshold(ranked, threshold);
      }
      cli::emit(select_out, out, [&](std::ostream& o) { write_scores(chosen, fmt, o); });
      return 0;
    }

    if (sim_cmd->parsed()) {
      auto spec = parse_model(model);
      if (!spec) throw UsageError("--model: unknown model '" + model + "'");
      spec->n = sim_n;
      if (spec->model != SimModel::boolean_concept) spec->a = sim_a;
      spec->flip_prob = flip;
      spec->seed = sim_seed;
      spec->levels = levels;
      SimulatedData sim = [&] {
        try {
          return generate(*spec);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }();
      std::string rel;
      for (auto f : sim.relevant) rel += (rel.empty() ? "" : ",") + sim.data.feature(f).name;
      err << "relevant features: " << rel << '\n';
      cli::emit(sim_out, out, [&](std::ostream& o) { write_dataset(sim.data, o); });
      return 0;
    }

    if (power_cmd->parsed()) {
      const auto fmt = cli::parse_format(power_format);
      std::vector<SimulationSpec> specs;
      for (const auto& name : cli::split_list(power_models, ',')) {
        auto spec = parse_model(name);
        if (!spec) throw UsageError("--model: unknown model '" + name + "'");
        spec->n = power_n;
        if (spec->model != SimModel::boolean_concept) {
          spec->a = power_a;
          spec->flip_prob = power_flip;
        }
        spec->seed = power_seed;
        specs.push_back(*spec);
      }
      std::vector<Pipeline> pipelines;
      for (const auto& name : cli::split_list(algos, ',')) {
        AlgoConfig core;
        core.algorithm = cli::algorithm_or_throw(name);
        core.k = power_k;
        core.k_max = power_kmax;
        core.seed = power_seed;
        pipelines.push_back(cli::build_pipeline(core, power_wrap));
      }
      if (pipelines.empty()) throw UsageError("--algos: empty list");
      if (!(top_fraction > 0.0 && top_fraction <= 1.0)) throw UsageError("--top-fraction: must be in (0, 1]");
      EngineOptions eo;
      eo.threads = power_threads;
      PowerReport report;
      try {
        report = power_analysis(specs, pipelines, replicates, top_fraction, eo);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      cli::emit(power_out, out, [&](std::ostream& o) { write_power_report(report, fmt, o); });
      return 0;
    }

    if (bench_cmd->parsed()) {
      if (!scaling) throw UsageError("bench: pass --scaling");
      const std::vector<std::size_t> ns = quick ? std::vector<std::size_t>{125, 250, 500} : std::vector<std::size_t>{250, 500, 1000, 2000};
      const std::vector<std::size_t> as = quick ? std::vector<std::size_t>{25, 50, 100} : std::vector<std::size_t>{50, 100, 200, 400};
      const auto r = scaling_benchmark(ns, 100, as, 500, repeats);
      out << "series\tsize\tseconds\n";
      for (std::size_t i = 0; i < r.over_n.sizes.size(); ++i)
        out << "n\t" << r.over_n.sizes[i] << '\t' << r.over_n.seconds[i] << '\n';
      for (std::size_t i = 0; i < r.over_a.sizes.size(); ++i)
        out << "a\t" << r.over_a.sizes[i] << '\t' << r.over_a.seconds[i] << '\n';
      out << "slope_n\t" << r.over_n.slope << "\nslope_a\t" << r.over_a.slope << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace relief
