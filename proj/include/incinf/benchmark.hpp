#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "incinf/error.hpp"
#include "incinf/generator.hpp"
#include "incinf/graph.hpp"
#include "incinf/incremental.hpp"
#include "incinf/io.hpp"
#include "incinf/selection.hpp"
#include "incinf/spread.hpp"

namespace incinf {

inline constexpr int kReportSchemaVersion = 1;

/// Benchmark description read from a `key = value` file (`#` comments).
///
///   source      generate | files
///   snapshots   comma-separated snapshot files (source = files)
///   n0, steps, nodes_per_step, m, gen_seed, prob   generator settings
///   algorithms  comma-separated subset of incinf, mia, degree, random, greedy
///   k, theta, eta, runs, eval_seed, seed, select_runs, workers
///   out_csv, out_json
struct Scenario {
  enum class Source { generate, files };

  Source source = Source::generate;
  std::vector<std::string> snapshot_files;
  GenConfig gen;
  std::vector<std::string> algorithms;
  std::size_t k = 0;
  std::optional<double> theta;
  std::optional<double> eta;
  std::uint64_t runs = 0;
  std::uint64_t eval_seed = 0;
  /// Seed for random selection and greedy's own Monte-Carlo runs.
  std::uint64_t seed = 0;
  std::uint64_t select_runs = 200;
  unsigned workers = 1;
  std::string out_csv;
  std::string out_json;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  }
  return out;
}

class ScenarioFields {
 public:
  explicit ScenarioFields(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ScenarioError(trim(line), "expected key = value");
      values_[trim(std::string_view(line).substr(0, eq))] = trim(std::string_view(line).substr(eq + 1));
    }
  }

  bool has(const std::string& key) const { return values_.contains(key); }

  std::string text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw ScenarioError(key, "missing");
    return it->second;
  }

  template <class T>
  T number(const std::string& key) const {
    const std::string value = text(key);
    try {
      std::size_t used = 0;
      T out{};
      if constexpr (std::is_floating_point_v<T>) {
        out = static_cast<T>(std::stod(value, &used));
      } else {
        if (value.starts_with('-')) throw std::invalid_argument("negative");
        out = static_cast<T>(std::stoull(value, &used));
      }
      if (used != value.size()) throw std::invalid_argument("trailing characters");
      return out;
    } catch (const std::logic_error&) {
      throw ScenarioError(key, "invalid number '" + value + "'");
    }
  }

  template <class T>
  T number_or(const std::string& key, T fallback) const {
    return has(key) ? number<T>(key) : fallback;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  const detail::ScenarioFields f(in);
  Scenario s;

  const std::string source = f.has("source") ? f.text("source") : "generate";
  if (source == "generate") {
    s.source = Scenario::Source::generate;
    s.gen.n0 = f.number<std::size_t>("n0");
    s.gen.steps = f.number<std::size_t>("steps");
    s.gen.nodes_per_step = f.number<std::size_t>("nodes_per_step");
    s.gen.m = f.number<std::size_t>("m");
    s.gen.master_seed = f.number_or<std::uint64_t>("gen_seed", 0);
    if (f.has("prob")) {
      try {
        s.gen.prob_policy = ProbPolicy::parse(f.text("prob"));
      } catch (const std::exception& e) {
        throw ScenarioError("prob", e.what());
      }
    }
    try {
      s.gen.validate();
    } catch (const InvalidConfig& e) {
      throw ScenarioError("generator", e.what());
    }
  } else if (source == "files") {
    s.source = Scenario::Source::files;
    s.snapshot_files = detail::split_list(f.text("snapshots"));
    if (s.snapshot_files.empty()) throw ScenarioError("snapshots", "no files listed");
  } else {
    throw ScenarioError("source", "expected generate or files, got '" + source + "'");
  }

  s.algorithms = detail::split_list(f.text("algorithms"));
  bool needs_theta = false, needs_eta = false;
  for (const auto& a : s.algorithms) {
    if (a == "incinf") needs_theta = needs_eta = true;
    else if (a == "mia") needs_theta = true;
    else if (a != "degree" && a != "random" && a != "greedy") throw ScenarioError("algorithms", "unknown algorithm '" + a + "'");
  }
  if (s.algorithms.empty()) throw ScenarioError("algorithms", "no algorithm listed");

  s.k = f.number<std::size_t>("k");
  if (s.k == 0) throw ScenarioError("k", "must be at least 1");
  if (needs_theta || f.has("theta")) {
    s.theta = f.number<double>("theta");
    if (!(*s.theta > 0.0 && *s.theta < 1.0)) throw ScenarioError("theta", "must lie in (0, 1)");
  }
  if (needs_eta || f.has("eta")) {
    s.eta = f.number<double>("eta");
    if (!(*s.eta > 0.0 && *s.eta <= 1.0)) throw ScenarioError("eta", "must lie in (0, 1]");
  }
  s.runs = f.number<std::uint64_t>("runs");
  if (s.runs == 0) throw ScenarioError("runs", "must be positive");
  s.eval_seed = f.number<std::uint64_t>("eval_seed");
  s.seed = f.number_or<std::uint64_t>("seed", 0);
  s.select_runs = f.number_or<std::uint64_t>("select_runs", s.select_runs);
  if (s.select_runs == 0) throw ScenarioError("select_runs", "must be positive");
  s.workers = f.number_or<unsigned>("workers", 1);
  if (s.workers == 0) throw ScenarioError("workers", "must be positive");
  if (f.has("out_csv")) s.out_csv = f.text("out_csv");
  if (f.has("out_json")) s.out_json = f.text("out_json");
  return s;
}

inline Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario", "cannot open " + path);
  return parse_scenario(in);
}

struct BenchmarkRow {
  std::int64_t snapshot = 0;
  std::string algorithm;
  std::size_t k = 0;
  std::optional<double> theta;
  std::optional<double> eta;
  std::uint64_t runs = 0;
  std::uint64_t eval_seed = 0;
  double wall_ms = 0.0;
  double spread = 0.0;
  double std_error = 0.0;
  /// IncInf on a transition only: candidates / |V| per iteration.
  std::vector<double> pruning_ratios;
  std::vector<NodeId> seeds;

  std::optional<double> mean_pruning_ratio() const {
    if (pruning_ratios.empty()) return std::nullopt;
    return std::accumulate(pruning_ratios.begin(), pruning_ratios.end(), 0.0) /
           static_cast<double>(pruning_ratios.size());
  }
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
};

/// One row per snapshot and algorithm, algorithms run one after another.
/// IncInf starts from mia_select on the first snapshot and then carries its
/// own seeds across each transition. Every row is evaluated with the same
/// simulate_spread seed.
inline BenchmarkReport run_benchmark(const Scenario& s) {
  EvolvingGraph evolving;
  if (s.source == Scenario::Source::generate) {
    evolving = generate_evolving(s.gen);
  } else {
    for (const auto& path : s.snapshot_files) evolving.snapshots.push_back(read_snapshot(path));
  }

  BenchmarkReport report;
  std::optional<SeedResult> incinf_prev;
  for (std::size_t t = 0; t < evolving.snapshots.size(); ++t) {
    const Snapshot& g = evolving.snapshots[t];
    for (const auto& algo : s.algorithms) {
      SeedResult picked;
      if (algo == "incinf") {
        if (!incinf_prev) {
          picked = mia_select(g, s.k, *s.theta);
        } else {
          const auto ctx = t - 1 < evolving.streams.size()
                               ? EvolutionContext::from_stream(evolving.snapshots[t - 1], evolving.streams[t - 1])
                               : EvolutionContext::from_snapshots(evolving.snapshots[t - 1], g);
          PruneConfig cfg;
          cfg.eta = *s.eta;
          cfg.pad = true;
          picked = incinf_select(ctx, *incinf_prev, s.k, *s.theta, cfg);
        }
        incinf_prev = picked;
      } else if (algo == "mia") {
        picked = mia_select(g, s.k, *s.theta);
      } else if (algo == "degree") {
        picked = degree_select(g, s.k);
      } else if (algo == "random") {
        picked = random_select(g, s.k, s.seed);
      } else {
        picked = greedy_select(g, s.k, s.select_runs, s.seed);
      }

      const auto est = simulate_spread(g, picked.seeds, s.runs, s.eval_seed, s.workers);
      BenchmarkRow row;
      row.snapshot = g.label();
      row.algorithm = algo;
      row.k = s.k;
      row.theta = algo == "incinf" || algo == "mia" ? s.theta : std::nullopt;
      row.eta = algo == "incinf" ? s.eta : std::nullopt;
      row.runs = s.runs;
      row.eval_seed = s.eval_seed;
      row.wall_ms = std::chrono::duration<double, std::milli>(picked.wall_time).count();
      row.spread = est.mean;
      row.std_error = est.std_error;
      row.pruning_ratios = picked.pruning_ratios;
      row.seeds = picked.seeds;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

inline void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s.precision(10);
    s << *v;
    return s.str();
  };
  out << "snapshot,algorithm,k,theta,eta,runs,eval_seed,wall_ms,spread,std_error,mean_pruning_ratio,seeds\n";
  for (const auto& r : report.rows) {
    out << r.snapshot << ',' << r.algorithm << ',' << r.k << ',' << opt(r.theta) << ',' << opt(r.eta) << ','
        << r.runs << ',' << r.eval_seed << ',' << opt(r.wall_ms) << ',' << opt(r.spread) << ','
        << opt(r.std_error) << ',' << opt(r.mean_pruning_ratio()) << ',';
    for (std::size_t i = 0; i < r.seeds.size(); ++i) out << (i ? ";" : "") << r.seeds[i];
    out << '\n';
  }
}

inline nlohmann::json report_json(const BenchmarkReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"snapshot", r.snapshot},
                    {"algorithm", r.algorithm},
                    {"k", r.k},
                    {"theta", opt(r.theta)},
                    {"eta", opt(r.eta)},
                    {"runs", r.runs},
                    {"eval_seed", r.eval_seed},
                    {"wall_ms", r.wall_ms},
                    {"spread", r.spread},
                    {"std_error", r.std_error},
                    {"mean_pruning_ratio", opt(r.mean_pruning_ratio())},
                    {"pruning_ratios", r.pruning_ratios},
                    {"seeds", r.seeds}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"rows", std::move(rows)}};
}

/// Runs the scenario and writes out_csv / out_json when the scenario names them.
inline BenchmarkReport run_benchmark(const std::string& scenario_path) {
  const Scenario s = parse_scenario(scenario_path);
  auto report = run_benchmark(s);
  if (!s.out_csv.empty()) {
    std::ofstream out(s.out_csv);
    if (!out) throw Error("IoError", "cannot write " + s.out_csv);
    write_report_csv(out, report);
  }
  if (!s.out_json.empty()) {
    std::ofstream out(s.out_json);
    if (!out) throw Error("IoError", "cannot write " + s.out_json);
    out << report_json(report).dump(2) << '\n';
  }
  return report;
}

}  // namespace incinf
