#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incinf.hpp"

namespace fs = std::filesystem;
using namespace incinf;

namespace {

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw Error("IoError", "cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

/// A comma-separated id list, or a file holding one id per line (or the
/// `rank,node,gain` CSV written by `select`).
std::vector<NodeId> read_seed_list(const std::string& arg) {
  std::vector<NodeId> seeds;
  auto parse_id = [&](const std::string& text) {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used);
    if (used != text.size()) throw ParseError(0, "invalid node id '" + text + "'");
    seeds.push_back(static_cast<NodeId>(value));
  };
  if (!fs::exists(arg)) {
    std::stringstream in(arg);
    for (std::string item; std::getline(in, item, ',');) {
      if (!item.empty()) parse_id(item);
    }
    return seeds;
  }
  std::ifstream in(arg);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    parse_id(fields.size() >= 2 ? fields[1] : fields[0]);
  }
  return seeds;
}

void write_seeds(std::ostream& out, const SeedResult& r) {
  out.precision(10);
  out << "rank,node,gain\n";
  for (std::size_t i = 0; i < r.seeds.size(); ++i) out << i + 1 << ',' << r.seeds[i] << ',' << r.marginal_gains[i] << '\n';
}

void write_snapshot_file(const fs::path& path, const Snapshot& g) {
  std::ofstream out(path);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  write_snapshot(out, g);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence maximization on evolving networks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("--out", out_path, "Write results here instead of stdout");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a preferential-attachment evolving network");
  GenConfig gen_cfg;
  std::string gen_prob = "trivalency";
  std::string gen_dir = ".";
  gen->add_option("--n0", gen_cfg.n0, "Initial node count")->capture_default_str();
  gen->add_option("--steps", gen_cfg.steps, "Number of snapshots")->capture_default_str();
  gen->add_option("--nodes-per-step", gen_cfg.nodes_per_step, "New nodes per transition")->capture_default_str();
  gen->add_option("--m", gen_cfg.m, "Out-edges per new node")->capture_default_str();
  gen->add_option("--prob", gen_prob, "fixed:<p> | trivalency[:seed]")->capture_default_str();
  gen->add_option("--seed", gen_cfg.master_seed, "Master seed")->capture_default_str();
  gen->add_flag("!--one-way", gen_cfg.reciprocal, "Do not mirror attachment edges");
  gen->add_option("--churn", gen_cfg.churn_fraction, "Fraction of transitions with churn");
  gen->add_option("--extra-edges", gen_cfg.extra_edges, "Edges between existing nodes per churn transition");
  gen->add_option("--edge-removal", gen_cfg.edge_removal_fraction, "Fraction of edges removed per churn transition");
  gen->add_option("--node-removals", gen_cfg.node_removals, "Nodes removed per churn transition");
  gen->add_option("--weight-changes", gen_cfg.weight_changes, "Weight changes per churn transition");
  gen->add_option("--dir", gen_dir, "Output directory")->capture_default_str();

  // snapshot
  auto* snap = app.add_subcommand("snapshot", "Snapshot of a temporal edge list at time t");
  std::string edges_path, snap_prob = "trivalency", id_map_path;
  std::int64_t snap_t = 0;
  bool undirected = false;
  snap->add_option("edges", edges_path, "Temporal edge list")->required();
  snap->add_option("--t", snap_t, "Include records with timestamp <= t")->required();
  snap->add_option("--prob", snap_prob, "fixed:<p> | trivalency[:seed]")->capture_default_str();
  snap->add_flag("--undirected", undirected, "Each record yields both directions");
  snap->add_option("--id-map", id_map_path, "Write the node id map here");

  // diff
  auto* diff_cmd = app.add_subcommand("diff", "Change stream between two snapshots");
  std::string old_path, new_path;
  diff_cmd->add_option("old", old_path)->required();
  diff_cmd->add_option("new", new_path)->required();

  // select
  auto* sel = app.add_subcommand("select", "Static seed selection");
  std::string algo = "mia", graph_path;
  std::size_t k = 10;
  double theta = 0.01;
  std::uint64_t runs = 10000, seed = 0;
  sel->add_option("graph", graph_path)->required();
  sel->add_option("--algo", algo)->check(CLI::IsMember({"greedy", "mia", "degree", "random"}))->capture_default_str();
  sel->add_option("--k", k)->capture_default_str();
  sel->add_option("--theta", theta)->capture_default_str();
  sel->add_option("--runs", runs, "Monte-Carlo runs for greedy")->capture_default_str();
  sel->add_option("--seed", seed)->capture_default_str();

  // incinf
  auto* inc = app.add_subcommand("incinf", "Incremental seed selection on the next snapshot");
  std::string inc_new, inc_stream, prev_seeds, deltas_out;
  PruneConfig prune_cfg;
  bool no_prune = false;
  inc->add_option("--old", old_path, "Previous snapshot")->required();
  auto* inc_new_opt = inc->add_option("--new", inc_new, "Next snapshot");
  auto* inc_stream_opt = inc->add_option("--stream", inc_stream, "Change stream from --old");
  inc_new_opt->excludes(inc_stream_opt);
  inc->add_option("--prev-seeds", prev_seeds, "Seed list: comma-separated ids or a file")->required();
  inc->add_option("--k", k)->capture_default_str();
  inc->add_option("--theta", theta)->capture_default_str();
  inc->add_option("--eta", prune_cfg.eta)->capture_default_str();
  inc->add_flag("--no-prune", no_prune, "Evaluate every node in each iteration");
  inc->add_flag("--pad", prune_cfg.pad, "Allow fewer previous seeds than K");
  inc->add_option("--deltas-out", deltas_out, "Write the delta table (node,delta) here");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Monte-Carlo spread of a seed set");
  std::string seeds_arg;
  unsigned workers = 1;
  eval->add_option("graph", graph_path)->required();
  eval->add_option("--seeds", seeds_arg, "Comma-separated ids or a file")->required();
  eval->add_option("--runs", runs)->capture_default_str();
  eval->add_option("--seed", seed)->capture_default_str();
  eval->add_option("--workers", workers)->capture_default_str();

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Evolution analytics");
  analyze_cmd->require_subcommand(1);
  auto* degrees = analyze_cmd->add_subcommand("degrees", "Log-binned degree histogram");
  std::string degree_kind = "out";
  degrees->add_option("graph", graph_path)->required();
  degrees->add_option("--kind", degree_kind)->check(CLI::IsMember({"out", "in", "total"}))->capture_default_str();
  auto* pa = analyze_cmd->add_subcommand("pa", "New in-edges by previous degree");
  pa->add_option("old", old_path)->required();
  pa->add_option("new", new_path)->required();
  auto* growth = analyze_cmd->add_subcommand("growth", "Node and edge counts per snapshot");
  std::vector<std::string> graph_paths;
  growth->add_option("graphs", graph_paths)->required();
  auto* rank = analyze_cmd->add_subcommand("rank", "Degree rank of each seed");
  rank->add_option("graph", graph_path)->required();
  rank->add_option("--seeds", seeds_arg)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark scenario");
  std::string scenario_path;
  bench->add_option("scenario", scenario_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    Output out(out_path);
    auto& os = out.stream();

    if (*gen) {
      gen_cfg.prob_policy = ProbPolicy::parse(gen_prob);
      const auto evolving = generate_evolving(gen_cfg);
      fs::create_directories(gen_dir);
      for (std::size_t t = 0; t < evolving.snapshots.size(); ++t) {
        write_snapshot_file(fs::path(gen_dir) / ("snapshot_" + std::to_string(t) + ".txt"), evolving.snapshots[t]);
      }
      for (std::size_t t = 0; t < evolving.streams.size(); ++t) {
        std::ofstream s(fs::path(gen_dir) / ("stream_" + std::to_string(t) + ".txt"));
        write_change_stream(s, evolving.streams[t]);
      }
      os << evolving.snapshots.size() << " snapshots written to " << gen_dir << '\n';
    } else if (*snap) {
      const auto edges = load_temporal_edges(edges_path, undirected);
      write_snapshot(os, snapshot_at(edges, snap_t, ProbPolicy::parse(snap_prob)));
      if (!id_map_path.empty()) {
        std::ofstream map(id_map_path);
        write_id_map(map, edges);
      }
    } else if (*diff_cmd) {
      write_change_stream(os, diff(read_snapshot(old_path), read_snapshot(new_path)));
    } else if (*sel) {
      const auto g = read_snapshot(graph_path);
      SeedResult r;
      if (algo == "greedy") r = greedy_select(g, k, runs, seed);
      else if (algo == "mia") r = mia_select(g, k, theta);
      else if (algo == "degree") r = degree_select(g, k);
      else r = random_select(g, k, seed);
      write_seeds(os, r);
    } else if (*inc) {
      if (inc_new.empty() == inc_stream.empty()) throw InvalidConfig("give exactly one of --new and --stream");
      auto g_old = read_snapshot(old_path);
      const auto ctx = inc_stream.empty() ? EvolutionContext::from_snapshots(std::move(g_old), read_snapshot(inc_new))
                                          : EvolutionContext::from_stream(std::move(g_old), read_change_stream(inc_stream));
      SeedResult prev;
      prev.seeds = read_seed_list(prev_seeds);
      prune_cfg.enabled = !no_prune;
      const auto r = incinf_select(ctx, prev, k, theta, prune_cfg);
      write_seeds(os, r);
      if (!deltas_out.empty()) {
        std::ofstream d(deltas_out);
        if (!d) throw Error("IoError", "cannot write " + deltas_out);
        write_delta_csv(d, accumulate_deltas(ctx, {}, theta));
      }
    } else if (*eval) {
      const auto g = read_snapshot(graph_path);
      const auto est = simulate_spread(g, read_seed_list(seeds_arg), runs, seed, workers);
      os << nlohmann::json{{"mean", est.mean}, {"std_error", est.std_error}, {"runs", est.runs}}.dump() << '\n';
    } else if (*analyze_cmd) {
      if (*degrees) {
        const auto kind = degree_kind == "in" ? DegreeKind::in : degree_kind == "total" ? DegreeKind::total : DegreeKind::out;
        const auto bins = degree_distribution(read_snapshot(graph_path), kind);
        os << "lo,hi,count\n";
        for (const auto& b : bins) os << b.lo << ',' << b.hi << ',' << b.count << '\n';
        const auto fit = fit_power_law(bins);
        os << "# slope=" << fit.slope << " intercept=" << fit.intercept << '\n';
      } else if (*pa) {
        os << "lo,hi,samples,mean_new_edges\n";
        for (const auto& b : pa_correlation(read_snapshot(old_path), read_snapshot(new_path))) {
          os << b.lo << ',' << b.hi << ',' << b.samples << ',' << b.mean_new_edges << '\n';
        }
      } else if (*growth) {
        std::vector<Snapshot> snapshots;
        for (const auto& p : graph_paths) snapshots.push_back(read_snapshot(p));
        os << "label,nodes,edges\n";
        for (const auto& p : growth_stats(snapshots)) os << p.label << ',' << p.nodes << ',' << p.edges << '\n';
      } else if (*rank) {
        const auto seeds = read_seed_list(seeds_arg);
        const auto ranks = influence_degree_rank(read_snapshot(graph_path), seeds);
        os << "node,rank\n";
        for (std::size_t i = 0; i < seeds.size(); ++i) os << seeds[i] << ',' << ranks[i] << '\n';
      }
    } else if (*bench) {
      write_report_csv(os, run_benchmark(scenario_path));
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "Error"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
