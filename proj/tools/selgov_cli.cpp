// selgov: run, sweep, replay and inspect governed selection experiments.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selgov/cefl.hpp"
#include "selgov/error.hpp"
#include "selgov/evaluator.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/harness.hpp"
#include "selgov/reducer.hpp"
#include "selgov/serialize.hpp"

namespace fs = std::filesystem;
using namespace selgov;

namespace {

// Flags shared by `run` and `sweep`. Unset optionals leave config-file values alone.
struct CommonFlags {
  std::string config_file;
  std::string fixtures_file;
  std::optional<double> lr_alpha, lr_beta, gamma, p_min, sigma_max, temperature;
  std::optional<std::size_t> horizon;
  std::optional<int> k_min, d_min;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config-file", f.config_file, "JSON run config; flags override its values")
      ->check(CLI::ExistingFile);
  app->add_option("--fixtures", f.fixtures_file, "Roster and scenario fixtures (default: built-in)")
      ->check(CLI::ExistingFile);
  app->add_option("--lr-alpha", f.lr_alpha, "Selection learning rate");
  app->add_option("--lr-beta", f.lr_beta, "Reducer learning rate");
  app->add_option("--horizon", f.horizon, "Steps per run");
  app->add_option("--gamma", f.gamma, "Per-step probability cap");
  app->add_option("--p-min", f.p_min, "Per-step probability floor");
  app->add_option("--sigma-max", f.sigma_max, "Variance clamp ceiling");
  app->add_option("--k-min", f.k_min, "Minimum exploration quota");
  app->add_option("--d-min", f.d_min, "Minimum diversity buckets");
  app->add_option("--temperature", f.temperature, "Policy temperature");
  app->add_option("--out-dir", f.out_dir, "Output directory");
}

RunConfig base_config(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config_file.empty()) cfg = load_run_config(f.config_file);
  if (f.lr_alpha) cfg.lr_alpha = *f.lr_alpha;
  if (f.lr_beta) cfg.lr_beta = *f.lr_beta;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.gamma) cfg.constraints.gamma = *f.gamma;
  if (f.p_min) cfg.constraints.p_min = *f.p_min;
  if (f.sigma_max) cfg.constraints.sigma_max = *f.sigma_max;
  if (f.k_min) cfg.constraints.k_min = *f.k_min;
  if (f.d_min) cfg.constraints.d_min = *f.d_min;
  if (f.temperature) cfg.temperature = *f.temperature;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  return cfg;
}

Fixtures fixtures_for(const CommonFlags& f) {
  return f.fixtures_file.empty() ? default_fixtures() : load_fixtures(f.fixtures_file);
}

int cmd_run(const CommonFlags& f, const std::optional<std::string>& scenario,
            const std::optional<std::string>& mode, std::optional<std::uint64_t> seed, bool paired) {
  RunConfig cfg = base_config(f);
  if (scenario) cfg.scenario = parse_scenario(*scenario);
  if (mode) cfg.mode = parse_mode(*mode);
  if (seed) cfg.seed = *seed;
  const Fixtures fx = fixtures_for(f);
  const auto ep = paired ? run_paired_episode(cfg, fx) : run_episode(cfg, fx);

  const fs::path dir = cfg.out_dir;
  const std::string stem = cell_stem(cfg.scenario, cfg.mode, cfg.lr_alpha) + "_seed" + std::to_string(cfg.seed);
  write_audit_log(dir / ("audit_" + stem + ".jsonl"), ep.header, ep.log);
  write_summary_csv(dir / ("summary_" + stem + ".csv"), {ep.summary});
  write_text(dir / ("traj_sc_" + stem + ".csv"), trajectory_csv(ep.sc_series, 0));
  write_text(dir / ("traj_top_share_" + stem + ".csv"), trajectory_csv(ep.top_share_series, 1));
  std::cout << summary_csv_header() << "\n" << summary_csv_row(ep.summary) << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::vector<std::string>& scenarios,
              const std::vector<std::string>& modes, const std::vector<double>& lrs,
              const std::vector<std::uint64_t>& seeds, unsigned threads) {
  SweepConfig sc;
  sc.base = base_config(f);
  if (!scenarios.empty()) {
    sc.scenarios.clear();
    for (const auto& s : scenarios) sc.scenarios.push_back(parse_scenario(s));
  }
  if (!modes.empty()) {
    sc.modes.clear();
    for (const auto& m : modes) sc.modes.push_back(parse_mode(m));
  }
  if (!lrs.empty()) sc.lrs = lrs;
  if (!seeds.empty()) sc.seeds = seeds;
  sc.threads = threads;
  const Fixtures fx = fixtures_for(f);

  const auto start = std::chrono::steady_clock::now();
  const auto cells = run_sweep(sc, fx);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_sweep_outputs(sc.base.out_dir, cells);

  int failures = 0;
  std::cout << summary_csv_header() << "\n";
  for (const auto& c : cells) {
    if (!c.per_seed.empty()) std::cout << summary_csv_row(c.summary) << "\n";
    for (const auto& e : c.errors) {
      std::cerr << cell_stem(c.scenario, c.mode, c.lr) << ": " << e << "\n";
      ++failures;
    }
  }
  std::cerr << cells.size() << " cells x " << sc.seeds.size() << " seeds in " << secs << " s\n";
  return failures == 0 ? 0 : 1;
}

int cmd_replay(const std::string& log_path, const std::string& summary_path) {
  const auto [header, log] = read_audit_log(log_path);
  const std::string row = summary_csv_row(summarize(header, log));
  std::cout << summary_csv_header() << "\n" << row << "\n";
  if (summary_path.empty()) return 0;
  std::ifstream in(summary_path);
  std::string line, expected;
  std::getline(in, line);
  std::getline(in, expected);
  if (expected != row) {
    std::cerr << "replay mismatch\n  summary: " << expected << "\n  replay:  " << row << "\n";
    return 1;
  }
  std::cerr << "replay matches " << summary_path << "\n";
  return 0;
}

int cmd_inspect(const CommonFlags& f) {
  const RunConfig cfg = base_config(f);
  const Fixtures fx = fixtures_for(f);
  for (const auto& spec : fx.scenarios) {
    Evaluator ev(spec, cfg.cefl.embed_dim, cfg.cefl.hash_seed);
    const auto table = ev.reward_table(fx.roster);
    std::cout << scenario_name(spec.scenario) << " (required tag " << spec.required_tag << ")\n";
    for (int v = 0; v < static_cast<int>(spec.variants.size()); ++v) {
      const auto ctx = make_context(spec, v, 0, cfg.cefl.embed_dim, cfg.cefl.hash_seed);
      const auto pool = expand_and_freeze(ctx, fx.roster, cfg.cefl);
      std::cout << "  variant-" << v << ":";
      for (std::size_t a = 0; a < fx.roster.size(); ++a) {
        const bool pooled = std::binary_search(pool.members.begin(), pool.members.end(), a);
        const bool tagged = fx.roster[a].has_tag(spec.required_tag);
        std::cout << " " << fx.roster[a].id() << (pooled ? (tagged ? "*" : "~") : "") << "="
                  << (table[v][a] > 0 ? "+" : "-") << format_double(ev.affinity(fx.roster[a], ctx)).substr(0, 5);
      }
      std::cout << "\n";
    }
  }
  std::cout << "(* pooled and eligible, ~ pooled but filtered)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Governed agent-selection simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::optional<std::string> run_scenario, run_mode;
  std::optional<std::uint64_t> run_seed;
  bool paired = false;
  auto* run = app.add_subcommand("run", "Run one episode and write its audit log, summary and trajectories");
  add_common(run, run_flags);
  run->add_option("--scenario", run_scenario, "fraud_detection | payments_monitoring | qbr_analysis");
  run->add_option("--mode", run_mode, "static | scalar_topk | unconstrained_rl | incentivized");
  run->add_option("--seed,--seeds", run_seed, "Run seed");
  run->add_flag("--paired", paired, "Also run the matched unconstrained episode so GSI is defined");

  CommonFlags sweep_flags;
  std::vector<std::string> sweep_scenarios, sweep_modes;
  std::vector<double> sweep_lrs;
  std::vector<std::uint64_t> sweep_seeds;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario x mode x lr x seed grid");
  add_common(sweep, sweep_flags);
  sweep->add_option("--scenario,--scenarios", sweep_scenarios, "Scenarios (default: all)")->delimiter(',');
  sweep->add_option("--mode,--modes", sweep_modes, "Modes (default: all)")->delimiter(',');
  sweep->add_option("--lr,--lrs", sweep_lrs, "Learning rates, applied to both alpha and beta")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "Seeds (default: 0..9)")->delimiter(',');
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::string replay_log, replay_summary;
  auto* replay = app.add_subcommand("replay", "Recompute the summary from an audit log");
  replay->add_option("log", replay_log, "Audit log (.jsonl)")->required()->check(CLI::ExistingFile);
  replay->add_option("--summary", replay_summary, "Summary CSV to compare against")->check(CLI::ExistingFile);

  CommonFlags inspect_flags;
  auto* inspect = app.add_subcommand("inspect", "Print candidate pools and reward tables for the fixtures");
  add_common(inspect, inspect_flags);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(run_flags, run_scenario, run_mode, run_seed, paired);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_flags, sweep_scenarios, sweep_modes, sweep_lrs, sweep_seeds, threads);
    }
    if (replay->parsed()) return cmd_replay(replay_log, replay_summary);
    if (inspect->parsed()) return cmd_inspect(inspect_flags);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
