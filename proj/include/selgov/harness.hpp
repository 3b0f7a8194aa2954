#pragma once

// Experiment runner: one governed episode per RunConfig, and grid sweeps
// over scenarios x modes x learning rates x seeds.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selgov/cefl.hpp"
#include "selgov/domain.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/metrics.hpp"

namespace selgov {

struct ThrottlePolicy {
  std::size_t window = 10;   // steps inspected
  std::size_t threshold = 3; // clip steps in the window that trigger THROTTLE
  std::size_t duration = 10; // steps the reduced learning rates stay in force
  double factor = 0.5;
};

struct RunConfig {
  Scenario scenario = Scenario::kFraudDetection;
  Mode mode = Mode::kIncentivized;
  double lr_alpha = 0.05;
  double lr_beta = 0.05;
  std::size_t horizon = 250;
  std::uint64_t seed = 0;
  ConstraintSpec constraints;
  CeflConfig cefl;
  std::array<double, kScalarFeatures> initial_weights = {0.06, 0.03, 0.03, 0.03};
  double temperature = 0.2;
  ReducerParams initial_phi;
  ThrottlePolicy throttle;
  std::string out_dir = "out";
};

struct RunSummary {
  Scenario scenario = Scenario::kFraudDetection;
  Mode mode = Mode::kStatic;
  double lr = 0.0;
  double mean_reward = 0.0;
  double mean_sc = 0.0;
  double sc_0 = 0.0;
  double sc_T = 0.0;
  double rsc = 0.0;
  double var_sc = 0.0;
  std::optional<double> gsi;
  double gd_dynamic = 0.0;
  bool operator==(const RunSummary&) const = default;
};

// Everything needed to interpret the step records of one run.
struct RunHeader {
  RunConfig config;
  std::vector<std::string> roster_ids;
  SelectionParams theta_0;
  ReducerParams phi_0;
  std::vector<ClipEvent> initial_clip_events;
  std::vector<VariantPolicy> initial_snapshot;
  std::optional<double> paired_unconstrained_var_sc;
};

struct EpisodeResult {
  RunHeader header;
  AuditLog log;
  RunSummary summary;
  std::vector<double> sc_series;         // SC_0 .. SC_T
  std::vector<double> top_share_series;  // t = 1 .. T
};

// Executes the governed loop for cfg.horizon steps. GSI is computed against
// `paired_unconstrained_var` when given; an unconstrained run pairs with itself.
EpisodeResult run_episode(const RunConfig& cfg, const Fixtures& fixtures,
                          std::optional<double> paired_unconstrained_var = std::nullopt);

// run_episode, first running the matched unconstrained configuration when
// cfg.mode is not unconstrained so that GSI is defined.
EpisodeResult run_paired_episode(const RunConfig& cfg, const Fixtures& fixtures);

// Every summary metric recomputed from the header and step records alone.
RunSummary summarize(const RunHeader& header, const AuditLog& log);

std::vector<double> sc_series_from_log(const RunHeader& header, const AuditLog& log);

struct SweepConfig {
  std::vector<Scenario> scenarios{kAllScenarios.begin(), kAllScenarios.end()};
  std::vector<Mode> modes{kAllModes.begin(), kAllModes.end()};
  std::vector<double> lrs = {0.01, 0.05};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  RunConfig base;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool keep_episodes = false;
};

struct SweepCell {
  Scenario scenario = Scenario::kFraudDetection;
  Mode mode = Mode::kStatic;
  double lr = 0.0;
  RunSummary summary;  // mean over the seeds that completed
  std::vector<RunSummary> per_seed;
  std::vector<std::uint64_t> seeds;
  std::vector<double> sc_trajectory;         // mean over seeds, t = 0..T
  std::vector<double> top_share_trajectory;  // mean over seeds, t = 1..T
  std::vector<std::string> errors;           // per-seed failures, "seed N: message"
  std::vector<EpisodeResult> episodes;       // only with keep_episodes
};

// Cells ordered by (scenario, mode, lr) as listed in the config; results
// never depend on completion order or seed order.
std::vector<SweepCell> run_sweep(const SweepConfig& cfg, const Fixtures& fixtures);

RunSummary average_summaries(const std::vector<RunSummary>& runs);

}  // namespace selgov
