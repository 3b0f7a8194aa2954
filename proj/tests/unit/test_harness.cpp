#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "selgov/error.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/harness.hpp"
#include "selgov/metrics.hpp"
#include "selgov/serialize.hpp"

using namespace selgov;

namespace {

RunConfig short_config(Mode mode, std::uint64_t seed = 3) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.horizon = 60;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("identical configs give identical logs") {
    for (Mode m : kAllModes) {
      const auto cfg = short_config(m);
      const auto a = run_episode(cfg, default_fixtures());
      const auto b = run_episode(cfg, default_fixtures());
      CHECK(audit_log_jsonl(a.header, a.log) == audit_log_jsonl(b.header, b.log));
      CHECK(a.summary == b.summary);
    }
  }

  TEST_CASE("every record satisfies the log invariants") {
    const auto ep = run_episode(short_config(Mode::kIncentivized), default_fixtures());
    CHECK(ep.log.size() == 60);
    CHECK(ep.sc_series.size() == 61);
    CHECK(ep.top_share_series.size() == 60);
    for (std::size_t i = 0; i < ep.log.size(); ++i) {
      const auto& r = ep.log[i];
      CHECK(r.step == i);
      CHECK_NOTHROW(validate_record(r));
      CHECK(r.clip_events.empty() == (r.fail_loud_action == FailLoudAction::kNone));
      CHECK(r.policy_snapshot.size() == static_cast<std::size_t>(kVariantsPerScenario));
      CHECK(r.scores.size() == r.candidate_pool.size());
    }
  }

  TEST_CASE("summary is recomputable from the log") {
    for (Mode m : kAllModes) {
      const auto ep = run_paired_episode(short_config(m), default_fixtures());
      CHECK(summarize(ep.header, ep.log) == ep.summary);
      const auto text = audit_log_jsonl(ep.header, ep.log);
      const auto path = std::filesystem::temp_directory_path() / "selgov_harness_replay.jsonl";
      {
        std::ofstream out(path);
        out << text;
      }
      const auto [header, log] = read_audit_log(path);
      CHECK(summarize(header, log) == ep.summary);
      CHECK(audit_log_jsonl(header, log) == text);
    }
  }

  TEST_CASE("static runs never move parameters") {
    const auto ep = run_episode(short_config(Mode::kStatic), default_fixtures());
    for (const auto& r : ep.log.records()) {
      CHECK(r.theta_after == ep.header.theta_0);
      CHECK(r.phi_after == ep.header.phi_0);
      CHECK(r.clip_events.empty());
    }
  }

  TEST_CASE("unconstrained runs never clip") {
    const auto ep = run_episode(short_config(Mode::kUnconstrainedRl), default_fixtures());
    CHECK(ep.header.initial_clip_events.empty());
    for (const auto& r : ep.log.records()) CHECK(r.clip_events.empty());
    CHECK(ep.summary.gd_dynamic == 0.0);
    REQUIRE(ep.summary.gsi.has_value());
    CHECK(*ep.summary.gsi == 0.0);
  }

  TEST_CASE("scalar top-k surfaces one agent per step") {
    const auto ep = run_episode(short_config(Mode::kScalarTopK), default_fixtures());
    for (const auto& r : ep.log.records()) {
      CHECK(r.surfaced.size() == 1);
      CHECK(r.policy == std::vector<double>{1.0});
    }
  }

  TEST_CASE("variants without an eligible agent block") {
    Fixtures fx = default_fixtures();
    for (auto& s : fx.scenarios) {
      if (s.scenario == Scenario::kFraudDetection) s.required_tag = "gdpr";
    }
    auto cfg = short_config(Mode::kIncentivized);
    const auto ep = run_episode(cfg, fx);
    std::size_t blocked = 0, flagged = 0;
    for (const auto& r : ep.log.records()) {
      if (!r.chosen) {
        ++blocked;
        CHECK(r.fail_loud_action == FailLoudAction::kBlock);
        CHECK(r.reward == 0);
        CHECK(r.theta_after == (r.step == 0 ? ep.header.theta_0 : ep.log[r.step - 1].theta_after));
      }
      if (r.fail_loud_action != FailLoudAction::kNone) ++flagged;
    }
    CHECK(blocked > 0);
    CHECK(ep.summary.gd_dynamic == static_cast<double>(flagged) / static_cast<double>(ep.log.size()));
  }

  TEST_CASE("infeasible constraints are rejected up front") {
    auto cfg = short_config(Mode::kIncentivized);
    cfg.constraints.p_min = 0.4;
    CHECK_THROWS_AS(run_episode(cfg, default_fixtures()), Error);
  }

  TEST_CASE("sweep row and file counts") {
    SweepConfig one;
    one.base.horizon = 40;
    one.scenarios = {Scenario::kPaymentsMonitoring};
    one.modes = {Mode::kIncentivized};
    one.lrs = {0.05};
    one.seeds = {0, 1, 2};
    const auto cells = run_sweep(one, default_fixtures());
    CHECK(cells.size() == 1);
    CHECK(cells[0].per_seed.size() == 3);
    CHECK(cells[0].summary.gsi.has_value());

    const auto dir = std::filesystem::temp_directory_path() / "selgov_sweep_counts";
    std::filesystem::remove_all(dir);
    write_sweep_outputs(dir, cells);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
    CHECK(files == 3);  // summary.csv plus two trajectories
    const auto summary = slurp(dir / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 2);

    SweepConfig grid;
    grid.base.horizon = 5;
    grid.seeds = {0};
    CHECK(run_sweep(grid, default_fixtures()).size() == 24);
  }

  TEST_CASE("seed order does not change sweep results") {
    SweepConfig a;
    a.base.horizon = 50;
    a.scenarios = {Scenario::kFraudDetection};
    a.modes = {Mode::kUnconstrainedRl, Mode::kIncentivized};
    a.lrs = {0.05};
    a.seeds = {0, 1, 2, 3, 4};
    SweepConfig b = a;
    b.seeds = {4, 2, 0, 3, 1, 2};
    b.threads = 1;
    const auto ca = run_sweep(a, default_fixtures());
    const auto cb = run_sweep(b, default_fixtures());
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
      CHECK(ca[i].summary == cb[i].summary);
      CHECK(ca[i].sc_trajectory == cb[i].sc_trajectory);
      CHECK(ca[i].top_share_trajectory == cb[i].top_share_trajectory);
    }
  }

  TEST_CASE("static concentration stays flat") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto ep = run_episode(short_config(Mode::kStatic, seed), default_fixtures());
      CHECK(std::abs(ep.summary.rsc) <= 0.06);
    }
  }
}
