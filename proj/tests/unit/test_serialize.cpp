#include <doctest.h>

#include <cmath>
#include <limits>

#include "selgov/error.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/serialize.hpp"

using namespace selgov;

TEST_SUITE("serialize") {
  TEST_CASE("doubles round-trip through their shortest form") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 0.0, 123456789.125, std::nextafter(1.0, 2.0)}) {
      CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.25) == "0.25");
  }

  TEST_CASE("run config overlays known keys and rejects unknown ones") {
    const auto j = nlohmann::json::parse(R"({"mode": "static", "lr": 0.01, "horizon": 10,
                                             "gamma": 0.9, "initial_weights": [1, 2, 3, 4]})");
    const auto cfg = run_config_from_json(j);
    CHECK(cfg.mode == Mode::kStatic);
    CHECK(cfg.lr_alpha == 0.01);
    CHECK(cfg.lr_beta == 0.01);
    CHECK(cfg.horizon == 10);
    CHECK(cfg.constraints.gamma == 0.9);
    CHECK(cfg.initial_weights[3] == 4.0);

    const auto back = run_config_from_json(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));

    try {
      run_config_from_json(nlohmann::json::parse(R"({"learning_rate": 0.1})"));
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParseError);
    }
  }

  TEST_CASE("parameter structs round-trip") {
    auto theta = make_selection_params(3, {0.1, 0.2, 0.3, 0.4}, 0.2);
    theta.agent_bias = {1.0 / 3.0, -0.5, 7.0};
    CHECK(selection_params_from_json(to_json(theta)) == theta);
    ReducerParams phi;
    phi.score_threshold = -0.123456789;
    phi.exploration_quota = 4;
    CHECK(reducer_params_from_json(to_json(phi)) == phi);
    const ClipEvent e{"policy[3]", 0.97, 0.95, "gamma"};
    CHECK(clip_event_from_json(to_json(e)) == e);
  }

  TEST_CASE("summary csv") {
    RunSummary s;
    s.scenario = Scenario::kQbrAnalysis;
    s.mode = Mode::kIncentivized;
    s.lr = 0.05;
    s.mean_reward = 0.5;
    CHECK(summary_csv_header() == "scenario,mode,lr,mean_reward,mean_SC,SC_0,SC_T,RSC,var_SC,GSI,GD_dynamic");
    CHECK(summary_csv_row(s) == "qbr_analysis,incentivized,0.05,0.5,0,0,0,0,0,NA,0");
    s.gsi = 0.75;
    CHECK(summary_csv_row(s).find(",0.75,") != std::string::npos);
  }

  TEST_CASE("trajectory csv numbering") {
    CHECK(trajectory_csv({0.5, 0.25}, 0) == "step,value\n0,0.5\n1,0.25\n");
    CHECK(trajectory_csv({1.0}, 1) == "step,value\n1,1\n");
  }

  TEST_CASE("fixtures round-trip") {
    const auto& fx = default_fixtures();
    const auto again = fixtures_from_json(fixtures_to_json(fx));
    CHECK(fixtures_to_json(again) == fixtures_to_json(fx));
    CHECK(fx.roster.size() == 7);
    CHECK(fx.agent_index("fraud-sentinel") == 3);
  }

  TEST_CASE("malformed audit records are rejected") {
    const std::vector<std::string> ids{"a", "b"};
    CHECK_THROWS_AS(audit_record_from_json(nlohmann::json::parse(R"({"step": 0})"), ids), Error);
  }
}
