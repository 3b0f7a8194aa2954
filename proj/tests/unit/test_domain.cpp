#include <doctest.h>

#include <functional>

#include "selgov/domain.hpp"
#include "selgov/error.hpp"
#include "selgov/metrics.hpp"

using namespace selgov;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected selgov::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("constraint spec feasibility") {
    ConstraintSpec ok;
    ok.p_min = 0.1;
    ok.gamma = 0.95;
    CHECK_NOTHROW(validate_constraint_spec(ok, 7));

    ConstraintSpec floor_too_high = ok;
    floor_too_high.p_min = 0.3;
    CHECK(code_of([&] { validate_constraint_spec(floor_too_high, 4); }) ==
          ErrorCode::kInfeasibleConstraintSet);

    ConstraintSpec cap_too_low = ok;
    cap_too_low.gamma = 0.05;
    CHECK(code_of([&] { validate_constraint_spec(cap_too_low, 7); }) ==
          ErrorCode::kInfeasibleConstraintSet);
  }

  TEST_CASE("constraint spec rejects malformed bounds") {
    ConstraintSpec s;
    s.d_min = 0;
    CHECK(code_of([&] { validate_constraint_spec(s, 5); }) == ErrorCode::kInvalidArgument);
    s = {};
    s.sigma_max = 0.0;
    CHECK(code_of([&] { validate_constraint_spec(s, 5); }) == ErrorCode::kInvalidArgument);
    s = {};
    s.default_theta_bounds = {1.0, -1.0};
    CHECK(code_of([&] { validate_constraint_spec(s, 5); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("agent profile validates feature ranges and normalises tags") {
    AgentProfile a("x", 0.2, 0.8, 100.0, 0.9, {"sox", "aml", "sox"});
    CHECK(a.compliance_tags() == std::vector<std::string>{"aml", "sox"});
    CHECK(a.has_tag("aml"));
    CHECK_FALSE(a.has_tag("fraud"));
    CHECK(a.responsiveness() == doctest::Approx(0.5));
    CHECK(code_of([] { AgentProfile("y", 1.5, 0.5, 10.0, 0.5, {}); }) == ErrorCode::kInvalidArgument);
    CHECK(code_of([] { AgentProfile("y", 0.5, 0.5, -1.0, 0.5, {}); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("roster is sorted by id and rejects duplicates") {
    auto roster = make_roster({AgentProfile("b", 0.1, 0.1, 1, 0.1, {}), AgentProfile("a", 0.1, 0.1, 1, 0.1, {})});
    CHECK(roster[0].id() == "a");
    CHECK(roster[1].id() == "b");
    CHECK(code_of([] {
            make_roster({AgentProfile("a", 0.1, 0.1, 1, 0.1, {}), AgentProfile("a", 0.2, 0.1, 1, 0.1, {})});
          }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("enum names round-trip") {
    for (Scenario s : kAllScenarios) CHECK(parse_scenario(scenario_name(s)) == s);
    for (Mode m : kAllModes) CHECK(parse_mode(mode_name(m)) == m);
    for (auto a : {FailLoudAction::kNone, FailLoudAction::kAlert, FailLoudAction::kThrottle, FailLoudAction::kBlock}) {
      CHECK(parse_fail_loud(fail_loud_name(a)) == a);
    }
    CHECK(code_of([] { parse_mode("greedy"); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("selection params coordinates round-trip") {
    auto theta = make_selection_params(3, {1, 2, 3, 4}, 0.5);
    theta.agent_bias = {5, 6, 7};
    const auto c = theta.coordinates();
    CHECK(c == std::vector<double>{1, 2, 3, 4, 5, 6, 7});
    SelectionParams other = make_selection_params(3, {0, 0, 0, 0}, 0.5);
    other.set_coordinates(c);
    CHECK(other == theta);
  }

  TEST_CASE("record validation ties clip events to fail-loud actions") {
    AuditRecord rec;
    rec.candidate_pool = {0, 1, 2};
    rec.filtered_pool = {0, 1};
    rec.surfaced = {0, 1};
    rec.chosen = 1;
    CHECK_NOTHROW(validate_record(rec));
    rec.clip_events.push_back({"phi.variance_clamp", 0.2, 0.18, "sigma_max"});
    CHECK(code_of([&] { validate_record(rec); }) == ErrorCode::kInvalidArgument);
    rec.fail_loud_action = FailLoudAction::kAlert;
    CHECK_NOTHROW(validate_record(rec));
    rec.chosen = 2;
    CHECK(code_of([&] { validate_record(rec); }) == ErrorCode::kInvalidArgument);
  }
}
