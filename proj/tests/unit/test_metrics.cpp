#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "selgov/error.hpp"
#include "selgov/metrics.hpp"

using namespace selgov;

namespace {

std::vector<VariantPolicy> uniform_snapshot(std::size_t n) {
  std::vector<VariantPolicy> snap;
  for (int v = 0; v < kVariantsPerScenario; ++v) {
    VariantPolicy vp;
    vp.variant = v;
    for (std::size_t i = 0; i < n; ++i) vp.agents.push_back(i);
    vp.probabilities.assign(n, 1.0 / static_cast<double>(n));
    snap.push_back(vp);
  }
  return snap;
}

AuditRecord record(std::size_t step, bool clipped) {
  AuditRecord r;
  r.step = step;
  if (clipped) {
    r.clip_events.push_back({"phi.variance_clamp", 0.2, 0.18, "sigma_max"});
    r.fail_loud_action = FailLoudAction::kAlert;
  }
  return r;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("selection concentration examples") {
    CHECK(selection_concentration(uniform_snapshot(7), 7) == doctest::Approx(1.0 / 7.0));
    std::vector<VariantPolicy> locked;
    for (int v = 0; v < kVariantsPerScenario; ++v) locked.push_back({v, {3}, {1.0}});
    CHECK(selection_concentration(locked, 7) == 1.0);
  }

  // Hand computation: agent 0 appears in variants 0-2 with 0.6, 0.5, 0.8 and
  // is absent from 3-4, so P(A_0) = 1.9 / 5 = 0.38. Agent 1 collects
  // 0.4 + 0.5 + 0.2 + 1.0 + 0.3 = 2.4, P = 0.48, the maximum.
  TEST_CASE("mixed snapshot mean-then-max") {
    const std::vector<VariantPolicy> snap{{0, {0, 1}, {0.6, 0.4}},
                                          {1, {0, 1}, {0.5, 0.5}},
                                          {2, {0, 1}, {0.8, 0.2}},
                                          {3, {1}, {1.0}},
                                          {4, {1, 2}, {0.3, 0.7}}};
    const auto p = inclusion_probabilities(snap, 3);
    CHECK(p[0] == doctest::Approx(0.38));
    CHECK(p[1] == doctest::Approx(0.48));
    CHECK(p[2] == doctest::Approx(0.14));
    CHECK(selection_concentration(snap, 3) == doctest::Approx(0.48));
  }

  TEST_CASE("rsc") {
    CHECK(rsc(0.259, 0.942) == doctest::Approx(0.683));
    CHECK(rsc(0.284, 1.000) == doctest::Approx(0.716));
    CHECK(rsc(0.5, 0.5) == 0.0);
  }

  TEST_CASE("gsi") {
    CHECK(gsi(0.0, 0.2) == 1.0);
    CHECK(gsi(0.25, 1.0) == doctest::Approx(0.75));
    try {
      gsi(0.1, 0.0);
      FAIL("expected UndefinedGSI");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUndefinedGsi);
    }
    CHECK_FALSE(gsi_or_undefined(0.1, 0.0).has_value());
  }

  TEST_CASE("governance debt") {
    AuditLog log;
    for (std::size_t i = 0; i < 250; ++i) log.append(record(i, false));
    CHECK(governance_debt(log) == 0.0);

    AuditLog one;
    for (std::size_t i = 0; i < 250; ++i) one.append(record(i, i == 17));
    CHECK(governance_debt(one) == 1.0 / 250.0);
    CHECK(governance_debt(one) == doctest::Approx(0.004));

    AuditLog many;
    for (std::size_t i = 0; i < 250; ++i) many.append(record(i, i % 5 == 0 && i < 235));
    CHECK(governance_debt(many) == 47.0 / 250.0);
    CHECK(governance_debt(many) == doctest::Approx(0.188));
  }

  TEST_CASE("top agent share") {
    const std::vector<std::optional<std::size_t>> same(10, std::size_t{2});
    CHECK(top_agent_share(same) == 1.0);
    std::vector<std::optional<std::size_t>> alt;
    for (int i = 0; i < 20; ++i) alt.emplace_back(static_cast<std::size_t>(i % 2));
    CHECK(top_agent_share(alt) == 0.5);
    std::vector<std::optional<std::size_t>> blocked{std::size_t{1}, std::nullopt, std::size_t{1}, std::nullopt};
    CHECK(top_agent_share(blocked) == 0.5);
  }

  TEST_CASE("top agent share matches the histogram oracle") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(-1, 6);
    std::vector<std::optional<std::size_t>> h;
    for (int i = 0; i < 400; ++i) {
      const int x = pick(rng);
      h.push_back(x < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(x)));
      CHECK(top_agent_share(h) == oracle::top_share_histogram(h));
    }
    const auto series = top_agent_share_series(h);
    CHECK(series.size() == h.size());
    CHECK(series.back() == top_agent_share(h));
  }

  TEST_CASE("steps to share") {
    const std::vector<double> s{0.5, 1.0, 0.95, 0.85, 0.9, 0.92};
    CHECK(steps_to_share(s, 0.9) == 5);
    CHECK(steps_to_share(s, 0.99) == 7);
    CHECK(steps_to_share(s, 0.4) == 1);
  }

  TEST_CASE("audit log ordering") {
    AuditLog log;
    log.append(record(0, false));
    CHECK(log.size() == 1);
    try {
      log.append(record(5, false));
      FAIL("expected OutOfOrderRecord");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kOutOfOrderRecord);
    }
  }

  TEST_CASE("variance and mean") {
    const std::vector<double> xs{1, 2, 3, 4};
    CHECK(mean(xs) == 2.5);
    CHECK(population_variance(xs) == 1.25);
  }
}
