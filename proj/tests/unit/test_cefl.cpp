#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selgov/cefl.hpp"
#include "selgov/error.hpp"
#include "selgov/evaluator.hpp"
#include "selgov/fixtures.hpp"

using namespace selgov;

TEST_SUITE("cefl") {
  // Reference values from an independent Python implementation of
  // FNV-1a 64 -> xor seed -> SplitMix64 finaliser.
  TEST_CASE("token hash matches the reference implementation") {
    CHECK(token_hash("aml", kDefaultHashSeed) == 0xaa5202fa4b6ff2fcULL);
    CHECK(token_hash("fraud", kDefaultHashSeed) == 0x4cab70fea2b6e9e0ULL);
    CHECK(token_hash("sox", kDefaultHashSeed) == 0x4c2c1cdda6a7516aULL);
    CHECK(token_hash("pci-dss", kDefaultHashSeed) == 0xb57c4a5c75cb74c7ULL);
    CHECK(token_hash("", kDefaultHashSeed) == 0xbf58bebb20daedbfULL);
    CHECK(token_hash("variant-0", kDefaultHashSeed) == 0x6060082a236e8c5dULL);
  }

  TEST_CASE("hash embedding matches the reference implementation") {
    const std::vector<std::string> two{"fraud", "aml"};
    const auto e = hash_embed(two, 12, kDefaultHashSeed);
    std::vector<double> expected(12, 0.0);
    expected[4] = 0.7071067811865475;
    expected[8] = -0.7071067811865475;
    for (std::size_t i = 0; i < 12; ++i) CHECK(e[i] == doctest::Approx(expected[i]).epsilon(1e-15));

    const std::vector<std::string> three{"fraud", "fraud", "aml"};
    const auto f = hash_embed(three, 12, kDefaultHashSeed);
    CHECK(f[4] == doctest::Approx(0.8944271909999159).epsilon(1e-15));
    CHECK(f[8] == doctest::Approx(-0.4472135954999579).epsilon(1e-15));
    CHECK(cosine_similarity(e, f) == doctest::Approx(3.0 / std::sqrt(10.0)));
  }

  TEST_CASE("hash embedding is deterministic and zero for no tokens") {
    const std::vector<std::string> toks{"ledger", "sox", "audit"};
    CHECK(hash_embed(toks, 16, 7) == hash_embed(toks, 16, 7));
    const auto z = hash_embed(std::vector<std::string>{}, 8, 7);
    CHECK(std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; }));
    CHECK(cosine_similarity(z, z) == 0.0);
  }

  TEST_CASE("fixture tags occupy distinct buckets") {
    std::vector<std::size_t> buckets;
    for (const char* t : {"aml", "fraud", "sox", "pci-dss", "ops", "gdpr", "basel"}) {
      buckets.push_back(token_hash(t, kDefaultHashSeed) % (kEmbeddingDim - kScalarFeatures));
    }
    std::sort(buckets.begin(), buckets.end());
    CHECK(std::adjacent_find(buckets.begin(), buckets.end()) == buckets.end());
  }

  TEST_CASE("single agent and m = n pools") {
    const auto& fx = default_fixtures();
    const auto ctx = make_context(fx.scenario(Scenario::kFraudDetection), 0, 0, kEmbeddingDim, kDefaultHashSeed);
    CeflConfig one;
    one.pool_size = 1;
    const std::vector<AgentProfile> solo{fx.roster[2]};
    CHECK(expand_and_freeze(ctx, solo, one).members == std::vector<std::size_t>{0});

    CeflConfig all;
    all.pool_size = fx.roster.size();
    std::vector<std::size_t> every(fx.roster.size());
    std::iota(every.begin(), every.end(), 0);
    CHECK(expand_and_freeze(ctx, fx.roster, all).members == every);
  }

  // Pools from an exhaustive similarity ranking in the Python reference.
  TEST_CASE("fixture pools match brute-force ranking") {
    const auto& fx = default_fixtures();
    const std::vector<std::vector<std::vector<std::size_t>>> expected = {
        {{0, 1, 3, 4, 6}, {1, 2, 3, 5, 6}, {0, 2, 3, 4, 6}, {0, 1, 3, 4, 6}, {0, 1, 3, 5, 6}},
        {{0, 1, 4, 5, 6}, {1, 2, 3, 5, 6}, {0, 1, 3, 4, 6}, {0, 1, 4, 5, 6}, {0, 1, 2, 3, 5}},
        {{0, 1, 2, 4, 6}, {1, 2, 4, 5, 6}, {0, 1, 2, 4, 5}, {0, 1, 4, 5, 6}, {0, 2, 3, 4, 5}},
    };
    const CeflConfig cfg;
    for (std::size_t s = 0; s < kAllScenarios.size(); ++s) {
      const auto& spec = fx.scenario(kAllScenarios[s]);
      for (int v = 0; v < kVariantsPerScenario; ++v) {
        const auto ctx = make_context(spec, v, 0, cfg.embed_dim, cfg.hash_seed);
        CHECK(expand_and_freeze(ctx, fx.roster, cfg).members == expected[s][v]);
      }
    }
  }

  TEST_CASE("pools ignore the step index") {
    const auto& fx = default_fixtures();
    const auto& spec = fx.scenario(Scenario::kPaymentsMonitoring);
    const CeflConfig cfg;
    const auto a = expand_and_freeze(make_context(spec, 2, 1, 16, cfg.hash_seed), fx.roster, cfg);
    const auto b = expand_and_freeze(make_context(spec, 2, 999, 16, cfg.hash_seed), fx.roster, cfg);
    CHECK(a == b);
  }

  TEST_CASE("exposure check names the missing agent") {
    const auto& fx = default_fixtures();
    const std::vector<CandidatePool> pools{{{0, 1, 2}}, {{3, 4, 5}}};
    try {
      check_exposure(pools, fx.roster, "demo");
      FAIL("expected NonExposedAgent");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonExposedAgent);
      CHECK(std::string(e.what()).find(fx.roster[6].id()) != std::string::npos);
    }
    const std::vector<CandidatePool> full{{{0, 1, 2, 3}}, {{3, 4, 5, 6}}};
    CHECK_NOTHROW(check_exposure(full, fx.roster, "demo"));
  }

  TEST_CASE("config validation") {
    CeflConfig bad;
    bad.overshoot = 0.9;
    CHECK_THROWS_AS(validate_cefl_config(bad, 7), Error);
    bad = {};
    bad.pool_size = 8;
    CHECK_THROWS_AS(validate_cefl_config(bad, 7), Error);
    CHECK_NOTHROW(validate_cefl_config(CeflConfig{}, 7));
  }
}
