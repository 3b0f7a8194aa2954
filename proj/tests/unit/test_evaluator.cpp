#include <doctest.h>

#include <array>

#include "selgov/cefl.hpp"
#include "selgov/error.hpp"
#include "selgov/evaluator.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/rng.hpp"

using namespace selgov;

TEST_SUITE("evaluator") {
  TEST_CASE("context sampling is reproducible and roughly uniform") {
    const auto& spec = default_fixtures().scenario(Scenario::kFraudDetection);
    Rng a(42), b(42), c(43);
    std::array<int, 5> counts{};
    bool differs = false;
    for (int i = 0; i < 10000; ++i) {
      const int va = sample_context(spec, a, 1, kEmbeddingDim, kDefaultHashSeed).variant;
      const int vb = sample_context(spec, b, 1, kEmbeddingDim, kDefaultHashSeed).variant;
      const int vc = sample_context(spec, c, 1, kEmbeddingDim, kDefaultHashSeed).variant;
      CHECK(va == vb);
      if (i < 250) differs |= va != vc;
      ++counts[static_cast<std::size_t>(va)];
    }
    CHECK(differs);
    for (int n : counts) {
      CHECK(n / 10000.0 >= 0.18);
      CHECK(n / 10000.0 <= 0.22);
    }
  }

  TEST_CASE("parallel and orthogonal embeddings") {
    const AgentProfile agent("solo", 0.2, 0.8, 100.0, 0.6, {"aml"});
    ScenarioSpec spec;
    spec.required_tag = "aml";
    for (int v = 0; v < kVariantsPerScenario; ++v) spec.variants.push_back({{"x"}, {0.2, 0.8, 0.5, 0.6}, 0.9});
    const Evaluator ev(spec);
    TaskContext ctx;
    ctx.requirement_vector = agent_embedding(agent, kEmbeddingDim, kDefaultHashSeed);
    CHECK(ev.evaluate(agent, ctx) == 1);
    ctx.requirement_vector.assign(kEmbeddingDim, 0.0);
    // Orthogonal: only a tag bucket the agent does not occupy.
    const auto emb = agent_embedding(agent, kEmbeddingDim, kDefaultHashSeed);
    for (std::size_t i = kScalarFeatures; i < kEmbeddingDim; ++i) {
      if (emb[i] == 0.0) {
        ctx.requirement_vector[i] = 1.0;
        break;
      }
    }
    CHECK(ev.affinity(agent, ctx) == 0.0);
    CHECK(ev.evaluate(agent, ctx) == -1);
  }

  // Golden table: exhaustive affinity evaluation in the Python reference,
  // rows are variants, columns roster agents in id order.
  TEST_CASE("fixture reward tables") {
    const auto& fx = default_fixtures();
    const std::vector<std::vector<std::vector<int>>> golden = {
        {{1, -1, -1, 1, -1, -1, -1},
         {-1, 1, -1, 1, -1, -1, -1},
         {-1, -1, -1, 1, -1, -1, -1},
         {-1, 1, -1, 1, -1, -1, -1},
         {-1, -1, -1, 1, -1, -1, -1}},
        {{-1, 1, -1, -1, -1, 1, -1},
         {-1, -1, -1, 1, -1, 1, -1},
         {-1, 1, -1, -1, -1, -1, 1},
         {-1, -1, -1, -1, -1, 1, 1},
         {-1, 1, -1, -1, -1, 1, -1}},
        {{-1, -1, 1, -1, 1, -1, -1},
         {-1, -1, -1, -1, 1, 1, -1},
         {-1, -1, 1, -1, -1, 1, -1},
         {-1, -1, -1, -1, -1, 1, -1},
         {-1, -1, 1, -1, 1, -1, -1}},
    };
    for (std::size_t s = 0; s < kAllScenarios.size(); ++s) {
      const Evaluator ev(fx.scenario(kAllScenarios[s]));
      CHECK(ev.reward_table(fx.roster) == golden[s]);
    }
  }

  TEST_CASE("scenario validation") {
    const auto& fx = default_fixtures();
    for (const auto& spec : fx.scenarios) CHECK_NOTHROW(validate_scenario(spec, fx.roster));
    auto four = fx.scenarios[0];
    four.variants.pop_back();
    CHECK_THROWS_AS(validate_scenario(four, fx.roster), Error);
    auto nobody = fx.scenarios[0];
    for (auto& v : nobody.variants) v.threshold = 1.5;
    CHECK_THROWS_AS(validate_scenario(nobody, fx.roster), Error);
    auto everybody = fx.scenarios[0];
    for (auto& v : everybody.variants) v.threshold = -1.5;
    CHECK_THROWS_AS(validate_scenario(everybody, fx.roster), Error);
  }

  TEST_CASE("derived seeds separate streams") {
    CHECK(derive_seed(7, "fraud_detection/contexts") == derive_seed(7, "fraud_detection/contexts"));
    CHECK(derive_seed(7, "fraud_detection/contexts") != derive_seed(8, "fraud_detection/contexts"));
    CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
  }
}
