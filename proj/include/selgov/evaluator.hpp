#pragma once

// Scenario definitions, the stationary context distribution and the perfect
// deterministic evaluator.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selgov/cefl.hpp"
#include "selgov/domain.hpp"
#include "selgov/rng.hpp"

namespace selgov {

struct VariantSpec {
  std::vector<std::string> keywords;
  std::array<double, kScalarFeatures> profile{};  // preferred (risk, stability, responsiveness, auditability)
  double threshold = 0.5;                         // affinity needed for a +1
};

struct ScenarioSpec {
  Scenario scenario = Scenario::kFraudDetection;
  std::string required_tag;
  std::vector<VariantSpec> variants;
};

// Scalar preference block followed by the keyword hash in the tag subspace.
std::vector<double> requirement_vector(const VariantSpec& variant, std::size_t dim, std::uint64_t seed);

TaskContext make_context(const ScenarioSpec& spec, int variant, std::size_t step, std::size_t dim,
                         std::uint64_t seed);

// Uniform draw over the scenario's variants.
TaskContext sample_context(const ScenarioSpec& spec, Rng& rng, std::size_t step, std::size_t dim,
                           std::uint64_t seed);

class Evaluator {
 public:
  Evaluator(ScenarioSpec spec, std::size_t dim = kEmbeddingDim, std::uint64_t seed = kDefaultHashSeed);

  double affinity(const AgentProfile& agent, const TaskContext& ctx) const;

  // +1 iff affinity >= the variant's threshold. Pure in (agent, ctx).
  int evaluate(const AgentProfile& agent, const TaskContext& ctx) const;

  // rewards[variant][agent] over the roster.
  std::vector<std::vector<int>> reward_table(std::span<const AgentProfile> roster) const;

  const ScenarioSpec& spec() const noexcept { return spec_; }

 private:
  ScenarioSpec spec_;
  std::size_t dim_;
  std::uint64_t seed_;
};

// Exactly five variants, and every variant has at least one +1 and one -1
// agent in the roster.
void validate_scenario(const ScenarioSpec& spec, std::span<const AgentProfile> roster,
                       std::size_t dim = kEmbeddingDim, std::uint64_t seed = kDefaultHashSeed);

}  // namespace selgov
