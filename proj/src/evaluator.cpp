#include "selgov/evaluator.hpp"

#include <algorithm>

#include "selgov/error.hpp"

namespace selgov {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return token_hash(label, token_hash(std::to_string(seed), 0x9d1c0ffeeULL));
}

std::vector<double> requirement_vector(const VariantSpec& variant, std::size_t dim,
                                       std::uint64_t seed) {
  if (dim <= kScalarFeatures) throw Error(ErrorCode::kInvalidArgument, "embedding dim too small");
  std::vector<double> out(variant.profile.begin(), variant.profile.end());
  const auto h = hash_embed(variant.keywords, dim - kScalarFeatures, seed);
  out.insert(out.end(), h.begin(), h.end());
  return out;
}

TaskContext make_context(const ScenarioSpec& spec, int variant, std::size_t step, std::size_t dim,
                         std::uint64_t seed) {
  if (variant < 0 || static_cast<std::size_t>(variant) >= spec.variants.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "variant index out of range");
  }
  TaskContext ctx;
  ctx.scenario = spec.scenario;
  ctx.variant = variant;
  ctx.step_index = step;
  ctx.keywords = spec.variants[static_cast<std::size_t>(variant)].keywords;
  ctx.requirement_vector = requirement_vector(spec.variants[static_cast<std::size_t>(variant)], dim, seed);
  validate_context(ctx);
  return ctx;
}

TaskContext sample_context(const ScenarioSpec& spec, Rng& rng, std::size_t step, std::size_t dim,
                           std::uint64_t seed) {
  const auto v = static_cast<int>(rng.below(spec.variants.size()));
  return make_context(spec, v, step, dim, seed);
}

Evaluator::Evaluator(ScenarioSpec spec, std::size_t dim, std::uint64_t seed)
    : spec_(std::move(spec)), dim_(dim), seed_(seed) {}

double Evaluator::affinity(const AgentProfile& agent, const TaskContext& ctx) const {
  return cosine_similarity(agent_embedding(agent, dim_, seed_), ctx.requirement_vector);
}

int Evaluator::evaluate(const AgentProfile& agent, const TaskContext& ctx) const {
  const double h = spec_.variants.at(static_cast<std::size_t>(ctx.variant)).threshold;
  return affinity(agent, ctx) >= h ? 1 : -1;
}

std::vector<std::vector<int>> Evaluator::reward_table(std::span<const AgentProfile> roster) const {
  std::vector<std::vector<int>> table;
  for (int v = 0; v < static_cast<int>(spec_.variants.size()); ++v) {
    const auto ctx = make_context(spec_, v, 0, dim_, seed_);
    auto& row = table.emplace_back();
    for (const auto& a : roster) row.push_back(evaluate(a, ctx));
  }
  return table;
}

void validate_scenario(const ScenarioSpec& spec, std::span<const AgentProfile> roster,
                       std::size_t dim, std::uint64_t seed) {
  const std::string name(scenario_name(spec.scenario));
  if (spec.variants.size() != static_cast<std::size_t>(kVariantsPerScenario)) {
    throw Error(ErrorCode::kInvalidArgument, name + ": exactly five variants required");
  }
  if (spec.required_tag.empty()) {
    throw Error(ErrorCode::kInvalidArgument, name + ": required compliance tag missing");
  }
  const Evaluator eval(spec, dim, seed);
  const auto table = eval.reward_table(roster);
  for (std::size_t v = 0; v < table.size(); ++v) {
    const auto& row = table[v];
    const bool has_pos = std::find(row.begin(), row.end(), 1) != row.end();
    const bool has_neg = std::find(row.begin(), row.end(), -1) != row.end();
    if (!has_pos || !has_neg) {
      throw Error(ErrorCode::kInvalidArgument,
                  name + " variant " + std::to_string(v) + ": reward table is not informative");
    }
  }
}

}  // namespace selgov
