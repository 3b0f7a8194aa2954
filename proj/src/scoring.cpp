#include "selgov/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "selgov/cefl.hpp"
#include "selgov/error.hpp"

namespace selgov {

FeatureRow score_features(const AgentProfile& agent, std::span<const double> agent_embedding,
                          const TaskContext& ctx) {
  return {cosine_similarity(agent_embedding, ctx.requirement_vector), 1.0 - agent.risk_profile(),
          agent.stability_score(), agent.auditability_score()};
}

double score(const FeatureRow& features, std::size_t agent, const SelectionParams& theta) {
  double s = theta.agent_bias.at(agent);
  for (std::size_t j = 0; j < kScalarFeatures; ++j) s += theta.feature_weights[j] * features[j];
  return s;
}

ScoredCandidate score_agent(const AgentProfile& agent, std::size_t agent_index,
                            std::span<const double> agent_embedding, const TaskContext& ctx,
                            const SelectionParams& theta) {
  ScoredCandidate c;
  c.agent = agent_index;
  c.features = score_features(agent, agent_embedding, ctx);
  c.score = score(c.features, agent_index, theta);
  return c;
}

ScoreVector rescore(const ScoreVector& candidates, const SelectionParams& theta) {
  ScoreVector out = candidates;
  for (auto& c : out) c.score = score(c.features, c.agent, theta);
  return out;
}

std::vector<double> scores_of(const ScoreVector& candidates) {
  std::vector<double> s;
  s.reserve(candidates.size());
  for (const auto& c : candidates) s.push_back(c.score);
  return s;
}

std::vector<double> policy(std::span<const double> scores, double temperature) {
  if (scores.empty()) throw Error(ErrorCode::kEmptySurfacedSet, "policy over an empty set");
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp((scores[i] - top) / temperature);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> policy(const ScoreVector& surfaced, const SelectionParams& theta) {
  const auto s = scores_of(surfaced);
  return policy(s, theta.temperature);
}

std::vector<double> log_policy_grad(const ScoreVector& surfaced, const SelectionParams& theta,
                                    std::size_t chosen) {
  if (chosen >= surfaced.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "chosen index outside the surfaced set");
  }
  const auto p = policy(surfaced, theta);
  const std::size_t nw = theta.feature_weights.size();
  std::vector<double> grad(theta.num_coordinates(), 0.0);
  for (std::size_t i = 0; i < surfaced.size(); ++i) {
    const double ds = ((i == chosen ? 1.0 : 0.0) - p[i]) / theta.temperature;
    for (std::size_t j = 0; j < nw; ++j) grad[j] += ds * surfaced[i].features[j];
    grad.at(nw + surfaced[i].agent) += ds;
  }
  return grad;
}

}  // namespace selgov
