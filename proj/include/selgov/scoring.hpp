#pragma once

// Linear scoring f_theta and the tempered softmax selection policy.

#include <array>
#include <span>
#include <vector>

#include "selgov/domain.hpp"

namespace selgov {

using FeatureRow = std::array<double, kScalarFeatures>;

struct ScoredCandidate {
  std::size_t agent = 0;  // roster index
  FeatureRow features{};  // utility_match, safety, stability, auditability
  double score = 0.0;
};

using ScoreVector = std::vector<ScoredCandidate>;

// utility_match = cosine(agent embedding, requirement), safety = 1 - risk.
FeatureRow score_features(const AgentProfile& agent, std::span<const double> agent_embedding,
                          const TaskContext& ctx);

double score(const FeatureRow& features, std::size_t agent, const SelectionParams& theta);

ScoredCandidate score_agent(const AgentProfile& agent, std::size_t agent_index,
                            std::span<const double> agent_embedding, const TaskContext& ctx,
                            const SelectionParams& theta);

// Re-scores an existing vector under different parameters (features are reused).
ScoreVector rescore(const ScoreVector& candidates, const SelectionParams& theta);

std::vector<double> scores_of(const ScoreVector& candidates);

// Softmax of scores / temperature with max-subtraction.
std::vector<double> policy(std::span<const double> scores, double temperature);
std::vector<double> policy(const ScoreVector& surfaced, const SelectionParams& theta);

// Exact gradient of log p_chosen with respect to SelectionParams::coordinates():
// d log p_k / d s_i = (1[i=k] - p_i) / temperature, then the linear form.
std::vector<double> log_policy_grad(const ScoreVector& surfaced, const SelectionParams& theta,
                                    std::size_t chosen);

}  // namespace selgov
