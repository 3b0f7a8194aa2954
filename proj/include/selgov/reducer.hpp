#pragma once

// Governed reduction: hard constraints -> variance clamp -> Pareto frontier
// -> diversity bucketing -> exploration quota. Surfacing is deterministic
// given its inputs; all sampling happens in the selection step.

#include <span>
#include <string_view>
#include <vector>

#include "selgov/cefl.hpp"
#include "selgov/domain.hpp"
#include "selgov/scoring.hpp"

namespace selgov {

// Drops pool members lacking the required compliance tag.
// Throws AllCandidatesBlocked if nothing survives.
std::vector<std::size_t> apply_hard_constraints(const CandidatePool& pool,
                                                std::span<const AgentProfile> roster,
                                                std::string_view required_tag);

// Rescales deviations about the mean by sigma/std when the population std
// exceeds sigma. The mean is preserved.
std::vector<double> variance_clamp(std::span<const double> scores, double sigma);

double population_std(std::span<const double> xs);

struct Objectives {
  double utility = 0.0;    // maximise
  double stability = 0.0;  // maximise
  double risk = 0.0;       // minimise
};

bool dominates(const Objectives& a, const Objectives& b);

// Positions of the non-dominated candidates, ascending.
std::vector<std::size_t> pareto_filter(std::span<const Objectives> candidates);

enum class RiskTier { kLow = 0, kMid = 1, kHigh = 2 };
RiskTier risk_tier(double risk_profile);

struct SurfaceResult {
  std::vector<std::size_t> positions;  // into the filtered ScoreVector, ascending
  std::vector<ClipEvent> clip_events;  // diversity degradation alerts
};

// `filtered` holds raw scores and features for the hard-constraint survivors
// in id order; `clamped` are the variance-clamped scores aligned with it.
SurfaceResult surface(const ScoreVector& filtered, std::span<const double> clamped,
                      const ReducerParams& phi);

// Scalar top-k baseline: the single highest raw score, ties to the lowest id.
std::size_t scalar_topk_surface(const ScoreVector& filtered);

ScoreVector select_positions(const ScoreVector& candidates, std::span<const std::size_t> positions);

}  // namespace selgov
