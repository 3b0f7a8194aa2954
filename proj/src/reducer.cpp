#include "selgov/reducer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "selgov/error.hpp"

namespace selgov {

std::vector<std::size_t> apply_hard_constraints(const CandidatePool& pool,
                                                std::span<const AgentProfile> roster,
                                                std::string_view required_tag) {
  std::vector<std::size_t> out;
  for (std::size_t m : pool.members) {
    if (roster[m].has_tag(required_tag)) out.push_back(m);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kAllCandidatesBlocked,
                "no pooled agent carries required tag '" + std::string(required_tag) + "'");
  }
  return out;
}

double population_std(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

std::vector<double> variance_clamp(std::span<const double> scores, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "variance clamp sigma must be > 0");
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "variance clamp of an empty set");
  std::vector<double> out(scores.begin(), scores.end());
  const double sd = population_std(scores);
  if (sd <= sigma) return out;
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  const double factor = sigma / sd;
  for (double& s : out) s = mean + (s - mean) * factor;
  return out;
}

bool dominates(const Objectives& a, const Objectives& b) {
  const bool weakly = a.utility >= b.utility && a.stability >= b.stability && a.risk <= b.risk;
  const bool strictly = a.utility > b.utility || a.stability > b.stability || a.risk < b.risk;
  return weakly && strictly;
}

std::vector<std::size_t> pareto_filter(std::span<const Objectives> candidates) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
      dominated = j != i && dominates(candidates[j], candidates[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

RiskTier risk_tier(double risk_profile) {
  if (risk_profile < 1.0 / 3.0) return RiskTier::kLow;
  if (risk_profile < 2.0 / 3.0) return RiskTier::kMid;
  return RiskTier::kHigh;
}

namespace {

Objectives objectives_of(const ScoredCandidate& c) {
  // features: utility_match, safety (= 1 - risk), stability, auditability
  return {c.features[0], c.features[2], 1.0 - c.features[1]};
}

RiskTier tier_of(const ScoredCandidate& c) { return risk_tier(1.0 - c.features[1]); }

// Best remaining position by clamped score (ties to the lower position),
// restricted by `admit`. Returns size() when nothing qualifies.
template <typename Pred>
std::size_t best_remaining(std::span<const double> clamped, const std::vector<bool>& taken,
                           Pred admit) {
  std::size_t best = clamped.size();
  for (std::size_t i = 0; i < clamped.size(); ++i) {
    if (taken[i] || !admit(i)) continue;
    if (best == clamped.size() || clamped[i] > clamped[best]) best = i;
  }
  return best;
}

}  // namespace

SurfaceResult surface(const ScoreVector& filtered, std::span<const double> clamped,
                      const ReducerParams& phi) {
  if (filtered.empty()) throw Error(ErrorCode::kEmptySurfacedSet, "nothing to surface");
  if (clamped.size() != filtered.size()) {
    throw Error(ErrorCode::kInvalidArgument, "clamped scores misaligned with candidates");
  }
  const std::size_t n = filtered.size();
  SurfaceResult result;

  // threshold, falling back to the top-1 if it would empty the set
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (clamped[i] >= phi.score_threshold) kept.push_back(i);
  }
  if (kept.empty()) {
    kept.push_back(static_cast<std::size_t>(
        std::distance(clamped.begin(), std::max_element(clamped.begin(), clamped.end()))));
  }

  std::vector<Objectives> objs;
  objs.reserve(kept.size());
  for (std::size_t i : kept) objs.push_back(objectives_of(filtered[i]));
  std::vector<bool> taken(n, false);
  for (std::size_t f : pareto_filter(objs)) taken[kept[f]] = true;

  // diversity buckets
  std::array<bool, 3> present{};
  for (const auto& c : filtered) present[static_cast<int>(tier_of(c))] = true;
  const int available = static_cast<int>(std::count(present.begin(), present.end(), true));
  const int required = std::min(phi.diversity_buckets, available);
  if (phi.diversity_buckets > available) {
    result.clip_events.push_back({"diversity_buckets", static_cast<double>(phi.diversity_buckets),
                                  static_cast<double>(available), "diversity_requirement"});
  }
  auto covered = [&] {
    std::array<bool, 3> cov{};
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) cov[static_cast<int>(tier_of(filtered[i]))] = true;
    }
    return cov;
  };
  for (auto cov = covered(); std::count(cov.begin(), cov.end(), true) < required; cov = covered()) {
    const std::size_t pick = best_remaining(clamped, taken, [&](std::size_t i) {
      return !cov[static_cast<int>(tier_of(filtered[i]))];
    });
    if (pick == n) break;
    taken[pick] = true;
  }

  // exploration quota
  const auto target = std::min<std::size_t>(static_cast<std::size_t>(std::max(phi.exploration_quota, 0)), n);
  auto count_taken = [&] { return static_cast<std::size_t>(std::count(taken.begin(), taken.end(), true)); };
  while (count_taken() < target) {
    const std::size_t pick = best_remaining(clamped, taken, [](std::size_t) { return true; });
    if (pick == n) break;
    taken[pick] = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (taken[i]) result.positions.push_back(i);
  }
  if (result.positions.empty()) throw Error(ErrorCode::kEmptySurfacedSet, "reducer surfaced nothing");
  return result;
}

std::size_t scalar_topk_surface(const ScoreVector& filtered) {
  if (filtered.empty()) throw Error(ErrorCode::kEmptySurfacedSet, "nothing to surface");
  std::size_t best = 0;
  for (std::size_t i = 1; i < filtered.size(); ++i) {
    const bool better = filtered[i].score > filtered[best].score ||
                        (filtered[i].score == filtered[best].score && filtered[i].agent < filtered[best].agent);
    if (better) best = i;
  }
  return best;
}

ScoreVector select_positions(const ScoreVector& candidates, std::span<const std::size_t> positions) {
  ScoreVector out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(candidates.at(p));
  return out;
}

}  // namespace selgov
