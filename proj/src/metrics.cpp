#include "selgov/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "selgov/error.hpp"

namespace selgov {

std::vector<double> inclusion_probabilities(std::span<const VariantPolicy> snapshot,
                                            std::size_t num_agents, int num_variants) {
  std::set<int> variants;
  for (const auto& vp : snapshot) variants.insert(vp.variant);
  if (static_cast<int>(variants.size()) != num_variants || snapshot.size() != variants.size()) {
    throw Error(ErrorCode::kInvalidArgument, "snapshot must hold exactly one policy per variant");
  }
  std::vector<double> p(num_agents, 0.0);
  for (const auto& vp : snapshot) {
    if (vp.agents.size() != vp.probabilities.size()) {
      throw Error(ErrorCode::kInvalidArgument, "variant policy agents/probabilities mismatch");
    }
    for (std::size_t i = 0; i < vp.agents.size(); ++i) p.at(vp.agents[i]) += vp.probabilities[i];
  }
  for (double& x : p) x /= static_cast<double>(num_variants);
  return p;
}

double selection_concentration(std::span<const VariantPolicy> snapshot, std::size_t num_agents,
                               int num_variants) {
  const auto p = inclusion_probabilities(snapshot, num_agents, num_variants);
  return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

double rsc(double sc_0, double sc_T) { return sc_T - sc_0; }

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size());
}

std::optional<double> gsi_or_undefined(double var_sc, double var_unconstrained) {
  if (var_unconstrained < kGsiVarianceFloor) return std::nullopt;
  return 1.0 - var_sc / var_unconstrained;
}

double gsi(double var_sc, double var_unconstrained) {
  auto g = gsi_or_undefined(var_sc, var_unconstrained);
  if (!g) throw Error(ErrorCode::kUndefinedGsi, "unconstrained reference variance is zero");
  return *g;
}

std::vector<double> top_agent_share_series(std::span<const std::optional<std::size_t>> history) {
  std::vector<double> out;
  out.reserve(history.size());
  std::vector<std::size_t> counts;
  std::size_t best = 0;
  for (std::size_t t = 0; t < history.size(); ++t) {
    if (const auto& a = history[t]) {
      if (*a >= counts.size()) counts.resize(*a + 1, 0);
      best = std::max(best, ++counts[*a]);
    }
    out.push_back(static_cast<double>(best) / static_cast<double>(t + 1));
  }
  return out;
}

double top_agent_share(std::span<const std::optional<std::size_t>> history) {
  if (history.empty()) throw Error(ErrorCode::kInvalidArgument, "no selections recorded");
  return top_agent_share_series(history).back();
}

std::size_t steps_to_share(std::span<const double> share_series, double level) {
  std::size_t first = share_series.size() + 1;
  for (std::size_t i = share_series.size(); i-- > 0;) {
    if (share_series[i] < level) break;
    first = i + 1;
  }
  return first;
}

void AuditLog::append(AuditRecord record) {
  if (record.step != records_.size()) {
    throw Error(ErrorCode::kOutOfOrderRecord, "record step " + std::to_string(record.step) +
                                                  " appended at position " + std::to_string(records_.size()));
  }
  records_.push_back(std::move(record));
}

double governance_debt(const AuditLog& log) {
  if (log.empty()) throw Error(ErrorCode::kInvalidArgument, "governance debt of an empty log");
  const auto flagged = std::count_if(log.records().begin(), log.records().end(), [](const AuditRecord& r) {
    return r.fail_loud_action != FailLoudAction::kNone;
  });
  return static_cast<double>(flagged) / static_cast<double>(log.size());
}

std::vector<std::optional<std::size_t>> selection_history(const AuditLog& log) {
  std::vector<std::optional<std::size_t>> h;
  h.reserve(log.size());
  for (const auto& r : log.records()) h.push_back(r.chosen);
  return h;
}

}  // namespace selgov
