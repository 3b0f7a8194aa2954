#pragma once

// Concentration, stability and governance-debt metrics, plus the
// append-only audit log they are recomputed from.

#include <optional>
#include <span>
#include <vector>

#include "selgov/domain.hpp"

namespace selgov {

// P_t(A_i): mean over variants of the surfaced-set policy; agents missing from
// a variant's surfaced set contribute 0 there. Requires one entry per variant.
std::vector<double> inclusion_probabilities(std::span<const VariantPolicy> snapshot,
                                            std::size_t num_agents,
                                            int num_variants = kVariantsPerScenario);

// SC_t = max_i P_t(A_i).
double selection_concentration(std::span<const VariantPolicy> snapshot, std::size_t num_agents,
                               int num_variants = kVariantsPerScenario);

double rsc(double sc_0, double sc_T);

double population_variance(std::span<const double> xs);
double mean(std::span<const double> xs);

inline constexpr double kGsiVarianceFloor = 1e-15;

// 1 - var_sc / var_unconstrained; throws UndefinedGSI when the reference
// variance is below kGsiVarianceFloor.
double gsi(double var_sc, double var_unconstrained);
std::optional<double> gsi_or_undefined(double var_sc, double var_unconstrained);

// Cumulative share of the most selected agent over the history; blocked
// steps (nullopt) count toward t but select nobody.
double top_agent_share(std::span<const std::optional<std::size_t>> history);
std::vector<double> top_agent_share_series(std::span<const std::optional<std::size_t>> history);

// First step (1-based) after which the cumulative top-agent share stays at or
// above `level` through the end of the history; history.size() + 1 if never.
std::size_t steps_to_share(std::span<const double> share_series, double level);

class AuditLog {
 public:
  // Throws OutOfOrderRecord unless record.step == size().
  void append(AuditRecord record);

  const std::vector<AuditRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const AuditRecord& operator[](std::size_t i) const { return records_.at(i); }

 private:
  std::vector<AuditRecord> records_;
};

// Fraction of logged steps with a fail-loud action.
double governance_debt(const AuditLog& log);

std::vector<std::optional<std::size_t>> selection_history(const AuditLog& log);

}  // namespace selgov
