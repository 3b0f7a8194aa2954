#pragma once

// Value types shared by every stage of the governed selection loop.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selgov {

inline constexpr std::size_t kScalarFeatures = 4;
inline constexpr std::size_t kEmbeddingDim = 16;
inline constexpr int kVariantsPerScenario = 5;

enum class Scenario { kFraudDetection, kPaymentsMonitoring, kQbrAnalysis };

inline constexpr std::array<Scenario, 3> kAllScenarios = {
    Scenario::kFraudDetection, Scenario::kPaymentsMonitoring, Scenario::kQbrAnalysis};

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

// Governance architecture under which a run executes.
enum class Mode { kStatic, kScalarTopK, kUnconstrainedRl, kIncentivized };

inline constexpr std::array<Mode, 4> kAllModes = {Mode::kStatic, Mode::kScalarTopK,
                                                  Mode::kUnconstrainedRl, Mode::kIncentivized};

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

// A candidate agent. Feature ranges are checked on construction; the tag set
// is stored sorted and de-duplicated.
class AgentProfile {
 public:
  AgentProfile(std::string id, double risk_profile, double stability_score, double latency_ms,
               double auditability_score, std::vector<std::string> compliance_tags);

  const std::string& id() const noexcept { return id_; }
  double risk_profile() const noexcept { return risk_profile_; }
  double stability_score() const noexcept { return stability_score_; }
  double latency_ms() const noexcept { return latency_ms_; }
  double auditability_score() const noexcept { return auditability_score_; }
  const std::vector<std::string>& compliance_tags() const noexcept { return compliance_tags_; }

  bool has_tag(std::string_view tag) const;

  // Latency mapped into (0, 1]; 100 ms maps to 0.5.
  double responsiveness() const noexcept { return 100.0 / (100.0 + latency_ms_); }

  // (risk, stability, responsiveness, auditability), the scalar block of the embedding.
  std::array<double, kScalarFeatures> scalar_features() const noexcept;

 private:
  std::string id_;
  double risk_profile_;
  double stability_score_;
  double latency_ms_;
  double auditability_score_;
  std::vector<std::string> compliance_tags_;
};

// Sorts agents by id and rejects duplicates. Roster index order equals id
// order afterwards, which is what every tie-break in the library relies on.
std::vector<AgentProfile> make_roster(std::vector<AgentProfile> agents);

struct TaskContext {
  Scenario scenario = Scenario::kFraudDetection;
  int variant = 0;
  std::vector<double> requirement_vector;
  std::vector<std::string> keywords;
  std::size_t step_index = 0;

  // Tokens fed to the candidate generator: scenario name, "variant-<k>", keywords.
  std::vector<std::string> tokens() const;
};

void validate_context(const TaskContext& ctx);

// Names of the four scoring sub-features, in weight order.
inline constexpr std::array<std::string_view, kScalarFeatures> kFeatureNames = {
    "utility_match", "safety", "stability", "auditability"};

// Learnable selection parameters. Only feature_weights and agent_bias are
// learned; temperature is a fixed governance hyperparameter.
struct SelectionParams {
  std::vector<double> feature_weights;  // kScalarFeatures entries
  std::vector<double> agent_bias;       // one per roster agent
  double temperature = 1.0;

  std::size_t num_coordinates() const { return feature_weights.size() + agent_bias.size(); }
  std::vector<double> coordinates() const;
  void set_coordinates(std::span<const double> coords);
  bool operator==(const SelectionParams&) const = default;
};

SelectionParams make_selection_params(std::size_t num_agents, std::array<double, kScalarFeatures> weights,
                                      double temperature);

struct ReducerParams {
  double score_threshold = 0.0;    // tau
  double variance_clamp = 0.15;    // sigma
  int exploration_quota = 3;       // k
  int diversity_buckets = 2;       // d
  double exploration_coeff = 0.1;  // epsilon
  bool operator==(const ReducerParams&) const = default;
};

struct Bounds {
  double lo;
  double hi;
};

struct ConstraintSpec {
  double p_min = 0.1;
  double gamma = 0.95;
  double sigma_max = 0.18;
  int k_min = 2;
  int d_min = 2;
  Bounds default_theta_bounds{-10.0, 10.0};
  // Optional per-coordinate overrides; empty means default_theta_bounds everywhere.
  std::vector<Bounds> theta_box;

  Bounds theta_bounds(std::size_t coordinate) const;
};

// A ConstraintSpec that has passed validation. Only validate_constraint_spec
// can produce one, and the wrapped spec is immutable from then on.
class ValidatedConstraintSpec {
 public:
  const ConstraintSpec& get() const noexcept { return spec_; }
  const ConstraintSpec* operator->() const noexcept { return &spec_; }
  std::size_t max_surfaced() const noexcept { return max_surfaced_; }

 private:
  friend ValidatedConstraintSpec validate_constraint_spec(const ConstraintSpec&, std::size_t);
  ValidatedConstraintSpec(ConstraintSpec spec, std::size_t max_surfaced)
      : spec_(std::move(spec)), max_surfaced_(max_surfaced) {}

  ConstraintSpec spec_;
  std::size_t max_surfaced_;
};

// Succeeds iff the capped simplex {p : sum p = 1, p_min <= p_i <= gamma} is
// non-empty for every surfaced-set size in 2..max_surfaced. A singleton set
// has exactly one policy (probability 1) and is exempt from the cap.
ValidatedConstraintSpec validate_constraint_spec(const ConstraintSpec& spec, std::size_t max_surfaced);

struct ClipEvent {
  std::string parameter;
  double raw_value = 0.0;
  double projected_value = 0.0;
  std::string constraint;
  bool operator==(const ClipEvent&) const = default;
};

enum class FailLoudAction { kNone, kAlert, kThrottle, kBlock };

std::string_view fail_loud_name(FailLoudAction a);
FailLoudAction parse_fail_loud(std::string_view name);

// Policy over one variant's surfaced set, used for concentration snapshots.
struct VariantPolicy {
  int variant = 0;
  std::vector<std::size_t> agents;  // roster indices
  std::vector<double> probabilities;
  bool operator==(const VariantPolicy&) const = default;
};

struct AuditRecord {
  std::size_t step = 0;  // 0-based position in the log; iteration t = step + 1
  TaskContext context;
  std::vector<std::size_t> candidate_pool;  // C_t, roster indices
  std::vector<double> scores;               // s_{i,t} for every member of C_t
  std::vector<std::size_t> filtered_pool;   // after hard constraints
  std::vector<std::size_t> surfaced;        // S_t
  std::vector<double> policy;               // sampling policy over S_t
  std::vector<double> post_update_policy;   // updated parameters evaluated on S_t
  std::optional<std::size_t> chosen;        // empty when the step was blocked
  std::string output;
  int reward = 0;  // +1 / -1, 0 on blocked steps
  SelectionParams theta_after;
  ReducerParams phi_after;
  std::vector<ClipEvent> clip_events;
  FailLoudAction fail_loud_action = FailLoudAction::kNone;
  double lr_scale = 1.0;
  std::vector<VariantPolicy> policy_snapshot;  // post-update, one entry per variant
};

// Checks the record-level invariants: clip events iff a fail-loud action,
// surfaced set inside the pool, chosen agent inside the surfaced set.
void validate_record(const AuditRecord& rec);

}  // namespace selgov
