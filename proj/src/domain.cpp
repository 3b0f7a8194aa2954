#include "selgov/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selgov/error.hpp"

namespace selgov {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInfeasibleConstraintSet: return "InfeasibleConstraintSet";
    case ErrorCode::kEmptyPool: return "EmptyPool";
    case ErrorCode::kNonExposedAgent: return "NonExposedAgent";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kAllCandidatesBlocked: return "AllCandidatesBlocked";
    case ErrorCode::kEmptySurfacedSet: return "EmptySurfacedSet";
    case ErrorCode::kUndefinedGsi: return "UndefinedGSI";
    case ErrorCode::kOutOfOrderRecord: return "OutOfOrderRecord";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

namespace {

void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

bool unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kFraudDetection: return "fraud_detection";
    case Scenario::kPaymentsMonitoring: return "payments_monitoring";
    case Scenario::kQbrAnalysis: return "qbr_analysis";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : kAllScenarios) {
    if (scenario_name(s) == name) return s;
  }
  if (name == "fraud") return Scenario::kFraudDetection;
  if (name == "payments") return Scenario::kPaymentsMonitoring;
  if (name == "qbr") return Scenario::kQbrAnalysis;
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + std::string(name) + "'");
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::kStatic: return "static";
    case Mode::kScalarTopK: return "scalar_topk";
    case Mode::kUnconstrainedRl: return "unconstrained_rl";
    case Mode::kIncentivized: return "incentivized";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + std::string(name) + "'");
}

AgentProfile::AgentProfile(std::string id, double risk_profile, double stability_score,
                           double latency_ms, double auditability_score,
                           std::vector<std::string> compliance_tags)
    : id_(std::move(id)),
      risk_profile_(risk_profile),
      stability_score_(stability_score),
      latency_ms_(latency_ms),
      auditability_score_(auditability_score),
      compliance_tags_(std::move(compliance_tags)) {
  require(!id_.empty(), ErrorCode::kInvalidArgument, "agent id must be non-empty");
  require(unit_interval(risk_profile_), ErrorCode::kInvalidArgument,
          "agent '" + id_ + "': risk_profile must lie in [0,1]");
  require(unit_interval(stability_score_), ErrorCode::kInvalidArgument,
          "agent '" + id_ + "': stability_score must lie in [0,1]");
  require(std::isfinite(latency_ms_) && latency_ms_ > 0.0, ErrorCode::kInvalidArgument,
          "agent '" + id_ + "': latency must be > 0");
  require(unit_interval(auditability_score_), ErrorCode::kInvalidArgument,
          "agent '" + id_ + "': auditability_score must lie in [0,1]");
  std::sort(compliance_tags_.begin(), compliance_tags_.end());
  compliance_tags_.erase(std::unique(compliance_tags_.begin(), compliance_tags_.end()),
                         compliance_tags_.end());
}

bool AgentProfile::has_tag(std::string_view tag) const {
  return std::binary_search(compliance_tags_.begin(), compliance_tags_.end(), tag);
}

std::array<double, kScalarFeatures> AgentProfile::scalar_features() const noexcept {
  return {risk_profile_, stability_score_, responsiveness(), auditability_score_};
}

std::vector<AgentProfile> make_roster(std::vector<AgentProfile> agents) {
  std::sort(agents.begin(), agents.end(),
            [](const AgentProfile& a, const AgentProfile& b) { return a.id() < b.id(); });
  for (std::size_t i = 1; i < agents.size(); ++i) {
    require(agents[i - 1].id() != agents[i].id(), ErrorCode::kInvalidArgument,
            "duplicate agent id '" + agents[i].id() + "'");
  }
  return agents;
}

std::vector<std::string> TaskContext::tokens() const {
  std::vector<std::string> out;
  out.reserve(keywords.size() + 2);
  out.emplace_back(scenario_name(scenario));
  out.push_back("variant-" + std::to_string(variant));
  out.insert(out.end(), keywords.begin(), keywords.end());
  return out;
}

void validate_context(const TaskContext& ctx) {
  require(ctx.variant >= 0 && ctx.variant < kVariantsPerScenario, ErrorCode::kInvalidArgument,
          "variant must lie in [0,5)");
  require(std::all_of(ctx.requirement_vector.begin(), ctx.requirement_vector.end(),
                      [](double x) { return std::isfinite(x); }),
          ErrorCode::kInvalidArgument, "requirement_vector must be finite");
}

std::vector<double> SelectionParams::coordinates() const {
  std::vector<double> out(feature_weights);
  out.insert(out.end(), agent_bias.begin(), agent_bias.end());
  return out;
}

void SelectionParams::set_coordinates(std::span<const double> coords) {
  require(coords.size() == num_coordinates(), ErrorCode::kInvalidArgument,
          "coordinate vector has wrong length");
  std::copy_n(coords.begin(), feature_weights.size(), feature_weights.begin());
  std::copy(coords.begin() + static_cast<std::ptrdiff_t>(feature_weights.size()), coords.end(),
            agent_bias.begin());
}

SelectionParams make_selection_params(std::size_t num_agents,
                                      std::array<double, kScalarFeatures> weights,
                                      double temperature) {
  require(std::isfinite(temperature) && temperature > 0.0, ErrorCode::kInvalidArgument,
          "temperature must be > 0");
  SelectionParams p;
  p.feature_weights.assign(weights.begin(), weights.end());
  p.agent_bias.assign(num_agents, 0.0);
  p.temperature = temperature;
  return p;
}

Bounds ConstraintSpec::theta_bounds(std::size_t coordinate) const {
  if (coordinate < theta_box.size()) return theta_box[coordinate];
  return default_theta_bounds;
}

ValidatedConstraintSpec validate_constraint_spec(const ConstraintSpec& spec,
                                                 std::size_t max_surfaced) {
  require(max_surfaced >= 1, ErrorCode::kInvalidArgument, "max_surfaced must be >= 1");
  require(spec.p_min > 0.0 && spec.p_min < 1.0, ErrorCode::kInvalidArgument,
          "p_min must lie in (0,1)");
  require(spec.gamma <= 1.0 && std::isfinite(spec.gamma), ErrorCode::kInvalidArgument,
          "gamma must be <= 1");
  require(std::isfinite(spec.sigma_max) && spec.sigma_max > 0.0, ErrorCode::kInvalidArgument,
          "sigma_max must be > 0");
  require(spec.k_min >= 0, ErrorCode::kInvalidArgument, "k_min must be >= 0");
  require(spec.d_min >= 1, ErrorCode::kInvalidArgument, "d_min must be >= 1");
  auto check_box = [](Bounds b) {
    require(b.lo <= 0.0 && 0.0 <= b.hi, ErrorCode::kInvalidArgument,
            "theta bounds must contain 0 (the uniform-policy anchor)");
  };
  check_box(spec.default_theta_bounds);
  for (Bounds b : spec.theta_box) check_box(b);

  for (std::size_t size = 2; size <= max_surfaced; ++size) {
    const double n = static_cast<double>(size);
    if (spec.p_min * n > 1.0) {
      std::ostringstream msg;
      msg << "p_min*size = " << spec.p_min * n << " > 1 for surfaced size " << size;
      throw Error(ErrorCode::kInfeasibleConstraintSet, msg.str());
    }
    if (spec.gamma * n < 1.0) {
      std::ostringstream msg;
      msg << "gamma = " << spec.gamma << " < 1/" << size << " for surfaced size " << size;
      throw Error(ErrorCode::kInfeasibleConstraintSet, msg.str());
    }
  }
  require(spec.gamma > spec.p_min, ErrorCode::kInfeasibleConstraintSet, "gamma must exceed p_min");
  return ValidatedConstraintSpec(spec, max_surfaced);
}

std::string_view fail_loud_name(FailLoudAction a) {
  switch (a) {
    case FailLoudAction::kNone: return "NONE";
    case FailLoudAction::kAlert: return "ALERT";
    case FailLoudAction::kThrottle: return "THROTTLE";
    case FailLoudAction::kBlock: return "BLOCK";
  }
  return "NONE";
}

FailLoudAction parse_fail_loud(std::string_view name) {
  for (auto a : {FailLoudAction::kNone, FailLoudAction::kAlert, FailLoudAction::kThrottle,
                 FailLoudAction::kBlock}) {
    if (fail_loud_name(a) == name) return a;
  }
  throw Error(ErrorCode::kParseError, "unknown fail-loud action '" + std::string(name) + "'");
}

void validate_record(const AuditRecord& rec) {
  require(rec.clip_events.empty() == (rec.fail_loud_action == FailLoudAction::kNone),
          ErrorCode::kInvalidArgument, "clip events present iff a fail-loud action was taken");
  auto contains = [](const std::vector<std::size_t>& set, std::size_t x) {
    return std::find(set.begin(), set.end(), x) != set.end();
  };
  for (std::size_t a : rec.surfaced) {
    require(contains(rec.candidate_pool, a), ErrorCode::kInvalidArgument,
            "surfaced agent outside the candidate pool");
  }
  if (rec.chosen) {
    require(contains(rec.surfaced, *rec.chosen), ErrorCode::kInvalidArgument,
            "chosen agent outside the surfaced set");
  }
}

}  // namespace selgov
