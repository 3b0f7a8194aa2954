#include "selgov/serialize.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "selgov/error.hpp"

namespace selgov {

using nlohmann::json;

namespace {

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "': " + e.what());
  }
}

std::size_t resolve(const std::string& id, const std::map<std::string, std::size_t>& index) {
  auto it = index.find(id);
  if (it == index.end()) throw Error(ErrorCode::kParseError, "unknown agent id '" + id + "'");
  return it->second;
}

std::map<std::string, std::size_t> id_index(const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], i);
  return m;
}

std::vector<std::string> ids_of(const std::vector<std::size_t>& agents, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  out.reserve(agents.size());
  for (std::size_t a : agents) out.push_back(ids.at(a));
  return out;
}

std::vector<std::size_t> indices_of(const json& j, const std::map<std::string, std::size_t>& index) {
  std::vector<std::size_t> out;
  for (const auto& id : j) out.push_back(resolve(id.get<std::string>(), index));
  return out;
}

json to_json(const VariantPolicy& vp, const std::vector<std::string>& ids) {
  return {{"variant", vp.variant}, {"agents", ids_of(vp.agents, ids)}, {"probabilities", vp.probabilities}};
}

VariantPolicy variant_policy_from_json(const json& j, const std::map<std::string, std::size_t>& index) {
  VariantPolicy vp;
  vp.variant = get<int>(j, "variant");
  vp.agents = indices_of(get<json>(j, "agents"), index);
  vp.probabilities = get<std::vector<double>>(j, "probabilities");
  return vp;
}

json snapshot_json(const std::vector<VariantPolicy>& snap, const std::vector<std::string>& ids) {
  json out = json::array();
  for (const auto& vp : snap) out.push_back(to_json(vp, ids));
  return out;
}

std::vector<VariantPolicy> snapshot_from_json(const json& j, const std::map<std::string, std::size_t>& index) {
  std::vector<VariantPolicy> out;
  for (const auto& vp : j) out.push_back(variant_policy_from_json(vp, index));
  return out;
}

json clip_events_json(const std::vector<ClipEvent>& events) {
  json out = json::array();
  for (const auto& e : events) out.push_back(to_json(e));
  return out;
}

std::vector<ClipEvent> clip_events_from_json(const json& j) {
  std::vector<ClipEvent> out;
  for (const auto& e : j) out.push_back(clip_event_from_json(e));
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const SelectionParams& theta) {
  return {{"feature_weights", theta.feature_weights},
          {"agent_bias", theta.agent_bias},
          {"temperature", theta.temperature}};
}

SelectionParams selection_params_from_json(const json& j) {
  SelectionParams p;
  p.feature_weights = get<std::vector<double>>(j, "feature_weights");
  p.agent_bias = get<std::vector<double>>(j, "agent_bias");
  p.temperature = get<double>(j, "temperature");
  return p;
}

json to_json(const ReducerParams& phi) {
  return {{"score_threshold", phi.score_threshold},
          {"variance_clamp", phi.variance_clamp},
          {"exploration_quota", phi.exploration_quota},
          {"diversity_buckets", phi.diversity_buckets},
          {"exploration_coeff", phi.exploration_coeff}};
}

ReducerParams reducer_params_from_json(const json& j) {
  ReducerParams p;
  p.score_threshold = get<double>(j, "score_threshold");
  p.variance_clamp = get<double>(j, "variance_clamp");
  p.exploration_quota = get<int>(j, "exploration_quota");
  p.diversity_buckets = get<int>(j, "diversity_buckets");
  p.exploration_coeff = get<double>(j, "exploration_coeff");
  return p;
}

json to_json(const ClipEvent& e) {
  return {{"parameter", e.parameter},
          {"raw_value", e.raw_value},
          {"projected_value", e.projected_value},
          {"constraint", e.constraint}};
}

ClipEvent clip_event_from_json(const json& j) {
  return {get<std::string>(j, "parameter"), get<double>(j, "raw_value"), get<double>(j, "projected_value"),
          get<std::string>(j, "constraint")};
}

json to_json(const RunConfig& cfg) {
  json box = json::array();
  for (const auto& b : cfg.constraints.theta_box) box.push_back({b.lo, b.hi});
  return {{"scenario", scenario_name(cfg.scenario)},
          {"mode", mode_name(cfg.mode)},
          {"lr_alpha", cfg.lr_alpha},
          {"lr_beta", cfg.lr_beta},
          {"horizon", cfg.horizon},
          {"seed", cfg.seed},
          {"p_min", cfg.constraints.p_min},
          {"gamma", cfg.constraints.gamma},
          {"sigma_max", cfg.constraints.sigma_max},
          {"k_min", cfg.constraints.k_min},
          {"d_min", cfg.constraints.d_min},
          {"theta_bounds", {cfg.constraints.default_theta_bounds.lo, cfg.constraints.default_theta_bounds.hi}},
          {"theta_box", box},
          {"overshoot", cfg.cefl.overshoot},
          {"pool_size", cfg.cefl.pool_size},
          {"embed_dim", cfg.cefl.embed_dim},
          {"hash_seed", cfg.cefl.hash_seed},
          {"initial_weights", cfg.initial_weights},
          {"temperature", cfg.temperature},
          {"initial_phi", to_json(cfg.initial_phi)},
          {"throttle",
           {{"window", cfg.throttle.window},
            {"threshold", cfg.throttle.threshold},
            {"duration", cfg.throttle.duration},
            {"factor", cfg.throttle.factor}}},
          {"out_dir", cfg.out_dir}};
}

RunConfig run_config_from_json(const json& j, RunConfig cfg) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "run config must be a JSON object");
  static const std::set<std::string> known = {
      "scenario",  "mode",      "lr_alpha",     "lr_beta",   "lr",        "horizon",   "seed",
      "p_min",     "gamma",     "sigma_max",    "k_min",     "d_min",     "theta_bounds", "theta_box",
      "overshoot", "pool_size", "embed_dim",    "hash_seed", "initial_weights", "temperature",
      "initial_phi", "throttle", "out_dir"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::kParseError, "unknown config key '" + key + "'");
  }
  if (j.contains("scenario")) cfg.scenario = parse_scenario(get<std::string>(j, "scenario"));
  if (j.contains("mode")) cfg.mode = parse_mode(get<std::string>(j, "mode"));
  if (j.contains("lr")) cfg.lr_alpha = cfg.lr_beta = get<double>(j, "lr");
  if (j.contains("lr_alpha")) cfg.lr_alpha = get<double>(j, "lr_alpha");
  if (j.contains("lr_beta")) cfg.lr_beta = get<double>(j, "lr_beta");
  if (j.contains("horizon")) cfg.horizon = get<std::size_t>(j, "horizon");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("p_min")) cfg.constraints.p_min = get<double>(j, "p_min");
  if (j.contains("gamma")) cfg.constraints.gamma = get<double>(j, "gamma");
  if (j.contains("sigma_max")) cfg.constraints.sigma_max = get<double>(j, "sigma_max");
  if (j.contains("k_min")) cfg.constraints.k_min = get<int>(j, "k_min");
  if (j.contains("d_min")) cfg.constraints.d_min = get<int>(j, "d_min");
  if (j.contains("theta_bounds")) {
    const auto b = get<std::array<double, 2>>(j, "theta_bounds");
    cfg.constraints.default_theta_bounds = {b[0], b[1]};
  }
  if (j.contains("theta_box")) {
    cfg.constraints.theta_box.clear();
    for (const auto& b : get<std::vector<std::array<double, 2>>>(j, "theta_box")) {
      cfg.constraints.theta_box.push_back({b[0], b[1]});
    }
  }
  if (j.contains("overshoot")) cfg.cefl.overshoot = get<double>(j, "overshoot");
  if (j.contains("pool_size")) cfg.cefl.pool_size = get<std::size_t>(j, "pool_size");
  if (j.contains("embed_dim")) cfg.cefl.embed_dim = get<std::size_t>(j, "embed_dim");
  if (j.contains("hash_seed")) cfg.cefl.hash_seed = get<std::uint64_t>(j, "hash_seed");
  if (j.contains("initial_weights")) {
    cfg.initial_weights = get<std::array<double, kScalarFeatures>>(j, "initial_weights");
  }
  if (j.contains("temperature")) cfg.temperature = get<double>(j, "temperature");
  if (j.contains("initial_phi")) cfg.initial_phi = reducer_params_from_json(j.at("initial_phi"));
  if (j.contains("throttle")) {
    const auto& t = j.at("throttle");
    cfg.throttle.window = get<std::size_t>(t, "window");
    cfg.throttle.threshold = get<std::size_t>(t, "threshold");
    cfg.throttle.duration = get<std::size_t>(t, "duration");
    cfg.throttle.factor = get<double>(t, "factor");
  }
  if (j.contains("out_dir")) cfg.out_dir = get<std::string>(j, "out_dir");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open config file " + path.string());
  try {
    return run_config_from_json(json::parse(in), std::move(base));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

json to_json(const AuditRecord& rec, const std::vector<std::string>& ids) {
  json j;
  j["step"] = rec.step;
  j["context"] = {{"scenario", scenario_name(rec.context.scenario)},
                  {"variant", rec.context.variant},
                  {"keywords", rec.context.keywords},
                  {"requirement_vector", rec.context.requirement_vector},
                  {"step_index", rec.context.step_index}};
  j["candidate_pool"] = ids_of(rec.candidate_pool, ids);
  j["scores"] = rec.scores;
  j["filtered_pool"] = ids_of(rec.filtered_pool, ids);
  j["surfaced"] = ids_of(rec.surfaced, ids);
  j["policy"] = rec.policy;
  j["post_update_policy"] = rec.post_update_policy;
  j["chosen"] = rec.chosen ? json(ids.at(*rec.chosen)) : json(nullptr);
  j["output"] = rec.output;
  j["reward"] = rec.reward;
  j["theta_after"] = to_json(rec.theta_after);
  j["phi_after"] = to_json(rec.phi_after);
  j["clip_events"] = clip_events_json(rec.clip_events);
  j["fail_loud_action"] = fail_loud_name(rec.fail_loud_action);
  j["lr_scale"] = rec.lr_scale;
  j["policy_snapshot"] = snapshot_json(rec.policy_snapshot, ids);
  return j;
}

AuditRecord audit_record_from_json(const json& j, const std::vector<std::string>& ids) {
  const auto index = id_index(ids);
  AuditRecord rec;
  rec.step = get<std::size_t>(j, "step");
  const json& ctx = get<json>(j, "context");
  rec.context.scenario = parse_scenario(get<std::string>(ctx, "scenario"));
  rec.context.variant = get<int>(ctx, "variant");
  rec.context.keywords = get<std::vector<std::string>>(ctx, "keywords");
  rec.context.requirement_vector = get<std::vector<double>>(ctx, "requirement_vector");
  rec.context.step_index = get<std::size_t>(ctx, "step_index");
  rec.candidate_pool = indices_of(get<json>(j, "candidate_pool"), index);
  rec.scores = get<std::vector<double>>(j, "scores");
  rec.filtered_pool = indices_of(get<json>(j, "filtered_pool"), index);
  rec.surfaced = indices_of(get<json>(j, "surfaced"), index);
  rec.policy = get<std::vector<double>>(j, "policy");
  rec.post_update_policy = get<std::vector<double>>(j, "post_update_policy");
  if (!get<json>(j, "chosen").is_null()) rec.chosen = resolve(get<std::string>(j, "chosen"), index);
  rec.output = get<std::string>(j, "output");
  rec.reward = get<int>(j, "reward");
  rec.theta_after = selection_params_from_json(get<json>(j, "theta_after"));
  rec.phi_after = reducer_params_from_json(get<json>(j, "phi_after"));
  rec.clip_events = clip_events_from_json(get<json>(j, "clip_events"));
  rec.fail_loud_action = parse_fail_loud(get<std::string>(j, "fail_loud_action"));
  rec.lr_scale = get<double>(j, "lr_scale");
  rec.policy_snapshot = snapshot_from_json(get<json>(j, "policy_snapshot"), index);
  return rec;
}

json to_json(const RunHeader& h) {
  json j;
  j["record"] = "run";
  j["config"] = to_json(h.config);
  j["roster"] = h.roster_ids;
  j["theta_0"] = to_json(h.theta_0);
  j["phi_0"] = to_json(h.phi_0);
  j["initial_clip_events"] = clip_events_json(h.initial_clip_events);
  j["initial_snapshot"] = snapshot_json(h.initial_snapshot, h.roster_ids);
  j["paired_unconstrained_var_sc"] =
      h.paired_unconstrained_var_sc ? json(*h.paired_unconstrained_var_sc) : json(nullptr);
  return j;
}

RunHeader run_header_from_json(const json& j) {
  if (!j.contains("record") || j.at("record") != "run") {
    throw Error(ErrorCode::kParseError, "audit log must start with a run header");
  }
  RunHeader h;
  h.config = run_config_from_json(get<json>(j, "config"));
  h.roster_ids = get<std::vector<std::string>>(j, "roster");
  h.theta_0 = selection_params_from_json(get<json>(j, "theta_0"));
  h.phi_0 = reducer_params_from_json(get<json>(j, "phi_0"));
  h.initial_clip_events = clip_events_from_json(get<json>(j, "initial_clip_events"));
  h.initial_snapshot = snapshot_from_json(get<json>(j, "initial_snapshot"), id_index(h.roster_ids));
  if (!get<json>(j, "paired_unconstrained_var_sc").is_null()) {
    h.paired_unconstrained_var_sc = get<double>(j, "paired_unconstrained_var_sc");
  }
  return h;
}

std::string audit_log_jsonl(const RunHeader& header, const AuditLog& log) {
  std::string out = to_json(header).dump();
  out += '\n';
  for (const auto& r : log.records()) {
    out += to_json(r, header.roster_ids).dump();
    out += '\n';
  }
  return out;
}

void write_audit_log(const std::filesystem::path& path, const RunHeader& header, const AuditLog& log) {
  write_text(path, audit_log_jsonl(header, log));
}

std::pair<RunHeader, AuditLog> read_audit_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open audit log " + path.string());
  std::string line;
  std::size_t lineno = 0;
  std::optional<RunHeader> header;
  AuditLog log;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!header) {
        header = run_header_from_json(j);
      } else {
        auto rec = audit_record_from_json(j, header->roster_ids);
        validate_record(rec);
        log.append(std::move(rec));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw Error(ErrorCode::kParseError, "empty audit log " + path.string());
  return {std::move(*header), std::move(log)};
}

std::string summary_csv_header() {
  return "scenario,mode,lr,mean_reward,mean_SC,SC_0,SC_T,RSC,var_SC,GSI,GD_dynamic";
}

std::string summary_csv_row(const RunSummary& s) {
  std::string row;
  row += scenario_name(s.scenario);
  row += ',';
  row += mode_name(s.mode);
  for (double x : {s.lr, s.mean_reward, s.mean_sc, s.sc_0, s.sc_T, s.rsc, s.var_sc}) {
    row += ',';
    row += format_double(x);
  }
  row += ',';
  row += s.gsi ? format_double(*s.gsi) : "NA";
  row += ',';
  row += format_double(s.gd_dynamic);
  return row;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows) {
  std::string text = summary_csv_header() + "\n";
  for (const auto& r : rows) text += summary_csv_row(r) + "\n";
  write_text(path, text);
}

std::string trajectory_csv(const std::vector<double>& series, std::size_t first_step) {
  std::string text = "step,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    text += std::to_string(first_step + i) + "," + format_double(series[i]) + "\n";
  }
  return text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string cell_stem(Scenario scenario, Mode mode, double lr) {
  return std::string(scenario_name(scenario)) + "_" + std::string(mode_name(mode)) + "_lr" + format_double(lr);
}

void write_sweep_outputs(const std::filesystem::path& dir, const std::vector<SweepCell>& cells) {
  std::vector<RunSummary> rows;
  for (const auto& c : cells) {
    if (c.per_seed.empty()) continue;
    rows.push_back(c.summary);
    const auto stem = cell_stem(c.scenario, c.mode, c.lr);
    write_text(dir / ("traj_sc_" + stem + ".csv"), trajectory_csv(c.sc_trajectory, 0));
    write_text(dir / ("traj_top_share_" + stem + ".csv"), trajectory_csv(c.top_share_trajectory, 1));
  }
  write_summary_csv(dir / "summary.csv", rows);
}

}  // namespace selgov
