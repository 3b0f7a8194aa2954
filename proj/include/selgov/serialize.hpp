#pragma once

// File formats: JSONL audit logs (one header line, then one line per step),
// CSV summaries and (step, value) trajectories, JSON run configs.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selgov/harness.hpp"

namespace selgov {

// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

nlohmann::json to_json(const SelectionParams& theta);
SelectionParams selection_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReducerParams& phi);
ReducerParams reducer_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ClipEvent& e);
ClipEvent clip_event_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// Agent references are written as ids and resolved through `roster_ids`.
nlohmann::json to_json(const AuditRecord& rec, const std::vector<std::string>& roster_ids);
AuditRecord audit_record_from_json(const nlohmann::json& j, const std::vector<std::string>& roster_ids);
nlohmann::json to_json(const RunHeader& header);
RunHeader run_header_from_json(const nlohmann::json& j);

std::string audit_log_jsonl(const RunHeader& header, const AuditLog& log);
void write_audit_log(const std::filesystem::path& path, const RunHeader& header, const AuditLog& log);
std::pair<RunHeader, AuditLog> read_audit_log(const std::filesystem::path& path);

// scenario,mode,lr,mean_reward,mean_SC,SC_0,SC_T,RSC,var_SC,GSI,GD_dynamic
std::string summary_csv_header();
std::string summary_csv_row(const RunSummary& s);
void write_summary_csv(const std::filesystem::path& path, const std::vector<RunSummary>& rows);

// "step,value" rows; step numbering starts at `first_step`.
std::string trajectory_csv(const std::vector<double>& series, std::size_t first_step);
void write_text(const std::filesystem::path& path, const std::string& text);

// File stem shared by all outputs of one (scenario, mode, lr) cell.
std::string cell_stem(Scenario scenario, Mode mode, double lr);

// Writes summary.csv plus traj_sc_<stem>.csv and traj_top_share_<stem>.csv per cell.
void write_sweep_outputs(const std::filesystem::path& dir, const std::vector<SweepCell>& cells);

}  // namespace selgov
