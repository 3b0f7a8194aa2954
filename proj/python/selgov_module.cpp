// Python bindings. Structured results cross the boundary as JSON text and are
// decoded on the Python side, so the wire format matches the CLI outputs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selgov/cefl.hpp"
#include "selgov/error.hpp"
#include "selgov/fixtures.hpp"
#include "selgov/harness.hpp"
#include "selgov/learning.hpp"
#include "selgov/metrics.hpp"
#include "selgov/reducer.hpp"
#include "selgov/scoring.hpp"
#include "selgov/serialize.hpp"

namespace py = pybind11;
using namespace selgov;

namespace {

nlohmann::json summary_json(const RunSummary& s) {
  return {{"scenario", scenario_name(s.scenario)},
          {"mode", mode_name(s.mode)},
          {"lr", s.lr},
          {"mean_reward", s.mean_reward},
          {"mean_SC", s.mean_sc},
          {"SC_0", s.sc_0},
          {"SC_T", s.sc_T},
          {"RSC", s.rsc},
          {"var_SC", s.var_sc},
          {"GSI", s.gsi ? nlohmann::json(*s.gsi) : nlohmann::json(nullptr)},
          {"GD_dynamic", s.gd_dynamic}};
}

const Fixtures& fixtures_arg(const std::string& path, Fixtures& storage) {
  if (path.empty()) return default_fixtures();
  storage = load_fixtures(path);
  return storage;
}

std::string run_json(const std::string& config_json, const std::string& fixtures_path, bool paired) {
  const RunConfig cfg = run_config_from_json(nlohmann::json::parse(config_json));
  Fixtures storage;
  const auto& fx = fixtures_arg(fixtures_path, storage);
  const auto ep = paired ? run_paired_episode(cfg, fx) : run_episode(cfg, fx);
  nlohmann::json out = {{"summary", summary_json(ep.summary)},
                        {"sc_series", ep.sc_series},
                        {"top_share_series", ep.top_share_series},
                        {"audit_log", audit_log_jsonl(ep.header, ep.log)}};
  return out.dump();
}

std::string sweep_json(const std::string& base_json, const std::vector<std::string>& scenarios,
                       const std::vector<std::string>& modes, const std::vector<double>& lrs,
                       const std::vector<std::uint64_t>& seeds, unsigned threads, const std::string& fixtures_path) {
  SweepConfig sc;
  sc.base = run_config_from_json(nlohmann::json::parse(base_json));
  if (!scenarios.empty()) {
    sc.scenarios.clear();
    for (const auto& s : scenarios) sc.scenarios.push_back(parse_scenario(s));
  }
  if (!modes.empty()) {
    sc.modes.clear();
    for (const auto& m : modes) sc.modes.push_back(parse_mode(m));
  }
  if (!lrs.empty()) sc.lrs = lrs;
  if (!seeds.empty()) sc.seeds = seeds;
  sc.threads = threads;
  Fixtures storage;
  const auto cells = run_sweep(sc, fixtures_arg(fixtures_path, storage));
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& s : c.per_seed) per_seed.push_back(summary_json(s));
    out.push_back({{"summary", summary_json(c.summary)},
                   {"per_seed", per_seed},
                   {"seeds", c.seeds},
                   {"sc_trajectory", c.sc_trajectory},
                   {"top_share_trajectory", c.top_share_trajectory},
                   {"errors", c.errors}});
  }
  return out.dump();
}

std::string replay_json(const std::string& path) {
  const auto [header, log] = read_audit_log(path);
  return summary_json(summarize(header, log)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Governed agent-selection simulator (native core)";

  static py::exception<Error> error(m, "SelgovError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("project_capped_simplex", [](const std::vector<double>& p, double floor, double cap) {
    return project_capped_simplex(p, floor, cap);
  }, py::arg("p"), py::arg("floor"), py::arg("cap"));
  m.def("policy", [](const std::vector<double>& scores, double temperature) {
    return policy(scores, temperature);
  }, py::arg("scores"), py::arg("temperature"));
  m.def("variance_clamp", [](const std::vector<double>& scores, double sigma) {
    return variance_clamp(scores, sigma);
  }, py::arg("scores"), py::arg("sigma"));
  m.def("token_hash", &token_hash, py::arg("token"), py::arg("seed") = kDefaultHashSeed);
  m.def("hash_embed", [](const std::vector<std::string>& tokens, std::size_t dim, std::uint64_t seed) {
    return hash_embed(tokens, dim, seed);
  }, py::arg("tokens"), py::arg("dim"), py::arg("seed") = kDefaultHashSeed);
  m.def("rsc", &rsc, py::arg("sc_0"), py::arg("sc_T"));
  m.def("gsi", &gsi, py::arg("var_sc"), py::arg("var_unconstrained"));
  m.def("default_fixtures_json", [] { return std::string(default_fixtures_json()); });
  m.def("default_config_json", [] { return to_json(RunConfig{}).dump(); });

  m.def("_run", &run_json, py::arg("config_json"), py::arg("fixtures_path") = "", py::arg("paired") = false,
        py::call_guard<py::gil_scoped_release>());
  m.def("_sweep", &sweep_json, py::arg("base_json"), py::arg("scenarios"), py::arg("modes"), py::arg("lrs"),
        py::arg("seeds"), py::arg("threads") = 0, py::arg("fixtures_path") = "",
        py::call_guard<py::gil_scoped_release>());
  m.def("_replay", &replay_json, py::arg("path"));
}
