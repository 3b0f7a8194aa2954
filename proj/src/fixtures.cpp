#include "selgov/fixtures.hpp"

#include <algorithm>
#include <fstream>

#include "selgov/error.hpp"

namespace selgov {

namespace {

template <typename T>
T field(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

const ScenarioSpec& Fixtures::scenario(Scenario s) const {
  for (const auto& sc : scenarios) {
    if (sc.scenario == s) return sc;
  }
  throw Error(ErrorCode::kInvalidArgument, "fixtures define no scenario " + std::string(scenario_name(s)));
}

std::size_t Fixtures::agent_index(std::string_view id) const {
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (roster[i].id() == id) return i;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown agent id '" + std::string(id) + "'");
}

Fixtures fixtures_from_json(const nlohmann::json& doc) {
  Fixtures fx;
  std::vector<AgentProfile> agents;
  for (const auto& a : field<nlohmann::json>(doc, "agents")) {
    agents.emplace_back(field<std::string>(a, "id"), field<double>(a, "risk_profile"),
                        field<double>(a, "stability_score"), field<double>(a, "latency_ms"),
                        field<double>(a, "auditability_score"),
                        field<std::vector<std::string>>(a, "compliance_tags"));
  }
  fx.roster = make_roster(std::move(agents));
  for (const auto& s : field<nlohmann::json>(doc, "scenarios")) {
    ScenarioSpec spec;
    spec.scenario = parse_scenario(field<std::string>(s, "name"));
    spec.required_tag = field<std::string>(s, "required_tag");
    for (const auto& v : field<nlohmann::json>(s, "variants")) {
      VariantSpec vs;
      vs.keywords = field<std::vector<std::string>>(v, "keywords");
      const auto profile = field<std::vector<double>>(v, "profile");
      if (profile.size() != kScalarFeatures) {
        throw Error(ErrorCode::kParseError, "variant profile must have 4 entries");
      }
      std::copy(profile.begin(), profile.end(), vs.profile.begin());
      vs.threshold = field<double>(v, "threshold");
      spec.variants.push_back(std::move(vs));
    }
    fx.scenarios.push_back(std::move(spec));
  }
  return fx;
}

nlohmann::json fixtures_to_json(const Fixtures& fx) {
  nlohmann::json doc;
  doc["agents"] = nlohmann::json::array();
  for (const auto& a : fx.roster) {
    doc["agents"].push_back({{"id", a.id()},
                             {"risk_profile", a.risk_profile()},
                             {"stability_score", a.stability_score()},
                             {"latency_ms", a.latency_ms()},
                             {"auditability_score", a.auditability_score()},
                             {"compliance_tags", a.compliance_tags()}});
  }
  doc["scenarios"] = nlohmann::json::array();
  for (const auto& s : fx.scenarios) {
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : s.variants) {
      variants.push_back({{"keywords", v.keywords},
                          {"profile", std::vector<double>(v.profile.begin(), v.profile.end())},
                          {"threshold", v.threshold}});
    }
    doc["scenarios"].push_back(
        {{"name", scenario_name(s.scenario)}, {"required_tag", s.required_tag}, {"variants", variants}});
  }
  return doc;
}

Fixtures load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open fixtures file " + path.string());
  try {
    return fixtures_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

const Fixtures& default_fixtures() {
  static const Fixtures fx = fixtures_from_json(nlohmann::json::parse(default_fixtures_json()));
  return fx;
}

}  // namespace selgov
