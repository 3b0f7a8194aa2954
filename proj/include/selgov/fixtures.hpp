#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selgov/domain.hpp"
#include "selgov/evaluator.hpp"

namespace selgov {

// Agent roster plus the three scenario definitions.
struct Fixtures {
  std::vector<AgentProfile> roster;  // sorted by id
  std::vector<ScenarioSpec> scenarios;

  const ScenarioSpec& scenario(Scenario s) const;
  std::size_t agent_index(std::string_view id) const;
};

Fixtures fixtures_from_json(const nlohmann::json& doc);
nlohmann::json fixtures_to_json(const Fixtures& fx);
Fixtures load_fixtures(const std::filesystem::path& path);

// data/fixtures.json, compiled into the library.
std::string_view default_fixtures_json();
const Fixtures& default_fixtures();

}  // namespace selgov
