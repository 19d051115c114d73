#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "statusarena/agent.hpp"
#include "statusarena/cognition.hpp"

namespace statusarena {

enum class ScenarioDomain { Political, Charity, Banner, Coffee, Custom };
std::string_view to_string(ScenarioDomain d);
ScenarioDomain parse_scenario_domain(std::string_view s);

enum class Visibility { Private, Public };

struct ScenarioEffect {
  std::string text;
  Visibility visibility = Visibility::Private;
};

struct ScenarioAction {
  std::string option_id;
  std::string text;
  SignalClass signal_class = SignalClass::Neutral;
  std::optional<Money> cost;
  /// Stub-only cultural prior: logit offset per population.
  std::map<Population, double> population_prior;
};

struct ScenarioConfig {
  std::string scenario_id;
  ScenarioDomain domain = ScenarioDomain::Custom;
  std::string private_observation;
  std::vector<ScenarioAction> actions;
  std::map<std::string, std::vector<ScenarioEffect>> effects;

  const ScenarioAction* action(std::string_view option_id) const;
};

/// "political:outrage", the memory tag for a domain-level option.
std::string option_tag(ScenarioDomain domain, std::string_view option_id);
std::string domain_tag(ScenarioDomain domain);

/// Returns every schema violation (empty when valid): at least two actions,
/// unique option ids, effects for every action and none for unknown ones, a
/// Public effect somewhere in signal domains, and the per-domain arity
/// (Political/Charity: 3 actions with one of each signal class; Banner: 5;
/// Coffee: 4).
std::vector<std::string> validate_scenario(const ScenarioConfig& cfg);

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Parses a file holding one configuration or an array of them.
std::vector<ScenarioConfig> load_scenario_file(const std::filesystem::path& file);

/// Shipped library for a domain, from `<data_dir>/scenarios/<domain>.json`.
/// Throws ConfigError for Custom (no shipped library) or invalid contents.
std::vector<ScenarioConfig> load_library(ScenarioDomain domain, const std::filesystem::path& data_dir);

/// Prompts the backend with the domain's causal schema and few-shot examples
/// and validates the returned JSON, reprompting up to `attempts` times in
/// total. Throws GenerationError when every attempt fails validation.
ScenarioConfig generate_scenario(ScenarioDomain domain, const std::vector<ScenarioConfig>& library,
                                 TextBackend& backend, const PromptLibrary& prompts,
                                 std::uint64_t seed, int attempts = 3);

struct EmittedEffect {
  std::string text;
  Visibility visibility = Visibility::Private;
};

struct ScenarioOutcome {
  AgentId agent{};
  std::string scenario_id;
  ScenarioDomain domain = ScenarioDomain::Custom;
  std::string option_id;
  std::vector<EmittedEffect> effects;
  bool fallback = false;
};

/// Builds a DecisionContext from the observation and the affordable actions,
/// decides, and appends the chosen action's Private effects to the actor.
ScenarioOutcome resolve_scenario(AgentState& agent, const ScenarioConfig& cfg, int day, Mind& mind);

/// Appends every Public effect of the outcome to both the actor's and the
/// partner's memory as PublicEffect records tagged with the domain and option.
/// Private effects never leave the actor.
void broadcast_public_effects(const ScenarioOutcome& outcome, AgentState& actor, AgentState& partner,
                              int day);

}  // namespace statusarena
