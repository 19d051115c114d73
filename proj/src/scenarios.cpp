#include "statusarena/scenarios.hpp"

#include <array>
#include <fstream>
#include <set>

#include "statusarena/error.hpp"
#include "statusarena/text.hpp"

namespace statusarena {

namespace {

constexpr std::array<std::string_view, 5> kDomainNames{"Political", "Charity", "Banner", "Coffee", "Custom"};

Visibility parse_visibility(std::string_view s) {
  if (s == "Private") return Visibility::Private;
  if (s == "Public") return Visibility::Public;
  throw ConfigError("unknown visibility '" + std::string(s) + "'");
}

std::string_view to_string(Visibility v) { return v == Visibility::Public ? "Public" : "Private"; }

std::string scenario_tag(const ScenarioConfig& cfg) { return "scenario:" + cfg.scenario_id; }

}  // namespace

std::string_view to_string(ScenarioDomain d) { return kDomainNames[static_cast<int>(d)]; }

ScenarioDomain parse_scenario_domain(std::string_view s) {
  const auto ls = to_lower(s);
  for (std::size_t i = 0; i < kDomainNames.size(); ++i) {
    if (to_lower(kDomainNames[i]) == ls) return static_cast<ScenarioDomain>(i);
  }
  throw ConfigError("unknown scenario domain '" + std::string(s) + "'");
}

const ScenarioAction* ScenarioConfig::action(std::string_view option_id) const {
  for (const auto& a : actions) {
    if (a.option_id == option_id) return &a;
  }
  return nullptr;
}

std::string option_tag(ScenarioDomain domain, std::string_view option_id) {
  return domain_tag(domain) + ":" + std::string(option_id);
}

std::string domain_tag(ScenarioDomain domain) { return to_lower(to_string(domain)); }

std::vector<std::string> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.scenario_id.empty()) errors.push_back("scenario_id is empty");
  if (cfg.private_observation.empty()) errors.push_back("private_observation is empty");
  if (cfg.actions.size() < 2) errors.push_back("needs at least 2 actions, has " + std::to_string(cfg.actions.size()));

  std::set<std::string> ids;
  std::map<SignalClass, int> classes;
  for (const auto& a : cfg.actions) {
    if (a.option_id.empty()) errors.push_back("action with empty option_id");
    if (!ids.insert(a.option_id).second) errors.push_back("duplicate option_id '" + a.option_id + "'");
    if (a.text.empty()) errors.push_back("action '" + a.option_id + "' has no text");
    if (a.cost && *a.cost < Money{}) errors.push_back("action '" + a.option_id + "' has a negative cost");
    ++classes[a.signal_class];
    auto it = cfg.effects.find(a.option_id);
    if (it == cfg.effects.end() || it->second.empty()) {
      errors.push_back("action '" + a.option_id + "' has no effects");
    }
  }
  bool any_public = false;
  for (const auto& [id, effects] : cfg.effects) {
    if (!ids.contains(id)) errors.push_back("effects for unknown option '" + id + "'");
    for (const auto& e : effects) {
      if (e.text.empty()) errors.push_back("empty effect text for '" + id + "'");
      any_public = any_public || e.visibility == Visibility::Public;
    }
  }
  if (cfg.domain != ScenarioDomain::Custom && !any_public) errors.push_back("no Public effect in a signal domain");

  const auto expect_arity = [&](std::size_t n) {
    if (cfg.actions.size() != n) {
      errors.push_back(std::string(to_string(cfg.domain)) + " scenarios need exactly " + std::to_string(n) +
                       " actions");
    }
  };
  switch (cfg.domain) {
    case ScenarioDomain::Political:
    case ScenarioDomain::Charity:
      expect_arity(3);
      for (SignalClass c : {SignalClass::StatusSignal, SignalClass::Neutral, SignalClass::NoAction}) {
        if (classes[c] != 1) {
          errors.push_back("needs exactly one " + std::string(to_string(c)) + " action, has " +
                           std::to_string(classes[c]));
        }
      }
      break;
    case ScenarioDomain::Banner:
      expect_arity(5);
      break;
    case ScenarioDomain::Coffee:
      expect_arity(4);
      break;
    case ScenarioDomain::Custom:
      break;
  }
  return errors;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  try {
    ScenarioConfig cfg;
    cfg.scenario_id = j.at("scenario_id").get<std::string>();
    cfg.domain = parse_scenario_domain(j.at("domain").get<std::string>());
    cfg.private_observation = j.at("private_observation").get<std::string>();
    for (const auto& a : j.at("actions")) {
      ScenarioAction act;
      act.option_id = a.at("option_id").get<std::string>();
      act.text = a.at("text").get<std::string>();
      act.signal_class = parse_signal_class(a.at("signal_class").get<std::string>());
      if (a.contains("cost")) act.cost = Money::from_dollars(a.at("cost").get<double>());
      if (a.contains("population_prior")) {
        for (const auto& [pop, v] : a.at("population_prior").items()) {
          act.population_prior[parse_population(pop)] = v.get<double>();
        }
      }
      cfg.actions.push_back(std::move(act));
    }
    for (const auto& [id, list] : j.at("effects").items()) {
      auto& effects = cfg.effects[id];
      for (const auto& e : list) {
        effects.push_back(ScenarioEffect{e.at("text").get<std::string>(),
                                         parse_visibility(e.at("visibility").get<std::string>())});
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : cfg.actions) {
    nlohmann::json ja{{"option_id", a.option_id},
                      {"text", a.text},
                      {"signal_class", std::string(to_string(a.signal_class))}};
    if (a.cost) ja["cost"] = a.cost->dollars();
    if (!a.population_prior.empty()) {
      nlohmann::json prior = nlohmann::json::object();
      for (const auto& [pop, v] : a.population_prior) prior[std::string(to_string(pop))] = v;
      ja["population_prior"] = prior;
    }
    actions.push_back(std::move(ja));
  }
  nlohmann::json effects = nlohmann::json::object();
  for (const auto& [id, list] : cfg.effects) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : list) arr.push_back({{"text", e.text}, {"visibility", std::string(to_string(e.visibility))}});
    effects[id] = arr;
  }
  return {{"scenario_id", cfg.scenario_id},
          {"domain", std::string(to_string(cfg.domain))},
          {"private_observation", cfg.private_observation},
          {"actions", actions},
          {"effects", effects}};
}

std::vector<ScenarioConfig> load_scenario_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  std::vector<ScenarioConfig> out;
  if (j.is_array()) {
    for (const auto& item : j) out.push_back(scenario_from_json(item));
  } else {
    out.push_back(scenario_from_json(j));
  }
  return out;
}

std::vector<ScenarioConfig> load_library(ScenarioDomain domain, const std::filesystem::path& data_dir) {
  if (domain == ScenarioDomain::Custom) throw ConfigError("no shipped library for the Custom domain");
  const auto file = data_dir / "scenarios" / (domain_tag(domain) + ".json");
  auto lib = load_scenario_file(file);
  for (const auto& cfg : lib) {
    if (cfg.domain != domain) throw ConfigError(file.string() + ": '" + cfg.scenario_id + "' is in another domain");
    const auto errors = validate_scenario(cfg);
    if (!errors.empty()) throw ConfigError(file.string() + ": '" + cfg.scenario_id + "': " + errors.front());
  }
  if (lib.empty()) throw ConfigError(file.string() + ": empty library");
  return lib;
}

ScenarioConfig generate_scenario(ScenarioDomain domain, const std::vector<ScenarioConfig>& library,
                                 TextBackend& backend, const PromptLibrary& prompts, std::uint64_t seed,
                                 int attempts) {
  ScenarioGenerationHints hints;
  std::string examples;
  for (const auto& cfg : library) {
    if (cfg.domain != domain) continue;
    hints.library_configs.push_back(to_json(cfg).dump());
    examples += hints.library_configs.back() + "\n";
  }
  std::map<std::string, std::string> vars{{"domain", std::string(to_string(domain))}, {"examples", examples}};
  std::string problems;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    vars["problems"] = problems.empty() ? "(none)" : problems;
    BackendRequest req;
    req.purpose = RequestPurpose::ScenarioGeneration;
    req.prompt = prompts.render("scenario_generation", vars);
    req.max_length = 2048;
    req.seed = seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL;
    req.hints = hints;
    const auto text = backend.complete(req).text;
    std::vector<std::string> errors;
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      errors.push_back("response contains no JSON object");
    } else {
      try {
        auto cfg = scenario_from_json(nlohmann::json::parse(text.substr(open, close - open + 1)));
        if (cfg.domain != domain) errors.push_back("wrong domain " + std::string(to_string(cfg.domain)));
        auto more = validate_scenario(cfg);
        errors.insert(errors.end(), more.begin(), more.end());
        if (errors.empty()) return cfg;
      } catch (const nlohmann::json::exception& e) {
        errors.push_back(std::string("invalid JSON: ") + e.what());
      } catch (const ConfigError& e) {
        errors.push_back(e.what());
      }
    }
    problems = join(errors, "; ");
  }
  throw GenerationError("scenario generation for " + std::string(to_string(domain)) + " failed " +
                        std::to_string(attempts) + " times: " + problems);
}

ScenarioOutcome resolve_scenario(AgentState& agent, const ScenarioConfig& cfg, int day, Mind& mind) {
  const auto errors = validate_scenario(cfg);
  if (!errors.empty()) throw ContractViolation("invalid scenario '" + cfg.scenario_id + "': " + errors.front());

  DecisionContext ctx;
  ctx.situation_text = cfg.private_observation;
  std::set<std::string> query{domain_tag(cfg.domain)};
  for (const auto& a : cfg.actions) {
    if (a.cost && *a.cost > agent.cash) continue;
    const auto tag = option_tag(cfg.domain, a.option_id);
    query.insert(tag);
    double prior = 0.0;
    if (auto it = a.population_prior.find(agent.persona.population); it != a.population_prior.end()) {
      prior = it->second;
    }
    std::string text = a.text;
    if (a.cost) text += " (costs $" + a.cost->str() + ")";
    ctx.options.push_back(DecisionOption{a.option_id, text, a.signal_class, tag, prior});
  }
  if (ctx.options.empty()) throw ContractViolation("no affordable action in '" + cfg.scenario_id + "'");
  ctx.retrieved_memories = retrieve_memories(agent.memory, query, mind.params.retrieval_k);

  const auto result = decide(agent, ctx, mind);
  const ScenarioAction* chosen = cfg.action(result.option_id);

  ScenarioOutcome out{agent.id, cfg.scenario_id, cfg.domain, result.option_id, {}, result.fallback};
  if (chosen->cost) agent.cash -= *chosen->cost;

  // The actor's own record of the episode; no option tag, so it is not precedent.
  const std::set<std::string> private_tags{domain_tag(cfg.domain), scenario_tag(cfg)};
  agent.memory.append(day, Phase::Social, MemoryKind::Observation,
                      cfg.private_observation + " I chose to: " + chosen->text, private_tags);
  if (auto it = cfg.effects.find(result.option_id); it != cfg.effects.end()) {
    for (const auto& e : it->second) {
      out.effects.push_back(EmittedEffect{e.text, e.visibility});
      if (e.visibility == Visibility::Private) {
        agent.memory.append(day, Phase::Social, MemoryKind::Observation, e.text, private_tags);
      }
    }
  }
  return out;
}

void broadcast_public_effects(const ScenarioOutcome& outcome, AgentState& actor, AgentState& partner, int day) {
  if (outcome.agent != actor.id) throw ContractViolation("outcome belongs to another agent");
  const std::set<std::string> tags{domain_tag(outcome.domain), option_tag(outcome.domain, outcome.option_id),
                                   agent_tag(actor.id)};
  for (const auto& e : outcome.effects) {
    if (e.visibility != Visibility::Public) continue;
    actor.memory.append(day, Phase::Social, MemoryKind::PublicEffect, "After my choice: " + e.text, tags);
    partner.memory.append(day, Phase::Social, MemoryKind::PublicEffect,
                          "About " + actor.persona.name + ": " + e.text, tags);
  }
}

}  // namespace statusarena
