#include "statusarena/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "statusarena/error.hpp"
#include "statusarena/hash.hpp"
#include "statusarena/text.hpp"

#ifndef STATUSARENA_DATA_DIR
#define STATUSARENA_DATA_DIR "data"
#endif
#ifndef STATUSARENA_VERSION
#define STATUSARENA_VERSION "0.0.0"
#endif

namespace statusarena {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config (de)serialization. Every object is checked for unknown keys.

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + key + ": wrong type (" + j.at(key).dump() + ")");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

json stub_to_json(const StubParams& s) {
  return {{"mode", s.mode == ChoiceMode::Greedy ? "greedy" : "sample"},
          {"beta0", s.beta0},
          {"beta1", s.beta1},
          {"neutral_logit", s.neutral_logit},
          {"market_status_beta0", s.market_status_beta0},
          {"market_beta1", s.market_beta1},
          {"market_functional_logit", s.market_functional_logit},
          {"hype_markup", s.hype_markup},
          {"food_price_sensitivity", s.food_price_sensitivity},
          {"mention_probability", s.mention_probability}};
}

void stub_from_json(const json& j, StubParams& s) {
  reject_unknown(j,
                 {"mode", "beta0", "beta1", "neutral_logit", "market_status_beta0", "market_beta1", "market_functional_logit",
                  "hype_markup", "food_price_sensitivity", "mention_probability"},
                 "stub");
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "sample") s.mode = ChoiceMode::Sample;
    else if (m == "greedy") s.mode = ChoiceMode::Greedy;
    else throw ConfigError("stub.mode: expected 'sample' or 'greedy', got '" + m + "'");
  }
  read_field(j, "beta0", s.beta0, "stub.");
  read_field(j, "beta1", s.beta1, "stub.");
  read_field(j, "neutral_logit", s.neutral_logit, "stub.");
  read_field(j, "market_status_beta0", s.market_status_beta0, "stub.");
  read_field(j, "market_beta1", s.market_beta1, "stub.");
  read_field(j, "market_functional_logit", s.market_functional_logit, "stub.");
  read_field(j, "hype_markup", s.hype_markup, "stub.");
  read_field(j, "food_price_sensitivity", s.food_price_sensitivity, "stub.");
  read_field(j, "mention_probability", s.mention_probability, "stub.");
}

// ---------------------------------------------------------------------------
// World serialization

json good_to_json(const Good& g) {
  json j{{"id", g.id},
         {"name", g.name},
         {"category", std::string(to_string(g.category))},
         {"tier", std::string(to_string(g.tier))},
         {"description", g.description},
         {"base_price", g.base_price.cents()},
         {"initial_inventory", g.initial_inventory},
         {"pack", std::string(to_string(g.pack))},
         {"collectible", g.collectible}};
  if (g.counterpart) j["counterpart"] = *g.counterpart;
  return j;
}

Good good_from_snapshot(const json& j) {
  Good g;
  g.id = j.at("id").get<std::string>();
  g.name = j.at("name").get<std::string>();
  g.category = parse_category(j.at("category").get<std::string>());
  g.tier = parse_tier(j.at("tier").get<std::string>());
  g.description = j.at("description").get<std::string>();
  g.base_price = Money::from_cents(j.at("base_price").get<std::int64_t>());
  g.initial_inventory = j.at("initial_inventory").get<int>();
  g.pack = parse_pack(j.at("pack").get<std::string>());
  g.collectible = j.at("collectible").get<bool>();
  if (j.contains("counterpart")) g.counterpart = j.at("counterpart").get<std::string>();
  return g;
}

json record_to_json(const MemoryRecord& r) {
  return {{"day", r.timestamp.day},
          {"phase", static_cast<int>(r.timestamp.phase)},
          {"sequence", r.timestamp.sequence},
          {"kind", std::string(to_string(r.kind))},
          {"text", r.text},
          {"tags", r.tags}};
}

MemoryRecord record_from_json(const json& j) {
  MemoryRecord r;
  r.timestamp.day = j.at("day").get<int>();
  r.timestamp.phase = static_cast<Phase>(j.at("phase").get<int>());
  r.timestamp.sequence = j.at("sequence").get<std::uint64_t>();
  r.kind = parse_memory_kind(j.at("kind").get<std::string>());
  r.text = j.at("text").get<std::string>();
  r.tags = j.at("tags").get<std::set<std::string>>();
  return r;
}

json persona_to_json(const Persona& p) {
  return {{"name", p.name},
          {"sex", std::string(to_string(p.sex))},
          {"occupation", p.occupation},
          {"background", p.background},
          {"formative_memories", p.formative_memories},
          {"population", std::string(to_string(p.population))}};
}

Persona persona_from_json(const json& j) {
  Persona p;
  p.name = j.at("name").get<std::string>();
  p.sex = parse_sex(j.at("sex").get<std::string>());
  p.occupation = j.at("occupation").get<std::string>();
  p.background = j.at("background").get<std::string>();
  p.formative_memories = j.at("formative_memories").get<std::vector<std::string>>();
  p.population = parse_population(j.at("population").get<std::string>());
  return p;
}

json agent_to_json(const AgentState& a) {
  json memory = json::array();
  for (const auto& r : a.memory.records()) memory.push_back(record_to_json(r));
  json j{{"id", raw(a.id)},
         {"persona", persona_to_json(a.persona)},
         {"cash", a.cash.cents()},
         {"inventory", a.inventory},
         {"memory", memory},
         {"rng", {a.rng.key(), a.rng.counter()}},
         {"influencer", a.influencer}};
  if (a.influencer_pack) j["influencer_pack"] = std::string(to_string(*a.influencer_pack));
  return j;
}

AgentState agent_from_json(const json& j) {
  AgentState a;
  a.id = AgentId{j.at("id").get<std::uint32_t>()};
  a.persona = persona_from_json(j.at("persona"));
  a.cash = Money::from_cents(j.at("cash").get<std::int64_t>());
  a.inventory = j.at("inventory").get<std::map<GoodId, int>>();
  for (const auto& r : j.at("memory")) a.memory.restore(record_from_json(r));
  a.rng = SeedStream(j.at("rng").at(0).get<std::uint64_t>(), j.at("rng").at(1).get<std::uint64_t>());
  a.influencer = j.at("influencer").get<bool>();
  if (j.contains("influencer_pack")) a.influencer_pack = parse_pack(j.at("influencer_pack").get<std::string>());
  return a;
}

json seller_to_json(const SellerState& s) {
  return {{"id", raw(s.seller_id)},       {"good", s.good_id},         {"ask", s.current_ask.cents()},
          {"base_price", s.base_price.cents()}, {"inventory", s.inventory}, {"revenue", s.revenue.cents()},
          {"fixed_price", s.fixed_price_mode}};
}

SellerState seller_from_json(const json& j) {
  SellerState s;
  s.seller_id = SellerId{j.at("id").get<std::uint32_t>()};
  s.good_id = j.at("good").get<std::string>();
  s.current_ask = Money::from_cents(j.at("ask").get<std::int64_t>());
  s.base_price = Money::from_cents(j.at("base_price").get<std::int64_t>());
  s.inventory = j.at("inventory").get<int>();
  s.revenue = Money::from_cents(j.at("revenue").get<std::int64_t>());
  s.fixed_price_mode = j.at("fixed_price").get<bool>();
  return s;
}

json schedule_to_json(const PairingSchedule& s) {
  json days = json::array();
  for (const auto& day : s.days) {
    json d = json::array();
    for (const auto& [a, b] : day) d.push_back({raw(a), raw(b)});
    days.push_back(d);
  }
  return days;
}

PairingSchedule schedule_from_json(const json& j) {
  PairingSchedule s;
  for (const auto& day : j) {
    auto& d = s.days.emplace_back();
    for (const auto& pair : day) d.emplace_back(AgentId{pair.at(0).get<std::uint32_t>()}, AgentId{pair.at(1).get<std::uint32_t>()});
  }
  return s;
}

json totals_to_json(const SettlementTotals& t) { return {{"cash", t.cash.cents()}, {"items", t.items}}; }

json inventory_json(const AgentState& a) {
  json inv = json::object();
  for (const auto& [id, n] : a.inventory) {
    if (n > 0) inv[id] = n;
  }
  return inv;
}

std::string seed_file_name(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seed_%03llu.jsonl", static_cast<unsigned long long>(seed));
  return buf;
}

const char* const kInfluencerNames[][2] = {
    {"Skye Marlowe", "F"}, {"Jasper Quill", "M"}, {"Indigo Reyes", "F"}, {"Rowan Vega", "M"},
    {"Juniper Hale", "F"}, {"Felix Arden", "M"}, {"Wren Solis", "F"},   {"Milo Strand", "M"},
};

}  // namespace

// ---------------------------------------------------------------------------
// Config

void validate(const ExperimentConfig& c) {
  const auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
  if (c.fixed_price && !c.market) fail("fixed_price", "requires market = true");
  if (c.n_agents < 2) fail("n_agents", "must be >= 2");
  if (c.n_days < 1) fail("n_days", "must be >= 1");
  if (c.market_rounds_per_day < 1) fail("market_rounds_per_day", "must be >= 1");
  if (c.n_seeds < 1) fail("n_seeds", "must be >= 1");
  if (c.turn_budget < 0) fail("turn_budget", "must be >= 0");
  if (c.daily_life_events < 0) fail("daily_life_events", "must be >= 0");
  if (c.restock_interval_rounds < 0) fail("restock_interval_rounds", "must be >= 0");
  if (c.sellers_per_good < 1) fail("sellers_per_good", "must be >= 1");
  if (c.inventory_override && *c.inventory_override < 0) fail("inventory_override", "must be >= 0");
  if (!(c.ask_policy.up >= 0.0)) fail("ask_policy.up", "must be >= 0");
  if (!(c.ask_policy.down >= 0.0 && c.ask_policy.down < 1.0)) fail("ask_policy.down", "must be in [0, 1)");
  if (!(c.ask_policy.floor_fraction > 0.0 && c.ask_policy.floor_fraction <= 1.0)) {
    fail("ask_policy.floor_fraction", "must be in (0, 1]");
  }
  if (c.cognition.max_reprompts < 0) fail("cognition.max_reprompts", "must be >= 0");
  if (!(c.stub.beta1 > 0.0)) fail("stub.beta1", "must be positive");
  if (!(c.stub.market_beta1 >= 0.0)) fail("stub.market_beta1", "must be >= 0");
  if (!(c.stub.mention_probability >= 0.0 && c.stub.mention_probability <= 1.0)) {
    fail("stub.mention_probability", "must be in [0, 1]");
  }
  if (!c.market && !c.daily_life && !c.social && !c.scenario_domain) {
    fail("market", "nothing to simulate: market, daily_life, social and scenario_domain are all off");
  }
  if (c.social && c.n_agents % 2 != 0) fail("n_agents", "social runs need an even population");
  if (c.social && c.n_days > c.n_agents / 2) fail("n_days", "exceeds the number of distinct partners");
  if (c.generate_scenarios && !c.scenario_domain) fail("generate_scenarios", "requires scenario_domain");
  if (c.scenario_domain == ScenarioDomain::Custom) fail("scenario_domain", "Custom has no shipped library");
  if (c.influencer) {
    const auto& inf = *c.influencer;
    if (!c.social) fail("influencer", "requires social = true");
    if (inf.pack != Pack::Hipster && inf.pack != Pack::Streetwear) fail("influencer.pack", "must be Hipster or Streetwear");
    if (inf.start_day < 2 || inf.start_day > c.n_days + 1) fail("influencer.start_day", "must be in [2, n_days + 1]");
    if (inf.n_influencers < 2) fail("influencer.n_influencers", "must be >= 2 (one of each sex)");
    if (inf.extension_days < 0) fail("influencer.extension_days", "must be >= 0");
    if (c.n_days + inf.extension_days > c.n_agents / 2) fail("influencer.extension_days", "regular partners would repeat");
  }
}

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j,
                 {"preset", "social", "daily_life", "market", "fixed_price", "synthetic_goods", "scenario_domain",
                  "generate_scenarios", "public_effects_in_opening", "population", "n_agents", "n_days",
                  "market_rounds_per_day", "n_seeds", "turn_budget", "daily_life_events", "backend", "stub",
                  "prompt_logging", "cognition", "data_dir", "catalog_files", "persona_file", "wealth", "ask_policy",
                  "restock_interval_rounds", "sellers_per_good", "inventory_override", "influencer"},
                 "config");
  ExperimentConfig c;
  c.data_dir = default_data_dir();
  try {
    if (j.contains("preset")) {
      const auto& p = j.at("preset");
      if (p.is_array()) {
        for (const auto& name : p) apply_preset(c, name.get<std::string>());
      } else {
        apply_preset(c, p.get<std::string>());
      }
    }
    read_field(j, "social", c.social, "");
    read_field(j, "daily_life", c.daily_life, "");
    read_field(j, "market", c.market, "");
    read_field(j, "fixed_price", c.fixed_price, "");
    read_field(j, "synthetic_goods", c.synthetic_goods, "");
    if (j.contains("scenario_domain")) {
      if (j.at("scenario_domain").is_null()) c.scenario_domain.reset();
      else c.scenario_domain = parse_scenario_domain(j.at("scenario_domain").get<std::string>());
    }
    read_field(j, "generate_scenarios", c.generate_scenarios, "");
    read_field(j, "public_effects_in_opening", c.public_effects_in_opening, "");
    if (j.contains("population")) c.population = parse_population(j.at("population").get<std::string>());
    read_field(j, "n_agents", c.n_agents, "");
    read_field(j, "n_days", c.n_days, "");
    read_field(j, "market_rounds_per_day", c.market_rounds_per_day, "");
    read_field(j, "n_seeds", c.n_seeds, "");
    read_field(j, "turn_budget", c.turn_budget, "");
    read_field(j, "daily_life_events", c.daily_life_events, "");
    if (j.contains("backend")) {
      const auto b = j.at("backend").get<std::string>();
      if (b == "stub") c.backend = BackendKind::Stub;
      else if (b == "live") {
        c.backend = BackendKind::Live;
        if (!j.contains("prompt_logging")) c.prompt_logging = PromptLogging::Verbatim;
      } else throw ConfigError("backend: expected 'stub' or 'live', got '" + b + "'");
    }
    if (j.contains("stub")) stub_from_json(j.at("stub"), c.stub);
    if (j.contains("prompt_logging")) {
      const auto p = j.at("prompt_logging").get<std::string>();
      if (p == "verbatim") c.prompt_logging = PromptLogging::Verbatim;
      else if (p == "digest") c.prompt_logging = PromptLogging::Digest;
      else throw ConfigError("prompt_logging: expected 'verbatim' or 'digest', got '" + p + "'");
    }
    if (j.contains("cognition")) {
      const auto& cj = j.at("cognition");
      reject_unknown(cj, {"retrieval_k", "max_reprompts"}, "cognition");
      read_field(cj, "retrieval_k", c.cognition.retrieval_k, "cognition.");
      read_field(cj, "max_reprompts", c.cognition.max_reprompts, "cognition.");
    }
    if (j.contains("data_dir") && !j.at("data_dir").get<std::string>().empty()) {
      c.data_dir = resolve(base_dir, j.at("data_dir").get<std::string>());
    }
    if (j.contains("catalog_files")) {
      c.catalog_files.clear();
      for (const auto& f : j.at("catalog_files")) c.catalog_files.push_back(resolve(base_dir, f.get<std::string>()));
    }
    if (j.contains("persona_file")) {
      if (j.at("persona_file").is_null()) c.persona_file.reset();
      else c.persona_file = resolve(base_dir, j.at("persona_file").get<std::string>());
    }
    if (j.contains("wealth")) {
      const auto& w = j.at("wealth");
      reject_unknown(w, {"poor_weight", "poor_location", "rich_location", "dispersion"}, "wealth");
      double pw = c.wealth.poor_weight(), pl = c.wealth.poor_location(), rl = c.wealth.rich_location(),
             d = c.wealth.dispersion();
      read_field(w, "poor_weight", pw, "wealth.");
      read_field(w, "poor_location", pl, "wealth.");
      read_field(w, "rich_location", rl, "wealth.");
      read_field(w, "dispersion", d, "wealth.");
      c.wealth = WealthMix::make(pw, pl, rl, d);
    }
    if (j.contains("ask_policy")) {
      const auto& a = j.at("ask_policy");
      reject_unknown(a, {"up", "down", "floor_fraction"}, "ask_policy");
      read_field(a, "up", c.ask_policy.up, "ask_policy.");
      read_field(a, "down", c.ask_policy.down, "ask_policy.");
      read_field(a, "floor_fraction", c.ask_policy.floor_fraction, "ask_policy.");
    }
    read_field(j, "restock_interval_rounds", c.restock_interval_rounds, "");
    read_field(j, "sellers_per_good", c.sellers_per_good, "");
    if (j.contains("inventory_override")) {
      if (j.at("inventory_override").is_null()) c.inventory_override.reset();
      else c.inventory_override = j.at("inventory_override").get<int>();
    }
    if (j.contains("influencer")) {
      const auto& ij = j.at("influencer");
      if (ij.is_null()) {
        c.influencer.reset();
      } else {
        reject_unknown(ij, {"pack", "start_day", "n_influencers", "extension_days", "additional_dates"}, "influencer");
        InfluencerConfig inf = c.influencer.value_or(InfluencerConfig{});
        if (ij.contains("pack")) inf.pack = parse_pack(ij.at("pack").get<std::string>());
        read_field(ij, "start_day", inf.start_day, "influencer.");
        read_field(ij, "n_influencers", inf.n_influencers, "influencer.");
        read_field(ij, "extension_days", inf.extension_days, "influencer.");
        read_field(ij, "additional_dates", inf.additional_dates, "influencer.");
        c.influencer = inf;
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json files = json::array();
  for (const auto& f : c.catalog_files) files.push_back(f.string());
  json j{{"social", c.social},
         {"daily_life", c.daily_life},
         {"market", c.market},
         {"fixed_price", c.fixed_price},
         {"synthetic_goods", c.synthetic_goods},
         {"scenario_domain", c.scenario_domain ? json(std::string(to_string(*c.scenario_domain))) : json(nullptr)},
         {"generate_scenarios", c.generate_scenarios},
         {"public_effects_in_opening", c.public_effects_in_opening},
         {"population", std::string(to_string(c.population))},
         {"n_agents", c.n_agents},
         {"n_days", c.n_days},
         {"market_rounds_per_day", c.market_rounds_per_day},
         {"n_seeds", c.n_seeds},
         {"turn_budget", c.turn_budget},
         {"daily_life_events", c.daily_life_events},
         {"backend", c.backend == BackendKind::Stub ? "stub" : "live"},
         {"stub", stub_to_json(c.stub)},
         {"prompt_logging", c.prompt_logging == PromptLogging::Digest ? "digest" : "verbatim"},
         {"cognition", {{"retrieval_k", c.cognition.retrieval_k}, {"max_reprompts", c.cognition.max_reprompts}}},
         {"data_dir", c.data_dir.string()},
         {"catalog_files", files},
         {"persona_file", c.persona_file ? json(c.persona_file->string()) : json(nullptr)},
         {"wealth",
          {{"poor_weight", c.wealth.poor_weight()},
           {"poor_location", c.wealth.poor_location()},
           {"rich_location", c.wealth.rich_location()},
           {"dispersion", c.wealth.dispersion()}}},
         {"ask_policy",
          {{"up", c.ask_policy.up}, {"down", c.ask_policy.down}, {"floor_fraction", c.ask_policy.floor_fraction}}},
         {"restock_interval_rounds", c.restock_interval_rounds},
         {"sellers_per_good", c.sellers_per_good},
         {"inventory_override", c.inventory_override ? json(*c.inventory_override) : json(nullptr)}};
  if (c.influencer) {
    j["influencer"] = {{"pack", std::string(to_string(c.influencer->pack))},
                       {"start_day", c.influencer->start_day},
                       {"n_influencers", c.influencer->n_influencers},
                       {"extension_days", c.influencer->extension_days},
                       {"additional_dates", c.influencer->additional_dates}};
  } else {
    j["influencer"] = nullptr;
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

void apply_preset(ExperimentConfig& c, std::string_view preset) {
  if (preset == "social") {
    c.social = true;
    c.daily_life = true;
  } else if (preset == "nosocial") {
    c.social = false;
    c.daily_life = false;
    c.influencer.reset();
  } else if (preset == "dailylife") {
    c.social = false;
    c.daily_life = true;
  } else if (preset == "fixedprice") {
    c.market = true;
    c.fixed_price = true;
  } else if (preset == "synthetic") {
    c.synthetic_goods = true;
  } else if (preset == "influencer-hipster" || preset == "influencer-streetwear") {
    c.social = true;
    c.daily_life = true;
    InfluencerConfig inf;
    inf.pack = preset == "influencer-hipster" ? Pack::Hipster : Pack::Streetwear;
    inf.start_day = c.n_days + 1;
    c.influencer = inf;
  } else if (preset == "kerala") {
    c.population = Population::Kerala;
  } else if (preset == "losangeles") {
    c.population = Population::LosAngeles;
  } else if (preset == "political" || preset == "charity" || preset == "banner" || preset == "coffee") {
    c.scenario_domain = parse_scenario_domain(preset);
    c.market = false;
    c.fixed_price = false;
  } else {
    throw ConfigError("unknown preset '" + std::string(preset) + "'");
  }
}

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(to_json(config).dump()); }

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("STATUSARENA_DATA_DIR"); env && *env) return env;
  return STATUSARENA_DATA_DIR;
}

// ---------------------------------------------------------------------------
// World state

const Good& WorldState::good(const GoodId& id) const {
  const Good* g = find_good(catalog, id);
  if (!g) throw ContractViolation("unknown good '" + id + "'");
  return *g;
}

json snapshot_json(const WorldState& s) {
  json catalog = json::array();
  for (const auto& g : s.catalog) catalog.push_back(good_to_json(g));
  json agents = json::array();
  for (const auto& a : s.agents) agents.push_back(agent_to_json(a));
  json sellers = json::array();
  for (const auto& x : s.sellers) sellers.push_back(seller_to_json(x));
  json scenarios = json::array();
  for (const auto& sc : s.scenarios) scenarios.push_back(to_json(sc));
  return {{"schema", kEventSchemaVersion},
          {"config", to_json(s.config)},
          {"seed", s.seed},
          {"run_id", s.run_id},
          {"catalog", catalog},
          {"agents", agents},
          {"sellers", sellers},
          {"schedule", schedule_to_json(s.schedule)},
          {"influencer_schedule", schedule_to_json(s.influencer_schedule)},
          {"scenarios", scenarios},
          {"locations", s.locations},
          {"next_day", s.next_day},
          {"global_round", s.global_round},
          {"last_day", s.last_day},
          {"world_rng", {s.world_rng.key(), s.world_rng.counter()}},
          {"next_event_seq", s.next_event_seq},
          {"influencers_injected", s.influencers_injected}};
}

WorldState rehydrate(const json& j) {
  try {
    if (j.at("schema").get<int>() != kEventSchemaVersion) throw ConfigError("snapshot schema version mismatch");
    WorldState s;
    s.config = config_from_json(j.at("config"));
    s.seed = j.at("seed").get<std::uint64_t>();
    s.run_id = j.at("run_id").get<std::string>();
    for (const auto& g : j.at("catalog")) s.catalog.push_back(good_from_snapshot(g));
    for (const auto& a : j.at("agents")) s.agents.push_back(agent_from_json(a));
    for (const auto& x : j.at("sellers")) s.sellers.push_back(seller_from_json(x));
    s.schedule = schedule_from_json(j.at("schedule"));
    s.influencer_schedule = schedule_from_json(j.at("influencer_schedule"));
    for (const auto& sc : j.at("scenarios")) s.scenarios.push_back(scenario_from_json(sc));
    s.locations = j.at("locations").get<std::vector<std::string>>();
    s.next_day = j.at("next_day").get<int>();
    s.global_round = j.at("global_round").get<int>();
    s.last_day = j.at("last_day").get<int>();
    s.world_rng = SeedStream(j.at("world_rng").at(0).get<std::uint64_t>(), j.at("world_rng").at(1).get<std::uint64_t>());
    s.next_event_seq = j.at("next_event_seq").get<std::uint64_t>();
    s.influencers_injected = j.at("influencers_injected").get<bool>();
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      if (raw(s.agents[i].id) != i) throw ConfigError("snapshot agents out of order");
    }
    for (std::size_t i = 0; i < s.sellers.size(); ++i) {
      if (raw(s.sellers[i].seller_id) != i) throw ConfigError("snapshot sellers out of order");
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed snapshot: ") + e.what());
  }
}

void write_snapshot(const WorldState& state, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << snapshot_json(state).dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

WorldState read_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot " + file.string());
  try {
    return rehydrate(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(WorldState state, TextBackend& backend, const PromptLibrary& prompts)
    : state_(std::move(state)), backend_(backend), prompts_(prompts) {
  for (const auto& a : state_.agents) memory_cursors_.push_back(a.memory.size());
  day_ = state_.next_day;
}

WorldState Simulation::init_world(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  WorldState s;
  s.config = config;
  s.seed = seed;
  const auto& dir = config.data_dir.empty() ? default_data_dir() : config.data_dir;

  if (!config.catalog_files.empty()) {
    for (const auto& f : config.catalog_files) {
      auto more = load_goods_file(f);
      s.catalog.insert(s.catalog.end(), more.begin(), more.end());
    }
    validate_catalog(s.catalog);
  } else {
    s.catalog = build_catalog({config.synthetic_goods ? Pack::Synthetic : Pack::Real}, dir);
  }
  if (config.inventory_override) {
    for (auto& g : s.catalog) g.initial_inventory = *config.inventory_override;
  }

  const auto personas = load_personas(config.persona_file ? *config.persona_file : persona_path(dir, config.population));
  s.agents = init_population(personas, config.population, config.n_agents, config.wealth, seed, s.catalog);

  if (config.market) {
    for (const auto& g : s.catalog) {
      for (int k = 0; k < config.sellers_per_good; ++k) {
        s.sellers.push_back(SellerState{SellerId{static_cast<std::uint32_t>(s.sellers.size())}, g.id, g.base_price,
                                        g.base_price, g.initial_inventory, Money{}, config.fixed_price});
      }
    }
  }
  if (config.social) {
    s.schedule = schedule_pairings(s.agents, config.n_days);
    s.locations = load_locations(dir);
  }
  if (config.scenario_domain) s.scenarios = load_library(*config.scenario_domain, dir);

  s.world_rng = SeedStream::derive(seed, static_cast<std::uint64_t>(StreamDomain::World), 0);
  s.last_day = config.n_days;
  s.run_id = "run-" + config_hash(config).substr(0, 12) + "-" + std::to_string(seed);
  return s;
}

Mind Simulation::mind() {
  return Mind{backend_, prompts_, [this](const AgentState& a, const Exchange& ex) { on_exchange(a, ex); },
              state_.config.cognition};
}

void Simulation::emit(int day, Phase phase, std::string kind, json payload) {
  EventRecord r;
  r.run_id = state_.run_id;
  r.seed = state_.seed;
  r.seq = state_.next_event_seq++;
  r.day = day;
  r.phase = phase;
  r.kind = std::move(kind);
  r.payload = std::move(payload);
  log_.append(std::move(r));
}

void Simulation::flush_memories() {
  memory_cursors_.resize(state_.agents.size(), 0);
  for (std::size_t i = 0; i < state_.agents.size(); ++i) {
    const auto records = state_.agents[i].memory.records();
    for (; memory_cursors_[i] < records.size(); ++memory_cursors_[i]) {
      const auto& r = records[memory_cursors_[i]];
      emit("memory", {{"agent", i},
                      {"kind", std::string(to_string(r.kind))},
                      {"text", r.text},
                      {"tags", r.tags},
                      {"sequence", r.timestamp.sequence}});
    }
  }
}

void Simulation::on_exchange(const AgentState& agent, const Exchange& ex) {
  json j{{"agent", raw(agent.id)},
         {"purpose", std::string(to_string(ex.purpose))},
         {"template", ex.template_name},
         {"response", ex.response},
         {"rejected", ex.rejected},
         {"fallback", ex.fallback},
         {"reprompt", ex.reprompt}};
  if (!ex.template_name.empty() && !ex.fallback) j["template_sha256"] = prompts_.get(ex.template_name).sha256;
  if (!ex.fallback) {
    if (state_.config.prompt_logging == PromptLogging::Verbatim) j["prompt"] = ex.prompt;
    else j["prompt_sha256"] = sha256_hex(ex.prompt);
  }
  if (ex.choice_set) j["choice_set"] = *ex.choice_set;
  if (ex.chosen) j["chosen"] = *ex.chosen;
  emit("exchange", std::move(j));
}

void Simulation::begin() {
  day_ = 0;
  phase_ = Phase::Init;
  json catalog = json::array();
  for (const auto& g : state_.catalog) catalog.push_back(good_to_json(g));
  json agents = json::array();
  for (const auto& a : state_.agents) {
    agents.push_back({{"id", raw(a.id)},
                      {"name", a.persona.name},
                      {"sex", std::string(to_string(a.persona.sex))},
                      {"occupation", a.persona.occupation},
                      {"population", std::string(to_string(a.persona.population))},
                      {"cash", a.cash.cents()},
                      {"inventory", inventory_json(a)},
                      {"influencer", a.influencer}});
  }
  json sellers = json::array();
  for (const auto& s : state_.sellers) sellers.push_back(seller_to_json(s));
  json scenarios = json::array();
  for (const auto& sc : state_.scenarios) scenarios.push_back(sc.scenario_id);
  emit("run_header", {{"schema", kEventSchemaVersion},
                      {"config", to_json(state_.config)},
                      {"config_hash", config_hash(state_.config)},
                      {"backend", backend_.name()},
                      {"template_hashes", prompts_.hashes()},
                      {"catalog", catalog},
                      {"agents", agents},
                      {"sellers", sellers},
                      {"schedule", schedule_to_json(state_.schedule)},
                      {"scenarios", scenarios},
                      {"version", STATUSARENA_VERSION}});

  if (state_.config.scenario_domain && state_.config.generate_scenarios) {
    const auto library = state_.scenarios;
    for (std::size_t i = 0; i < library.size(); ++i) {
      const auto seed = state_.world_rng.next();
      try {
        auto cfg = generate_scenario(*state_.config.scenario_domain, library, backend_, prompts_, seed);
        emit("scenario_generated", {{"scenario", to_json(cfg)}});
        state_.scenarios.push_back(std::move(cfg));
      } catch (const GenerationError& e) {
        emit("scenario_generation_failed", {{"error", e.what()}});
      }
    }
  }
  flush_memories();
}

std::vector<OfferView> Simulation::offers() const {
  std::vector<OfferView> out;
  for (const auto& g : state_.catalog) {
    std::optional<Money> best;
    for (const auto& s : state_.sellers) {
      if (s.good_id != g.id || s.inventory <= 0) continue;
      if (!best || s.current_ask < *best) best = s.current_ask;
    }
    if (best) out.push_back(OfferView{&g, *best});
  }
  return out;
}

void Simulation::market_round(int day) {
  phase_ = Phase::Market;
  const int round = state_.global_round;
  if (round > 0 && round % state_.config.restock_interval() == 0) {
    json restocked = json::array();
    for (auto& s : state_.sellers) {
      const int target = state_.good(s.good_id).initial_inventory;
      if (s.inventory < target) {
        restocked.push_back({{"seller", raw(s.seller_id)}, {"added", target - s.inventory}});
        s.inventory = target;
      }
    }
    emit(day, Phase::Market, "restock", {{"round", round}, {"sellers", restocked}});
  }

  const auto view = offers();
  std::map<GoodId, std::vector<Order>> books;
  json bids = json::array();
  json asks = json::array();
  int arrival = 0;
  auto m = mind();
  for (auto& a : state_.agents) {
    if (a.influencer) continue;
    const auto intents = consumer_evaluate(a, view, m, &state_.catalog);
    for (const auto& b : intents) {
      books[b.good_id].push_back(
          Order{raw(a.id), b.good_id, Side::Bid, b.willingness_to_pay, b.quantity, round, arrival++});
      bids.push_back({{"agent", raw(a.id)}, {"good", b.good_id}, {"price", b.willingness_to_pay.cents()},
                      {"quantity", b.quantity}});
    }
  }
  for (const auto& s : state_.sellers) {
    if (s.inventory <= 0) continue;
    books[s.good_id].push_back(
        Order{raw(s.seller_id), s.good_id, Side::Ask, s.current_ask, s.inventory, round, arrival++});
    asks.push_back({{"seller", raw(s.seller_id)}, {"good", s.good_id}, {"price", s.current_ask.cents()},
                    {"quantity", s.inventory}});
  }
  emit(day, Phase::Market, "orders", {{"round", round}, {"bids", bids}, {"asks", asks}});

  for (const auto& g : state_.catalog) {
    auto it = books.find(g.id);
    ClearingResult result;
    if (it != books.end()) {
      result = clear_round(it->second);
    } else {
      result.good_id = g.id;
      result.round_index = round;
    }
    const auto before = market_totals(state_.agents, state_.sellers);
    const auto report = settle(state_.agents, state_.sellers, result);
    const auto after = market_totals(state_.agents, state_.sellers);

    json trades = json::array();
    for (const auto& t : report.applied) {
      trades.push_back({{"buyer", raw(t.buyer)}, {"seller", raw(t.seller)}, {"quantity", t.quantity},
                        {"price", t.price.cents()}});
      auto& buyer = state_.agents[raw(t.buyer)];
      buyer.memory.append(day, Phase::Market, MemoryKind::Market,
                          "I bought " + std::to_string(t.quantity) + " " + g.name + " for $" + t.price.str() + " each.",
                          {g.id});
    }
    json cancelled = json::array();
    for (const auto& t : report.cancelled) {
      cancelled.push_back({{"buyer", raw(t.buyer)}, {"seller", raw(t.seller)}, {"quantity", t.quantity},
                           {"price", t.price.cents()}});
    }
    json clearing{{"round", round},
                  {"good", g.id},
                  {"bid_units", result.bid_units},
                  {"ask_units", result.ask_units},
                  {"executed_volume", result.executed_volume},
                  {"trades", trades},
                  {"cancelled", cancelled}};
    clearing["clearing_price"] = result.clearing_price ? json(result.clearing_price->cents()) : json(nullptr);
    clearing["best_ask"] = result.best_ask ? json(result.best_ask->cents()) : json(nullptr);
    clearing["best_bid"] = result.best_bid ? json(result.best_bid->cents()) : json(nullptr);
    emit(day, Phase::Market, "clearing", std::move(clearing));
    if (!report.applied.empty() || !report.cancelled.empty()) {
      emit(day, Phase::Market, "settlement",
           {{"round", round}, {"good", g.id}, {"before", totals_to_json(before)}, {"after", totals_to_json(after)}});
    }

    for (auto& s : state_.sellers) {
      if (s.good_id != g.id) continue;
      // Each seller sees its own outcome: executed units are its own trades.
      ClearingResult own = result;
      own.executed_volume = 0;
      for (const auto& t : report.applied) {
        if (t.seller == s.seller_id) own.executed_volume += t.quantity;
      }
      const Money old_ask = s.current_ask;
      s = update_seller_ask(s, own, state_.config.ask_policy);
      if (s.current_ask != old_ask) {
        emit(day, Phase::Market, "ask_update",
             {{"round", round}, {"seller", raw(s.seller_id)}, {"good", s.good_id}, {"old", old_ask.cents()},
              {"new", s.current_ask.cents()}});
      }
    }
  }
  ++state_.global_round;
  flush_memories();
}

void Simulation::daily_life(int day) {
  phase_ = Phase::DailyLife;
  for (auto& a : state_.agents) {
    if (a.influencer) continue;
    if (state_.config.daily_life_events > 0) {
      std::map<std::string, std::string> vars{{"persona", persona_text(a)},
                                              {"count", std::to_string(state_.config.daily_life_events)}};
      BackendRequest req;
      req.purpose = RequestPurpose::DailyLife;
      req.prompt = prompts_.render("daily_life", vars);
      req.max_length = 512;
      req.seed = a.rng.next();
      req.hints = DailyLifeHints{a.persona.name, a.persona.occupation, state_.config.daily_life_events};
      const auto resp = backend_.complete(req);
      on_exchange(a, Exchange{RequestPurpose::DailyLife, "daily_life", req.prompt, resp.text, {}, {}});
      json events = json::array();
      int n = 0;
      for (auto line : split(resp.text, '\n')) {
        line = trim(line);
        if (line.empty() || n >= state_.config.daily_life_events) continue;
        a.memory.append(day, Phase::DailyLife, MemoryKind::Observation, std::string(line), {"daily_life"});
        events.push_back(std::string(line));
        ++n;
      }
      emit(day, Phase::DailyLife, "daily_life", {{"agent", raw(a.id)}, {"events", events}});
    }

    const Good* food = nullptr;
    for (const auto& [id, units] : a.inventory) {
      if (units <= 0) continue;
      const Good* g = find_good(state_.catalog, id);
      if (g && g->category == Category::Food) {
        food = g;
        break;
      }
    }
    if (food) {
      if (--a.inventory[food->id] == 0) a.inventory.erase(food->id);
      a.memory.append(day, Phase::DailyLife, MemoryKind::Observation, "I ate a " + food->name + ".", {"food"});
      emit(day, Phase::DailyLife, "consumption", {{"agent", raw(a.id)}, {"good", food->id}});
    } else {
      a.memory.append(day, Phase::DailyLife, MemoryKind::Observation,
                      "I am starving and sick from the lack of food.", {"food", "starving"});
      emit(day, Phase::DailyLife, "starvation", {{"agent", raw(a.id)}});
    }
  }
  flush_memories();
}

void Simulation::scenario_phase(int day) {
  phase_ = Phase::Social;
  if (state_.scenarios.empty()) return;
  auto m = mind();
  std::vector<std::optional<ScenarioOutcome>> outcomes(state_.agents.size());
  for (auto& a : state_.agents) {
    if (a.influencer) continue;
    const auto& cfg = state_.scenarios[a.rng.next() % state_.scenarios.size()];
    auto outcome = resolve_scenario(a, cfg, day, m);
    json effects = json::array();
    for (const auto& e : outcome.effects) {
      effects.push_back({{"text", e.text}, {"visibility", e.visibility == Visibility::Public ? "Public" : "Private"}});
    }
    emit("scenario", {{"agent", raw(a.id)},
                      {"scenario_id", outcome.scenario_id},
                      {"domain", std::string(to_string(outcome.domain))},
                      {"option", outcome.option_id},
                      {"signal_class", std::string(to_string(cfg.action(outcome.option_id)->signal_class))},
                      {"effects", effects},
                      {"fallback", outcome.fallback},
                      {"cash", a.cash.cents()}});
    outcomes[raw(a.id)] = std::move(outcome);
  }
  flush_memories();
  if (!state_.config.social || day >= static_cast<int>(state_.schedule.days.size())) return;

  std::vector<std::vector<std::string>> seen(state_.agents.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i]) continue;
    std::optional<AgentId> partner;
    for (const auto& [x, y] : state_.schedule.days[day]) {
      if (raw(x) == i) partner = y;
      if (raw(y) == i) partner = x;
    }
    if (!partner) continue;
    auto& actor = state_.agents[i];
    auto& other = state_.agents[raw(*partner)];
    broadcast_public_effects(*outcomes[i], actor, other, day);
    json texts = json::array();
    for (const auto& e : outcomes[i]->effects) {
      if (e.visibility != Visibility::Public) continue;
      texts.push_back(e.text);
      seen[raw(*partner)].push_back(actor.persona.name + ": " + e.text);
    }
    if (!texts.empty()) emit("broadcast", {{"actor", i}, {"partner", raw(*partner)}, {"effects", texts}});
  }
  flush_memories();
  pending_effects_ = std::move(seen);
}

void Simulation::run_date(AgentState& a, AgentState& b, int day, const std::vector<std::string>& effects_a,
                          const std::vector<std::string>& effects_b) {
  auto engine = state_.world_rng.engine();
  auto openings = open_date(a, b, state_.locations, state_.catalog, day, engine);
  flush_memories();
  ConversationSetup setup;
  setup.turn_budget = state_.config.turn_budget;
  setup.location = openings.first.location;
  setup.openings = openings;
  if (state_.config.public_effects_in_opening) setup.public_effects = {effects_a, effects_b};
  auto m = mind();
  const auto transcript = run_conversation(a, b, setup, state_.catalog, day, m);
  if (!transcript.turns.empty()) {
    reflect(a, transcript.turns, b, state_.catalog, day, m);
    reflect(b, transcript.turns, a, state_.catalog, day, m);
  }
  json turns = json::array();
  for (const auto& u : transcript.turns) turns.push_back({{"speaker", raw(u.speaker)}, {"text", u.text}});
  json seen = json::array();
  for (const auto* o : {&openings.first, &openings.second}) {
    seen.push_back(o->seen_good ? json(*o->seen_good) : json(nullptr));
  }
  emit("date", {{"a", raw(a.id)},
                {"b", raw(b.id)},
                {"location", transcript.location},
                {"openings", {openings.first.text, openings.second.text}},
                {"seen_goods", seen},
                {"turns", turns},
                {"tags", transcript.tags}});
  flush_memories();
}

void Simulation::social_phase(int day) {
  phase_ = Phase::Social;
  std::vector<Dyad> dyads;
  if (day < static_cast<int>(state_.schedule.days.size())) dyads = state_.schedule.days[day];
  if (day < static_cast<int>(state_.influencer_schedule.days.size())) {
    const auto& extra = state_.influencer_schedule.days[day];
    if (state_.config.influencer && !state_.config.influencer->additional_dates) {
      std::set<std::uint32_t> busy;
      for (const auto& [x, y] : extra) {
        busy.insert(raw(x));
        busy.insert(raw(y));
      }
      std::erase_if(dyads, [&](const Dyad& d) { return busy.contains(raw(d.first)) || busy.contains(raw(d.second)); });
    }
    dyads.insert(dyads.end(), extra.begin(), extra.end());
  }
  static const std::vector<std::string> kNone;
  for (const auto& [x, y] : dyads) {
    auto& a = state_.agents[raw(x)];
    auto& b = state_.agents[raw(y)];
    const auto& ea = raw(x) < pending_effects_.size() ? pending_effects_[raw(x)] : kNone;
    const auto& eb = raw(y) < pending_effects_.size() ? pending_effects_[raw(y)] : kNone;
    run_date(a, b, day, ea, eb);
  }
  pending_effects_.clear();
}

void Simulation::run_day() {
  const int day = state_.next_day;
  if (day >= state_.last_day) throw ContractViolation("run_day past the end of the run window");
  day_ = day;
  const auto& c = state_.config;
  if (c.market) {
    if (c.single_market_block() && !state_.influencers_injected) {
      if (day == 0) {
        for (int r = 0; r < c.total_market_rounds(); ++r) market_round(day);
      }
    } else {
      for (int r = 0; r < c.market_rounds_per_day; ++r) market_round(day);
    }
  }
  if (c.daily_life) daily_life(day);
  if (c.scenario_domain) scenario_phase(day);
  if (c.social) social_phase(day);
  phase_ = Phase::Social;
  emit("day_end", {{"day", day}, {"global_round", state_.global_round}});
  state_.next_day = day + 1;
  day_ = state_.next_day;
}

void Simulation::inject_influencers(const InfluencerConfig& cfg) {
  if (state_.influencers_injected) throw ConfigError("influencers were already injected");
  if (cfg.pack != Pack::Hipster && cfg.pack != Pack::Streetwear) throw ConfigError("influencer.pack must be Hipster or Streetwear");
  for (const auto& g : state_.catalog) {
    if (g.pack == cfg.pack) throw ConfigError("pack " + std::string(to_string(cfg.pack)) + " goods are already in the catalog");
  }
  const auto& dir = state_.config.data_dir.empty() ? default_data_dir() : state_.config.data_dir;
  auto goods = load_pack(dir, cfg.pack);
  if (state_.config.inventory_override) {
    for (auto& g : goods) g.initial_inventory = *state_.config.inventory_override;
  }
  auto merged = state_.catalog;
  merged.insert(merged.end(), goods.begin(), goods.end());
  validate_catalog(merged);
  state_.catalog = std::move(merged);

  json new_sellers = json::array();
  if (state_.config.market) {
    for (const auto& g : goods) {
      for (int k = 0; k < state_.config.sellers_per_good; ++k) {
        state_.sellers.push_back(SellerState{SellerId{static_cast<std::uint32_t>(state_.sellers.size())}, g.id,
                                             g.base_price, g.base_price, g.initial_inventory, Money{},
                                             state_.config.fixed_price});
        new_sellers.push_back(seller_to_json(state_.sellers.back()));
      }
    }
  }

  std::vector<const Good*> visible;
  for (const auto& g : state_.catalog) {
    if (g.pack == cfg.pack && is_visible_good(g)) visible.push_back(&g);
  }
  std::vector<std::string> pack_names;
  for (const auto& g : goods) pack_names.push_back(g.name);

  json new_agents = json::array();
  const int day = state_.next_day;
  for (int i = 0; i < cfg.n_influencers; ++i) {
    AgentState a;
    a.id = AgentId{static_cast<std::uint32_t>(state_.agents.size())};
    const auto& entry = kInfluencerNames[i % std::size(kInfluencerNames)];
    a.persona.name = std::string(entry[0]) + (i >= static_cast<int>(std::size(kInfluencerNames)) ? " " + std::to_string(i) : "");
    // Alternate sexes so both groups have someone to meet.
    a.persona.sex = i % 2 == 0 ? Sex::F : Sex::M;
    a.persona.population = state_.config.population;
    a.persona.occupation = "content creator";
    a.persona.background = "A trend-setting influencer who praises " + join(pack_names, ", ") +
                           " and dismisses mainstream luxury brands as inauthentic.";
    a.influencer = true;
    a.influencer_pack = cfg.pack;
    a.rng = SeedStream::derive(state_.seed, static_cast<std::uint64_t>(StreamDomain::Agent), raw(a.id));
    if (!visible.empty()) a.inventory[visible[static_cast<std::size_t>(i) % visible.size()]->id] = 1;
    a.memory.append(day, Phase::Init, MemoryKind::Formative,
                    "I have built my following by showing people what authentic style looks like.");
    new_agents.push_back({{"id", raw(a.id)},
                          {"name", a.persona.name},
                          {"sex", std::string(to_string(a.persona.sex))},
                          {"occupation", a.persona.occupation},
                          {"population", std::string(to_string(a.persona.population))},
                          {"cash", a.cash.cents()},
                          {"inventory", inventory_json(a)},
                          {"influencer", true}});
    state_.agents.push_back(std::move(a));
  }

  state_.last_day = day + cfg.extension_days;
  if (state_.config.social && cfg.extension_days > 0) {
    state_.schedule = schedule_pairings(state_.agents, state_.last_day);
    state_.influencer_schedule = schedule_influencer_dates(state_.agents, day, cfg.extension_days);
  }
  state_.influencers_injected = true;

  json g = json::array();
  for (const auto& x : goods) g.push_back(good_to_json(x));
  day_ = day;
  phase_ = Phase::Init;
  emit("influencers_injected", {{"pack", std::string(to_string(cfg.pack))},
                                {"goods", g},
                                {"sellers", new_sellers},
                                {"agents", new_agents},
                                {"last_day", state_.last_day},
                                {"schedule", schedule_to_json(state_.schedule)},
                                {"influencer_schedule", schedule_to_json(state_.influencer_schedule)}});
  flush_memories();
}

bool Simulation::run_to_end(const std::optional<std::filesystem::path>& snapshot_dir, std::optional<int> stop_after_day) {
  // The last day-boundary state, kept only when snapshots are requested.
  json boundary;
  if (snapshot_dir) boundary = snapshot_json(state_);
  try {
    while (true) {
      const auto& inf = state_.config.influencer;
      if (inf && !state_.influencers_injected && state_.next_day == inf->start_day - 1 &&
          (!stop_after_day || state_.next_day < *stop_after_day)) {
        inject_influencers(*inf);
        if (snapshot_dir) boundary = snapshot_json(state_);
      }
      if (state_.next_day >= state_.last_day) return true;
      if (stop_after_day && state_.next_day >= *stop_after_day) return false;
      run_day();
      if (snapshot_dir) {
        boundary = snapshot_json(state_);
        char name[32];
        std::snprintf(name, sizeof name, "day_%03d.json", state_.next_day);
        std::filesystem::create_directories(*snapshot_dir);
        std::ofstream out(*snapshot_dir / name, std::ios::binary | std::ios::trunc);
        out << boundary.dump() << '\n';
      }
    }
  } catch (const BackendError&) {
    if (snapshot_dir) {
      std::filesystem::create_directories(*snapshot_dir);
      std::ofstream out(*snapshot_dir / "abort.json", std::ios::binary | std::ios::trunc);
      out << boundary.dump() << '\n';
    }
    throw;
  }
}

void Simulation::finish() {
  phase_ = Phase::Social;
  day_ = state_.next_day > 0 ? state_.next_day - 1 : 0;
  json agents = json::array();
  for (const auto& a : state_.agents) {
    agents.push_back({{"id", raw(a.id)}, {"cash", a.cash.cents()}, {"inventory", inventory_json(a)}});
  }
  json sellers = json::array();
  for (const auto& s : state_.sellers) sellers.push_back(seller_to_json(s));
  emit("run_end", {{"agents", agents}, {"sellers", sellers}, {"days", state_.next_day},
                   {"market_rounds", state_.global_round}});
}

EventLog run_experiment(const ExperimentConfig& config, std::uint64_t seed, TextBackend& backend,
                        const PromptLibrary& prompts, const RunOptions& options) {
  Simulation sim(Simulation::init_world(config, seed), backend, prompts);
  sim.begin();
  if (sim.run_to_end(options.snapshot_dir, options.stop_after_day)) sim.finish();
  return sim.take_log();
}

EventLog resume_experiment(WorldState state, TextBackend& backend, const PromptLibrary& prompts,
                           const std::optional<InfluencerConfig>& inject) {
  Simulation sim(std::move(state), backend, prompts);
  if (inject) sim.inject_influencers(*inject);
  if (sim.run_to_end()) sim.finish();
  return sim.take_log();
}

std::unique_ptr<TextBackend> make_backend(const ExperimentConfig& config) {
  if (config.backend == BackendKind::Stub) return std::make_unique<StubBackend>(config.stub);
  return std::make_unique<HttpBackend>(HttpBackend::options_from_environment());
}

std::vector<SeedOutcome> run_batch(const ExperimentConfig& config, const BackendFactory& factory,
                                   const PromptLibrary& prompts, const BatchOptions& options) {
  validate(config);
  const int n = config.n_seeds;
  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(n));

  const auto write_manifest = [&](bool complete) {
    if (!options.out_dir) return;
    json seeds = json::array();
    for (int i = 0; i < n; ++i) {
      const auto& o = outcomes[i];
      json e{{"seed", i}, {"ok", o.ok}, {"log_file", seed_file_name(static_cast<std::uint64_t>(i))}};
      if (!o.error.empty()) e["error"] = o.error;
      seeds.push_back(e);
    }
    const json manifest{{"complete", complete},
                        {"config", to_json(config)},
                        {"config_hash", config_hash(config)},
                        {"seeds", seeds},
                        {"template_hashes", prompts.hashes()},
                        {"version", STATUSARENA_VERSION},
                        {"schema", kEventSchemaVersion}};
    std::filesystem::create_directories(*options.out_dir);
    std::ofstream out(*options.out_dir / "manifest.json", std::ios::trunc);
    out << manifest.dump(2) << '\n';
  };
  write_manifest(false);

  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      auto& o = outcomes[i];
      o.seed = static_cast<std::uint64_t>(i);
      try {
        auto backend = factory();
        RunOptions ro;
        if (options.out_dir && options.snapshots) {
          ro.snapshot_dir = *options.out_dir / ("snapshots_seed_" + std::to_string(i));
        }
        auto log = run_experiment(config, o.seed, *backend, prompts, ro);
        if (options.out_dir) {
          o.log_file = *options.out_dir / seed_file_name(o.seed);
          log.write(o.log_file);
        }
        if (options.keep_logs_in_memory) o.log = std::move(log);
        o.ok = true;
      } catch (const BackendError& e) {
        o.ok = false;
        o.error = std::string("backend: ") + e.what();
      } catch (const ConfigError& e) {
        o.ok = false;
        o.error = std::string("config: ") + e.what();
      } catch (const std::exception& e) {
        o.ok = false;
        o.error = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min(options.threads, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  write_manifest(true);
  return outcomes;
}

}  // namespace statusarena
