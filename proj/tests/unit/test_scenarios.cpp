#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "statusarena/error.hpp"
#include "statusarena/scenarios.hpp"
#include "support.hpp"

using namespace statusarena;

namespace {

bool has_text(const MemoryStream& m, const std::string& needle) {
  return std::any_of(m.records().begin(), m.records().end(),
                     [&](const MemoryRecord& r) { return r.text.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("shipped scenario libraries") {
  const auto dir = default_data_dir();
  for (auto d : {ScenarioDomain::Political, ScenarioDomain::Charity, ScenarioDomain::Banner, ScenarioDomain::Coffee}) {
    const auto lib = load_library(d, dir);
    CHECK(lib.size() >= 1);
    for (const auto& c : lib) CHECK_MESSAGE(validate_scenario(c).empty(), c.scenario_id);
  }
  const auto political = load_library(ScenarioDomain::Political, dir);
  CHECK(std::any_of(political.begin(), political.end(), [](const ScenarioConfig& c) {
    return c.scenario_id.find("gaza") != std::string::npos && c.actions.size() == 3;
  }));
  for (const auto& c : load_library(ScenarioDomain::Banner, dir)) {
    CHECK(c.actions.size() == 5);
    for (const auto& a : c.actions) {
      const auto& fx = c.effects.at(a.option_id);
      CHECK(std::any_of(fx.begin(), fx.end(), [](const ScenarioEffect& e) { return e.visibility == Visibility::Public; }));
    }
  }
  for (const auto& c : load_library(ScenarioDomain::Coffee, dir)) {
    const auto& fx = c.effects.at("oat_milk");
    CHECK(std::any_of(fx.begin(), fx.end(), [](const ScenarioEffect& e) {
      return e.visibility == Visibility::Public && e.text.find("Oat milk team!") != std::string::npos;
    }));
  }
  CHECK_THROWS_AS(load_library(ScenarioDomain::Custom, dir), ConfigError);
}

TEST_CASE("validator flags schema violations") {
  auto c = load_library(ScenarioDomain::Political, default_data_dir()).front();
  auto one = c;
  one.actions.resize(1);
  CHECK_FALSE(validate_scenario(one).empty());
  auto dup = c;
  dup.actions[1].option_id = dup.actions[0].option_id;
  CHECK_FALSE(validate_scenario(dup).empty());
  auto silent = c;
  for (auto& [id, fx] : silent.effects) {
    for (auto& e : fx) e.visibility = Visibility::Private;
  }
  CHECK_FALSE(validate_scenario(silent).empty());
  auto round = scenario_from_json(to_json(c));
  CHECK(validate_scenario(round).empty());
  CHECK(to_json(round) == to_json(c));
}

TEST_CASE("generated political configurations") {
  const auto lib = load_library(ScenarioDomain::Political, default_data_dir());
  StubBackend stub;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto c = generate_scenario(ScenarioDomain::Political, lib, stub, testing::prompts(), s);
    CHECK(validate_scenario(c).empty());
    CHECK(std::count_if(c.actions.begin(), c.actions.end(),
                        [](const ScenarioAction& a) { return a.signal_class == SignalClass::StatusSignal; }) == 1);
  }
  testing::ScriptedBackend broken({R"({"scenario_id":"x","domain":"Political","private_observation":"o",)"
                                   R"("actions":[{"option_id":"a","text":"t","signal_class":"StatusSignal"}],)"
                                   R"("effects":{"a":[{"text":"e","visibility":"Public"}]}})"});
  CHECK_THROWS_AS(generate_scenario(ScenarioDomain::Political, lib, broken, testing::prompts(), 1), GenerationError);
  CHECK(broken.requests.size() == 3);
}

TEST_CASE("scenario choice under precedent") {
  const auto lib = load_library(ScenarioDomain::Political, default_data_dir());
  const auto& cfg = lib.front();
  std::string status_id;
  for (const auto& a : cfg.actions) {
    if (a.signal_class == SignalClass::StatusSignal) status_id = a.option_id;
  }
  StubBackend stub;
  Mind mind{stub, testing::prompts(), {}, {}};

  auto fresh = testing::make_agent(0);
  StubParams g;
  g.mode = ChoiceMode::Greedy;
  StubBackend greedy(g);
  Mind gm{greedy, testing::prompts(), {}, {}};
  const auto r0 = resolve_scenario(fresh, cfg, 1, gm);
  CHECK(cfg.action(r0.option_id)->signal_class == SignalClass::NoAction);

  int hits = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    auto a = testing::make_agent(static_cast<std::uint32_t>(i));
    a.rng = SeedStream(77, static_cast<std::uint64_t>(i) * 1000);
    for (int k = 0; k < 5; ++k) {
      a.memory.append(0, Phase::Social, MemoryKind::PublicEffect, "someone reposted",
                      {option_tag(ScenarioDomain::Political, status_id)});
    }
    hits += resolve_scenario(a, cfg, 1, mind).option_id == status_id;
  }
  CHECK(std::abs(hits / double(n) - 0.7311) < 0.03);
}

TEST_CASE("costly options are filtered when unaffordable") {
  const auto lib = load_library(ScenarioDomain::Charity, default_data_dir());
  const auto& cfg = lib.front();
  StubBackend stub;
  Mind mind{stub, testing::prompts(), {}, {}};
  for (int i = 0; i < 50; ++i) {
    auto a = testing::make_agent(static_cast<std::uint32_t>(i));
    a.cash = Money::from_cents(1);
    const auto r = resolve_scenario(a, cfg, 1, mind);
    const auto* act = cfg.action(r.option_id);
    CHECK((!act->cost || *act->cost <= Money::from_cents(1)));
  }
}

TEST_CASE("public effects reach only the actor and the date") {
  const auto lib = load_library(ScenarioDomain::Political, default_data_dir());
  const auto& cfg = lib.front();
  ScenarioOutcome out;
  out.agent = AgentId{0};
  out.domain = cfg.domain;
  out.scenario_id = cfg.scenario_id;
  out.option_id = "outrage";
  out.effects = {{"A childhood friend unfollowed them.", Visibility::Public}, {"They felt uneasy.", Visibility::Private}};
  auto actor = testing::make_agent(0);
  auto partner = testing::make_agent(1, Sex::F);
  auto bystander = testing::make_agent(2);
  broadcast_public_effects(out, actor, partner, 1);
  CHECK(has_text(partner.memory, "A childhood friend unfollowed them."));
  CHECK(has_text(actor.memory, "A childhood friend unfollowed them."));
  CHECK_FALSE(has_text(partner.memory, "They felt uneasy."));
  CHECK(bystander.memory.empty());
  CHECK(partner.memory.signal_count(option_tag(ScenarioDomain::Political, "outrage")) == 1);

  out.option_id = "nothing";
  out.effects.clear();
  const auto before = partner.memory.size();
  broadcast_public_effects(out, actor, partner, 2);
  CHECK(partner.memory.size() == before);
}
