#include <doctest.h>

#include <random>
#include <set>

#include "statusarena/catalog.hpp"
#include "statusarena/error.hpp"
#include "statusarena/social.hpp"
#include "statusarena/text.hpp"
#include "support.hpp"

using namespace statusarena;

TEST_CASE("round-robin dating schedule") {
  const auto agents = testing::make_couples(25);
  const auto s = schedule_pairings(agents, 5);
  CHECK(s.total_dyads() == 125);
  CHECK_FALSE(check_schedule(s, agents));
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& day : s.days) {
    for (const auto& [m, f] : day) seen.insert(std::minmax(raw(m), raw(f)));
  }
  CHECK(seen.size() == 125);

  CHECK_THROWS_AS(schedule_pairings(testing::make_couples(3), 4), ConfigError);
  auto lopsided = testing::make_couples(3);
  lopsided.pop_back();
  CHECK_THROWS_AS(schedule_pairings(lopsided, 2), ConfigError);
}

TEST_CASE("check_schedule catches violations") {
  const auto agents = testing::make_couples(2);
  PairingSchedule repeat{{{{AgentId{0}, AgentId{2}}}, {{AgentId{2}, AgentId{0}}}}};
  CHECK(check_schedule(repeat, agents));
  PairingSchedule same_sex{{{{AgentId{0}, AgentId{1}}}}};
  CHECK(check_schedule(same_sex, agents));
  PairingSchedule twice{{{{AgentId{0}, AgentId{2}}, {AgentId{0}, AgentId{3}}}}};
  CHECK(check_schedule(twice, agents));
}

TEST_CASE("influencer dates reach every regular agent") {
  auto agents = testing::make_couples(5);
  for (std::uint32_t i = 0; i < 4; ++i) {
    auto inf = testing::make_agent(10 + i, i % 2 ? Sex::F : Sex::M);
    inf.influencer = true;
    agents.push_back(inf);
  }
  const auto s = schedule_influencer_dates(agents, 5, 3);
  std::set<std::uint32_t> met;
  for (std::size_t d = 0; d < s.days.size(); ++d) {
    for (const auto& [a, b] : s.days[d]) {
      CHECK(d >= 5);
      met.insert(raw(a));
      met.insert(raw(b));
    }
  }
  for (std::uint32_t i = 0; i < 10; ++i) CHECK(met.contains(i));
}

TEST_CASE("dates: attire, turns and tagging") {
  const auto catalog = build_catalog({Pack::Real}, default_data_dir());
  auto a = testing::make_agent(0);
  auto b = testing::make_agent(1, Sex::F);
  b.inventory["armani_suit"] = 1;
  b.inventory["bag_of_rice"] = 2;
  std::mt19937_64 rng(4);
  const std::vector<std::string> places{"a park"};
  const auto [seen_by_a, seen_by_b] = open_date(a, b, places, catalog, 1, rng);
  CHECK(seen_by_a.text == "Agent 1 is wearing a Armani Suit.");
  CHECK(seen_by_a.seen_good == "armani_suit");
  CHECK(seen_by_b.text == "Agent 0 is wearing a plain outfit.");
  CHECK(a.memory.signal_count("armani_suit") == 1);

  StubParams chatty;
  chatty.mention_probability = 1.0;
  StubBackend stub(chatty);
  Mind mind{stub, testing::prompts(), {}, {}};
  ConversationSetup setup;
  setup.turn_budget = 80;
  setup.location = "a park";
  setup.openings = {seen_by_a, seen_by_b};
  const auto t = run_conversation(a, b, setup, catalog, 1, mind);
  REQUIRE(t.turns.size() == 80);
  for (std::size_t i = 0; i < t.turns.size(); ++i) CHECK(t.turns[i].speaker == (i % 2 ? b.id : a.id));
  CHECK(contains_lower(to_lower(t.turns[0].text), "armani suit"));
  CHECK(t.tags.contains("armani_suit"));

  // independent scan: a tag appears iff its name occurs in some utterance
  for (const auto& g : catalog) {
    bool named = false;
    for (const auto& u : t.turns) named = named || contains_lower(to_lower(u.text), to_lower(g.name));
    CHECK_MESSAGE(named == t.tags.contains(g.id), g.id);
  }

  setup.turn_budget = 0;
  CHECK(run_conversation(a, b, setup, catalog, 2, mind).turns.empty());
}
