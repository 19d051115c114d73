#include <doctest.h>

#include <cmath>
#include <random>

#include "statusarena/catalog.hpp"
#include "statusarena/cognition.hpp"
#include "statusarena/error.hpp"
#include "support.hpp"

using namespace statusarena;

TEST_CASE("signal probability") {
  CHECK(stub_signal_probability(0, 0.0, 0.5) == doctest::Approx(0.5));
  CHECK(stub_signal_probability(2, -1.0, 0.5) == doctest::Approx(0.5));
  CHECK(stub_signal_probability(4, -1.0, 0.5) == doctest::Approx(0.7310586));
  std::mt19937_64 rng(1);
  // beta0 + beta1*m stays below ~36, where sigma rounds to 1.0 in double
  std::uniform_real_distribution<double> b0(-5, 5), b1(1e-3, 2);
  std::uniform_int_distribution<int> m(0, 12);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = b0(rng), x1 = b1(rng);
    const int k = m(rng);
    CHECK(stub_signal_probability(k + 1, x0, x1) > stub_signal_probability(k, x0, x1));
  }
}

TEST_CASE("stub choice frequencies follow the closed form") {
  StubBackend stub;
  ChoiceHints h;
  h.options = {{"outrage", SignalClass::StatusSignal, 5, 0.0},
               {"innocuous", SignalClass::Neutral, 0, 0.0},
               {"nothing", SignalClass::NoAction, 0, 0.0}};
  int hits = 0;
  for (std::uint64_t s = 0; s < 4000; ++s) hits += stub.choose(h, s) == "outrage";
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(std::abs(hits / 4000.0 - p) < 3 * std::sqrt(p * (1 - p) / 4000));

  StubParams greedy;
  greedy.mode = ChoiceMode::Greedy;
  CHECK(StubBackend(greedy).choose(h, 1) == "outrage");
  h.options[0].signal_memories = 0;
  CHECK(StubBackend(greedy).choose(h, 1) == "nothing");
}

TEST_CASE("decide reprompts once, then falls back to NoAction") {
  auto agent = testing::make_agent(0);
  DecisionContext ctx;
  ctx.situation_text = "A friend asks for a donation.";
  ctx.options = {{"give", "Give publicly", SignalClass::StatusSignal, "t", 0.0},
                 {"refuse", "Refuse", SignalClass::NoAction, "", 0.0}};
  std::vector<Exchange> seen;
  testing::ScriptedBackend backend({"fine", "fine", "fine", "maybe later", "no idea"});
  Mind mind{backend, testing::prompts(), [&](const AgentState&, const Exchange& e) { seen.push_back(e); }, {}};
  const auto r = decide(agent, ctx, mind);
  CHECK(r.fallback);
  CHECK(r.option_id == "refuse");
  int choice_calls = 0;
  for (const auto& q : backend.requests) {
    if (q.purpose != RequestPurpose::Choice) continue;
    ++choice_calls;
    REQUIRE(q.choice_set);
    CHECK(q.choice_set->size() == 2);
  }
  CHECK(choice_calls == 2);
  for (const auto& e : seen) {
    if (e.purpose == RequestPurpose::Choice && !e.fallback && e.chosen) {
      CHECK(std::find(e.choice_set->begin(), e.choice_set->end(), *e.chosen) != e.choice_set->end());
    }
  }

  testing::ScriptedBackend ok({"a", "b", "c", "\"Give\"."});
  Mind m2{ok, testing::prompts(), {}, {}};
  const auto r2 = decide(agent, ctx, m2);
  CHECK_FALSE(r2.fallback);
  CHECK(r2.option_id == "give");

  DecisionContext empty;
  CHECK_THROWS_AS(decide(agent, empty, m2), ContractViolation);
  ctx.options.push_back(ctx.options.front());
  CHECK_THROWS_AS(validate(ctx), ContractViolation);
}

TEST_CASE("decide is deterministic under the stub") {
  DecisionContext ctx;
  ctx.situation_text = "s";
  ctx.options = {{"a", "A", SignalClass::StatusSignal, "ta", 0.0},
                 {"b", "B", SignalClass::Neutral, "tb", 0.0},
                 {"c", "C", SignalClass::NoAction, "", 0.0}};
  StubBackend stub;
  Mind mind{stub, testing::prompts(), {}, {}};
  for (std::uint32_t i = 0; i < 20; ++i) {
    auto x = testing::make_agent(i);
    auto y = testing::make_agent(i);
    CHECK(decide(x, ctx, mind).option_id == decide(y, ctx, mind).option_id);
  }
}

TEST_CASE("bid line parsing") {
  Good bread;
  bread.id = "loaf_of_bread";
  bread.name = "Loaf of Bread";
  Good watch;
  watch.id = "rolex_watch";
  watch.name = "Rolex Watch";
  const std::vector<OfferView> offers{{&bread, Money::from_dollars(3)}, {&watch, Money::from_dollars(9000)}};

  auto r = parse_bid_lines("Loaf of Bread, 3.50, 2\nrolex watch, $9,100.00, 1\nUnicorn, 5, 1", offers);
  REQUIRE(r);
  REQUIRE(r->size() == 2);
  CHECK((*r)[0].good_id == "loaf_of_bread");
  CHECK((*r)[0].willingness_to_pay == Money::from_dollars(3.5));
  CHECK((*r)[0].quantity == 2);
  CHECK((*r)[1].willingness_to_pay == Money::from_dollars(9100));
  CHECK(parse_bid_lines("NONE", offers)->empty());
  CHECK_FALSE(parse_bid_lines("I would like some bread please", offers));
}

TEST_CASE("consumer_evaluate never overspends") {
  const auto catalog = build_catalog({Pack::Real}, default_data_dir());
  std::vector<OfferView> offers;
  for (const auto& g : catalog) offers.push_back({&g, g.base_price});
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> cents(0, 2'000'000);
  std::uniform_int_distribution<int> mem(0, 6);
  StubParams eager;
  eager.market_status_beta0 = 2;
  eager.market_functional_logit = 1;
  StubBackend stub(eager);
  Mind mind{stub, testing::prompts(), {}, {}};
  for (std::uint32_t i = 0; i < 200; ++i) {
    auto a = testing::make_agent(i);
    a.cash = Money::from_cents(cents(rng));
    for (int k = mem(rng); k > 0; --k) a.memory.append(1, Phase::Social, MemoryKind::PublicEffect, "saw", {"rolex_watch"});
    Money total;
    for (const auto& b : consumer_evaluate(a, offers, mind, &catalog)) total += b.willingness_to_pay * b.quantity;
    CHECK(total <= a.cash);
  }

  testing::ScriptedBackend greedy({"Rolex Watch, 9000, 1\nLoaf of Bread, 3, 1"});
  Mind m2{greedy, testing::prompts(), {}, {}};
  auto poor = testing::make_agent(1);
  poor.cash = Money::from_dollars(10);
  const auto bids = consumer_evaluate(poor, offers, m2, &catalog);
  REQUIRE(bids.size() == 1);
  CHECK(bids[0].good_id == "loaf_of_bread");
}

TEST_CASE("reflection tags mentioned goods and the partner") {
  const auto catalog = build_catalog({Pack::Real}, default_data_dir());
  auto a = testing::make_agent(0);
  auto b = testing::make_agent(1, Sex::F);
  StubBackend stub;
  Mind mind{stub, testing::prompts(), {}, {}};
  std::vector<Utterance> t{{b.id, "I love your rolex watch."}, {a.id, "Thanks!"}};
  const auto r = reflect(a, t, b, catalog, 1, mind);
  CHECK(r.kind == MemoryKind::Reflection);
  CHECK(r.tags == std::set<std::string>{"rolex_watch", agent_tag(b.id)});
  std::vector<Utterance> plain{{b.id, "Nice weather."}};
  CHECK(reflect(a, plain, b, catalog, 2, mind).tags == std::set<std::string>{agent_tag(b.id)});
  CHECK_THROWS_AS(reflect(a, {}, b, catalog, 3, mind), ContractViolation);
  CHECK(mentioned_goods("a NICE BLUE BLAZER and an armani suit", catalog) ==
        std::set<GoodId>{"blue_blazer", "armani_suit"});
}
