#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "statusarena/analytics.hpp"
#include "statusarena/catalog.hpp"
#include "statusarena/error.hpp"
#include "statusarena/market.hpp"
#include "support.hpp"

using namespace statusarena;
using nlohmann::json;

namespace {

struct LogBuilder {
  EventLog log;
  std::uint64_t seq = 0;
  void add(std::string kind, json payload, int day = 0) {
    EventRecord r;
    r.run_id = "t";
    r.seq = seq++;
    r.day = day;
    r.phase = Phase::Market;
    r.kind = std::move(kind);
    r.payload = std::move(payload);
    log.append(std::move(r));
  }
};

json good_json(const std::string& id, const std::string& category, const std::string& tier, std::int64_t cents) {
  return {{"id", id}, {"name", id}, {"category", category}, {"tier", tier}, {"base_price", cents}, {"pack", "Real"}};
}

json header(json catalog) {
  return {{"catalog", std::move(catalog)},
          {"config", {{"social", true}, {"fixed_price", false}, {"synthetic_goods", false}, {"influencer", nullptr}}}};
}

}  // namespace

TEST_CASE("heatmap follows fourteen consecutive sellouts") {
  LogBuilder b;
  b.add("run_header", header(json::array({good_json("hat", "Accessories", "Mid", 10000)})));
  SellerState s;
  s.good_id = "hat";
  s.base_price = Money::from_dollars(100);
  s.current_ask = s.base_price;
  ClearingResult sold;
  sold.good_id = "hat";
  sold.executed_volume = 1;
  std::vector<Money> asks;
  for (int round = 0; round < 15; ++round) {
    asks.push_back(s.current_ask);
    b.add("clearing", {{"good", "hat"}, {"round", round}, {"best_ask", s.current_ask.cents()}, {"best_bid", nullptr},
                       {"clearing_price", s.current_ask.cents()}, {"bid_units", 1}, {"executed_volume", 1}});
    if (round < 14) s = update_seller_ask(s, sold);
  }
  b.add("clearing", {{"good", "hat"}, {"round", 16}, {"best_ask", nullptr}, {"best_bid", nullptr},
                     {"clearing_price", nullptr}, {"bid_units", 0}, {"executed_volume", 0}});
  const auto h = price_heatmap(b.log);
  REQUIRE(h.goods.size() == 1);
  REQUIRE(h.rounds == 17);
  for (int r = 0; r < 15; ++r) CHECK(*h.cells[0][r] == doctest::Approx(asks[r].dollars()));
  CHECK(*h.cells[0][14] == doctest::Approx(100 * std::pow(1.25, 14)).epsilon(1e-4));
  CHECK(*h.cells[0][15] == *h.cells[0][14]);
  CHECK(*h.cells[0][16] == *h.cells[0][14]);

  std::ostringstream out;
  write_heatmap_tsv(out, h);
  CHECK(out.str().rfind("good\tround_0\t", 0) == 0);
}

TEST_CASE("status shares are order-independent") {
  auto c = testing::small_config();
  StubBackend stub(c.stub);
  const auto log = run_experiment(c, 2, stub, testing::prompts());
  const auto ref = status_shares(log);
  REQUIRE(ref.bid_share_status);
  CHECK(*ref.bid_share_status >= 0.0);
  CHECK(*ref.bid_share_status <= 1.0);
  CHECK(ref.condition == "social");

  std::vector<EventRecord> recs(log.records().begin(), log.records().end());
  std::mt19937_64 rng(1);
  std::shuffle(recs.begin() + 1, recs.end(), rng);
  EventLog shuffled;
  std::uint64_t seq = 0;
  for (auto r : recs) {
    r.seq = seq++;
    shuffled.append(std::move(r));
  }
  const auto got = status_shares(shuffled);
  CHECK(got.status_bid_units == ref.status_bid_units);
  CHECK(got.total_bid_units == ref.total_bid_units);
  CHECK(got.status_purchase_units == ref.status_purchase_units);
}

TEST_CASE("fixed-price heatmap rows are constant") {
  auto c = testing::small_config();
  c.fixed_price = true;
  StubBackend stub(c.stub);
  const auto h = price_heatmap(run_experiment(c, 1, stub, testing::prompts()));
  for (const auto& row : h.cells) {
    for (const auto& cell : row) {
      REQUIRE(cell);
      CHECK(*cell == *row.front());
    }
  }
}

TEST_CASE("ped table groups") {
  auto c = testing::small_config();
  StubBackend stub(c.stub);
  const auto rows = ped_table(run_experiment(c, 1, stub, testing::prompts()));
  std::set<std::string> subjects;
  for (const auto& r : rows) {
    subjects.insert(r.subject);
    if (r.estimate) CHECK(r.estimate->n_points >= 3);
  }
  for (const char* g : {"Food", "Gadgets", "Low-Quality Clothing & Accessories",
                        "Mid/High-Quality Clothing & Accessories", "Collectible: Beanie Baby"}) {
    CHECK_MESSAGE(subjects.contains(g), g);
  }
}

TEST_CASE("category aggregation") {
  std::map<GoodId, std::vector<PricePoint>> goods;
  goods["a"] = {{1, 8}, {2, 2}, {4, 0.5}};
  goods["b"] = {{1, 30}, {3, 10}, {9, 3.3333333}};
  const auto mean = category_ped(goods, CategoryAggregation::MeanOfSlopes);
  REQUIRE(mean);
  CHECK(mean->slope == doctest::Approx(-1.5).epsilon(1e-6));
  const auto pooled = category_ped(goods, CategoryAggregation::Pooled);
  REQUIRE(pooled);
  CHECK(pooled->slope < -1.0);
  CHECK(pooled->slope > -2.0);
  goods.erase("b");
  CHECK_FALSE(category_ped(goods, CategoryAggregation::MeanOfSlopes));
}

TEST_CASE("keyword rater on a planted corpus") {
  const auto catalog = build_catalog({Pack::Real}, default_data_dir());
  std::vector<TranscriptView> ts;
  for (int i = 0; i < 100; ++i) {
    TranscriptView t;
    t.episode_id = "e" + std::to_string(i);
    if (i % 5 == 0) t.text = "I really like your Rolex Watch.\nThanks, it was a gift.";
    else if (i % 5 == 1) t.text = "That is a nice blue blazer.\nThank you.";
    else t.text = "How was work today?\nBusy, but the hike on Sunday was lovely.";
    ts.push_back(t);
  }
  const auto rep = rate_topics(ts, catalog);
  CHECK(rep.rated_episodes == 100);
  CHECK(rep.fashion_fraction == doctest::Approx(0.40));
  CHECK(rep.item_mention_fraction == doctest::Approx(0.40));
  const auto blazer = keyword_rating(ts[1], catalog);
  CHECK(blazer.fashion);
  CHECK(blazer.items == std::set<GoodId>{"blue_blazer"});
  CHECK_THROWS_AS(rate_topics({}, catalog), ContractViolation);
}

TEST_CASE("backend rater handles failures and caps themes") {
  const auto catalog = build_catalog({Pack::Real}, default_data_dir());
  std::vector<TranscriptView> ts(3, TranscriptView{"x", "We talked about the Rolex Watch."});
  ts[1].episode_id = "y";
  ts[2].episode_id = "z";

  class Flaky final : public TextBackend {
   public:
    BackendResponse complete(const BackendRequest& r) override {
      if (r.purpose == RequestPurpose::TopicRating) {
        if (n++ == 1) throw BackendError("timeout");
        std::string topics;
        for (int i = 0; i < 25; ++i) topics += (i ? "; topic" : "topic") + std::to_string(i);
        return {"FASHION: yes\nITEMS: Rolex Watch\nTOPICS: " + topics};
      }
      std::string out;
      for (int i = 0; i < 25; ++i) out += "topic" + std::to_string(i) + " => Theme " + std::to_string(i) + "\n";
      return {out};
    }
    std::string name() const override { return "flaky"; }
    int n = 0;
  } flaky;
  const auto rep = rate_topics(ts, catalog, &flaky, &testing::prompts());
  CHECK(rep.rated_episodes == 2);
  CHECK(rep.unrated_episodes == 1);
  CHECK(rep.fashion_fraction == doctest::Approx(1.0));
  CHECK(rep.theme_counts.size() <= 20);
  CHECK(rep.theme_counts.contains("Other"));
}
