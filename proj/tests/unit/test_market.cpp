#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "statusarena/error.hpp"
#include "statusarena/market.hpp"

using namespace statusarena;

namespace {

Order bid(double price, int arrival, std::uint32_t owner = 0) {
  Order o;
  o.owner = owner;
  o.good_id = "g";
  o.side = Side::Bid;
  o.price = Money::from_dollars(price);
  o.arrival_index = arrival;
  return o;
}

Order ask(double price, int arrival, std::uint32_t owner = 0) {
  Order o = bid(price, arrival, owner);
  o.side = Side::Ask;
  return o;
}

// max over candidate prices p of min(units bid at >= p, units offered at <= p)
int oracle_volume(const std::vector<Order>& book) {
  int best = 0;
  for (const auto& candidate : book) {
    const Money p = candidate.price;
    int demand = 0;
    int supply = 0;
    for (const auto& o : book) {
      if (o.side == Side::Bid && o.price >= p) demand += o.quantity;
      if (o.side == Side::Ask && o.price <= p) supply += o.quantity;
    }
    best = std::max(best, std::min(demand, supply));
  }
  return best;
}

}  // namespace

TEST_CASE("clear_round worked examples") {
  SUBCASE("empty book") {
    const auto r = clear_round({});
    CHECK_FALSE(r.clearing_price);
    CHECK_FALSE(r.best_ask);
    CHECK(r.trades.empty());
  }
  SUBCASE("one crossing unit") {
    std::vector<Order> book{bid(10, 0), bid(8, 1), ask(5, 2), ask(9, 3)};
    const auto r = clear_round(book);
    CHECK(r.executed_volume == 1);
    CHECK(r.clearing_price == Money::from_dollars(7.5));
    CHECK(r.trades.size() == 1);
  }
  SUBCASE("two crossing units") {
    std::vector<Order> book{bid(10, 0, 1), bid(8, 1, 2), ask(5, 2, 1), ask(7, 3, 2)};
    const auto r = clear_round(book);
    CHECK(r.executed_volume == 2);
    CHECK(r.clearing_price == Money::from_dollars(7.5));
    CHECK(r.trades.size() == 2);
  }
  SUBCASE("no cross still reports the touch") {
    std::vector<Order> book{bid(4, 0), ask(6, 1), ask(9, 2)};
    const auto r = clear_round(book);
    CHECK(r.executed_volume == 0);
    CHECK_FALSE(r.clearing_price);
    CHECK(r.best_ask == Money::from_dollars(6));
    CHECK(r.best_bid == Money::from_dollars(4));
  }
  SUBCASE("mixed goods") {
    std::vector<Order> book{bid(4, 0), ask(3, 1)};
    book[1].good_id = "h";
    CHECK_THROWS_AS(clear_round(book), ContractViolation);
  }
}

TEST_CASE("equal prices fill by arrival") {
  std::vector<Order> book{bid(10, 2, 7), bid(10, 0, 3), ask(5, 1, 0)};
  const auto r = clear_round(book);
  REQUIRE(r.trades.size() == 1);
  CHECK(raw(r.trades[0].buyer) == 3);
}

TEST_CASE("random books agree with the exhaustive oracle") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> count(0, 8);
  std::uniform_int_distribution<int> cents(100, 10000);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = count(rng);
    std::vector<Order> book;
    for (int i = 0; i < n; ++i) {
      Order o = rng() % 2 ? bid(0, i, i) : ask(0, i, i);
      o.price = Money::from_cents(cents(rng));
      book.push_back(o);
    }
    const auto r = clear_round(book);
    REQUIRE(r.executed_volume == oracle_volume(book));
    int traded = 0;
    for (const auto& t : r.trades) {
      traded += t.quantity;
      CHECK(t.price == *r.clearing_price);
    }
    CHECK(traded == r.executed_volume);
    if (r.executed_volume == 0) continue;
    std::vector<Money> bids, asks;
    for (const auto& o : book) (o.side == Side::Bid ? bids : asks).push_back(o.price);
    std::sort(bids.rbegin(), bids.rend());
    std::sort(asks.begin(), asks.end());
    const auto k = static_cast<std::size_t>(r.executed_volume);
    CHECK(*r.clearing_price >= asks[k - 1]);
    CHECK(*r.clearing_price <= bids[k - 1]);
    CHECK(r.best_ask == asks.front());
  }
}

TEST_CASE("seller ask rule") {
  SellerState s;
  s.good_id = "g";
  s.base_price = Money::from_dollars(100);
  s.current_ask = s.base_price;
  ClearingResult sold;
  sold.good_id = "g";
  sold.executed_volume = 1;
  ClearingResult idle;
  idle.good_id = "g";

  s.inventory = 0;
  CHECK(update_seller_ask(s, sold).current_ask == Money::from_dollars(125));
  s.inventory = 3;
  CHECK(update_seller_ask(s, idle).current_ask == Money::from_dollars(90));
  CHECK(update_seller_ask(s, sold).current_ask == s.current_ask);

  SUBCASE("floor") {
    SellerState low = s;
    for (int i = 0; i < 60; ++i) low = update_seller_ask(low, idle);
    CHECK(low.current_ask == Money::from_dollars(20));
  }
  SUBCASE("fixed price never moves") {
    SellerState f = s;
    f.fixed_price_mode = true;
    f.inventory = 0;
    for (int i = 0; i < 10; ++i) f = update_seller_ask(f, i % 2 ? sold : idle);
    CHECK(f.current_ask == f.base_price);
  }
}

TEST_CASE("settlement conserves cash and items") {
  std::vector<AgentState> agents(2);
  agents[0].id = AgentId{0};
  agents[1].id = AgentId{1};
  agents[0].cash = Money::from_dollars(20);
  agents[1].cash = Money::from_dollars(5);
  std::vector<SellerState> sellers(1);
  sellers[0].good_id = "g";
  sellers[0].inventory = 3;

  ClearingResult r;
  r.good_id = "g";
  r.clearing_price = Money::from_dollars(7.5);
  r.trades = {Trade{AgentId{0}, SellerId{0}, 1, Money::from_dollars(7.5)},
              Trade{AgentId{1}, SellerId{0}, 1, Money::from_dollars(7.5)}};
  const auto before = market_totals(agents, sellers);
  const auto report = settle(agents, sellers, r);
  CHECK(market_totals(agents, sellers) == before);
  CHECK(report.applied.size() == 1);
  CHECK(report.cancelled.size() == 1);  // agent 1 is short
  CHECK(agents[0].cash == Money::from_dollars(12.5));
  CHECK(agents[0].units_of("g") == 1);
  CHECK(sellers[0].inventory == 2);

  ClearingResult none;
  none.good_id = "g";
  settle(agents, sellers, none);
  CHECK(market_totals(agents, sellers) == before);
}
