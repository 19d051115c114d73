#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "statusarena/agent.hpp"
#include "statusarena/catalog.hpp"
#include "statusarena/money.hpp"

namespace statusarena {

enum class Side { Bid, Ask };

/// One limit order for a single clearing round. `owner` is an AgentId for
/// bids and a SellerId for asks.
struct Order {
  std::uint32_t owner = 0;
  GoodId good_id;
  Side side = Side::Bid;
  Money price;
  int quantity = 1;
  int round_index = 0;
  int arrival_index = 0;
};

struct Trade {
  AgentId buyer{};
  SellerId seller{};
  int quantity = 0;
  Money price;
};

struct ClearingResult {
  GoodId good_id;
  int round_index = 0;
  std::optional<Money> clearing_price;
  std::vector<Trade> trades;
  std::optional<Money> best_ask;
  std::optional<Money> best_bid;
  int executed_volume = 0;
  int bid_units = 0;
  int ask_units = 0;
};

/// Uniform-price call auction over unit-expanded orders. With bids sorted
/// high to low and asks low to high (ties by arrival), k is the largest volume
/// whose k-th bid is at least its k-th ask; the k best units of each side trade
/// at the midpoint of those two prices. Throws ContractViolation when orders
/// mix goods or rounds.
ClearingResult clear_round(std::span<const Order> book);

struct SellerState {
  SellerId seller_id{};
  GoodId good_id;
  Money current_ask;
  Money base_price;
  int inventory = 0;
  Money revenue;
  bool fixed_price_mode = false;
};

struct AskPolicy {
  double up = 0.25;
  double down = 0.10;
  double floor_fraction = 0.2;
};

/// Scripted ask rule, applied after settlement. Sold out raises the ask by
/// `up`; a round with stock on offer and no sales lowers it by `down`, floored
/// at floor_fraction * base_price; partial sales and rounds with nothing on
/// offer leave it alone. Fixed-price sellers never move.
SellerState update_seller_ask(const SellerState& s, const ClearingResult& last,
                              const AskPolicy& policy = {});

struct SettlementTotals {
  Money cash;                       // agents plus seller revenue
  std::map<GoodId, int> items;      // agent plus seller units per good
  friend bool operator==(const SettlementTotals&, const SettlementTotals&) = default;
};

struct SettlementReport {
  std::vector<Trade> applied;
  std::vector<Trade> cancelled;  // buyer could not cover the trade
};

SettlementTotals market_totals(std::span<const AgentState> agents,
                               std::span<const SellerState> sellers);

/// Moves cash and goods for every trade in `result`. `agents` is indexed by
/// AgentId and `sellers` by SellerId. A trade the buyer cannot pay for is
/// cancelled and reported.
SettlementReport settle(std::span<AgentState> agents, std::span<SellerState> sellers,
                        const ClearingResult& result);

}  // namespace statusarena
