#include "statusarena/market.hpp"

#include <algorithm>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

struct Unit {
  std::uint32_t owner;
  Money price;
  int arrival;
};

std::vector<Unit> expand(std::span<const Order> book, Side side) {
  std::vector<Unit> units;
  for (const auto& o : book) {
    if (o.side != side) continue;
    for (int q = 0; q < o.quantity; ++q) units.push_back({o.owner, o.price, o.arrival_index});
  }
  if (side == Side::Bid) {
    std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      return a.price != b.price ? a.price > b.price : a.arrival < b.arrival;
    });
  } else {
    std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) {
      return a.price != b.price ? a.price < b.price : a.arrival < b.arrival;
    });
  }
  return units;
}

}  // namespace

ClearingResult clear_round(std::span<const Order> book) {
  ClearingResult result;
  if (book.empty()) return result;

  result.good_id = book.front().good_id;
  result.round_index = book.front().round_index;
  for (const auto& o : book) {
    if (o.good_id != result.good_id) throw ContractViolation("clear_round: orders mix goods");
    if (o.round_index != result.round_index) throw ContractViolation("clear_round: orders mix rounds");
    if (o.quantity < 1 || o.price <= Money{}) throw ContractViolation("clear_round: invalid order");
  }

  const auto bids = expand(book, Side::Bid);
  const auto asks = expand(book, Side::Ask);
  result.bid_units = static_cast<int>(bids.size());
  result.ask_units = static_cast<int>(asks.size());
  if (!bids.empty()) result.best_bid = bids.front().price;
  if (!asks.empty()) result.best_ask = asks.front().price;

  // Bid prices fall and ask prices rise with depth, so feasibility is a prefix.
  std::size_t k = 0;
  while (k < bids.size() && k < asks.size() && bids[k].price >= asks[k].price) ++k;
  if (k == 0) return result;

  const Money price = Money::midpoint(asks[k - 1].price, bids[k - 1].price);
  result.clearing_price = price;
  result.executed_volume = static_cast<int>(k);
  for (std::size_t i = 0; i < k; ++i) {
    const AgentId buyer{bids[i].owner};
    const SellerId seller{asks[i].owner};
    if (!result.trades.empty() && result.trades.back().buyer == buyer &&
        result.trades.back().seller == seller) {
      ++result.trades.back().quantity;
    } else {
      result.trades.push_back(Trade{buyer, seller, 1, price});
    }
  }
  return result;
}

SellerState update_seller_ask(const SellerState& s, const ClearingResult& last, const AskPolicy& policy) {
  SellerState next = s;
  if (s.fixed_price_mode) {
    next.current_ask = s.base_price;
    return next;
  }
  if (last.executed_volume > 0 && s.inventory == 0) {
    next.current_ask = s.current_ask.scaled(1.0 + policy.up);
  } else if (last.executed_volume == 0 && s.inventory > 0) {
    const Money floor = s.base_price.scaled(policy.floor_fraction);
    next.current_ask = std::max(s.current_ask.scaled(1.0 - policy.down), floor);
  }
  return next;
}

SettlementTotals market_totals(std::span<const AgentState> agents, std::span<const SellerState> sellers) {
  SettlementTotals t;
  for (const auto& a : agents) {
    t.cash += a.cash;
    for (const auto& [g, n] : a.inventory) t.items[g] += n;
  }
  for (const auto& s : sellers) {
    t.cash += s.revenue;
    t.items[s.good_id] += s.inventory;
  }
  return t;
}

SettlementReport settle(std::span<AgentState> agents, std::span<SellerState> sellers,
                        const ClearingResult& result) {
  SettlementReport report;
  for (const auto& trade : result.trades) {
    const auto bi = raw(trade.buyer);
    const auto si = raw(trade.seller);
    if (bi >= agents.size() || si >= sellers.size()) throw ContractViolation("settle: unknown party");
    AgentState& buyer = agents[bi];
    SellerState& seller = sellers[si];
    if (seller.good_id != result.good_id) throw ContractViolation("settle: seller sells another good");
    const Money cost = trade.price * trade.quantity;
    if (buyer.cash < cost || seller.inventory < trade.quantity) {
      report.cancelled.push_back(trade);
      continue;
    }
    buyer.cash -= cost;
    seller.revenue += cost;
    seller.inventory -= trade.quantity;
    buyer.inventory[result.good_id] += trade.quantity;
    report.applied.push_back(trade);
  }
  return report;
}

}  // namespace statusarena
