#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "statusarena/catalog.hpp"
#include "statusarena/memory.hpp"
#include "statusarena/money.hpp"
#include "statusarena/rng.hpp"

namespace statusarena {

enum class AgentId : std::uint32_t {};
enum class SellerId : std::uint32_t {};

inline std::uint32_t raw(AgentId id) { return static_cast<std::uint32_t>(id); }
inline std::uint32_t raw(SellerId id) { return static_cast<std::uint32_t>(id); }

/// "agent:7", the tag that marks records about a specific agent.
std::string agent_tag(AgentId id);

struct AgentState {
  AgentId id{};
  Persona persona;
  Money cash;
  std::map<GoodId, int> inventory;
  MemoryStream memory;
  SeedStream rng;
  bool influencer = false;
  std::optional<Pack> influencer_pack;

  int units_of(const GoodId& g) const;
  int food_units(const std::vector<Good>& catalog) const;
};

/// Seed-stream domains; keeps agent, seller and world streams disjoint.
enum class StreamDomain : std::uint64_t { World = 1, Agent = 2, Seller = 3, Persona = 4 };

/// n agents drawn from `personas` with sexes balanced to within one, each
/// with a wealth draw, a single random Low-tier clothing item, and formative
/// memories only. Pure function of its arguments.
std::vector<AgentState> init_population(const std::vector<Persona>& personas, Population population,
                                        int n, const WealthMix& mix, std::uint64_t seed,
                                        const std::vector<Good>& catalog);

}  // namespace statusarena
