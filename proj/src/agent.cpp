#include "statusarena/agent.hpp"

#include <algorithm>

#include "statusarena/error.hpp"

namespace statusarena {

std::string agent_tag(AgentId id) { return "agent:" + std::to_string(raw(id)); }

int AgentState::units_of(const GoodId& g) const {
  auto it = inventory.find(g);
  return it == inventory.end() ? 0 : it->second;
}

int AgentState::food_units(const std::vector<Good>& catalog) const {
  int n = 0;
  for (const auto& [id, units] : inventory) {
    const Good* g = find_good(catalog, id);
    if (g && g->category == Category::Food) n += units;
  }
  return n;
}

std::vector<AgentState> init_population(const std::vector<Persona>& personas, Population population,
                                        int n, const WealthMix& mix, std::uint64_t seed,
                                        const std::vector<Good>& catalog) {
  if (n <= 0) throw ConfigError("population size must be positive");

  std::vector<const Persona*> men;
  std::vector<const Persona*> women;
  for (const auto& p : personas) {
    if (p.population != population) continue;
    (p.sex == Sex::M ? men : women).push_back(&p);
  }
  const std::size_t want_men = static_cast<std::size_t>(n) / 2;
  const std::size_t want_women = static_cast<std::size_t>(n) - want_men;
  if (men.size() + women.size() < static_cast<std::size_t>(n) || men.size() < want_men ||
      women.size() < want_women) {
    throw ConfigError("persona corpus for " + std::string(to_string(population)) + " has " +
                      std::to_string(men.size()) + " men and " + std::to_string(women.size()) +
                      " women; " + std::to_string(n) + " agents need a balanced draw");
  }

  std::vector<const Good*> starter;
  for (const auto& g : catalog) {
    if (g.category == Category::Clothing && g.tier == Tier::Low) starter.push_back(&g);
  }
  if (starter.empty()) throw ConfigError("catalog has no Low-tier clothing for starter inventories");

  SeedStream stream = SeedStream::derive(seed, static_cast<std::uint64_t>(StreamDomain::Persona), 0);
  auto engine = stream.engine();
  std::shuffle(men.begin(), men.end(), engine);
  std::shuffle(women.begin(), women.end(), engine);

  // Alternate sexes so ids interleave; women take the odd slot when n is odd.
  std::vector<const Persona*> chosen;
  chosen.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; chosen.size() < static_cast<std::size_t>(n); ++i) {
    if (i < want_women) chosen.push_back(women[i]);
    if (i < want_men && chosen.size() < static_cast<std::size_t>(n)) chosen.push_back(men[i]);
  }

  std::vector<AgentState> agents;
  agents.reserve(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    AgentState a;
    a.id = AgentId{static_cast<std::uint32_t>(i)};
    a.persona = *chosen[i];
    a.rng = SeedStream::derive(seed, static_cast<std::uint64_t>(StreamDomain::Agent), i);
    auto agent_engine = a.rng.engine();
    a.cash = draw_wealth(mix, agent_engine);
    std::uniform_int_distribution<std::size_t> pick(0, starter.size() - 1);
    a.inventory[starter[pick(agent_engine)]->id] = 1;
    for (const auto& text : a.persona.formative_memories) {
      a.memory.append(0, Phase::Init, MemoryKind::Formative, text);
    }
    agents.push_back(std::move(a));
  }
  return agents;
}

}  // namespace statusarena
