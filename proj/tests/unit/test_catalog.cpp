#include <doctest.h>

#include <algorithm>
#include <random>

#include "statusarena/agent.hpp"
#include "statusarena/catalog.hpp"
#include "statusarena/error.hpp"
#include "statusarena/orchestrator.hpp"

using namespace statusarena;

TEST_CASE("shipped packs satisfy the catalog invariants") {
  const auto dir = default_data_dir();
  const auto goods = build_catalog({Pack::Real, Pack::Synthetic}, dir);
  CHECK_NOTHROW(validate_catalog(goods));
  int real = 0;
  for (const auto& g : goods) {
    if (g.pack != Pack::Real) continue;
    ++real;
    const auto twins = std::count_if(goods.begin(), goods.end(), [&](const Good& s) {
      return s.pack == Pack::Synthetic && s.category == g.category && s.tier == g.tier &&
             s.base_price == g.base_price && s.counterpart == g.id;
    });
    CHECK_MESSAGE(twins == 1, g.id);
  }
  CHECK(real == 30);
  const auto* labubu = find_good(goods, "pop_mart_labubu_monster_vinyl_plush_doll");
  REQUIRE(labubu);
  CHECK(labubu->collectible);
  CHECK(is_status_good(*labubu));

  const auto hipster = load_pack(dir, Pack::Hipster);
  CHECK(std::any_of(hipster.begin(), hipster.end(), [](const Good& g) { return g.name == "Vintage Film Camera"; }));
  const auto street = load_pack(dir, Pack::Streetwear);
  CHECK(std::any_of(street.begin(), street.end(), [](const Good& g) { return g.name == "Supreme Box Logo T-Shirt"; }));
}

TEST_CASE("catalog validation rejects a tier price inversion") {
  auto goods = load_pack(default_data_dir(), Pack::Real);
  for (auto& g : goods) {
    if (g.id == "rolex_watch") g.base_price = Money::from_dollars(1);
  }
  CHECK_THROWS_AS(validate_catalog(goods), ConfigError);
}

TEST_CASE("status and visibility predicates") {
  Good g;
  g.category = Category::Clothing;
  g.tier = Tier::Low;
  CHECK(is_visible_good(g));
  CHECK_FALSE(is_status_good(g));
  g.tier = Tier::High;
  CHECK(is_status_good(g));
  g.category = Category::Gadgets;
  CHECK_FALSE(is_visible_good(g));
  CHECK_FALSE(is_status_good(g));
}

TEST_CASE("wealth mixture") {
  std::mt19937_64 rng(5);
  CHECK(draw_wealth(WealthMix::make(1.0, 500, 150000, 0), rng) == Money::from_dollars(500));
  CHECK(draw_wealth(WealthMix::make(0.0, 500, 150000, 0), rng) == Money::from_dollars(150000));
  CHECK_THROWS(WealthMix::make(1.5, 500, 150000, 0.5));
  CHECK_THROWS(WealthMix::make(0.5, -1, 150000, 0.5));

  // poor component alone: median of exp(ln 500 + 0.5 z) is 500
  const auto poor = WealthMix::make(1.0, 500, 150000, 0.5);
  std::vector<double> draws;
  for (int i = 0; i < 10000; ++i) draws.push_back(draw_wealth(poor, rng).dollars());
  std::nth_element(draws.begin(), draws.begin() + 5000, draws.end());
  CHECK(std::abs(draws[5000] - 500) < 50);

  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const auto mix = WealthMix::make(u(rng), 0.01 + 1000 * u(rng), 0.01 + 1e6 * u(rng), 3 * u(rng));
    CHECK(draw_wealth(mix, rng) > Money{});
  }
}

TEST_CASE("population initialization") {
  const auto dir = default_data_dir();
  const auto catalog = build_catalog({Pack::Real}, dir);
  const auto personas = load_personas(persona_path(dir, Population::LosAngeles));
  const auto a = init_population(personas, Population::LosAngeles, 50, WealthMix::defaults(), 7, catalog);
  const auto b = init_population(personas, Population::LosAngeles, 50, WealthMix::defaults(), 7, catalog);
  REQUIRE(a.size() == 50);
  int men = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].cash == b[i].cash);
    CHECK(a[i].persona.name == b[i].persona.name);
    CHECK(a[i].inventory == b[i].inventory);
    men += a[i].persona.sex == Sex::M;
    int items = 0;
    for (const auto& [id, n] : a[i].inventory) {
      const auto* g = find_good(catalog, id);
      REQUIRE(g);
      CHECK(g->tier == Tier::Low);
      CHECK(is_visible_good(*g));
      items += n;
    }
    CHECK(items == 1);
    for (const auto& r : a[i].memory.records()) CHECK(r.kind == MemoryKind::Formative);
  }
  CHECK(men == 25);

  const auto kerala = load_personas(persona_path(dir, Population::Kerala));
  const auto flat = init_population(kerala, Population::Kerala, 2, WealthMix::make(1.0, 500, 150000, 0), 3, catalog);
  CHECK(flat[0].cash == Money::from_dollars(500));
  CHECK(flat[1].cash == Money::from_dollars(500));
}
