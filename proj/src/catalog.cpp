#include "statusarena/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <utility>

#include <nlohmann/json.hpp>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, Category>, 4> kCategories{{
    {"Food", Category::Food},
    {"Clothing", Category::Clothing},
    {"Gadgets", Category::Gadgets},
    {"Accessories", Category::Accessories},
}};
constexpr std::array<std::pair<std::string_view, Tier>, 3> kTiers{{
    {"Low", Tier::Low},
    {"Mid", Tier::Mid},
    {"High", Tier::High},
}};
constexpr std::array<std::pair<std::string_view, Pack>, 4> kPacks{{
    {"Real", Pack::Real},
    {"Synthetic", Pack::Synthetic},
    {"Hipster", Pack::Hipster},
    {"Streetwear", Pack::Streetwear},
}};
constexpr std::array<std::pair<std::string_view, Sex>, 2> kSexes{{{"M", Sex::M}, {"F", Sex::F}}};
constexpr std::array<std::pair<std::string_view, Population>, 2> kPopulations{{
    {"LosAngeles", Population::LosAngeles},
    {"Kerala", Population::Kerala},
}};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::array<std::pair<std::string_view, E>, N>& table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

nlohmann::json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

Good good_from_json(const nlohmann::json& j, std::optional<Pack> default_pack) {
  try {
    Good g;
    g.id = j.at("id").get<std::string>();
    g.name = j.at("name").get<std::string>();
    g.category = parse_category(j.at("category").get<std::string>());
    g.tier = parse_tier(j.at("tier").get<std::string>());
    g.description = j.value("description", std::string{});
    g.base_price = Money::from_dollars(j.at("base_price").get<double>());
    g.initial_inventory = j.value("initial_inventory", 5);
    if (j.contains("pack")) {
      g.pack = parse_pack(j.at("pack").get<std::string>());
    } else if (default_pack) {
      g.pack = *default_pack;
    } else {
      throw ConfigError("good '" + g.id + "' has no pack");
    }
    g.collectible = j.value("collectible", false);
    if (j.contains("counterpart")) g.counterpart = j.at("counterpart").get<std::string>();
    if (g.base_price <= Money{}) throw ConfigError("good '" + g.id + "': base_price must be positive");
    if (g.initial_inventory < 0) throw ConfigError("good '" + g.id + "': negative initial_inventory");
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed good record: ") + e.what());
  }
}

std::vector<Good> goods_from_json(const nlohmann::json& j, const std::string& origin) {
  std::optional<Pack> pack;
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    if (j.contains("pack")) pack = parse_pack(j.at("pack").get<std::string>());
    if (!j.contains("goods")) throw ConfigError(origin + ": missing 'goods'");
    list = &j.at("goods");
  }
  if (!list->is_array()) throw ConfigError(origin + ": goods must be an array");
  std::vector<Good> out;
  for (const auto& item : *list) out.push_back(good_from_json(item, pack));
  return out;
}

}  // namespace

std::string_view to_string(Category c) { return name_of(c, kCategories); }
std::string_view to_string(Tier t) { return name_of(t, kTiers); }
std::string_view to_string(Pack p) { return name_of(p, kPacks); }
std::string_view to_string(Sex s) { return name_of(s, kSexes); }
std::string_view to_string(Population p) { return name_of(p, kPopulations); }

Category parse_category(std::string_view s) { return parse_enum(s, kCategories, "category"); }
Tier parse_tier(std::string_view s) { return parse_enum(s, kTiers, "tier"); }
Pack parse_pack(std::string_view s) { return parse_enum(s, kPacks, "pack"); }
Sex parse_sex(std::string_view s) { return parse_enum(s, kSexes, "sex"); }
Population parse_population(std::string_view s) { return parse_enum(s, kPopulations, "population"); }

bool is_status_good(const Good& g) {
  return is_visible_good(g) && (g.tier == Tier::Mid || g.tier == Tier::High);
}

bool is_visible_good(const Good& g) {
  return g.category == Category::Clothing || g.category == Category::Accessories;
}

std::vector<Good> load_pack(const std::filesystem::path& data_dir, Pack pack) {
  const auto file = data_dir / "catalog" / (lower(to_string(pack)) + ".json");
  auto goods = goods_from_json(read_json(file), file.string());
  for (const auto& g : goods) {
    if (g.pack != pack) throw ConfigError(file.string() + ": good '" + g.id + "' is in the wrong pack");
  }
  return goods;
}

std::vector<Good> load_goods_file(const std::filesystem::path& file) {
  return goods_from_json(read_json(file), file.string());
}

void validate_catalog(const std::vector<Good>& goods) {
  std::map<std::string, int> ids;
  std::map<std::string, int> names;
  for (const auto& g : goods) {
    if (g.id.empty() || g.name.empty()) throw ConfigError("good with empty id or name");
    if (++ids[g.id] > 1) throw ConfigError("duplicate good id '" + g.id + "'");
    if (++names[lower(g.name)] > 1) throw ConfigError("duplicate good name '" + g.name + "'");
  }

  // Within a pack and category every Low price < every Mid price < every High price.
  std::map<std::pair<Pack, Category>, std::map<Tier, std::pair<Money, Money>>> ranges;
  for (const auto& g : goods) {
    auto& tiers = ranges[{g.pack, g.category}];
    auto it = tiers.find(g.tier);
    if (it == tiers.end()) {
      tiers[g.tier] = {g.base_price, g.base_price};
    } else {
      it->second.first = std::min(it->second.first, g.base_price);
      it->second.second = std::max(it->second.second, g.base_price);
    }
  }
  for (const auto& [key, tiers] : ranges) {
    const std::pair<Money, Money>* prev = nullptr;
    Tier prev_tier = Tier::Low;
    for (const auto& [tier, range] : tiers) {
      if (prev && !(prev->second < range.first)) {
        throw ConfigError("pack " + std::string(to_string(key.first)) + ", category " +
                          std::string(to_string(key.second)) + ": " + std::string(to_string(prev_tier)) +
                          " prices must stay below " + std::string(to_string(tier)) + " prices");
      }
      prev = &range;
      prev_tier = tier;
    }
  }

  std::vector<const Good*> real;
  std::vector<const Good*> synthetic;
  for (const auto& g : goods) {
    if (g.pack == Pack::Real) real.push_back(&g);
    if (g.pack == Pack::Synthetic) synthetic.push_back(&g);
  }
  if (real.empty() || synthetic.empty()) return;
  for (const Good* r : real) {
    int matches = 0;
    for (const Good* s : synthetic) {
      if (s->counterpart != r->id) continue;
      if (s->category != r->category || s->tier != r->tier || s->base_price != r->base_price) {
        throw ConfigError("synthetic good '" + s->id + "' does not mirror '" + r->id + "'");
      }
      ++matches;
    }
    if (matches != 1) {
      throw ConfigError("real good '" + r->id + "' needs exactly one synthetic counterpart, found " +
                        std::to_string(matches));
    }
  }
  for (const Good* s : synthetic) {
    if (!s->counterpart || !find_good(goods, *s->counterpart)) {
      throw ConfigError("synthetic good '" + s->id + "' has no real counterpart");
    }
  }
}

std::vector<Good> build_catalog(const std::set<Pack>& packs, const std::filesystem::path& data_dir) {
  if (packs.empty()) throw ConfigError("build_catalog: empty pack selection");
  std::vector<Good> goods;
  for (Pack p : packs) {
    auto more = load_pack(data_dir, p);
    goods.insert(goods.end(), more.begin(), more.end());
  }
  validate_catalog(goods);
  // The mirror invariant is a property of the shipped data; check it even when
  // only one side is selected.
  if (packs.contains(Pack::Real) != packs.contains(Pack::Synthetic)) {
    auto mirror = load_pack(data_dir, Pack::Real);
    auto synth = load_pack(data_dir, Pack::Synthetic);
    mirror.insert(mirror.end(), synth.begin(), synth.end());
    validate_catalog(mirror);
  }
  return goods;
}

const Good* find_good(const std::vector<Good>& goods, std::string_view id) {
  for (const auto& g : goods) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

std::vector<Persona> load_personas(const std::filesystem::path& file) {
  const auto j = read_json(file);
  try {
    std::optional<Population> population;
    const nlohmann::json* list = &j;
    if (j.is_object()) {
      population = parse_population(j.at("population").get<std::string>());
      list = &j.at("personas");
    }
    std::vector<Persona> out;
    for (const auto& item : *list) {
      Persona p;
      p.name = item.at("name").get<std::string>();
      p.sex = parse_sex(item.at("sex").get<std::string>());
      p.occupation = item.value("occupation", std::string{});
      p.background = item.value("background", std::string{});
      p.formative_memories = item.value("formative_memories", std::vector<std::string>{});
      if (item.contains("population")) {
        p.population = parse_population(item.at("population").get<std::string>());
      } else if (population) {
        p.population = *population;
      } else {
        throw ConfigError(file.string() + ": persona '" + p.name + "' has no population");
      }
      if (population && p.population != *population) {
        throw ConfigError(file.string() + ": persona '" + p.name + "' is from another population");
      }
      out.push_back(std::move(p));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

std::filesystem::path persona_path(const std::filesystem::path& data_dir, Population p) {
  return data_dir / "personas" / (p == Population::Kerala ? "kerala.json" : "los_angeles.json");
}

WealthMix WealthMix::make(double poor_weight, double poor_location, double rich_location,
                          double dispersion) {
  if (!(poor_weight >= 0.0 && poor_weight <= 1.0)) throw ConfigError("wealth.poor_weight must be in [0,1]");
  if (!(poor_location > 0.0)) throw ConfigError("wealth.poor_location must be positive");
  if (!(rich_location > 0.0)) throw ConfigError("wealth.rich_location must be positive");
  if (!(dispersion >= 0.0) || !std::isfinite(dispersion)) throw ConfigError("wealth.dispersion must be >= 0");
  WealthMix m;
  m.poor_weight_ = poor_weight;
  m.poor_location_ = poor_location;
  m.rich_location_ = rich_location;
  m.dispersion_ = dispersion;
  return m;
}

Money draw_wealth(const WealthMix& mix, std::mt19937_64& engine) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool poor = unit(engine) < mix.poor_weight();
  const double z = normal(engine);
  const double location = poor ? mix.poor_location() : mix.rich_location();
  const double dollars = std::exp(std::log(location) + mix.dispersion() * z);
  return std::max(Money::from_dollars(dollars), Money::from_cents(1));
}

}  // namespace statusarena
