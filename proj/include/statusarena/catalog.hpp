#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "statusarena/money.hpp"

namespace statusarena {

enum class Category { Food, Clothing, Gadgets, Accessories };
enum class Tier { Low, Mid, High };
enum class Pack { Real, Synthetic, Hipster, Streetwear };
enum class Sex { M, F };
enum class Population { LosAngeles, Kerala };

std::string_view to_string(Category c);
std::string_view to_string(Tier t);
std::string_view to_string(Pack p);
std::string_view to_string(Sex s);
std::string_view to_string(Population p);

// Parsers throw ConfigError on unknown names.
Category parse_category(std::string_view s);
Tier parse_tier(std::string_view s);
Pack parse_pack(std::string_view s);
Sex parse_sex(std::string_view s);
Population parse_population(std::string_view s);

using GoodId = std::string;

struct Good {
  GoodId id;
  std::string name;
  Category category = Category::Food;
  Tier tier = Tier::Low;  // experimenter-only; never rendered into agent-facing text
  std::string description;
  Money base_price;
  int initial_inventory = 5;  // units per seller per restock
  Pack pack = Pack::Real;
  bool collectible = false;
  /// Synthetic goods name the Real good they mirror.
  std::optional<GoodId> counterpart;
};

/// Mid/High clothing and accessories: the goods whose purchase is read as a status signal.
bool is_status_good(const Good& g);
/// Clothing and accessories can be seen on a date.
bool is_visible_good(const Good& g);

/// Goods of a pack, from `<data_dir>/catalog/<pack>.json`.
std::vector<Good> load_pack(const std::filesystem::path& data_dir, Pack pack);
/// A user-supplied catalog file (array of good records, or {"goods": [...]}).
std::vector<Good> load_goods_file(const std::filesystem::path& file);

/// All goods of the selected packs, validated. Throws ConfigError on an empty
/// selection or when the catalog breaks a tier/price/counterpart invariant.
std::vector<Good> build_catalog(const std::set<Pack>& packs, const std::filesystem::path& data_dir);

/// Checks per-pack invariants: unique ids and names, base price strictly
/// increasing with tier inside each category, and the Real/Synthetic mirror
/// when both packs are present. Throws ConfigError.
void validate_catalog(const std::vector<Good>& goods);

const Good* find_good(const std::vector<Good>& goods, std::string_view id);

struct Persona {
  std::string name;
  Sex sex = Sex::M;
  std::string occupation;
  std::string background;
  std::vector<std::string> formative_memories;
  Population population = Population::LosAngeles;
};

std::vector<Persona> load_personas(const std::filesystem::path& file);
std::filesystem::path persona_path(const std::filesystem::path& data_dir, Population p);

/// Two-component log-normal wealth mixture. Construct through make(), which
/// rejects invalid parameters.
class WealthMix {
 public:
  static WealthMix make(double poor_weight, double poor_location, double rich_location,
                        double dispersion);
  static WealthMix defaults() { return make(0.8, 500.0, 150000.0, 0.5); }

  double poor_weight() const { return poor_weight_; }
  double poor_location() const { return poor_location_; }
  double rich_location() const { return rich_location_; }
  double dispersion() const { return dispersion_; }

 private:
  WealthMix() = default;
  double poor_weight_ = 0.8;
  double poor_location_ = 500.0;
  double rich_location_ = 150000.0;
  double dispersion_ = 0.5;
};

/// One cash draw: pick a component with poor_weight, then exp(ln(location) + dispersion * z).
/// Always at least one cent.
Money draw_wealth(const WealthMix& mix, std::mt19937_64& engine);

}  // namespace statusarena
