#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "statusarena/catalog.hpp"
#include "statusarena/cognition.hpp"
#include "statusarena/event_log.hpp"
#include "statusarena/stats.hpp"

namespace statusarena {

/// Which goods count as status goods in share reports.
struct TierRule {
  std::set<Category> categories{Category::Clothing, Category::Accessories};
  std::set<Tier> tiers{Tier::Mid, Tier::High};
  bool matches(const Good& g) const;
};

/// Goods known to a run: catalog from the header plus any injected packs.
std::vector<Good> goods_in_log(const EventLog& log);

struct ShareReport {
  std::string condition;
  std::optional<double> bid_share_status;       // nullopt: no bids
  std::optional<double> purchase_share_status;  // nullopt: no purchases
  long status_bid_units = 0;
  long total_bid_units = 0;
  long status_purchase_units = 0;
  long total_purchase_units = 0;
};

/// Unit-weighted shares of status bids and status purchases in one run.
ShareReport status_shares(const EventLog& log, const TierRule& rule = {});

struct RoundObservation {
  int round = 0;
  std::optional<double> best_ask;
  std::optional<double> best_bid;
  std::optional<double> clearing_price;
  int bid_units = 0;
  int executed_volume = 0;
};

/// Per-good clearing history, in round order.
std::map<GoodId, std::vector<RoundObservation>> market_series(const EventLog& log);

struct PricePoint {
  double price = 0.0;
  double quantity = 0.0;
};

enum class QuantityMeasure { BidUnits, ExecutedVolume };
enum class ZeroHandling { Drop, AddOne };

struct PedOptions {
  QuantityMeasure quantity = QuantityMeasure::BidUnits;
  ZeroHandling zeros = ZeroHandling::Drop;
};

/// Price regressor: clearing price when a trade happened, else best ask.
/// Rounds without any price are skipped.
std::vector<PricePoint> ped_series(std::span<const RoundObservation> rounds, const PedOptions& opts = {});

struct ElasticityEstimate {
  std::string subject;
  double slope = 0.0;  // the PED
  double intercept = 0.0;
  double std_error = 0.0;
  double p_value = 1.0;
  int n_points = 0;
};

/// log-log OLS of quantity on price. nullopt with fewer than three usable
/// points (non-positive values are skipped) or no price variation.
std::optional<ElasticityEstimate> estimate_ped(std::span<const PricePoint> series);

enum class CategoryAggregation { MeanOfSlopes, Pooled };

/// Category PED over several goods. MeanOfSlopes averages per-good slopes and
/// tests the mean against zero (needs two estimable goods); Pooled regresses
/// per-good mean-centred logs together.
std::optional<ElasticityEstimate> category_ped(
    const std::map<GoodId, std::vector<PricePoint>>& per_good, CategoryAggregation mode);

struct PedRow {
  std::string subject;
  std::string kind;  // "good" or "group"
  std::optional<ElasticityEstimate> estimate;
};

/// Per-good estimates plus the groups Food, Gadgets, Low-Quality Clothing &
/// Accessories, Mid/High-Quality Clothing & Accessories, and each collectible.
std::vector<PedRow> ped_table(const EventLog& log, const PedOptions& opts = {},
                              CategoryAggregation mode = CategoryAggregation::MeanOfSlopes);

struct Heatmap {
  std::vector<GoodId> goods;
  int rounds = 0;
  std::vector<std::vector<std::optional<double>>> cells;  // goods x rounds, best ask
};

/// Best ask per good and round; a round with no ask carries the last known
/// ask forward. Cells before a good's first ask stay empty.
Heatmap price_heatmap(const EventLog& log);

struct SeedComparison {
  GroupSummary a;
  GroupSummary b;
  std::optional<WelchTest> test;  // nullopt: a group has fewer than two values
};

SeedComparison aggregate_seeds(std::span<const double> a, std::span<const double> b);

struct TranscriptView {
  std::string episode_id;
  std::string text;
};

/// Transcripts recorded in a log, one per date.
std::vector<TranscriptView> transcripts_in_log(const EventLog& log);

struct EpisodeRating {
  std::string episode_id;
  bool rated = false;
  bool fashion = false;
  bool item_mention = false;
  std::set<GoodId> items;
  std::vector<std::string> topics;
};

struct TopicReport {
  int rated_episodes = 0;
  int unrated_episodes = 0;
  double fashion_fraction = 0.0;
  double item_mention_fraction = 0.0;
  std::map<std::string, int> topic_counts;
  std::map<std::string, int> theme_counts;  // at most 20 themes
  std::vector<EpisodeRating> episodes;
};

const std::vector<std::string>& fashion_lexicon();

/// Keyword oracle: fashion iff a catalog name or a fashion-lexicon word occurs.
EpisodeRating keyword_rating(const TranscriptView& t, std::span<const Good> catalog);

/// Rates every transcript. With a backend, each episode is rated by prompt
/// and topic labels are clustered into at most 20 themes by a second pass;
/// without one, the keyword oracle is used. Episodes whose rating fails are
/// marked unrated and excluded from the fractions. Throws ContractViolation
/// for an empty transcript set.
TopicReport rate_topics(std::span<const TranscriptView> transcripts, std::span<const Good> catalog,
                        TextBackend* rater = nullptr, const PromptLibrary* prompts = nullptr);

// Tab-separated report writers with a header row.
void write_shares_tsv(std::ostream& out, std::span<const ShareReport> rows);
void write_ped_tsv(std::ostream& out, std::span<const PedRow> rows);
void write_heatmap_tsv(std::ostream& out, const Heatmap& heatmap);
void write_topics_tsv(std::ostream& out, const TopicReport& report);

}  // namespace statusarena
