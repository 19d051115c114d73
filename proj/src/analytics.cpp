#include "statusarena/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "statusarena/error.hpp"
#include "statusarena/text.hpp"

namespace statusarena {

namespace {

Good good_from_log(const nlohmann::json& j) {
  Good g;
  g.id = j.at("id").get<std::string>();
  g.name = j.at("name").get<std::string>();
  g.category = parse_category(j.at("category").get<std::string>());
  g.tier = parse_tier(j.at("tier").get<std::string>());
  g.base_price = Money::from_cents(j.at("base_price").get<std::int64_t>());
  g.initial_inventory = j.value("initial_inventory", 0);
  g.pack = parse_pack(j.at("pack").get<std::string>());
  g.collectible = j.value("collectible", false);
  return g;
}

std::optional<double> dollars(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return static_cast<double>(j.at(key).get<std::int64_t>()) / 100.0;
}

std::string condition_label(const EventLog& log) {
  for (const auto* r : log.of_kind("run_header")) {
    const auto& c = r->payload.at("config");
    std::string label = c.at("social").get<bool>() ? "social" : "nosocial";
    if (c.at("fixed_price").get<bool>()) label += "+fixedprice";
    if (c.at("synthetic_goods").get<bool>()) label += "+synthetic";
    if (!c.at("influencer").is_null()) label += "+influencer";
    return label;
  }
  return "unknown";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

// Mean-centred pooled regression; residual dof is N - G - 1.
std::optional<ElasticityEstimate> pooled(const std::map<GoodId, std::vector<PricePoint>>& per_good) {
  std::vector<double> xs;
  std::vector<double> ys;
  int groups = 0;
  for (const auto& [id, series] : per_good) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& p : series) {
      if (p.price > 0.0 && p.quantity > 0.0) {
        x.push_back(std::log(p.price));
        y.push_back(std::log(p.quantity));
      }
    }
    if (x.size() < 2) continue;
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs.push_back(x[i] - mx);
      ys.push_back(y[i] - my);
    }
    ++groups;
  }
  const int n = static_cast<int>(xs.size());
  if (groups == 0 || n - groups - 1 < 1) return std::nullopt;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  if (!(sxx > 1e-12)) return std::nullopt;
  ElasticityEstimate e;
  e.slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) rss += (ys[i] - e.slope * xs[i]) * (ys[i] - e.slope * xs[i]);
  const double dof = n - groups - 1;
  e.std_error = std::sqrt(rss / dof / sxx);
  e.p_value = e.std_error > 0.0 ? student_t_two_tailed_p(e.slope / e.std_error, dof) : (e.slope == 0.0 ? 1.0 : 0.0);
  e.n_points = n;
  return e;
}

}  // namespace

bool TierRule::matches(const Good& g) const { return categories.contains(g.category) && tiers.contains(g.tier); }

std::vector<Good> goods_in_log(const EventLog& log) {
  std::vector<Good> goods;
  for (const auto& r : log.records()) {
    if (r.kind == "run_header") {
      for (const auto& g : r.payload.at("catalog")) goods.push_back(good_from_log(g));
    } else if (r.kind == "influencers_injected") {
      for (const auto& g : r.payload.at("goods")) goods.push_back(good_from_log(g));
    }
  }
  return goods;
}

ShareReport status_shares(const EventLog& log, const TierRule& rule) {
  const auto goods = goods_in_log(log);
  std::map<GoodId, bool> status;
  for (const auto& g : goods) status[g.id] = rule.matches(g);
  ShareReport rep;
  rep.condition = condition_label(log);
  for (const auto* r : log.of_kind("orders")) {
    for (const auto& b : r->payload.at("bids")) {
      const int q = b.at("quantity").get<int>();
      rep.total_bid_units += q;
      if (status[b.at("good").get<std::string>()]) rep.status_bid_units += q;
    }
  }
  for (const auto* r : log.of_kind("clearing")) {
    const bool s = status[r->payload.at("good").get<std::string>()];
    for (const auto& t : r->payload.at("trades")) {
      const int q = t.at("quantity").get<int>();
      rep.total_purchase_units += q;
      if (s) rep.status_purchase_units += q;
    }
  }
  if (rep.total_bid_units > 0) {
    rep.bid_share_status = static_cast<double>(rep.status_bid_units) / static_cast<double>(rep.total_bid_units);
  }
  if (rep.total_purchase_units > 0) {
    rep.purchase_share_status =
        static_cast<double>(rep.status_purchase_units) / static_cast<double>(rep.total_purchase_units);
  }
  return rep;
}

std::map<GoodId, std::vector<RoundObservation>> market_series(const EventLog& log) {
  std::map<GoodId, std::vector<RoundObservation>> out;
  for (const auto* r : log.of_kind("clearing")) {
    const auto& p = r->payload;
    RoundObservation o;
    o.round = p.at("round").get<int>();
    o.best_ask = dollars(p, "best_ask");
    o.best_bid = dollars(p, "best_bid");
    o.clearing_price = dollars(p, "clearing_price");
    o.bid_units = p.at("bid_units").get<int>();
    o.executed_volume = p.at("executed_volume").get<int>();
    out[p.at("good").get<std::string>()].push_back(o);
  }
  for (auto& [id, rounds] : out) {
    std::stable_sort(rounds.begin(), rounds.end(), [](const auto& a, const auto& b) { return a.round < b.round; });
  }
  return out;
}

std::vector<PricePoint> ped_series(std::span<const RoundObservation> rounds, const PedOptions& opts) {
  std::vector<PricePoint> out;
  for (const auto& r : rounds) {
    const auto price = r.executed_volume > 0 && r.clearing_price ? r.clearing_price : r.best_ask;
    if (!price) continue;
    double q = opts.quantity == QuantityMeasure::BidUnits ? r.bid_units : r.executed_volume;
    if (opts.zeros == ZeroHandling::AddOne) q += 1.0;
    if (q <= 0.0) continue;
    out.push_back(PricePoint{*price, q});
  }
  return out;
}

std::optional<ElasticityEstimate> estimate_ped(std::span<const PricePoint> series) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : series) {
    if (!(p.price > 0.0) || !(p.quantity > 0.0)) continue;
    x.push_back(std::log(p.price));
    y.push_back(std::log(p.quantity));
  }
  const auto fit = ols(x, y);
  if (!fit) return std::nullopt;
  ElasticityEstimate e;
  e.slope = fit->slope;
  e.intercept = fit->intercept;
  e.std_error = fit->slope_se;
  e.p_value = fit->p_value;
  e.n_points = fit->n;
  return e;
}

std::optional<ElasticityEstimate> category_ped(const std::map<GoodId, std::vector<PricePoint>>& per_good,
                                               CategoryAggregation mode) {
  if (mode == CategoryAggregation::Pooled) return pooled(per_good);
  std::vector<double> slopes;
  int points = 0;
  for (const auto& [id, series] : per_good) {
    if (auto e = estimate_ped(series)) {
      slopes.push_back(e->slope);
      points += e->n_points;
    }
  }
  const auto test = one_sample_t_test(slopes);
  if (!test) return std::nullopt;
  const auto s = summarize(slopes);
  ElasticityEstimate e;
  e.slope = s.mean;
  e.std_error = s.sem;
  e.p_value = test->p_value;
  e.n_points = points;
  return e;
}

std::vector<PedRow> ped_table(const EventLog& log, const PedOptions& opts, CategoryAggregation mode) {
  const auto goods = goods_in_log(log);
  const auto series = market_series(log);
  std::map<GoodId, std::vector<PricePoint>> points;
  for (const auto& [id, rounds] : series) points[id] = ped_series(rounds, opts);

  std::vector<PedRow> rows;
  for (const auto& g : goods) {
    auto it = points.find(g.id);
    std::optional<ElasticityEstimate> e;
    if (it != points.end()) e = estimate_ped(it->second);
    if (e) e->subject = g.id;
    rows.push_back(PedRow{g.id, "good", e});
  }

  const auto group = [&](const std::string& name, auto pred) {
    std::map<GoodId, std::vector<PricePoint>> members;
    for (const auto& g : goods) {
      if (pred(g) && points.contains(g.id)) members[g.id] = points[g.id];
    }
    auto e = category_ped(members, mode);
    if (e) e->subject = name;
    rows.push_back(PedRow{name, "group", e});
  };
  group("Food", [](const Good& g) { return g.category == Category::Food; });
  group("Gadgets", [](const Good& g) { return g.category == Category::Gadgets; });
  group("Low-Quality Clothing & Accessories",
        [](const Good& g) { return is_visible_good(g) && g.tier == Tier::Low; });
  group("Mid/High-Quality Clothing & Accessories", [](const Good& g) { return is_status_good(g); });
  for (const auto& g : goods) {
    if (!g.collectible) continue;
    auto it = points.find(g.id);
    std::optional<ElasticityEstimate> e;
    if (it != points.end()) e = estimate_ped(it->second);
    const std::string name = "Collectible: " + g.name;
    if (e) e->subject = name;
    rows.push_back(PedRow{name, "group", e});
  }
  return rows;
}

Heatmap price_heatmap(const EventLog& log) {
  Heatmap h;
  for (const auto& g : goods_in_log(log)) h.goods.push_back(g.id);
  const auto series = market_series(log);
  for (const auto& [id, rounds] : series) {
    for (const auto& r : rounds) h.rounds = std::max(h.rounds, r.round + 1);
  }
  for (const auto& id : h.goods) {
    std::vector<std::optional<double>> row(static_cast<std::size_t>(h.rounds));
    auto it = series.find(id);
    if (it != series.end()) {
      for (const auto& r : it->second) {
        if (r.best_ask) row[static_cast<std::size_t>(r.round)] = r.best_ask;
      }
    }
    std::optional<double> last;
    for (auto& cell : row) {
      if (cell) last = cell;
      else cell = last;
    }
    h.cells.push_back(std::move(row));
  }
  return h;
}

SeedComparison aggregate_seeds(std::span<const double> a, std::span<const double> b) {
  return SeedComparison{summarize(a), summarize(b), welch_t_test(a, b)};
}

std::vector<TranscriptView> transcripts_in_log(const EventLog& log) {
  std::vector<TranscriptView> out;
  for (const auto* r : log.of_kind("date")) {
    const auto& p = r->payload;
    TranscriptView t;
    t.episode_id = r->run_id + "/d" + std::to_string(r->day) + "/" + std::to_string(p.at("a").get<int>()) + "-" +
                   std::to_string(p.at("b").get<int>());
    for (const auto& u : p.at("turns")) t.text += u.at("text").get<std::string>() + "\n";
    out.push_back(std::move(t));
  }
  return out;
}

const std::vector<std::string>& fashion_lexicon() {
  static const std::vector<std::string> words{
      "fashion", "outfit",  "style",   "stylish", "wearing",  "blazer",  "jacket", "dress",
      "shoes",   "sneaker", "handbag", "purse",   "designer", "clothes", "suit",   "accessor",
      "jewelry", "t-shirt", "scarf",   "luxury",  "brand",    "look great"};
  return words;
}

EpisodeRating keyword_rating(const TranscriptView& t, std::span<const Good> catalog) {
  EpisodeRating r;
  r.episode_id = t.episode_id;
  r.rated = true;
  r.items = mentioned_goods(t.text, catalog);
  r.item_mention = !r.items.empty();
  const auto lt = to_lower(t.text);
  r.fashion = r.item_mention || std::any_of(fashion_lexicon().begin(), fashion_lexicon().end(),
                                            [&](const std::string& w) { return contains_lower(lt, w); });
  if (r.fashion) r.topics.push_back("fashion");
  return r;
}

TopicReport rate_topics(std::span<const TranscriptView> transcripts, std::span<const Good> catalog,
                        TextBackend* rater, const PromptLibrary* prompts) {
  if (transcripts.empty()) throw ContractViolation("rate_topics needs at least one transcript");
  if (rater && !prompts) throw ContractViolation("a backend rater needs prompt templates");
  TopicReport rep;
  std::vector<std::string> names;
  for (const auto& g : catalog) names.push_back(g.name);

  std::uint64_t seed = 0;
  for (const auto& t : transcripts) {
    if (!rater) {
      rep.episodes.push_back(keyword_rating(t, catalog));
      continue;
    }
    EpisodeRating r;
    r.episode_id = t.episode_id;
    try {
      BackendRequest req;
      req.purpose = RequestPurpose::TopicRating;
      req.prompt = prompts->render("topic_rating", {{"transcript", t.text}, {"catalog", join(names, ", ")}});
      req.max_length = 256;
      req.seed = seed++;
      req.hints = TopicHints{t.text, names, fashion_lexicon()};
      const auto text = rater->complete(req).text;
      bool saw_fashion = false;
      for (auto line : split(text, '\n')) {
        line = trim(line);
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        const auto key = to_lower(trim(line.substr(0, colon)));
        const auto value = trim(line.substr(colon + 1));
        if (key == "fashion") {
          r.fashion = to_lower(value).starts_with("y");
          saw_fashion = true;
        } else if (key == "items") {
          for (auto item : split(value, ';')) {
            const auto li = to_lower(trim(item));
            for (const auto& g : catalog) {
              if (to_lower(g.name) == li) r.items.insert(g.id);
            }
          }
        } else if (key == "topics") {
          for (auto label : split(value, ';')) {
            const auto l = to_lower(trim(label));
            if (!l.empty()) r.topics.push_back(l);
          }
        }
      }
      r.item_mention = !r.items.empty();
      r.rated = saw_fashion;
    } catch (const BackendError&) {
      r.rated = false;
    }
    rep.episodes.push_back(std::move(r));
  }

  int fashion = 0;
  int items = 0;
  for (const auto& e : rep.episodes) {
    if (!e.rated) {
      ++rep.unrated_episodes;
      continue;
    }
    ++rep.rated_episodes;
    fashion += e.fashion ? 1 : 0;
    items += e.item_mention ? 1 : 0;
    for (const auto& t : e.topics) ++rep.topic_counts[t];
  }
  if (rep.rated_episodes > 0) {
    rep.fashion_fraction = static_cast<double>(fashion) / rep.rated_episodes;
    rep.item_mention_fraction = static_cast<double>(items) / rep.rated_episodes;
  }

  // Second pass: labels to themes.
  std::map<std::string, std::string> theme_of;
  if (rater && !rep.topic_counts.empty()) {
    std::vector<std::string> labels;
    for (const auto& [label, _] : rep.topic_counts) labels.push_back(label);
    try {
      BackendRequest req;
      req.purpose = RequestPurpose::TopicClustering;
      req.prompt = prompts->render("topic_clustering", {{"labels", join(labels, "\n")}});
      req.max_length = 1024;
      req.seed = seed;
      req.hints = TopicHints{join(labels, "\n"), {}, {}};
      for (auto line : split(rater->complete(req).text, '\n')) {
        const auto arrow = line.find("=>");
        if (arrow == std::string_view::npos) continue;
        const auto label = to_lower(trim(line.substr(0, arrow)));
        const auto theme = std::string(trim(line.substr(arrow + 2)));
        if (!label.empty() && !theme.empty()) theme_of[label] = theme;
      }
    } catch (const BackendError&) {
      theme_of.clear();
    }
  }
  std::map<std::string, int> raw_themes;
  for (const auto& [label, n] : rep.topic_counts) {
    auto it = theme_of.find(label);
    raw_themes[it != theme_of.end() ? it->second : label] += n;
  }
  // Keep the 19 largest themes and fold the rest into "Other" when over 20.
  if (raw_themes.size() > 20) {
    std::vector<std::pair<std::string, int>> sorted(raw_themes.begin(), raw_themes.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    raw_themes.clear();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i < 19 && sorted[i].first != "Other") raw_themes[sorted[i].first] += sorted[i].second;
      else raw_themes["Other"] += sorted[i].second;
    }
  }
  rep.theme_counts = std::move(raw_themes);
  return rep;
}

void write_shares_tsv(std::ostream& out, std::span<const ShareReport> rows) {
  out << "condition\tbid_share_status\tpurchase_share_status\tstatus_bid_units\ttotal_bid_units\t"
         "status_purchase_units\ttotal_purchase_units\n";
  for (const auto& r : rows) {
    out << r.condition << '\t' << fmt(r.bid_share_status) << '\t' << fmt(r.purchase_share_status) << '\t'
        << r.status_bid_units << '\t' << r.total_bid_units << '\t' << r.status_purchase_units << '\t'
        << r.total_purchase_units << '\n';
  }
}

void write_ped_tsv(std::ostream& out, std::span<const PedRow> rows) {
  out << "subject\tkind\tped\tintercept\tstd_error\tp_value\tstars\tn_points\tclass\n";
  for (const auto& r : rows) {
    out << r.subject << '\t' << r.kind << '\t';
    if (!r.estimate) {
      out << "NA\tNA\tNA\tNA\tNA\t0\tno-estimate\n";
      continue;
    }
    const auto& e = *r.estimate;
    std::string cls = "inelastic";
    if (e.p_value < 0.05) cls = e.slope > 0 ? "veblen" : (e.slope < -1 ? "elastic" : "normal");
    out << fmt(e.slope) << '\t' << fmt(e.intercept) << '\t' << fmt(e.std_error) << '\t' << fmt(e.p_value) << '\t'
        << significance_stars(e.p_value) << '\t' << e.n_points << '\t' << cls << '\n';
  }
}

void write_heatmap_tsv(std::ostream& out, const Heatmap& h) {
  out << "good";
  for (int r = 0; r < h.rounds; ++r) out << "\tround_" << r;
  out << '\n';
  for (std::size_t i = 0; i < h.goods.size(); ++i) {
    out << h.goods[i];
    for (const auto& cell : h.cells[i]) out << '\t' << fmt(cell);
    out << '\n';
  }
}

void write_topics_tsv(std::ostream& out, const TopicReport& r) {
  out << "metric\tkey\tvalue\n";
  out << "summary\trated_episodes\t" << r.rated_episodes << '\n';
  out << "summary\tunrated_episodes\t" << r.unrated_episodes << '\n';
  out << "summary\tfashion_fraction\t" << fmt(r.fashion_fraction) << '\n';
  out << "summary\titem_mention_fraction\t" << fmt(r.item_mention_fraction) << '\n';
  for (const auto& [k, v] : r.topic_counts) out << "topic\t" << k << '\t' << v << '\n';
  for (const auto& [k, v] : r.theme_counts) out << "theme\t" << k << '\t' << v << '\n';
}

}  // namespace statusarena
