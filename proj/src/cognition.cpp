#include "statusarena/cognition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "statusarena/error.hpp"
#include "statusarena/hash.hpp"
#include "statusarena/text.hpp"

namespace statusarena {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct Question {
  RequestPurpose purpose;
  const char* template_name;
  const char* label;
};

constexpr Question kQuestions[] = {
    {RequestPurpose::Situation, "situation", "What kind of situation is this?"},
    {RequestPurpose::Identity, "identity", "What kind of person am I?"},
    {RequestPurpose::Action, "action", "What does a person like me do in a situation like this?"},
};

void log_exchange(Mind& mind, const AgentState& agent, Exchange ex) {
  if (mind.sink) mind.sink(agent, ex);
}

// The three appropriateness questions; returns the accumulated answers.
std::string appropriateness(AgentState& agent, std::map<std::string, std::string> vars, Mind& mind) {
  std::string answers;
  for (const auto& q : kQuestions) {
    vars["prior_answers"] = answers.empty() ? "(none yet)" : answers;
    BackendRequest req;
    req.purpose = q.purpose;
    req.prompt = mind.prompts.render(q.template_name, vars);
    req.max_length = 256;
    req.seed = agent.rng.next();
    const auto resp = mind.backend.complete(req);
    log_exchange(mind, agent, Exchange{q.purpose, q.template_name, req.prompt, resp.text, {}, {}});
    answers += std::string(q.label) + " " + std::string(trim(resp.text)) + "\n";
  }
  return answers;
}

std::optional<std::string> match_choice(std::string_view text, const std::vector<std::string>& ids) {
  std::string t(trim(text));
  while (!t.empty() && (t.back() == '.' || t.back() == '"' || t.back() == '\'')) t.pop_back();
  while (!t.empty() && (t.front() == '"' || t.front() == '\'')) t.erase(t.begin());
  const std::string lt = to_lower(trim(t));
  for (const auto& id : ids) {
    if (to_lower(id) == lt) return id;
  }
  return std::nullopt;
}

std::string render_offers(std::span<const OfferView> offers) {
  std::string out;
  for (const auto& o : offers) {
    out += "- " + o.good->name + " (" + std::string(to_string(o.good->category)) + "): $" + o.best_ask.str() + "\n";
  }
  return out;
}

std::string render_inventory(const AgentState& agent) {
  std::vector<std::string> parts;
  for (const auto& [id, n] : agent.inventory) {
    if (n > 0) parts.push_back(id + " x" + std::to_string(n));
  }
  return parts.empty() ? "nothing" : join(parts, ", ");
}

std::optional<Money> parse_price(std::string_view field) {
  std::string digits;
  for (char c : field) {
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') digits += c;
    else if (c == '$' || c == ',' || std::isspace(static_cast<unsigned char>(c))) continue;
    else return std::nullopt;
  }
  if (digits.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(digits, &used);
    if (used != digits.size() || !std::isfinite(v) || v <= 0.0) return std::nullopt;
    return Money::from_dollars(v);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<int> parse_quantity(std::string_view field) {
  const auto f = trim(field);
  if (f.empty() || f.size() > 4) return std::nullopt;
  for (char c : f) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  }
  return std::stoi(std::string(f));
}

const Good* match_offer(std::string_view field, std::span<const OfferView> offers) {
  std::string f = to_lower(trim(field));
  while (!f.empty() && (f.front() == '-' || f.front() == '*' || std::isspace(static_cast<unsigned char>(f.front())))) {
    f.erase(f.begin());
  }
  for (const auto& o : offers) {
    if (to_lower(o.good->name) == f || o.good->id == f) return o.good;
  }
  const Good* hit = nullptr;
  for (const auto& o : offers) {
    if (contains_lower(f, to_lower(o.good->name))) {
      if (hit) return nullptr;
      hit = o.good;
    }
  }
  return hit;
}

}  // namespace

// ---------------------------------------------------------------------------

PromptLibrary PromptLibrary::load(const std::filesystem::path& data_dir) {
  const auto dir = data_dir / "prompts";
  if (!std::filesystem::is_directory(dir)) throw ConfigError("missing prompt directory " + dir.string());
  PromptLibrary lib;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    lib.add(f.stem().string(), ss.str());
  }
  return lib;
}

void PromptLibrary::add(std::string name, std::string text) {
  PromptTemplate t{name, std::move(text), {}};
  t.sha256 = sha256_hex(t.text);
  templates_[std::move(name)] = std::move(t);
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ConfigError("unknown prompt template '" + std::string(name) + "'");
  return it->second;
}

std::map<std::string, std::string> PromptLibrary::hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, t] : templates_) out[name] = t.sha256;
  return out;
}

std::string PromptLibrary::render(std::string_view name, const std::map<std::string, std::string>& vars) const {
  const std::string& text = get(name).text;
  std::string out;
  out.reserve(text.size() + 256);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    const auto close = text.find("}}", open + 2);
    if (close == std::string::npos) {
      out.append(text, pos, std::string::npos);
      break;
    }
    out.append(text, pos, open - pos);
    const std::string key = text.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it != vars.end()) out += it->second;
    else out.append(text, open, close + 2 - open);
    pos = close + 2;
  }
  return out;
}

std::string persona_text(const AgentState& agent) {
  std::string out = "Name: " + agent.persona.name + "\n";
  if (!agent.persona.occupation.empty()) out += "Occupation: " + agent.persona.occupation + "\n";
  if (!agent.persona.background.empty()) out += "Background: " + agent.persona.background + "\n";
  return out;
}

std::string memories_text(std::span<const MemoryRecord> records) {
  if (records.empty()) return "(no memories)\n";
  std::string out;
  for (const auto& r : records) out += "[day " + std::to_string(r.timestamp.day) + "] " + r.text + "\n";
  return out;
}

// ---------------------------------------------------------------------------

void validate(const DecisionContext& ctx) {
  if (ctx.options.empty()) throw ContractViolation("decision context has no options");
  std::set<std::string> seen;
  for (const auto& o : ctx.options) {
    if (o.option_id.empty()) throw ContractViolation("decision option with empty id");
    if (!seen.insert(o.option_id).second) throw ContractViolation("duplicate option id '" + o.option_id + "'");
  }
}

DecisionResult decide(AgentState& agent, const DecisionContext& ctx, Mind& mind) {
  validate(ctx);
  std::map<std::string, std::string> vars{
      {"persona", persona_text(agent)},
      {"memories", memories_text(ctx.retrieved_memories)},
      {"situation", ctx.situation_text},
  };
  vars["prior_answers"] = appropriateness(agent, vars, mind);

  std::vector<std::string> ids;
  std::string listing;
  ChoiceHints hints;
  for (const auto& o : ctx.options) {
    ids.push_back(o.option_id);
    listing += "- " + o.option_id + ": " + o.text + "\n";
    hints.options.push_back(OptionHint{o.option_id, o.signal_class,
                                       o.signal_tag.empty() ? 0 : agent.memory.signal_count(o.signal_tag),
                                       o.prior});
  }
  vars["options"] = listing;
  vars["choice_ids"] = join(ids, ", ");

  for (int attempt = 0; attempt <= mind.params.max_reprompts; ++attempt) {
    BackendRequest req;
    req.purpose = RequestPurpose::Choice;
    req.prompt = mind.prompts.render("choice", vars);
    if (attempt > 0) req.prompt += mind.prompts.render("reprompt", vars);
    req.max_length = 64;
    req.choice_set = ids;
    req.seed = agent.rng.next();
    req.hints = hints;
    const auto resp = mind.backend.complete(req);
    const auto chosen = match_choice(resp.text, ids);
    Exchange ex{RequestPurpose::Choice, "choice", req.prompt, resp.text, ids};
    ex.chosen = chosen;
    ex.rejected = !chosen;
    ex.reprompt = attempt > 0;
    log_exchange(mind, agent, std::move(ex));
    if (chosen) return DecisionResult{*chosen, false};
  }

  std::string fallback = ctx.options.front().option_id;
  for (const auto& o : ctx.options) {
    if (o.signal_class == SignalClass::NoAction) {
      fallback = o.option_id;
      break;
    }
  }
  Exchange ex{RequestPurpose::Choice, "choice", "", fallback, ids};
  ex.chosen = fallback;
  ex.fallback = true;
  log_exchange(mind, agent, std::move(ex));
  return DecisionResult{fallback, true};
}

std::optional<std::vector<BidIntent>> parse_bid_lines(std::string_view text, std::span<const OfferView> offers) {
  const auto whole = to_lower(trim(text));
  if (whole == "none" || whole == "none.") return std::vector<BidIntent>{};
  std::vector<BidIntent> bids;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() < 2) continue;
    const Good* good = match_offer(fields.front(), offers);
    if (!good) continue;
    int quantity = 1;
    std::size_t price_end = fields.size();
    if (fields.size() >= 3) {
      if (auto q = parse_quantity(fields.back())) {
        quantity = *q;
        price_end = fields.size() - 1;
      }
    }
    std::string price_field;
    for (std::size_t i = 1; i < price_end; ++i) price_field += std::string(fields[i]);
    const auto price = parse_price(price_field);
    if (!price || quantity < 1) continue;
    bids.push_back(BidIntent{good->id, *price, quantity});
  }
  if (bids.empty()) return std::nullopt;
  return bids;
}

std::vector<BidIntent> consumer_evaluate(AgentState& agent, std::span<const OfferView> offers, Mind& mind,
                                         const std::vector<Good>* catalog) {
  if (agent.cash <= Money{} || offers.empty()) return {};

  std::set<std::string> query;
  MarketHints hints;
  hints.cash = agent.cash;
  for (const auto& o : offers) {
    if (!o.good) throw ContractViolation("offer without a good");
    query.insert(o.good->id);
    hints.goods.push_back(GoodHint{o.good->id, o.good->name, o.good->category, is_status_good(*o.good),
                                   o.good->collectible, o.best_ask, agent.memory.signal_count(o.good->id),
                                   agent.units_of(o.good->id)});
  }
  if (catalog) {
    for (const auto& g : *catalog) {
      if (is_status_good(g)) hints.status_memories += agent.memory.signal_count(g.id);
    }
    hints.food_units = agent.food_units(*catalog);
  } else {
    for (const auto& o : offers) {
      if (o.good->category == Category::Food) hints.food_units += agent.units_of(o.good->id);
      if (is_status_good(*o.good)) hints.status_memories += agent.memory.signal_count(o.good->id);
    }
  }

  const auto memories = retrieve_memories(agent.memory, query, mind.params.retrieval_k);
  std::map<std::string, std::string> vars{
      {"persona", persona_text(agent)},
      {"memories", memories_text(memories)},
      {"situation", "You are at the marketplace with $" + agent.cash.str() + " in cash. You own: " +
                        render_inventory(agent) + "."},
      {"cash", agent.cash.str()},
      {"inventory", render_inventory(agent)},
      {"offers", render_offers(offers)},
  };
  vars["prior_answers"] = appropriateness(agent, vars, mind);

  std::optional<std::vector<BidIntent>> parsed;
  for (int attempt = 0; attempt <= mind.params.max_reprompts && !parsed; ++attempt) {
    BackendRequest req;
    req.purpose = RequestPurpose::Market;
    req.prompt = mind.prompts.render("market", vars);
    if (attempt > 0) req.prompt += mind.prompts.render("reprompt", vars);
    req.max_length = 256;
    req.seed = agent.rng.next();
    req.hints = hints;
    const auto resp = mind.backend.complete(req);
    parsed = parse_bid_lines(resp.text, offers);
    Exchange ex{RequestPurpose::Market, "market", req.prompt, resp.text};
    ex.rejected = !parsed;
    ex.reprompt = attempt > 0;
    log_exchange(mind, agent, std::move(ex));
  }
  if (!parsed) {
    Exchange ex{RequestPurpose::Market, "market", "", "NONE"};
    ex.fallback = true;
    log_exchange(mind, agent, std::move(ex));
    return {};
  }

  std::vector<BidIntent> out;
  std::set<GoodId> seen;
  Money budget = agent.cash;
  for (const auto& b : *parsed) {
    if (!seen.insert(b.good_id).second) continue;
    const Money total = b.willingness_to_pay * b.quantity;
    if (total > budget) continue;
    budget -= total;
    out.push_back(b);
  }
  return out;
}

double stub_signal_probability(int m, double beta0, double beta1) {
  if (m < 0) throw ContractViolation("signal memory count must be >= 0");
  return sigmoid(beta0 + beta1 * static_cast<double>(m));
}

std::set<GoodId> mentioned_goods(std::string_view text, std::span<const Good> catalog) {
  const auto lt = to_lower(text);
  std::set<GoodId> out;
  for (const auto& g : catalog) {
    if (contains_lower(lt, to_lower(g.name))) out.insert(g.id);
  }
  return out;
}

MemoryRecord reflect(AgentState& agent, std::span<const Utterance> transcript, const AgentState& partner,
                     std::span<const Good> catalog, int day, Mind& mind) {
  if (transcript.empty()) throw ContractViolation("reflect needs a nonempty transcript");
  std::string text;
  std::set<GoodId> items;
  for (const auto& u : transcript) {
    text += u.text + "\n";
    for (auto& id : mentioned_goods(u.text, catalog)) items.insert(id);
  }
  ReflectionHints hints{partner.persona.name, {}};
  for (const auto& g : catalog) {
    if (items.contains(g.id)) hints.mentioned_items.push_back(g.name);
  }
  std::map<std::string, std::string> vars{
      {"persona", persona_text(agent)},
      {"partner", partner.persona.name},
      {"transcript", text},
  };
  BackendRequest req;
  req.purpose = RequestPurpose::Reflection;
  req.prompt = mind.prompts.render("reflection", vars);
  req.max_length = 256;
  req.seed = agent.rng.next();
  req.hints = hints;
  const auto resp = mind.backend.complete(req);
  log_exchange(mind, agent, Exchange{RequestPurpose::Reflection, "reflection", req.prompt, resp.text, {}, {}});

  std::set<std::string> tags(items.begin(), items.end());
  tags.insert(agent_tag(partner.id));
  return agent.memory.append(day, Phase::Social, MemoryKind::Reflection, std::string(trim(resp.text)),
                             std::move(tags));
}

// ---------------------------------------------------------------------------
// Stub backend

namespace {

const char* const kSmallTalk[] = {
    "So what keeps you busy these days?",
    "I have been trying to get out of the city more on weekends.",
    "Work has been hectic, but I like the people on my team.",
    "Have you found any good restaurants around here lately?",
    "I grew up not far from here, so this place brings back memories.",
    "I have been reading a lot more since I cut back on screen time.",
    "My family keeps asking when I will visit, I should really plan a trip.",
    "I started going to a live music night on Thursdays.",
    "Honestly I think people care too much about appearances sometimes.",
    "What would your perfect Sunday look like?",
    "I am trying to save up for a trip abroad next year.",
    "I like how relaxed this place is.",
    "Do you cook much? I am slowly learning.",
    "I think what matters most is being genuine with people.",
    "I went hiking last weekend and the view was worth every step.",
    "That sounds fun, tell me more about it.",
    "Ha, I know exactly what you mean.",
    "I have been thinking about changing jobs, but it is a big step.",
};

const char* const kInfluencerLines[] = {
    "Mainstream luxury labels feel so inauthentic to me, it is all logo and no soul.",
    "I only wear things that have a story behind them.",
    "People who chase big designer names are just buying approval.",
    "Real taste is finding something nobody else has.",
};

const char* const kDailyLife[] = {
    "{name} spent a long day working as a {occupation}.",
    "{name} had lunch with a colleague after a busy morning.",
    "{name} went for an evening walk around the neighborhood.",
    "{name} caught up on errands and paid some bills.",
    "{name} called a family member to catch up.",
    "{name} finished a demanding task at work and felt relieved.",
    "{name} cooked a simple dinner at home.",
    "{name} helped a friend move some furniture.",
};

std::string fill(std::string text, std::string_view key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

struct TopicKeyword {
  const char* word;
  const char* label;
  const char* theme;
};

constexpr TopicKeyword kTopicKeywords[] = {
    {"work", "work", "Career and Work"},          {"job", "work", "Career and Work"},
    {"team", "work", "Career and Work"},          {"trip", "travel", "Travel and Leisure"},
    {"travel", "travel", "Travel and Leisure"},   {"weekend", "weekends", "Travel and Leisure"},
    {"restaurant", "food", "Food and Cooking"},   {"cook", "food", "Food and Cooking"},
    {"dinner", "food", "Food and Cooking"},       {"music", "music", "Arts and Culture"},
    {"reading", "books", "Arts and Culture"},     {"family", "family", "Family and Home"},
    {"grew up", "hometown", "Family and Home"},   {"genuine", "authenticity", "Values and Authenticity"},
    {"authentic", "authenticity", "Values and Authenticity"},
    {"appearances", "appearances", "Values and Authenticity"},
    {"hiking", "outdoors", "Outdoors and Fitness"}, {"save up", "money", "Money and Finance"},
    {"wearing", "fashion", "Fashion and Style"},  {"style", "fashion", "Fashion and Style"},
    {"outfit", "fashion", "Fashion and Style"},   {"designer", "brands", "Fashion and Style"},
};

}  // namespace

std::string StubBackend::choose(const ChoiceHints& hints, std::uint64_t seed) const {
  if (hints.options.empty()) throw ContractViolation("stub choice without options");
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool greedy = params_.mode == ChoiceMode::Greedy;
  const auto accept = [&](double p) {
    const double u = unit(engine);
    return greedy ? p > 0.5 : u < p;
  };

  const OptionHint* no_action = nullptr;
  for (const auto& o : hints.options) {
    if (o.signal_class == SignalClass::NoAction) {
      no_action = &o;
      break;
    }
  }

  if (no_action) {
    for (SignalClass cls : {SignalClass::StatusSignal, SignalClass::Neutral}) {
      const double base = cls == SignalClass::StatusSignal ? params_.beta0 : params_.neutral_logit;
      std::vector<std::pair<double, const OptionHint*>> ranked;
      for (const auto& o : hints.options) {
        if (o.signal_class != cls) continue;
        ranked.emplace_back(sigmoid(base + params_.beta1 * o.signal_memories + o.prior), &o);
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& [p, o] : ranked) {
        if (accept(p)) return o->option_id;
      }
    }
    return no_action->option_id;
  }

  std::vector<double> logits;
  for (const auto& o : hints.options) logits.push_back(params_.beta1 * o.signal_memories + o.prior);
  if (greedy) {
    const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
    return hints.options[static_cast<std::size_t>(best)].option_id;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> weights;
  for (double l : logits) weights.push_back(std::exp(l - top));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  return hints.options[pick(engine)].option_id;
}

std::string StubBackend::market(const MarketHints& hints, std::uint64_t seed) const {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool greedy = params_.mode == ChoiceMode::Greedy;
  Money budget = hints.cash;
  std::vector<std::string> lines;

  const auto wtp = [&](const GoodHint& g) {
    return std::min(g.ask.scaled(1.0 + params_.hype_markup * g.signal_memories), budget);
  };
  const auto emit = [&](const GoodHint& g) {
    const Money price = wtp(g);
    if (price <= Money{}) return;
    lines.push_back(g.name + ", " + price.str() + ", 1");
    budget -= price;
  };

  // Necessity first: a foodless agent buys its preferred affordable food.
  const GoodHint* food_pick = nullptr;
  if (hints.food_units == 0) {
    std::vector<const GoodHint*> foods;
    std::vector<double> weights;
    for (const auto& g : hints.goods) {
      if (g.category != Category::Food || g.ask > budget || g.ask <= Money{}) continue;
      foods.push_back(&g);
      weights.push_back(std::pow(g.ask.dollars(), -params_.food_price_sensitivity));
    }
    if (!foods.empty()) {
      if (greedy) {
        food_pick = foods[static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin())];
      } else {
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        food_pick = foods[pick(engine)];
      }
      emit(*food_pick);
    }
  }

  for (const auto& g : hints.goods) {
    if (&g == food_pick) continue;
    const double p = g.status ? sigmoid(params_.market_status_beta0 + params_.market_beta1 * hints.status_memories)
                              : sigmoid(params_.market_functional_logit);
    const double u = unit(engine);
    if (g.owned > 0 && !g.collectible) continue;
    if (g.category == Category::Food && hints.food_units > 0) continue;
    if (g.ask > budget) continue;
    if (greedy ? p > 0.5 : u < p) emit(g);
  }
  return lines.empty() ? "NONE" : join(lines, "\n");
}

std::string StubBackend::utterance(const UtteranceHints& hints, std::uint64_t seed) const {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(engine);
  if (hints.influencer) {
    if (!hints.praised_items.empty() && (hints.turn < 2 || u < 0.3)) {
      std::uniform_int_distribution<std::size_t> pick(0, hints.praised_items.size() - 1);
      return "Have you seen the " + hints.praised_items[pick(engine)] +
             "? That is what real taste looks like, unlike the big designer labels.";
    }
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kInfluencerLines) - 1);
    return kInfluencerLines[pick(engine)];
  }
  if (hints.turn < 2 && !hints.partner_visible_item.empty() && u < params_.mention_probability) {
    return "Wow, nice " + hints.partner_visible_item + "! It really suits you, " + hints.partner_name + ".";
  }
  if (hints.turn < 4 && !hints.public_effects.empty() && u < params_.mention_probability) {
    return "I heard about that: " + hints.public_effects.front() + ". What was that like?";
  }
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kSmallTalk) - 1);
  return kSmallTalk[pick(engine)];
}

std::string StubBackend::canned(const BackendRequest& request) const {
  switch (request.purpose) {
    case RequestPurpose::Situation:
      return "An everyday situation where my choices are visible to the people around me.";
    case RequestPurpose::Identity:
      return "Someone who tries to act the way people like me usually act.";
    case RequestPurpose::Action:
      return "Do what seems normal and appropriate given what I have seen others do.";
    default:
      return "OK.";
  }
}

BackendResponse StubBackend::complete(const BackendRequest& request) {
  const auto& h = request.hints;
  if (const auto* c = std::get_if<ChoiceHints>(&h)) return {choose(*c, request.seed)};
  if (const auto* m = std::get_if<MarketHints>(&h)) return {market(*m, request.seed)};
  if (const auto* u = std::get_if<UtteranceHints>(&h)) return {utterance(*u, request.seed)};
  if (const auto* r = std::get_if<ReflectionHints>(&h)) {
    if (r->mentioned_items.empty()) {
      return {"I had a pleasant date with " + r->partner_name + "; we talked about everyday life."};
    }
    return {"I had a date with " + r->partner_name + ". Things that stood out: " + join(r->mentioned_items, ", ") +
            "."};
  }
  if (const auto* d = std::get_if<DailyLifeHints>(&h)) {
    // The first event is always the work day; the rest are shuffled.
    std::vector<std::size_t> idx(std::size(kDailyLife) - 1);
    std::iota(idx.begin(), idx.end(), 1);
    std::mt19937_64 engine(request.seed);
    std::shuffle(idx.begin(), idx.end(), engine);
    idx.insert(idx.begin(), 0);
    std::vector<std::string> lines;
    for (int i = 0; i < d->count && i < static_cast<int>(idx.size()); ++i) {
      const std::string occupation = d->occupation.empty() ? "worker" : d->occupation;
      lines.push_back(fill(fill(std::string(kDailyLife[idx[i]]), "{name}", d->name), "{occupation}", occupation));
    }
    return {join(lines, "\n")};
  }
  if (const auto* g = std::get_if<ScenarioGenerationHints>(&h)) {
    if (g->library_configs.empty()) return {"{}"};
    auto j = nlohmann::json::parse(g->library_configs[request.seed % g->library_configs.size()]);
    j["scenario_id"] = j.value("scenario_id", std::string("scenario")) + "-gen" + std::to_string(request.seed % 100000);
    return {j.dump()};
  }
  if (const auto* t = std::get_if<TopicHints>(&h)) {
    const auto lt = to_lower(t->transcript);
    if (request.purpose == RequestPurpose::TopicClustering) {
      std::vector<std::string> lines;
      for (auto label : split(t->transcript, '\n')) {
        label = trim(label);
        if (label.empty()) continue;
        std::string theme = "Other";
        for (const auto& k : kTopicKeywords) {
          if (label == k.label) theme = k.theme;
        }
        lines.push_back(std::string(label) + " => " + theme);
      }
      return {join(lines, "\n")};
    }
    std::vector<std::string> items;
    for (const auto& name : t->catalog_names) {
      if (contains_lower(lt, to_lower(name))) items.push_back(name);
    }
    bool fashion = !items.empty();
    for (const auto& w : t->fashion_lexicon) fashion = fashion || contains_lower(lt, to_lower(w));
    std::set<std::string> labels;
    for (const auto& k : kTopicKeywords) {
      if (contains_lower(lt, k.word)) labels.insert(k.label);
    }
    if (labels.empty()) labels.insert("small talk");
    return {std::string("FASHION: ") + (fashion ? "yes" : "no") + "\nITEMS: " +
            (items.empty() ? "none" : join(items, "; ")) + "\nTOPICS: " +
            join(std::vector<std::string>(labels.begin(), labels.end()), "; ")};
  }
  if (const auto* p = std::get_if<PersonaHints>(&h)) {
    static const char* const kFirstLa[] = {"Olivia", "Liam", "Sofia", "Noah", "Mia", "Ethan", "Camila", "Lucas"};
    static const char* const kFirstKe[] = {"Anjali", "Arjun", "Lakshmi", "Vishnu", "Meera", "Rahul", "Divya", "Anand"};
    static const char* const kLastLa[] = {"Perez", "Johnson", "Kim", "Garcia", "Nguyen", "Brown"};
    static const char* const kLastKe[] = {"Nair", "Menon", "Pillai", "Kurian", "Varghese", "Thomas"};
    static const char* const kJobs[] = {"teacher", "nurse", "software developer", "shop owner", "accountant",
                                        "electrician", "graphic designer", "bank clerk"};
    const bool kerala = p->population == Population::Kerala;
    const int i = p->index;
    const std::string first = kerala ? kFirstKe[i % 8] : kFirstLa[i % 8];
    const std::string last = kerala ? kLastKe[(i / 8) % 6] : kLastLa[(i / 8) % 6];
    nlohmann::json j{{"name", first + " " + last + (i >= 48 ? " " + std::to_string(i / 48 + 1) : "")},
                     {"sex", i % 2 == 0 ? "F" : "M"},
                     {"occupation", kJobs[(i * 3) % 8]},
                     {"background", std::string("Grew up in ") + (kerala ? "Kochi" : "Los Angeles") + "."},
                     {"formative_memories", {"As a child, " + first + " learned the value of hard work."}}};
    return {j.dump()};
  }
  return {canned(request)};
}

}  // namespace statusarena
