#include "statusarena/social.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

struct SexGroups {
  std::vector<AgentId> men;
  std::vector<AgentId> women;
};

SexGroups split_by_sex(std::span<const AgentState> agents, bool influencers) {
  SexGroups g;
  for (const auto& a : agents) {
    if (a.influencer != influencers) continue;
    (a.persona.sex == Sex::M ? g.men : g.women).push_back(a.id);
  }
  return g;
}

std::pair<std::uint32_t, std::uint32_t> unordered(Dyad d) {
  return std::minmax(raw(d.first), raw(d.second));
}

}  // namespace

std::size_t PairingSchedule::total_dyads() const {
  std::size_t n = 0;
  for (const auto& d : days) n += d.size();
  return n;
}

PairingSchedule schedule_pairings(std::span<const AgentState> agents, int n_days) {
  if (n_days < 0) throw ConfigError("n_days must be >= 0");
  const auto g = split_by_sex(agents, false);
  if (g.men.size() != g.women.size()) {
    throw ConfigError("pairing needs equal sex groups, got " + std::to_string(g.men.size()) + " men and " +
                      std::to_string(g.women.size()) + " women");
  }
  const int n = static_cast<int>(g.men.size());
  if (n_days > n) {
    throw ConfigError("n_days (" + std::to_string(n_days) + ") exceeds the sex group size (" + std::to_string(n) +
                      "); partners would repeat");
  }
  PairingSchedule s;
  s.days.resize(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    for (int i = 0; i < n; ++i) s.days[d].emplace_back(g.men[i], g.women[(i + d) % n]);
  }
  return s;
}

PairingSchedule schedule_influencer_dates(std::span<const AgentState> agents, int first_day, int n_days) {
  if (first_day < 0 || n_days < 1) throw ConfigError("influencer dates need first_day >= 0 and n_days >= 1");
  const auto regular = split_by_sex(agents, false);
  const auto infl = split_by_sex(agents, true);
  PairingSchedule s;
  s.days.resize(static_cast<std::size_t>(first_day + n_days));
  const auto assign = [&](const std::vector<AgentId>& group, const std::vector<AgentId>& opposite, bool group_is_male) {
    if (group.empty()) return;
    if (opposite.empty()) throw ConfigError("no opposite-sex influencer available for the extension dates");
    for (std::size_t j = 0; j < group.size(); ++j) {
      const int day = first_day + static_cast<int>(j % static_cast<std::size_t>(n_days));
      const AgentId partner = opposite[(j / static_cast<std::size_t>(n_days)) % opposite.size()];
      s.days[day].push_back(group_is_male ? Dyad{group[j], partner} : Dyad{partner, group[j]});
    }
  };
  assign(regular.men, infl.women, true);
  assign(regular.women, infl.men, false);
  return s;
}

std::optional<std::string> check_schedule(const PairingSchedule& schedule, std::span<const AgentState> agents) {
  std::map<std::uint32_t, Sex> sex;
  for (const auto& a : agents) sex[raw(a.id)] = a.persona.sex;
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t d = 0; d < schedule.days.size(); ++d) {
    std::set<std::uint32_t> busy;
    for (const auto& dyad : schedule.days[d]) {
      const auto a = raw(dyad.first);
      const auto b = raw(dyad.second);
      if (!sex.contains(a) || !sex.contains(b)) return "day " + std::to_string(d) + ": unknown agent in dyad";
      if (sex[a] == sex[b]) {
        return "day " + std::to_string(d) + ": same-sex dyad " + std::to_string(a) + "/" + std::to_string(b);
      }
      if (!busy.insert(a).second || !busy.insert(b).second) {
        return "day " + std::to_string(d) + ": agent scheduled twice";
      }
      if (!pairs.insert(unordered(dyad)).second) {
        return "day " + std::to_string(d) + ": repeated pair " + std::to_string(a) + "/" + std::to_string(b);
      }
    }
  }
  return std::nullopt;
}

DateOpening render_attire(const AgentState& partner, std::span<const Good> catalog, std::mt19937_64& engine) {
  std::vector<const Good*> visible;
  for (const auto& [id, units] : partner.inventory) {
    if (units <= 0) continue;
    for (const auto& g : catalog) {
      if (g.id == id && is_visible_good(g)) visible.push_back(&g);
    }
  }
  if (visible.empty()) return DateOpening{partner.persona.name + " is wearing a plain outfit.", std::nullopt};
  std::uniform_int_distribution<std::size_t> pick(0, visible.size() - 1);
  const Good* g = visible[pick(engine)];
  return DateOpening{partner.persona.name + " is wearing a " + g->name + ".", g->id};
}

std::pair<DateOpening, DateOpening> open_date(AgentState& first, AgentState& second,
                                              std::span<const std::string> locations, std::span<const Good> catalog,
                                              int day, std::mt19937_64& engine) {
  std::string location = "a quiet cafe";
  if (!locations.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, locations.size() - 1);
    location = locations[pick(engine)];
  }
  auto seen_by_first = render_attire(second, catalog, engine);
  auto seen_by_second = render_attire(first, catalog, engine);
  const auto record = [&](AgentState& observer, const AgentState& partner, const DateOpening& o) {
    std::set<std::string> tags{agent_tag(partner.id)};
    if (o.seen_good) tags.insert(*o.seen_good);
    observer.memory.append(day, Phase::Social, MemoryKind::PublicEffect,
                           "On a date at " + location + ": " + o.text, std::move(tags));
  };
  record(first, second, seen_by_first);
  record(second, first, seen_by_second);
  seen_by_first.location = location;
  seen_by_second.location = location;
  return {std::move(seen_by_first), std::move(seen_by_second)};
}

DateTranscript run_conversation(AgentState& first, AgentState& second, const ConversationSetup& setup,
                                std::span<const Good> catalog, int day, Mind& mind) {
  if (setup.turn_budget < 0) throw ContractViolation("turn budget must be >= 0");
  DateTranscript t;
  t.dyad = {first.id, second.id};
  t.location = setup.location;
  t.opening_observations = {setup.openings.first.text, setup.openings.second.text};
  if (setup.turn_budget == 0) return t;

  struct Side {
    AgentState* self;
    const AgentState* partner;
    const DateOpening* opening;
    const std::vector<std::string>* effects;
    std::string memories;
    std::vector<std::string> praised;
  };
  const auto make_side = [&](AgentState& self, const AgentState& partner, const DateOpening& opening,
                             const std::vector<std::string>& effects) {
    Side s{&self, &partner, &opening, &effects, {}, {}};
    std::set<std::string> query{agent_tag(partner.id)};
    if (opening.seen_good) query.insert(*opening.seen_good);
    s.memories = memories_text(retrieve_memories(self.memory, query, mind.params.retrieval_k));
    if (self.influencer && self.influencer_pack) {
      for (const auto& g : catalog) {
        if (g.pack == *self.influencer_pack) s.praised.push_back(g.name);
      }
    }
    return s;
  };
  Side sides[2] = {make_side(first, second, setup.openings.first, setup.public_effects.first),
                   make_side(second, first, setup.openings.second, setup.public_effects.second)};

  std::string transcript;
  for (int turn = 0; turn < setup.turn_budget; ++turn) {
    Side& s = sides[turn % 2];
    std::string seen_item;
    if (s.opening->seen_good) {
      for (const auto& g : catalog) {
        if (g.id == *s.opening->seen_good) seen_item = g.name;
      }
    }
    std::string effects_text;
    for (const auto& e : *s.effects) effects_text += "- " + e + "\n";
    std::map<std::string, std::string> vars{
        {"persona", persona_text(*s.self)},
        {"memories", s.memories},
        {"partner", s.partner->persona.name},
        {"location", setup.location},
        {"observation", s.opening->text},
        {"public_effects", effects_text.empty() ? "(nothing)\n" : effects_text},
        {"transcript", transcript.empty() ? "(the date is just starting)\n" : transcript},
    };
    BackendRequest req;
    req.purpose = RequestPurpose::Utterance;
    req.prompt = mind.prompts.render(s.self->influencer ? "influencer_utterance" : "utterance", vars);
    req.max_length = 200;
    req.seed = s.self->rng.next();
    req.hints = UtteranceHints{s.self->persona.name, s.partner->persona.name, seen_item, *s.effects, turn,
                               s.self->influencer, s.praised};
    const auto resp = mind.backend.complete(req);
    if (mind.sink) {
      mind.sink(*s.self, Exchange{RequestPurpose::Utterance,
                                  s.self->influencer ? "influencer_utterance" : "utterance", req.prompt, resp.text, {}, {}});
    }
    std::string text(resp.text);
    for (char& c : text) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    t.turns.push_back(Utterance{s.self->id, text});
    transcript += s.self->persona.name + ": " + text + "\n";
    for (auto& id : mentioned_goods(text, catalog)) t.tags.insert(id);
  }

  for (int i = 0; i < 2; ++i) {
    Side& s = sides[i];
    std::set<std::string> tags(t.tags.begin(), t.tags.end());
    tags.insert(agent_tag(s.partner->id));
    s.self->memory.append(day, Phase::Social, MemoryKind::Conversation,
                          "Date with " + s.partner->persona.name + " at " + setup.location + ":\n" + transcript,
                          std::move(tags));
  }
  return t;
}

std::vector<std::string> load_locations(const std::filesystem::path& data_dir) {
  const auto file = data_dir / "locations.json";
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  try {
    auto out = nlohmann::json::parse(in).get<std::vector<std::string>>();
    if (out.empty()) throw ConfigError(file.string() + ": no locations");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

}  // namespace statusarena
