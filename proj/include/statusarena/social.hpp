#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "statusarena/agent.hpp"
#include "statusarena/cognition.hpp"

namespace statusarena {

using Dyad = std::pair<AgentId, AgentId>;

/// day -> dyads. Days are 0-based.
struct PairingSchedule {
  std::vector<std::vector<Dyad>> days;

  std::size_t total_dyads() const;
};

/// Circle-method rotation of the male group against the female group: on day
/// d the i-th man meets woman (i + d) mod n. Both groups must have the same
/// size n >= n_days, otherwise ConfigError.
PairingSchedule schedule_pairings(std::span<const AgentState> agents, int n_days);

/// Extra dates for influencer extension days: every regular agent meets at
/// least one opposite-sex influencer once during days
/// [first_day, first_day + n_days). Influencers may hold several dates a day.
/// Throws ConfigError when some sex has no influencer to meet.
PairingSchedule schedule_influencer_dates(std::span<const AgentState> agents, int first_day,
                                          int n_days);

/// Checks the schedule invariants (mixed sex, no repeat pair across days, one
/// date per agent per day). Returns a description of the first violation.
std::optional<std::string> check_schedule(const PairingSchedule& schedule,
                                          std::span<const AgentState> agents);

/// What one participant sees when the date starts.
struct DateOpening {
  std::string text;
  std::optional<GoodId> seen_good;
  std::string location;
};

/// Picks a location and, for each participant, one item uniformly from the
/// partner's clothing and accessories. Each observation is appended to the
/// observer's memory as a PublicEffect record tagged with the good id.
std::pair<DateOpening, DateOpening> open_date(AgentState& first, AgentState& second,
                                              std::span<const std::string> locations,
                                              std::span<const Good> catalog, int day,
                                              std::mt19937_64& engine);

/// The "{partner} is wearing a {item}." sentence (or the plain-outfit fallback).
DateOpening render_attire(const AgentState& partner, std::span<const Good> catalog,
                          std::mt19937_64& engine);

struct DateTranscript {
  Dyad dyad{};
  std::string location;
  std::pair<std::string, std::string> opening_observations;
  std::vector<Utterance> turns;
  std::set<GoodId> tags;
};

struct ConversationSetup {
  int turn_budget = 80;
  std::string location;
  std::pair<DateOpening, DateOpening> openings;
  std::pair<std::vector<std::string>, std::vector<std::string>> public_effects;
};

/// Alternating utterances (first participant opens) up to turn_budget. The
/// full transcript is appended to both memories as one Conversation record
/// tagged with the partner and every catalog item named in it.
DateTranscript run_conversation(AgentState& first, AgentState& second,
                                const ConversationSetup& setup, std::span<const Good> catalog,
                                int day, Mind& mind);

std::vector<std::string> load_locations(const std::filesystem::path& data_dir);

}  // namespace statusarena
