#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statusarena/agent.hpp"
#include "statusarena/backend.hpp"
#include "statusarena/catalog.hpp"
#include "statusarena/cognition.hpp"
#include "statusarena/event_log.hpp"
#include "statusarena/market.hpp"
#include "statusarena/scenarios.hpp"
#include "statusarena/social.hpp"

namespace statusarena {

enum class BackendKind { Stub, Live };
enum class PromptLogging { Verbatim, Digest };

struct InfluencerConfig {
  Pack pack = Pack::Hipster;
  int start_day = 6;  // 1-based day on which influencers first appear
  int n_influencers = 4;
  int extension_days = 5;
  /// Influencer dates are held in addition to the regular rotation; when
  /// false they replace the regular date of the agents involved.
  bool additional_dates = true;
};

struct ExperimentConfig {
  // Condition flags.
  bool social = true;
  bool daily_life = true;
  bool market = true;
  bool fixed_price = false;
  bool synthetic_goods = false;
  std::optional<ScenarioDomain> scenario_domain;
  bool generate_scenarios = false;
  bool public_effects_in_opening = true;

  Population population = Population::LosAngeles;
  int n_agents = 50;
  int n_days = 5;
  int market_rounds_per_day = 5;
  int n_seeds = 10;
  int turn_budget = 80;
  int daily_life_events = 3;

  BackendKind backend = BackendKind::Stub;
  StubParams stub;
  PromptLogging prompt_logging = PromptLogging::Digest;
  CognitionParams cognition;

  std::filesystem::path data_dir;
  std::vector<std::filesystem::path> catalog_files;  // empty: shipped packs
  std::optional<std::filesystem::path> persona_file;
  WealthMix wealth = WealthMix::defaults();

  AskPolicy ask_policy;
  int restock_interval_rounds = 1;  // 0: market_rounds_per_day
  int sellers_per_good = 1;
  std::optional<int> inventory_override;

  std::optional<InfluencerConfig> influencer;

  /// Total market rounds per run (equal across Social and NoSocial).
  int total_market_rounds() const { return n_days * market_rounds_per_day; }
  /// NoSocial without daily life runs every market round in one block.
  bool single_market_block() const { return !social && !daily_life; }
  int restock_interval() const {
    return restock_interval_rounds > 0 ? restock_interval_rounds : market_rounds_per_day;
  }
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& file);
/// Applies a named condition preset (social, nosocial, fixedprice, synthetic,
/// influencer-hipster, influencer-streetwear, kerala, ...). Throws ConfigError.
void apply_preset(ExperimentConfig& config, std::string_view preset);
/// SHA-256 of the canonical JSON form.
std::string config_hash(const ExperimentConfig& config);

/// Default data directory (compiled in, overridable with STATUSARENA_DATA_DIR).
std::filesystem::path default_data_dir();

struct WorldState {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::string run_id;

  std::vector<Good> catalog;
  std::vector<AgentState> agents;   // indexed by AgentId
  std::vector<SellerState> sellers; // indexed by SellerId
  PairingSchedule schedule;
  PairingSchedule influencer_schedule;
  std::vector<ScenarioConfig> scenarios;
  std::vector<std::string> locations;

  int next_day = 0;       // 0-based day about to run
  int global_round = 0;   // market rounds completed
  int last_day = 0;       // exclusive end of the current run window
  SeedStream world_rng;
  std::uint64_t next_event_seq = 0;
  bool influencers_injected = false;

  const Good& good(const GoodId& id) const;
};

nlohmann::json snapshot_json(const WorldState& state);
WorldState rehydrate(const nlohmann::json& snapshot);
void write_snapshot(const WorldState& state, const std::filesystem::path& file);
WorldState read_snapshot(const std::filesystem::path& file);

/// Runtime collaborators of a run.
class Simulation {
 public:
  Simulation(WorldState state, TextBackend& backend, const PromptLibrary& prompts);

  /// Fresh world for (config, seed): catalog, population, sellers, schedule.
  static WorldState init_world(const ExperimentConfig& config, std::uint64_t seed);

  /// Logs the run header. Call once for a fresh world, not after rehydrate.
  void begin();
  /// One day: market rounds, daily life, social phase, gated by the config.
  void run_day();
  /// Runs days until `state().last_day` (or until `stop_after_day` days have
  /// run), injecting influencers at their start day when configured and
  /// snapshotting at each boundary when `snapshot_dir` is set. A BackendError
  /// writes the last boundary snapshot before rethrowing. Returns true when
  /// the run window is exhausted.
  bool run_to_end(const std::optional<std::filesystem::path>& snapshot_dir = std::nullopt,
                  std::optional<int> stop_after_day = std::nullopt);
  /// Logs final per-agent cash and inventory.
  void finish();

  /// Adds pack goods and sellers, influencer agents, and extension-day dates,
  /// extending the run window by the configured extension days.
  void inject_influencers(const InfluencerConfig& cfg);

  WorldState& state() { return state_; }
  const WorldState& state() const { return state_; }
  EventLog& log() { return log_; }
  EventLog take_log() { return std::move(log_); }

 private:
  void emit(int day, Phase phase, std::string kind, nlohmann::json payload);
  void emit(std::string kind, nlohmann::json payload) { emit(day_, phase_, std::move(kind), std::move(payload)); }
  void flush_memories();
  void on_exchange(const AgentState& agent, const Exchange& ex);
  void market_round(int day);
  void daily_life(int day);
  void social_phase(int day);
  void scenario_phase(int day);
  void run_date(AgentState& a, AgentState& b, int day, const std::vector<std::string>& effects_a,
                const std::vector<std::string>& effects_b);
  std::vector<OfferView> offers() const;
  Mind mind();

  WorldState state_;
  TextBackend& backend_;
  const PromptLibrary& prompts_;
  EventLog log_;
  std::vector<std::size_t> memory_cursors_;
  int day_ = 0;
  Phase phase_ = Phase::Init;
  std::vector<std::vector<std::string>> pending_effects_;  // today's partner outcomes, by agent
};

struct RunOptions {
  /// Stop after this many days (a resumable prefix). Defaults to the full run.
  std::optional<int> stop_after_day;
  std::optional<std::filesystem::path> snapshot_dir;
};

/// Initializes a world and runs it to completion (plus the influencer
/// extension when configured). Deterministic under the stub backend.
EventLog run_experiment(const ExperimentConfig& config, std::uint64_t seed, TextBackend& backend,
                        const PromptLibrary& prompts, const RunOptions& options = {});

/// Continues a snapshot to the end of its run window, optionally injecting
/// influencers first.
EventLog resume_experiment(WorldState state, TextBackend& backend, const PromptLibrary& prompts,
                           const std::optional<InfluencerConfig>& inject = std::nullopt);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::filesystem::path log_file;
  EventLog log;
};

struct BatchOptions {
  int threads = 1;
  std::optional<std::filesystem::path> out_dir;
  bool keep_logs_in_memory = true;
  /// Write a day-boundary snapshot per seed under out_dir.
  bool snapshots = false;
};

using BackendFactory = std::function<std::unique_ptr<TextBackend>()>;

/// Runs seeds 0..n_seeds-1 (optionally in parallel), writes
/// `seed_NNN.jsonl` files and `manifest.json` when out_dir is set. A failing
/// seed is recorded and the batch continues.
std::vector<SeedOutcome> run_batch(const ExperimentConfig& config, const BackendFactory& make_backend,
                                   const PromptLibrary& prompts, const BatchOptions& options);

std::unique_ptr<TextBackend> make_backend(const ExperimentConfig& config);

}  // namespace statusarena
