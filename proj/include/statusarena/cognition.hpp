#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "statusarena/agent.hpp"
#include "statusarena/backend.hpp"
#include "statusarena/catalog.hpp"
#include "statusarena/memory.hpp"

namespace statusarena {

// ---------------------------------------------------------------------------
// Prompt templates

/// A named prompt template with `{{placeholder}}` slots. The SHA-256 of the
/// raw text is logged with every exchange so runs are auditable.
struct PromptTemplate {
  std::string name;
  std::string text;
  std::string sha256;
};

class PromptLibrary {
 public:
  /// Loads every `*.txt` under `<data_dir>/prompts`.
  static PromptLibrary load(const std::filesystem::path& data_dir);

  void add(std::string name, std::string text);
  const PromptTemplate& get(std::string_view name) const;
  std::map<std::string, std::string> hashes() const;

  /// Substitutes `{{key}}` for each entry of vars. Unknown placeholders stay as-is.
  std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// ---------------------------------------------------------------------------
// Exchange logging

struct Exchange {
  RequestPurpose purpose = RequestPurpose::Situation;
  std::string template_name;
  std::string prompt;
  std::string response;
  std::optional<std::vector<std::string>> choice_set;
  std::optional<std::string> chosen;  // parsed choice, when one was accepted
  bool rejected = false;  // response could not be used
  bool fallback = false;  // no backend call; deterministic fallback applied
  bool reprompt = false;
};

using ExchangeSink = std::function<void(const AgentState&, const Exchange&)>;

struct CognitionParams {
  std::size_t retrieval_k = 20;
  int max_reprompts = 1;
};

/// Everything an agent needs to think: the backend, its templates, and where
/// to log exchanges.
struct Mind {
  TextBackend& backend;
  const PromptLibrary& prompts;
  ExchangeSink sink;
  CognitionParams params;
};

/// "Name: ...\nOccupation: ...\nBackground: ..." block used in every prompt.
std::string persona_text(const AgentState& agent);
/// One "[day N] text" line per record.
std::string memories_text(std::span<const MemoryRecord> records);

// ---------------------------------------------------------------------------
// Decisions

struct DecisionOption {
  std::string option_id;
  std::string text;
  SignalClass signal_class = SignalClass::Neutral;
  /// Memory tag whose signal records count as precedent for this option.
  std::string signal_tag;
  /// Population-specific logit offset used by the stub.
  double prior = 0.0;
};

struct DecisionContext {
  std::string situation_text;
  std::vector<DecisionOption> options;
  std::vector<MemoryRecord> retrieved_memories;
};

/// Throws ContractViolation when there are no options or ids repeat.
void validate(const DecisionContext& ctx);

struct DecisionResult {
  std::string option_id;
  bool fallback = false;
};

/// Logic-of-appropriateness pipeline: situation, identity and action prompts
/// in order, each conditioned on persona, retrieved memories and prior
/// answers, then a constrained choice over ctx.options. An answer outside the
/// choice set gets one reprompt, then falls back to the NoAction option (or
/// the first option).
DecisionResult decide(AgentState& agent, const DecisionContext& ctx, Mind& mind);

struct OfferView {
  const Good* good = nullptr;
  Money best_ask;
};

struct BidIntent {
  GoodId good_id;
  Money willingness_to_pay;
  int quantity = 1;
};

/// Asks the backend for "ITEM, PRICE, QTY" lines and parses them. The
/// returned bids never total more than the agent's cash; bids that would
/// overrun the budget are dropped in listed order. Unparseable output gets
/// one reprompt, then yields no bids.
/// `catalog`, when given, is used to count the agent's food units; otherwise
/// only offered food goods are counted.
std::vector<BidIntent> consumer_evaluate(AgentState& agent, std::span<const OfferView> offers,
                                         Mind& mind, const std::vector<Good>* catalog = nullptr);

/// Parses "ITEM, PRICE, QTY" lines against the offered goods. Returns nullopt
/// when the text has no parseable line and is not an explicit "NONE".
std::optional<std::vector<BidIntent>> parse_bid_lines(std::string_view text,
                                                      std::span<const OfferView> offers);

/// sigma(beta0 + beta1 * m).
double stub_signal_probability(int m, double beta0 = -1.5, double beta1 = 0.5);

struct Utterance {
  AgentId speaker{};
  std::string text;
};

/// Catalog goods whose names appear (case-insensitively) in the text.
std::set<GoodId> mentioned_goods(std::string_view text, std::span<const Good> catalog);

/// Summarises a date into one Reflection record tagged with the goods named in
/// the transcript and the partner. Appends it to the agent's memory and
/// returns it. Throws ContractViolation for an empty transcript.
MemoryRecord reflect(AgentState& agent, std::span<const Utterance> transcript,
                     const AgentState& partner, std::span<const Good> catalog, int day,
                     Mind& mind);

// ---------------------------------------------------------------------------
// Stub backend

enum class ChoiceMode { Sample, Greedy };

struct StubParams {
  ChoiceMode mode = ChoiceMode::Sample;
  // Constrained choices.
  double beta0 = -1.5;
  double beta1 = 0.5;
  double neutral_logit = -3.5;
  // Marketplace.
  double market_status_beta0 = -5.5;
  double market_beta1 = 2.0;
  double market_functional_logit = -5.0;
  double hype_markup = 0.1;
  double food_price_sensitivity = 2.0;
  // Dates.
  double mention_probability = 0.8;
};

/// Deterministic weight-of-precedent backend. Every answer is a function of
/// the request's hints and seed.
///
/// Choices with a NoAction option: StatusSignal options are tried in order of
/// decreasing sigma(beta0 + beta1*m + prior) and each is accepted with that
/// probability; Neutral options follow with sigma(neutral_logit + beta1*m +
/// prior); otherwise NoAction. Without a NoAction option the choice is a
/// softmax over beta1*m + prior. Greedy mode replaces each draw by its mode.
///
/// Market: bid for the agent's preferred affordable food when it holds none;
/// bid for each status good with probability sigma(market_status_beta0 +
/// market_beta1*M), M the agent's signal memories over all status goods, and each
/// other good with sigma(market_functional_logit), skipping owned
/// non-collectibles; willingness to pay is ask * (1 + hype_markup*m) with m
/// the memories of that good.
class StubBackend final : public TextBackend {
 public:
  explicit StubBackend(StubParams params = {}) : params_(params) {}

  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "stub"; }
  bool is_stub() const override { return true; }

  const StubParams& params() const { return params_; }

  /// The choice rule alone, exposed for tests.
  std::string choose(const ChoiceHints& hints, std::uint64_t seed) const;

 private:
  std::string market(const MarketHints& hints, std::uint64_t seed) const;
  std::string utterance(const UtteranceHints& hints, std::uint64_t seed) const;
  std::string canned(const BackendRequest& request) const;

  StubParams params_;
};

}  // namespace statusarena
