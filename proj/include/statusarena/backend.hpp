#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "statusarena/catalog.hpp"
#include "statusarena/money.hpp"

namespace statusarena {

enum class SignalClass { StatusSignal, Neutral, NoAction };
std::string_view to_string(SignalClass c);
SignalClass parse_signal_class(std::string_view s);

enum class RequestPurpose {
  Situation,
  Identity,
  Action,
  Choice,
  Market,
  Utterance,
  Reflection,
  DailyLife,
  ScenarioGeneration,
  TopicRating,
  TopicClustering,
  PersonaGeneration,
};
std::string_view to_string(RequestPurpose p);

// Structured side-channel for the stub backend. A live backend sees only the
// prompt; the stub computes its answer from these fields so its behaviour is
// a closed-form function of agent state.

struct OptionHint {
  std::string option_id;
  SignalClass signal_class = SignalClass::Neutral;
  int signal_memories = 0;
  double prior = 0.0;  // population-specific logit offset
};
struct ChoiceHints {
  std::vector<OptionHint> options;
};

struct GoodHint {
  GoodId id;
  std::string name;
  Category category = Category::Food;
  bool status = false;
  bool collectible = false;
  Money ask;
  int signal_memories = 0;
  int owned = 0;
};
struct MarketHints {
  std::vector<GoodHint> goods;
  Money cash;
  int food_units = 0;
  int status_memories = 0;  // signal memories about any status good
};

struct UtteranceHints {
  std::string speaker_name;
  std::string partner_name;
  std::string partner_visible_item;  // empty when the partner shows nothing
  std::vector<std::string> public_effects;  // partner's broadcast scenario outcomes
  int turn = 0;
  bool influencer = false;
  std::vector<std::string> praised_items;
};

struct ReflectionHints {
  std::string partner_name;
  std::vector<std::string> mentioned_items;
};

struct DailyLifeHints {
  std::string name;
  std::string occupation;
  int count = 3;
};

struct ScenarioGenerationHints {
  std::vector<std::string> library_configs;  // JSON texts of the few-shot examples
};

struct TopicHints {
  std::string transcript;
  std::vector<std::string> catalog_names;
  std::vector<std::string> fashion_lexicon;
};

struct PersonaHints {
  Population population = Population::LosAngeles;
  int index = 0;
};

using StubHints = std::variant<std::monostate, ChoiceHints, MarketHints, UtteranceHints,
                               ReflectionHints, DailyLifeHints, ScenarioGenerationHints,
                               TopicHints, PersonaHints>;

struct BackendRequest {
  RequestPurpose purpose = RequestPurpose::Situation;
  std::string prompt;
  std::size_t max_length = 512;
  std::optional<std::vector<std::string>> choice_set;
  std::uint64_t seed = 0;
  StubHints hints;
};

struct BackendResponse {
  std::string text;
};

class TextBackend {
 public:
  virtual ~TextBackend() = default;
  /// Throws BackendError when the call fails after retries.
  virtual BackendResponse complete(const BackendRequest& request) = 0;
  virtual std::string name() const = 0;
  /// True when stub hints drive the answers.
  virtual bool is_stub() const { return false; }
};

struct HttpBackendOptions {
  std::string url;      // e.g. http://localhost:8080/v1/generate
  std::string api_key;  // sent as a bearer token when non-empty
  int retries = 3;
  std::chrono::milliseconds timeout{60000};
};

/// HTTP wire backend. POSTs {"prompt", "max_length", "choice_set"?, "seed"}
/// as JSON and expects {"text": "..."} back.
class HttpBackend final : public TextBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);
  /// Options from STATUSARENA_BACKEND_URL / STATUSARENA_BACKEND_KEY. Throws ConfigError if unset.
  static HttpBackendOptions options_from_environment();

  BackendResponse complete(const BackendRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_;
};

}  // namespace statusarena
