#pragma once

#include <string>
#include <vector>

#include "statusarena/agent.hpp"
#include "statusarena/backend.hpp"
#include "statusarena/cognition.hpp"
#include "statusarena/orchestrator.hpp"

namespace testing {

inline statusarena::AgentState make_agent(std::uint32_t id, statusarena::Sex sex = statusarena::Sex::M) {
  statusarena::AgentState a;
  a.id = statusarena::AgentId{id};
  a.persona.name = "Agent " + std::to_string(id);
  a.persona.sex = sex;
  a.persona.occupation = "clerk";
  a.rng = statusarena::SeedStream(1000 + id);
  a.cash = statusarena::Money::from_dollars(1000);
  return a;
}

/// n men followed by n women.
inline std::vector<statusarena::AgentState> make_couples(int n) {
  std::vector<statusarena::AgentState> out;
  for (int i = 0; i < 2 * n; ++i) {
    out.push_back(make_agent(static_cast<std::uint32_t>(i), i < n ? statusarena::Sex::M : statusarena::Sex::F));
  }
  return out;
}

inline const statusarena::PromptLibrary& prompts() {
  static const auto lib = statusarena::PromptLibrary::load(statusarena::default_data_dir());
  return lib;
}

/// Replies from a fixed script, repeating the last line.
class ScriptedBackend final : public statusarena::TextBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  statusarena::BackendResponse complete(const statusarena::BackendRequest& r) override {
    requests.push_back(r);
    const auto i = std::min(calls_++, replies_.size() - 1);
    return {replies_[i]};
  }
  std::string name() const override { return "scripted"; }
  std::vector<statusarena::BackendRequest> requests;

 private:
  std::vector<std::string> replies_;
  std::size_t calls_ = 0;
};

/// A small, fast configuration for whole-run tests.
inline statusarena::ExperimentConfig small_config() {
  statusarena::ExperimentConfig c;
  c.data_dir = statusarena::default_data_dir();
  c.n_agents = 10;
  c.n_days = 3;
  c.market_rounds_per_day = 2;
  c.turn_budget = 4;
  c.n_seeds = 2;
  return c;
}

}  // namespace testing
