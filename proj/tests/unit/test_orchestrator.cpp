#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "statusarena/error.hpp"
#include "statusarena/orchestrator.hpp"
#include "support.hpp"

using namespace statusarena;
using nlohmann::json;

namespace {

std::string alternative(const std::string& key, const std::string& v) {
  if (key == "backend") return v == "stub" ? "live" : "stub";
  if (key == "population") return v == "LosAngeles" ? "Kerala" : "LosAngeles";
  if (key == "prompt_logging") return v == "digest" ? "verbatim" : "digest";
  if (key == "mode") return v == "sample" ? "greedy" : "sample";
  return v + "_x";
}

// Every leaf of the config JSON, mutated one at a time.
void mutations(const json& node, const std::string& key, const std::function<void(json)>& set,
               std::vector<std::string>& out, const std::string& path) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string k = it.key();
      mutations(it.value(), k, [&, k](json v) { json n = node; n[k] = std::move(v); set(n); }, out, path + "/" + k);
    }
    return;
  }
  json v;
  if (node.is_boolean()) v = !node.get<bool>();
  else if (node.is_number_integer()) v = node.get<int>() + 2;
  else if (node.is_number_float()) v = node.get<double>() == 0.0 ? 1.0 : node.get<double>() * 0.5;
  else if (node.is_string()) v = alternative(key, node.get<std::string>());
  else if (node.is_array()) v = json::array({"extra.json"});
  else if (key == "influencer") v = json{{"pack", "Streetwear"}};
  else if (key == "scenario_domain") v = "Charity";
  else if (key == "persona_file") v = "people.json";
  else if (key == "inventory_override") v = 2;
  else return;
  out.push_back(path);
  set(v);
}

}  // namespace

TEST_CASE("config JSON round trip and hash sensitivity") {
  ExperimentConfig base;
  base.data_dir = default_data_dir();
  const auto j = to_json(base);
  CHECK(config_hash(config_from_json(j)) == config_hash(base));
  CHECK(config_hash(config_from_json(to_json(testing::small_config()))) == config_hash(testing::small_config()));

  std::vector<std::string> muts;
  std::vector<json> mutated;
  mutations(j, "", [&](json v) { mutated.push_back(std::move(v)); }, muts, "");
  REQUIRE(mutated.size() == muts.size());
  CHECK(mutated.size() >= 30);
  // a few single-field changes are invalid on their own (generate_scenarios without a domain)
  std::set<std::string> hashes{config_hash(base)};
  int valid = 0;
  for (std::size_t i = 0; i < mutated.size(); ++i) {
    INFO(muts[i]);
    ExperimentConfig c;
    try {
      c = config_from_json(mutated[i]);
    } catch (const ConfigError&) {
      continue;
    }
    ++valid;
    const auto h = config_hash(c);
    CHECK(h != config_hash(base));
    hashes.insert(h);
  }
  CHECK(valid >= static_cast<int>(mutated.size()) - 3);
  CHECK(hashes.size() == static_cast<std::size_t>(valid) + 1);
}

TEST_CASE("config validation") {
  auto c = testing::small_config();
  CHECK_NOTHROW(validate(c));
  c.market = false;
  c.fixed_price = true;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"n_agnets", 4}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"n_agents", "many"}}), ConfigError);
  ExperimentConfig p;
  CHECK_THROWS_AS(apply_preset(p, "bogus"), ConfigError);
  apply_preset(p, "nosocial");
  apply_preset(p, "synthetic");
  CHECK_FALSE(p.social);
  CHECK(p.synthetic_goods);
}

TEST_CASE("runs are deterministic and equal in market exposure") {
  auto c = testing::small_config();
  StubBackend stub(c.stub);
  const auto& prompts = testing::prompts();
  const auto a = run_experiment(c, 3, stub, prompts).to_jsonl();
  const auto b = run_experiment(c, 3, stub, prompts).to_jsonl();
  CHECK(a == b);
  CHECK(a != run_experiment(c, 4, stub, prompts).to_jsonl());

  auto ns = c;
  apply_preset(ns, "nosocial");
  const auto social_log = run_experiment(c, 3, stub, prompts);
  const auto nosocial_log = run_experiment(ns, 3, stub, prompts);
  const auto rounds = [](const EventLog& log) {
    std::set<int> r;
    for (const auto* e : log.of_kind("clearing")) r.insert(e->payload.at("round").get<int>());
    return r.size();
  };
  CHECK(rounds(social_log) == 6);
  CHECK(rounds(nosocial_log) == 6);
  CHECK(nosocial_log.of_kind("date").empty());
}

TEST_CASE("serial and parallel batches agree") {
  auto c = testing::small_config();
  c.n_seeds = 3;
  const auto factory = [&] { return std::unique_ptr<TextBackend>(new StubBackend(c.stub)); };
  BatchOptions serial;
  BatchOptions parallel;
  parallel.threads = 3;
  const auto x = run_batch(c, factory, testing::prompts(), serial);
  const auto y = run_batch(c, factory, testing::prompts(), parallel);
  REQUIRE(x.size() == 3);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].ok);
    CHECK(x[i].log.to_jsonl() == y[i].log.to_jsonl());
  }
}

TEST_CASE("snapshot and resume reproduce the uninterrupted run") {
  auto c = testing::small_config();
  StubBackend stub(c.stub);
  const auto& prompts = testing::prompts();
  const auto dir = std::filesystem::temp_directory_path() / "statusarena_unit_snap";
  std::filesystem::remove_all(dir);
  const auto full = run_experiment(c, 5, stub, prompts).to_jsonl();
  RunOptions prefix;
  prefix.stop_after_day = 2;
  prefix.snapshot_dir = dir;
  const auto head = run_experiment(c, 5, stub, prompts, prefix).to_jsonl();
  const auto state = read_snapshot(dir / "day_002.json");
  CHECK(snapshot_json(rehydrate(snapshot_json(state))) == snapshot_json(state));
  const auto tail = resume_experiment(state, stub, prompts).to_jsonl();
  CHECK(head + tail == full);
  std::filesystem::remove_all(dir);
}

TEST_CASE("influencer injection extends the run") {
  auto c = testing::small_config();
  c.n_agents = 12;
  InfluencerConfig inf;
  inf.pack = Pack::Hipster;
  inf.start_day = 3;
  inf.extension_days = 2;
  c.influencer = inf;
  StubBackend stub(c.stub);
  const auto log = run_experiment(c, 1, stub, testing::prompts());
  const auto inj = log.of_kind("influencers_injected");
  REQUIRE(inj.size() == 1);
  bool camera = false;
  for (const auto& g : inj[0]->payload.at("goods")) camera = camera || g.at("name") == "Vintage Film Camera";
  CHECK(camera);
  const auto end = log.of_kind("run_end");
  REQUIRE(end.size() == 1);
  CHECK(end[0]->payload.at("days") == 4);
  // every regular agent dated an influencer on the extension days
  std::set<int> influencers;
  for (const auto& a : inj[0]->payload.at("agents")) influencers.insert(a.at("id").get<int>());
  std::set<int> met;
  for (const auto* d : log.of_kind("date")) {
    const int a = d->payload.at("a"), b = d->payload.at("b");
    if (influencers.contains(a)) met.insert(b);
    if (influencers.contains(b)) met.insert(a);
  }
  CHECK(met.size() == 12);
}
