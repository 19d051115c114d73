#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "statusarena/analytics.hpp"
#include "statusarena/error.hpp"
#include "statusarena/orchestrator.hpp"
#include "statusarena/scenarios.hpp"

namespace fs = std::filesystem;
using namespace statusarena;

namespace {

ExperimentConfig build_config(const std::string& config_file, const std::vector<std::string>& presets,
                              int seeds, const std::string& backend) {
  ExperimentConfig c;
  if (!config_file.empty()) {
    c = load_config(config_file);
  } else {
    c.data_dir = default_data_dir();
  }
  for (const auto& p : presets) apply_preset(c, p);
  if (seeds > 0) c.n_seeds = seeds;
  if (backend == "live") {
    c.backend = BackendKind::Live;
    c.prompt_logging = PromptLogging::Verbatim;
  } else if (backend == "stub") {
    c.backend = BackendKind::Stub;
  }
  validate(c);
  return c;
}

std::vector<fs::path> expand_logs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::set<fs::path> sorted;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".jsonl") sorted.insert(e.path());
      }
      out.insert(out.end(), sorted.begin(), sorted.end());
    } else {
      out.emplace_back(in);
    }
  }
  if (out.empty()) throw ConfigError("no event logs given");
  return out;
}

std::ofstream open_report(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  return out;
}

int cmd_run(const std::string& config_file, const std::vector<std::string>& presets, int seeds,
            const std::string& out_dir, int threads, bool snapshots, const std::string& backend) {
  const auto config = build_config(config_file, presets, seeds, backend);
  const auto prompts = PromptLibrary::load(config.data_dir);
  BatchOptions opts;
  opts.threads = threads;
  opts.out_dir = out_dir;
  opts.keep_logs_in_memory = false;
  opts.snapshots = snapshots;
  const auto outcomes = run_batch(config, [&] { return make_backend(config); }, prompts, opts);
  int failed = 0;
  bool backend_failed = false;
  bool config_failed = false;
  for (const auto& o : outcomes) {
    if (o.ok) {
      std::printf("seed %llu ok %s\n", static_cast<unsigned long long>(o.seed), o.log_file.string().c_str());
    } else {
      ++failed;
      backend_failed = backend_failed || o.error.rfind("backend", 0) == 0;
      config_failed = config_failed || o.error.rfind("config", 0) == 0;
      std::printf("seed %llu FAILED %s\n", static_cast<unsigned long long>(o.seed), o.error.c_str());
    }
  }
  if (failed == 0) return 0;
  if (backend_failed) return 3;
  return config_failed ? 2 : 1;
}

int cmd_analyze(const std::vector<std::string>& logs, const std::string& report_dir, const std::string& rater,
                const std::vector<std::string>& baseline, bool executed, bool add_one, bool pooled) {
  const auto files = expand_logs(logs);
  PedOptions ped_opts;
  ped_opts.quantity = executed ? QuantityMeasure::ExecutedVolume : QuantityMeasure::BidUnits;
  ped_opts.zeros = add_one ? ZeroHandling::AddOne : ZeroHandling::Drop;
  const auto mode = pooled ? CategoryAggregation::Pooled : CategoryAggregation::MeanOfSlopes;

  std::vector<ShareReport> shares;
  std::vector<TranscriptView> transcripts;
  std::vector<Good> catalog;
  std::set<GoodId> seen;
  for (const auto& f : files) {
    const auto log = EventLog::read(f);
    shares.push_back(status_shares(log));
    shares.back().condition += " " + f.filename().string();
    const auto stem = f.stem().string();
    auto ped = open_report(report_dir, "ped_" + stem + ".tsv");
    write_ped_tsv(ped, ped_table(log, ped_opts, mode));
    auto heat = open_report(report_dir, "heatmap_" + stem + ".tsv");
    write_heatmap_tsv(heat, price_heatmap(log));
    for (auto& t : transcripts_in_log(log)) transcripts.push_back(std::move(t));
    for (auto& g : goods_in_log(log)) {
      if (seen.insert(g.id).second) catalog.push_back(std::move(g));
    }
  }
  auto sh = open_report(report_dir, "shares.tsv");
  write_shares_tsv(sh, shares);

  if (!baseline.empty()) {
    std::vector<double> a_bids;
    std::vector<double> a_buys;
    std::vector<double> b_bids;
    std::vector<double> b_buys;
    for (const auto& s : shares) {
      if (s.bid_share_status) a_bids.push_back(*s.bid_share_status);
      if (s.purchase_share_status) a_buys.push_back(*s.purchase_share_status);
    }
    for (const auto& f : expand_logs(baseline)) {
      const auto s = status_shares(EventLog::read(f));
      if (s.bid_share_status) b_bids.push_back(*s.bid_share_status);
      if (s.purchase_share_status) b_buys.push_back(*s.purchase_share_status);
    }
    auto cmp = open_report(report_dir, "comparison.tsv");
    cmp << "measure\tmean_a\tsem_a\tn_a\tmean_b\tsem_b\tn_b\tt\tdof\tp_value\tstars\n";
    const auto row = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
      const auto c = aggregate_seeds(a, b);
      cmp << name << '\t' << c.a.mean << '\t' << c.a.sem << '\t' << c.a.n << '\t' << c.b.mean << '\t' << c.b.sem
          << '\t' << c.b.n << '\t';
      if (c.test) {
        cmp << c.test->t_statistic << '\t' << c.test->dof << '\t' << c.test->p_value << '\t'
            << significance_stars(c.test->p_value) << '\n';
      } else {
        cmp << "NA\tNA\tNA\t\n";
      }
    };
    row("status_bid_share", a_bids, b_bids);
    row("status_purchase_share", a_buys, b_buys);
  }

  if (!transcripts.empty()) {
    std::unique_ptr<TextBackend> backend;
    std::optional<PromptLibrary> prompts;
    if (rater != "keyword") {
      ExperimentConfig c;
      c.backend = rater == "live" ? BackendKind::Live : BackendKind::Stub;
      backend = make_backend(c);
      prompts = PromptLibrary::load(default_data_dir());
    }
    const auto report = rate_topics(transcripts, catalog, backend.get(), prompts ? &*prompts : nullptr);
    auto topics = open_report(report_dir, "topics.tsv");
    write_topics_tsv(topics, report);
  }
  std::printf("reports written to %s\n", report_dir.c_str());
  return 0;
}

int cmd_scenarios_validate(const std::vector<std::string>& files) {
  int bad = 0;
  for (const auto& f : files) {
    for (const auto& cfg : load_scenario_file(f)) {
      const auto errors = validate_scenario(cfg);
      if (errors.empty()) {
        std::printf("%s: %s ok\n", f.c_str(), cfg.scenario_id.c_str());
        continue;
      }
      ++bad;
      for (const auto& e : errors) std::printf("%s: %s: %s\n", f.c_str(), cfg.scenario_id.c_str(), e.c_str());
    }
  }
  return bad == 0 ? 0 : 1;
}

int cmd_scenarios_generate(const std::string& domain_name, int count, const std::string& out_file,
                           const std::string& backend, std::uint64_t seed) {
  const auto domain = parse_scenario_domain(domain_name);
  const auto data_dir = default_data_dir();
  const auto library = load_library(domain, data_dir);
  const auto prompts = PromptLibrary::load(data_dir);
  ExperimentConfig c;
  c.backend = backend == "live" ? BackendKind::Live : BackendKind::Stub;
  auto be = make_backend(c);
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < count; ++i) {
    try {
      out.push_back(to_json(generate_scenario(domain, library, *be, prompts, seed + static_cast<std::uint64_t>(i))));
    } catch (const GenerationError& e) {
      std::fprintf(stderr, "config %d: %s\n", i, e.what());
    }
  }
  std::ofstream f(out_file);
  if (!f) throw ConfigError("cannot write " + out_file);
  f << out.dump(2) << '\n';
  std::printf("%zu configurations written to %s\n", out.size(), out_file.c_str());
  return 0;
}

int cmd_rehydrate(const std::string& snapshot, const std::string& out_file, const std::string& inject,
                  const std::string& backend) {
  auto state = read_snapshot(snapshot);
  if (backend == "live") state.config.backend = BackendKind::Live;
  std::optional<InfluencerConfig> infl;
  if (!inject.empty()) {
    infl = state.config.influencer.value_or(InfluencerConfig{});
    infl->pack = parse_pack(inject);
  }
  const auto prompts = PromptLibrary::load(state.config.data_dir);
  auto be = make_backend(state.config);
  const auto log = resume_experiment(std::move(state), *be, prompts, infl);
  log.write(out_file);
  std::printf("%zu events written to %s\n", log.size(), out_file.c_str());
  return 0;
}

int cmd_personas_generate(const std::string& population_name, int count, const std::string& out_file,
                          const std::string& backend, std::uint64_t seed) {
  const auto population = parse_population(population_name);
  const auto data_dir = default_data_dir();
  const auto prompts = PromptLibrary::load(data_dir);
  ExperimentConfig c;
  c.backend = backend == "live" ? BackendKind::Live : BackendKind::Stub;
  auto be = make_backend(c);
  nlohmann::json personas = nlohmann::json::array();
  std::set<std::string> names;
  for (int i = 0; i < count; ++i) {
    BackendRequest req;
    req.purpose = RequestPurpose::PersonaGeneration;
    req.prompt = prompts.render("persona_generation",
                                {{"population", population == Population::Kerala ? "Kerala, India" : "Los Angeles"},
                                 {"index", std::to_string(i + 1)},
                                 {"count", std::to_string(count)}});
    req.max_length = 512;
    req.seed = seed + static_cast<std::uint64_t>(i);
    req.hints = PersonaHints{population, i};
    const auto text = be->complete(req).text;
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      std::fprintf(stderr, "persona %d: no JSON object in reply\n", i);
      continue;
    }
    try {
      auto p = nlohmann::json::parse(text.substr(open, close - open + 1));
      parse_sex(p.at("sex").get<std::string>());
      if (!names.insert(p.at("name").get<std::string>()).second) continue;
      p["population"] = std::string(to_string(population));
      personas.push_back(std::move(p));
    } catch (const std::exception& e) {
      std::fprintf(stderr, "persona %d: %s\n", i, e.what());
    }
  }
  std::ofstream f(out_file);
  if (!f) throw ConfigError("cannot write " + out_file);
  f << nlohmann::json{{"population", std::string(to_string(population))}, {"personas", personas}}.dump(2) << '\n';
  std::printf("%zu personas written to %s\n", personas.size(), out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Status-signalling agent simulation"};
  app.set_version_flag("--version", STATUSARENA_VERSION);
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> presets;
  int seeds = 0;
  std::string out_dir = "runs";
  int threads = 1;
  bool snapshots = false;
  std::string backend;
  auto* run = app.add_subcommand("run", "Run an experiment over several seeds");
  run->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--preset", presets, "Condition preset, repeatable");
  run->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--snapshots", snapshots, "Write a snapshot at every day boundary");
  run->add_option("--backend", backend, "stub or live")->check(CLI::IsMember({"stub", "live"}));

  std::vector<std::string> logs;
  std::vector<std::string> baseline;
  std::string report_dir = "report";
  std::string rater = "keyword";
  bool executed = false;
  bool add_one = false;
  bool pooled = false;
  auto* analyze = app.add_subcommand("analyze", "Write TSV reports from event logs");
  analyze->add_option("--log", logs, "Event log file or run directory, repeatable")->required();
  analyze->add_option("--report", report_dir, "Report directory");
  analyze->add_option("--baseline", baseline, "Logs of the comparison arm");
  analyze->add_option("--rater", rater, "keyword, stub or live")->check(CLI::IsMember({"keyword", "stub", "live"}));
  analyze->add_flag("--executed-volume", executed, "Use executed volume as the PED quantity");
  analyze->add_flag("--add-one", add_one, "Add one to every quantity instead of dropping zero rounds");
  analyze->add_flag("--pooled", pooled, "Pooled category PED instead of mean of slopes");

  std::vector<std::string> scenario_files;
  auto* sval = app.add_subcommand("scenarios-validate", "Check scenario files against the schema");
  sval->add_option("files", scenario_files)->required()->check(CLI::ExistingFile);

  std::string domain;
  int count = 5;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  auto* sgen = app.add_subcommand("scenarios-generate", "Generate scenario configurations");
  sgen->add_option("--domain", domain)->required();
  sgen->add_option("--count", count)->check(CLI::PositiveNumber);
  sgen->add_option("--out", gen_out)->required();
  sgen->add_option("--seed", gen_seed);
  sgen->add_option("--backend", backend)->check(CLI::IsMember({"stub", "live"}));

  std::string snapshot;
  std::string inject;
  std::string rh_out;
  auto* rh = app.add_subcommand("rehydrate", "Resume a snapshot, optionally injecting influencers");
  rh->add_option("--snapshot", snapshot)->required()->check(CLI::ExistingFile);
  rh->add_option("--inject", inject, "Hipster or Streetwear");
  rh->add_option("--out", rh_out)->required();
  rh->add_option("--backend", backend)->check(CLI::IsMember({"stub", "live"}));

  std::string population;
  std::string p_out;
  auto* pgen = app.add_subcommand("personas-generate", "Generate a persona corpus");
  pgen->add_option("--population", population)->required();
  pgen->add_option("--count", count)->check(CLI::PositiveNumber);
  pgen->add_option("--out", p_out)->required();
  pgen->add_option("--seed", gen_seed);
  pgen->add_option("--backend", backend)->check(CLI::IsMember({"stub", "live"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_file, presets, seeds, out_dir, threads, snapshots, backend);
    if (*analyze) return cmd_analyze(logs, report_dir, rater, baseline, executed, add_one, pooled);
    if (*sval) return cmd_scenarios_validate(scenario_files);
    if (*sgen) return cmd_scenarios_generate(domain, count, gen_out, backend, gen_seed);
    if (*rh) return cmd_rehydrate(snapshot, rh_out, inject, backend);
    if (*pgen) return cmd_personas_generate(population, count, p_out, backend, gen_seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "backend error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
