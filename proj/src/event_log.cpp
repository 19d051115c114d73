#include "statusarena/event_log.hpp"

#include <fstream>
#include <istream>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

Phase parse_phase(std::string_view s) {
  for (Phase p : {Phase::Init, Phase::Market, Phase::DailyLife, Phase::Social}) {
    if (to_string(p) == s) return p;
  }
  throw ConfigError("unknown phase '" + std::string(s) + "'");
}

}  // namespace

nlohmann::json EventRecord::to_json() const {
  return {{"v", kEventSchemaVersion}, {"run", run_id},   {"seed", seed},       {"seq", seq},
          {"day", day},               {"phase", std::string(statusarena::to_string(phase))},
          {"kind", kind},             {"payload", payload}};
}

EventRecord EventRecord::from_json(const nlohmann::json& j) {
  try {
    if (j.value("v", kEventSchemaVersion) != kEventSchemaVersion) {
      throw ConfigError("unsupported event schema version " + j.at("v").dump());
    }
    EventRecord r;
    r.run_id = j.at("run").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.seq = j.at("seq").get<std::uint64_t>();
    r.day = j.at("day").get<int>();
    r.phase = parse_phase(j.at("phase").get<std::string>());
    r.kind = j.at("kind").get<std::string>();
    r.payload = j.at("payload");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed event record: ") + e.what());
  }
}

void EventLog::append(EventRecord record) {
  if (!records_.empty() && record.seq <= records_.back().seq) {
    throw ContractViolation("event sequence numbers must increase");
  }
  records_.push_back(std::move(record));
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

void EventLog::write(const std::filesystem::path& file) const {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  for (const auto& r : records_) out << r.to_json().dump() << '\n';
}

EventLog EventLog::parse_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      log.append(EventRecord::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return log;
}

EventLog EventLog::read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string());
  return parse_jsonl(in);
}

std::vector<const EventRecord*> EventLog::of_kind(std::string_view kind) const {
  std::vector<const EventRecord*> out;
  for (const auto& r : records_) {
    if (r.kind == kind) out.push_back(&r);
  }
  return out;
}

}  // namespace statusarena
