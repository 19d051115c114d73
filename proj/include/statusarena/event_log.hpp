#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statusarena/memory.hpp"

namespace statusarena {

inline constexpr int kEventSchemaVersion = 1;

struct EventRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::uint64_t seq = 0;
  int day = 0;
  Phase phase = Phase::Init;
  std::string kind;
  nlohmann::json payload;

  nlohmann::json to_json() const;
  static EventRecord from_json(const nlohmann::json& j);
};

/// Append-only, totally ordered record of a run. Optionally mirrors every
/// record to a line-delimited JSON file as it is appended.
class EventLog {
 public:
  EventLog() = default;

  void append(EventRecord record);
  std::span<const EventRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  /// One JSON object per line, in sequence order.
  std::string to_jsonl() const;
  void write(const std::filesystem::path& file) const;

  static EventLog parse_jsonl(std::istream& in);
  static EventLog read(const std::filesystem::path& file);

  /// Records of one kind, in order.
  std::vector<const EventRecord*> of_kind(std::string_view kind) const;

 private:
  std::vector<EventRecord> records_;
};

}  // namespace statusarena
