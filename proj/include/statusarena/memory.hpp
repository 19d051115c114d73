#pragma once

#include <cstdint>
#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace statusarena {

enum class Phase : int { Init = 0, Market = 1, DailyLife = 2, Social = 3 };

enum class MemoryKind { Formative, Observation, Conversation, Reflection, Market, PublicEffect };

std::string_view to_string(Phase p);
std::string_view to_string(MemoryKind k);
MemoryKind parse_memory_kind(std::string_view s);

struct Timestamp {
  int day = 0;
  Phase phase = Phase::Init;
  std::uint64_t sequence = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct MemoryRecord {
  Timestamp timestamp;
  MemoryKind kind = MemoryKind::Observation;
  std::string text;
  std::set<std::string> tags;
};

/// Kinds that count toward the weight of precedent for a tag.
bool counts_as_signal(MemoryKind k);

/// Append-only memory stream. Sequence numbers are assigned on append and
/// strictly increase; appending at an earlier (day, phase) throws.
class MemoryStream {
 public:
  const MemoryRecord& append(int day, Phase phase, MemoryKind kind, std::string text,
                             std::set<std::string> tags = {});
  /// Restores a serialized record verbatim; timestamps must still increase.
  void restore(MemoryRecord record);

  std::span<const MemoryRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Number of Observation/Conversation/PublicEffect/Reflection records carrying `tag`.
  int signal_count(std::string_view tag) const;

 private:
  void index(const MemoryRecord& r);

  std::vector<MemoryRecord> records_;
  std::map<std::string, int, std::less<>> signal_counts_;
};

/// The k most recent non-formative records whose tags intersect `query_tags`,
/// plus every Formative record, ordered oldest to newest.
std::vector<MemoryRecord> retrieve_memories(const MemoryStream& store,
                                            const std::set<std::string>& query_tags,
                                            std::size_t k);

}  // namespace statusarena
