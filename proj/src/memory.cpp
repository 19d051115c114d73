#include "statusarena/memory.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "statusarena/error.hpp"

namespace statusarena {

namespace {

constexpr std::array<std::string_view, 6> kKindNames{"Formative",  "Observation", "Conversation",
                                                     "Reflection", "Market",      "PublicEffect"};
constexpr std::array<std::string_view, 4> kPhaseNames{"init", "market", "daily_life", "social"};

}  // namespace

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<int>(p)]; }
std::string_view to_string(MemoryKind k) { return kKindNames[static_cast<int>(k)]; }

MemoryKind parse_memory_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<MemoryKind>(i);
  }
  throw ConfigError("unknown memory kind '" + std::string(s) + "'");
}

bool counts_as_signal(MemoryKind k) {
  return k == MemoryKind::Observation || k == MemoryKind::Conversation ||
         k == MemoryKind::PublicEffect || k == MemoryKind::Reflection;
}

const MemoryRecord& MemoryStream::append(int day, Phase phase, MemoryKind kind, std::string text,
                                         std::set<std::string> tags) {
  MemoryRecord r;
  r.timestamp = Timestamp{day, phase, records_.empty() ? 0 : records_.back().timestamp.sequence + 1};
  r.kind = kind;
  r.text = std::move(text);
  r.tags = std::move(tags);
  restore(std::move(r));
  return records_.back();
}

void MemoryStream::restore(MemoryRecord record) {
  if (!records_.empty()) {
    const auto& last = records_.back().timestamp;
    const auto& ts = record.timestamp;
    if (std::tie(ts.day, ts.phase) < std::tie(last.day, last.phase) || ts.sequence <= last.sequence) {
      throw ContractViolation("memory timestamps must strictly increase");
    }
  }
  records_.push_back(std::move(record));
  index(records_.back());
}

void MemoryStream::index(const MemoryRecord& r) {
  if (!counts_as_signal(r.kind)) return;
  for (const auto& tag : r.tags) ++signal_counts_[tag];
}

int MemoryStream::signal_count(std::string_view tag) const {
  auto it = signal_counts_.find(tag);
  return it == signal_counts_.end() ? 0 : it->second;
}

std::vector<MemoryRecord> retrieve_memories(const MemoryStream& store,
                                            const std::set<std::string>& query_tags,
                                            std::size_t k) {
  const auto records = store.records();
  std::vector<std::size_t> picked;
  for (std::size_t i = records.size(); i-- > 0 && picked.size() < k;) {
    const auto& r = records[i];
    if (r.kind == MemoryKind::Formative) continue;
    const bool hit = std::any_of(r.tags.begin(), r.tags.end(),
                                 [&](const std::string& t) { return query_tags.contains(t); });
    if (hit) picked.push_back(i);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].kind == MemoryKind::Formative) picked.push_back(i);
  }
  std::sort(picked.begin(), picked.end());
  std::vector<MemoryRecord> out;
  out.reserve(picked.size());
  for (std::size_t i : picked) out.push_back(records[i]);
  return out;
}

}  // namespace statusarena
