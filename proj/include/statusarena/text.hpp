#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace statusarena {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
/// Case-insensitive substring test; `needle_lower` must already be lower case.
bool contains_lower(std::string_view haystack_lower, std::string_view needle_lower);

}  // namespace statusarena
