#pragma once

// Line-oriented `key = value` configuration text. '#' starts a comment.

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

namespace popdens {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Typed lookups; all throw ConfigError naming `key` on a missing or
/// malformed value.
double require_double(const KeyValues& kv, const std::string& key);
double get_double(const KeyValues& kv, const std::string& key, double fallback);
int get_int(const KeyValues& kv, const std::string& key, int fallback);
bool get_bool(const KeyValues& kv, const std::string& key, bool fallback);
std::optional<std::string> get_string(const KeyValues& kv, const std::string& key);

}  // namespace popdens
