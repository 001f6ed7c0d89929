#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>

namespace gossip_age {

using KeyValues = std::map<std::string, std::string>;

/// Parses flat `key = value` lines. Blank lines and lines starting with '#'
/// or ';' are skipped; an optional `[section]` header line is ignored.
/// Duplicate keys take the last value. Throws ConfigError on lines without '='.
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::filesystem::path& path);

std::string format_key_values(const KeyValues& kv);

double parse_double(const std::string& key, const std::string& text);
long long parse_integer(const std::string& key, const std::string& text);

}  // namespace gossip_age
