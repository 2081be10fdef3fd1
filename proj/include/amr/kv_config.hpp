#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace amr {

// `key = value` text, one pair per line, `#` starts a comment. Keys are
// case-sensitive; later duplicates override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::filesystem::path& file);

std::string trim(std::string_view s);
std::vector<std::string> split_list(const std::string& value, char sep = ',');
std::vector<double> parse_double_list(const std::string& value);

}  // namespace amr
