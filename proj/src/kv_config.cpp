#include "amr/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "amr/error.hpp"

namespace amr {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ParseError, "expected `key = value`: " + t, lineno);
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::ParseError, "empty key", lineno);
    kv[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

std::vector<std::string> split_list(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, sep)) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    double v = 0.0;
    const auto* end = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc{} || ptr != end)
      throw Error(ErrorKind::ParseError, "not a number: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace amr
