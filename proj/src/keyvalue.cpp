#include "osmot/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "osmot/errors.hpp"

namespace osmot {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::filesystem::path base_dir) {
  KeyValueFile kv;
  kv.base_dir_ = std::move(base_dir);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key=value", line_no);
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (kv.values_.count(key)) throw ParseError("duplicate key '" + key + "'", line_no);
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse(in, path.parent_path());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

const std::string& KeyValueFile::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double KeyValueFile::require_double(const std::string& key) const {
  const std::string& s = require(key);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

long long KeyValueFile::require_int(const std::string& key) const {
  const std::string& s = require(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return contains(key) ? require_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  return contains(key) ? require_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  const auto v = find(key);
  if (!v) return fallback;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw ConfigError("key '" + key + "' is not a boolean: '" + *v + "'");
}

std::filesystem::path KeyValueFile::require_path(const std::string& key) const {
  std::filesystem::path p = require(key);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

}  // namespace osmot
