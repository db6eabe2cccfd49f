#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace osmot {

/// Plain `key = value` text: one pair per line, `#` starts a comment, blank
/// lines ignored. Used for scenario configs, tracker configs and the tensor
/// manifests that name each fixture file by role.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in, std::filesystem::path base_dir = {});
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> find(const std::string& key) const;

  /// Throws ConfigError when the key is absent.
  const std::string& require(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  double require_double(const std::string& key) const;
  long long require_int(const std::string& key) const;

  /// Value resolved relative to the directory the file was loaded from.
  std::filesystem::path require_path(const std::string& key) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

}  // namespace osmot
