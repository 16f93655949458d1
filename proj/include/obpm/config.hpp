#ifndef OBPM_CONFIG_HPP
#define OBPM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obpm {

/// Thrown on malformed or invalid configuration; the message carries the
/// offending line when one exists.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key = value configuration, one pair per line, '#' comments.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_stream(std::istream& in, const std::string& origin);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// Rejects keys outside the allowed set, reporting the line they came from.
  void require_known_keys(const std::vector<std::string>& allowed) const;

  /// Key/value pairs in first-seen order, for manifests.
  std::vector<std::pair<std::string, std::string>> items() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::string origin_;

  const Entry& lookup(const std::string& key) const;
};

}  // namespace obpm

#endif
