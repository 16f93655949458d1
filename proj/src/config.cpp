#include "obpm/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace obpm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_stream(in, path);
}

KeyValueConfig KeyValueConfig::parse_stream(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + body + "'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = Entry{value, line_no};
    cfg.order_.push_back(key);
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

const KeyValueConfig::Entry& KeyValueConfig::lookup(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  return lookup(key).value;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? lookup(key).value : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const Entry& e = lookup(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "' is not a number: '" + e.value + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const Entry& e = lookup(key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "' is not an integer: '" + e.value + "'");
  }
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = lookup(key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                    "' is not a boolean: '" + e.value + "'");
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  const Entry& e = lookup(key);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                        "' has a non-numeric element: '" + tok + "'");
    }
  }
  if (out.empty()) {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key +
                      "' must list at least one number");
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!entries_.count(key)) order_.push_back(key);
  entries_[key] = Entry{value, 0};
}

void KeyValueConfig::require_known_keys(const std::vector<std::string>& allowed) const {
  for (const auto& key : order_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      const Entry& e = entries_.at(key);
      throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" +
                        key + "'");
    }
  }
}

std::vector<std::pair<std::string, std::string>> KeyValueConfig::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(order_.size());
  for (const auto& key : order_) out.emplace_back(key, entries_.at(key).value);
  return out;
}

}  // namespace obpm
