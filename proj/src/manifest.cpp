#include "obpm/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "obpm/distribution.hpp"

namespace obpm {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest::RunManifest(std::string subcommand, std::uint64_t seed)
    : subcommand_(std::move(subcommand)), seed_(seed) {}

void RunManifest::add_config(const std::vector<std::pair<std::string, std::string>>& items) {
  for (const auto& kv : items) config_.push_back(kv);
}

void RunManifest::add_note(const std::string& note) { notes_.push_back(note); }

void RunManifest::write_output(const std::string& dir, const std::string& name,
                               const std::string& body) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << body;
  out.close();
  if (!out) throw std::runtime_error("failed while writing: " + path);
  outputs_.emplace_back(name, fnv1a_hex(body));
}

void RunManifest::set_duration(double seconds) { duration_seconds_ = seconds; }

std::string RunManifest::render() const {
  std::ostringstream ss;
  ss << "subcommand = " << subcommand_ << "\n";
  ss << "version = " << kVersion << "\n";
  ss << "seed = " << seed_ << "\n";
  ss << "duration_seconds = " << format_g17(duration_seconds_) << "\n";
  for (const auto& [k, v] : config_) ss << "config." << k << " = " << v << "\n";
  for (const auto& [name, digest] : outputs_) {
    ss << "output." << name << " = " << digest << "\n";
  }
  for (std::size_t i = 0; i < notes_.size(); ++i) {
    ss << "note." << i << " = " << notes_[i] << "\n";
  }
  return ss.str();
}

void RunManifest::write(const std::string& dir) const {
  const std::string path = dir + "/manifest.txt";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << render();
}

}  // namespace obpm
