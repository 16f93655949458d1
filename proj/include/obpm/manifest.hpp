#ifndef OBPM_MANIFEST_HPP
#define OBPM_MANIFEST_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace obpm {

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a 64-bit digest of a byte string, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Record of one CLI run: resolved configuration, seed, version, duration,
/// and the digest of every file written. CSV bodies are deterministic under
/// (config, seed); the manifest makes reruns verifiable by digest.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::uint64_t seed);

  void add_config(const std::vector<std::pair<std::string, std::string>>& items);
  void add_note(const std::string& note);
  /// Writes the file and records (name, digest).
  void write_output(const std::string& dir, const std::string& name,
                    const std::string& body);
  void set_duration(double seconds);

  const std::vector<std::string>& notes() const { return notes_; }
  std::string render() const;
  /// Writes manifest.txt into dir.
  void write(const std::string& dir) const;

 private:
  std::string subcommand_;
  std::uint64_t seed_;
  double duration_seconds_ = 0.0;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::pair<std::string, std::string>> outputs_;  // name, digest
  std::vector<std::string> notes_;
};

}  // namespace obpm

#endif
