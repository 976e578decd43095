#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cims {

// Raised for malformed documents or invalid settings; the CLI maps it to
// exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key/value document with [section] headers. '#' starts a comment,
// values may be space-separated lists. Example:
//
//   [chain]
//   total_samples = 500    # post-burn-in samples
//
struct ConfigDoc {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string source_text;

  static ConfigDoc parse_string(const std::string& text);
  static ConfigDoc parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;

  // FNV-1a of the document text, hex-encoded; stamped into result files so
  // outputs are traceable to their configuration.
  std::string content_hash() const;
};

}  // namespace cims
