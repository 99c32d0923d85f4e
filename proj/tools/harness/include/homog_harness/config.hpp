#pragma once

// Experiment configuration: a flat key-value text file with [section] headers.
//
//   # comment
//   [run]
//   command = converge
//   [sweep]
//   eps = 0.25, 0.125, 0.0625
//
// Every key must appear in the schema (docs/config.md); values are typed on read.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace homog::harness {

enum class ValueType { string, integer, real, boolean, real_list, path };

struct KeySpec {
  ValueType type;
  std::string help;
};

/// "section.key" -> spec
const std::map<std::string, KeySpec>& config_schema();

class Config {
 public:
  /// Throws ConfigError on syntax errors, unknown keys or values of the wrong type.
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string str(const std::string& key, const std::string& fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  double real(const std::string& key, double fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  std::optional<std::string> path(const std::string& key) const;

  /// Canonical text: sorted keys, one "key = value" per line, leaving out run.out and
  /// run.threads (they do not change results). The hash is independent of comments,
  /// key order and those two settings.
  std::string canonical() const;
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
  std::string base_dir_;
};

}  // namespace homog::harness
