#pragma once

// Flat key = value experiment configuration. Lines starting with '#' are
// comments; later overrides replace file values.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "modelscale/errors.hpp"

namespace modelscale::harness {

// Invalid configuration or command line. Maps to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text, const std::string& origin = "<text>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated numbers; an empty value gives an empty list.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  std::string require_string(const std::string& key) const;
  // Seeds must be given explicitly; there is no clock-based default.
  std::uint64_t require_seed() const;

  // Throws ConfigError naming the first key outside `allowed`.
  void check_keys(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

bool valid_key(const std::string& key);

}  // namespace modelscale::harness
