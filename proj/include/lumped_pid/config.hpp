#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lumped_pid {

/// Flat dotted-key text config:
///
///   # comment
///   plant.kind = integrator
///   controller.omega = 2
///   plant.initial = 1, 0
///
/// Lookups record which keys were consumed so callers can report typos.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config from_string(const std::string& text);
  static Config from_file(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::vector<std::string> unused_keys() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

/// Parses a real number, rejecting trailing garbage. `field` names the
/// key in error messages.
double parse_double(const std::string& text, const std::string& field);

/// Comma-separated list of trimmed tokens.
std::vector<std::string> split_list(const std::string& text);

}  // namespace lumped_pid
