#pragma once

#include "complab/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace complab {

/// Flat key = value text with dotted keys. '#' starts a comment, arrays are
/// comma lists and points inside a list are colon-separated ("0:0.25, 1:0").
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  /// Each getter without a fallback throws ConfigError("<key> required").
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<Point> points(const std::string& key) const;

  std::string serialize() const;

 private:
  std::map<std::string, std::string> entries_;
  std::string source_;
};

double parse_number(const std::string& text, const std::string& key);
std::vector<double> parse_numbers(const std::string& text, const std::string& key);

}  // namespace complab
