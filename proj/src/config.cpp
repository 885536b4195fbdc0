#include "complab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace complab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError(key + " is not a number: '" + t + "'");
  return v;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number(item, key));
  return out;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  c.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (c.entries_.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key " + key);
    c.entries_[key] = trim(line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string Config::text(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key + " required");
  return it->second;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return parse_number(text(key), key); }

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

int Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != static_cast<int>(v)) throw ConfigError(key + " must be an integer");
  return static_cast<int>(v);
}

int Config::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(key + " must be true or false");
}

std::vector<double> Config::numbers(const std::string& key) const { return parse_numbers(text(key), key); }

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::vector<Point> Config::points(const std::string& key) const {
  std::vector<Point> out;
  for (const std::string& item : split(text(key), ',')) {
    if (item.empty()) continue;
    const auto coords = split(item, ':');
    Point p(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t a = 0; a < coords.size(); ++a) p(static_cast<Eigen::Index>(a)) = parse_number(coords[a], key);
    out.push_back(p);
  }
  return out;
}

std::string Config::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace complab
