#pragma once

// Flat `key = value` text documents with dotted keys. Used for run configs,
// calibration settings and netlist dumps.

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "swmg/error.hpp"

namespace swmg::kv {

class Document {
 public:
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  void set(const std::string& key, double value) { entries_[key] = format_double(value); }
  void set(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }
  void set(const std::string& key, int value) { entries_[key] = std::to_string(value); }

  bool contains(const std::string& key) const { return entries_.contains(key); }
  std::optional<std::string> get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  void merge(const Document& other) {
    for (const auto& [k, v] : other.entries_) entries_[k] = v;
  }

  static std::string format_double(double v) { return fmt::format("{:.17g}", v); }

  static double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
    }
    if (used != text.size()) {
      throw ConfigError("key '" + key + "': trailing characters in '" + text + "'");
    }
    return v;
  }

  static bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + text + "'");
  }

  static Document parse(std::istream& in) {
    Document doc;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto text = trim(line);
      if (text.empty()) continue;
      const auto eq = text.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
      }
      const auto key = trim(text.substr(0, eq));
      if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
      doc.entries_[key] = trim(text.substr(eq + 1));
    }
    return doc;
  }

  static Document parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> entries_;
};

}  // namespace swmg::kv
