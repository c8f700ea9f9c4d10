#pragma once

// Flat `key = value` text used for run configurations and summaries.
// Blank lines and lines starting with '#' are ignored; later keys win.

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rudp {

class KeyValues {
 public:
  void set(const std::string& key, std::string value) {
    for (auto& [k, v] : items_)
      if (k == key) {
        v = std::move(value);
        return;
      }
    items_.emplace_back(key, std::move(value));
  }

  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return v;
    return std::nullopt;
  }

  bool contains(const std::string& key) const { return get(key).has_value(); }

  /// Copies every entry of `other` over this one.
  void merge(const KeyValues& other) {
    for (const auto& [k, v] : other.items_) set(k, v);
  }

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

 private:
  std::vector<std::pair<std::string, std::string>> items_;  // insertion order
};

inline KeyValues parse_key_values(std::istream& in, const std::string& origin) {
  KeyValues kv;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + " line " + std::to_string(no) + ": expected key = value");
    const std::string key = strip(t.substr(0, eq));
    if (key.empty()) throw std::runtime_error(origin + " line " + std::to_string(no) + ": empty key");
    kv.set(key, strip(t.substr(eq + 1)));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_key_values(in, "'" + path + "'");
}

/// `prefix` is prepended to every line (e.g. "# " inside a CSV).
inline void write_key_values(std::ostream& out, const KeyValues& kv, const std::string& prefix = "") {
  for (const auto& [k, v] : kv.items()) out << prefix << k << " = " << v << '\n';
}

}  // namespace rudp
