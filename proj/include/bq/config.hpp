#pragma once

// Strict key-value configuration with [section] headers.  Unknown keys and
// unknown sections are hard errors so a typo in a physics parameter can
// never pass silently.

#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bq/algebra.hpp"

namespace bq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigSection {
  std::string name;  // "" for the preamble
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

struct ConfigDoc {
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const {
    for (const auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  }

  std::vector<const ConfigSection*> find_prefix(const std::string& prefix) const {
    std::vector<const ConfigSection*> out;
    for (const auto& s : sections)
      if (s.name.rfind(prefix, 0) == 0) out.push_back(&s);
    return out;
  }

  static ConfigDoc parse_string(const std::string& text) {
    ConfigDoc doc;
    doc.sections.push_back({"", {}});
    ConfigSection* cur = &doc.sections.front();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = detail::trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
        std::string name = detail::trim(t.substr(1, t.size() - 2));
        if (name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
        if (doc.find(name)) throw ConfigError("duplicate section [" + name + "]");
        doc.sections.push_back({name, {}});
        cur = &doc.sections.back();
        continue;
      }
      std::size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = detail::trim(t.substr(0, eq));
      std::string val = detail::trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      if (cur->find(key))
        throw ConfigError("duplicate key '" + key + "' in [" + cur->name + "]");
      cur->entries.emplace_back(key, val);
    }
    return doc;
  }

  static ConfigDoc parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
  }
};

// Tracks which keys a schema consumed; leftovers are errors.
class SectionReader {
 public:
  SectionReader(const ConfigDoc& doc, const std::string& name, bool required = false)
      : name_(name), sec_(doc.find(name)) {
    if (required && !sec_) throw ConfigError("missing required section [" + name + "]");
  }
  explicit SectionReader(const ConfigSection* sec) : name_(sec ? sec->name : ""), sec_(sec) {}

  bool exists() const { return sec_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    consumed_.insert(key);
    if (!sec_) return std::nullopt;
    const std::string* v = sec_->find(key);
    if (!v) return std::nullopt;
    return *v;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    auto v = raw(key);
    return v ? *v : fallback;
  }

  std::string require_str(const std::string& key) {
    auto v = raw(key);
    if (!v) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
    return *v;
  }

  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_number(key, *v) : fallback;
  }

  double require_number(const std::string& key) { return parse_number(key, require_str(key)); }

  long long integer(const std::string& key, long long fallback) {
    auto v = raw(key);
    return v ? parse_integer(key, *v) : fallback;
  }

  long long require_integer(const std::string& key) {
    return parse_integer(key, require_str(key));
  }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    return parse_vec3(key, *v);
  }

  std::array<int, 3> ivec3(const std::string& key, const std::array<int, 3>& fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    std::array<int, 3> out{};
    if (!(in >> out[0] >> out[1] >> out[2]))
      throw ConfigError("key '" + key + "': expected three integers");
    return out;
  }

  // every key of the section must have been consumed by now
  void finish() const {
    if (!sec_) return;
    for (const auto& [k, v] : sec_->entries)
      if (!consumed_.count(k))
        throw ConfigError("unknown key '" + k + "' in [" + name_ + "]");
  }

 private:
  double parse_number(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return d;
    } catch (...) {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
  }
  long long parse_integer(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      long long d = std::stoll(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return d;
    } catch (...) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
  }
  Vec3 parse_vec3(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    Vec3 out;
    if (!(in >> out.x >> out.y >> out.z))
      throw ConfigError("key '" + key + "': expected three numbers");
    std::string rest;
    if (in >> rest) throw ConfigError("key '" + key + "': trailing content");
    return out;
  }

  std::string name_;
  const ConfigSection* sec_;
  std::set<std::string> consumed_;
};

}  // namespace bq
