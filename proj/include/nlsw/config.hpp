#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nlsw/nonlinearity.hpp"

namespace nlsw {

// Sectioned key = value configuration:
//
//   # comment
//   [model]
//   kind = polynomial
//   r0 = 1
//   coeffs = [-1, -3]
//   params = {rho0 = 0.4}
//
// Values are numbers, true/false, bare identifiers, number lists [..] and
// number tables {k = v, ..}. Sections and keys are checked against a fixed
// schema; serialization is canonical (schema order, shortest round-trip numbers).

using Table = std::map<std::string, double>;
using Value = std::variant<double, bool, std::string, std::vector<double>, Table>;

enum class VType { number, boolean, ident, list, table };

struct KeySpec {
  const char* key;
  VType type;
};

struct SectionSpec {
  const char* name;
  std::vector<KeySpec> keys;
};

inline const std::vector<SectionSpec>& config_schema() {
  using V = VType;
  static const std::vector<SectionSpec> s = {
      {"run", {{"seed", V::number}, {"threads", V::number}}},
      {"model", {{"kind", V::ident}, {"r0", V::number}, {"coeffs", V::list}, {"params", V::table}}},
      {"grid", {{"h", V::number}, {"L", V::number}, {"N", V::number}, {"stitch", V::number}}},
      {"profile", {{"c", V::number}, {"allow_infinite_energy", V::boolean}}},
      {"diagram", {{"c_min", V::number}, {"c_max", V::number}, {"n", V::number}}},
      {"classify", {{"c", V::number}}},
      {"spectrum",
       {{"c", V::number}, {"N", V::number}, {"L", V::number}, {"d_order", V::number}, {"mode", V::boolean},
        {"mode_L", V::number}, {"mode_h", V::number}}},
      {"evolve",
       {{"c", V::number}, {"initial", V::ident}, {"delta", V::number}, {"amplitude", V::number},
        {"support", V::number}, {"T", V::number}, {"dt", V::number}, {"out_dt", V::number},
        {"clamp_frac", V::number}, {"distances", V::boolean}, {"snapshot_stride", V::number},
        {"spectrum_N", V::number}, {"spectrum_L", V::number}}},
      {"distances",
       {{"test", V::ident}, {"n", V::list}, {"h", V::number}, {"c", V::number}, {"samples", V::number},
        {"amplitude", V::number}, {"M", V::number}, {"mu", V::list}}},
  };
  return s;
}

class Config {
 public:
  using Section = std::map<std::string, Value>;

  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line, sec;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        sec = trim(line.substr(1, line.size() - 2));
        if (!find_section(sec)) fail(ln, "unknown section [" + sec + "]");
        if (c.data_.count(sec)) fail(ln, "duplicate section [" + sec + "]");
        c.data_[sec];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(ln, "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (sec.empty()) fail(ln, "key '" + key + "' outside a section");
      const KeySpec* ks = find_key(sec, key);
      if (!ks) fail(ln, "unknown key '" + key + "' in [" + sec + "]");
      if (c.data_[sec].count(key)) fail(ln, "duplicate key '" + key + "'");
      c.data_[sec][key] = parse_value(trim(line.substr(eq + 1)), ks->type, ln, key);
    }
    return c;
  }

  std::string serialize() const {
    std::string out;
    bool first = true;
    for (const auto& s : config_schema()) {
      auto it = data_.find(s.name);
      if (it == data_.end()) continue;
      if (!first) out += "\n";
      first = false;
      out += "[" + std::string(s.name) + "]\n";
      for (const auto& k : s.keys) {
        auto kv = it->second.find(k.key);
        if (kv == it->second.end()) continue;
        out += std::string(k.key) + " = " + format(kv->second) + "\n";
      }
    }
    return out;
  }

  bool operator==(const Config&) const = default;

  bool has(const std::string& sec, const std::string& key) const {
    auto it = data_.find(sec);
    return it != data_.end() && it->second.count(key);
  }
  bool has_section(const std::string& sec) const { return data_.count(sec) > 0; }

  void set(const std::string& sec, const std::string& key, Value v) {
    if (!find_key(sec, key)) throw Error("config", "unknown key '" + key + "' in [" + sec + "]");
    data_[sec][key] = std::move(v);
  }

  double num(const std::string& sec, const std::string& key, std::optional<double> def = {}) const {
    if (!has(sec, key)) {
      if (def) return *def;
      throw Error("config", "missing key '" + key + "' in [" + sec + "]");
    }
    return std::get<double>(data_.at(sec).at(key));
  }
  std::optional<double> opt(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) return std::nullopt;
    return std::get<double>(data_.at(sec).at(key));
  }
  int integer(const std::string& sec, const std::string& key, std::optional<int> def = {}) const {
    const double v = num(sec, key, def ? std::optional<double>(*def) : std::nullopt);
    if (v != std::floor(v) || std::fabs(v) > 2e9) throw Error("config", "key '" + key + "' must be an integer");
    return int(v);
  }
  bool flag(const std::string& sec, const std::string& key, bool def = false) const {
    return has(sec, key) ? std::get<bool>(data_.at(sec).at(key)) : def;
  }
  std::string ident(const std::string& sec, const std::string& key, std::optional<std::string> def = {}) const {
    if (!has(sec, key)) {
      if (def) return *def;
      throw Error("config", "missing key '" + key + "' in [" + sec + "]");
    }
    return std::get<std::string>(data_.at(sec).at(key));
  }
  std::vector<double> list(const std::string& sec, const std::string& key, std::vector<double> def = {}) const {
    return has(sec, key) ? std::get<std::vector<double>>(data_.at(sec).at(key)) : def;
  }
  Table table(const std::string& sec, const std::string& key) const {
    return has(sec, key) ? std::get<Table>(data_.at(sec).at(key)) : Table{};
  }

  ModelSpec model_spec() const {
    if (!has_section("model")) throw Error("config", "missing section [model]");
    ModelSpec s;
    s.kind = kind_from_name(ident("model", "kind"));
    s.r0 = opt("model", "r0");
    s.coeffs = list("model", "coeffs");
    for (auto& [k, v] : table("model", "params")) s.params[k] = v;
    return s;
  }

  // shortest representation that reads back to the same double
  static std::string format_number(double v) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  }

 private:
  std::map<std::string, Section> data_;

  [[noreturn]] static void fail(int line, const std::string& what) {
    throw Error("config", "line " + std::to_string(line) + ": " + what);
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static const SectionSpec* find_section(const std::string& name) {
    for (const auto& s : config_schema())
      if (name == s.name) return &s;
    return nullptr;
  }
  static const KeySpec* find_key(const std::string& sec, const std::string& key) {
    const SectionSpec* s = find_section(sec);
    if (!s) return nullptr;
    for (const auto& k : s->keys)
      if (key == k.key) return &k;
    return nullptr;
  }

  static double parse_number(const std::string& t, int ln, const std::string& key) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(t, &pos);
    } catch (...) {
      pos = 0;
    }
    if (t.empty() || pos != t.size() || !std::isfinite(v)) fail(ln, "key '" + key + "': bad number '" + t + "'");
    return v;
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> r;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        r.push_back(trim(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!trim(cur).empty() || !r.empty()) r.push_back(trim(cur));
    return r;
  }

  static Value parse_value(const std::string& t, VType type, int ln, const std::string& key) {
    switch (type) {
      case VType::number:
        return parse_number(t, ln, key);
      case VType::boolean:
        if (t == "true") return true;
        if (t == "false") return false;
        fail(ln, "key '" + key + "': expected true or false");
      case VType::ident: {
        bool ok = !t.empty();
        for (char ch : t) ok = ok && (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_');
        if (!ok) fail(ln, "key '" + key + "': expected an identifier");
        return t;
      }
      case VType::list: {
        if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(ln, "key '" + key + "': expected [a, b, ...]");
        std::vector<double> v;
        for (const auto& e : split(t.substr(1, t.size() - 2))) v.push_back(parse_number(e, ln, key));
        return v;
      }
      case VType::table: {
        if (t.size() < 2 || t.front() != '{' || t.back() != '}')
          fail(ln, "key '" + key + "': expected {name = value, ...}");
        Table m;
        for (const auto& e : split(t.substr(1, t.size() - 2))) {
          const auto eq = e.find('=');
          if (eq == std::string::npos) fail(ln, "key '" + key + "': expected name = value in table");
          const std::string k = trim(e.substr(0, eq));
          if (k.empty() || m.count(k)) fail(ln, "key '" + key + "': bad or repeated table entry '" + k + "'");
          m[k] = parse_number(trim(e.substr(eq + 1)), ln, key + "." + k);
        }
        return m;
      }
    }
    fail(ln, "unreachable");
  }

  static std::string format(const Value& v) {
    struct {
      std::string operator()(double d) const { return format_number(d); }
      std::string operator()(bool b) const { return b ? "true" : "false"; }
      std::string operator()(const std::string& s) const { return s; }
      std::string operator()(const std::vector<double>& l) const {
        std::string r = "[";
        for (std::size_t i = 0; i < l.size(); ++i) r += (i ? ", " : "") + format_number(l[i]);
        return r + "]";
      }
      std::string operator()(const Table& t) const {
        std::string r = "{";
        bool first = true;
        for (auto& [k, d] : t) {
          r += (first ? "" : ", ") + k + " = " + format_number(d);
          first = false;
        }
        return r + "}";
      }
    } f;
    return std::visit(f, v);
  }
};

inline Config load_config(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw Error("config", "cannot open " + path);
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, fp)) > 0) text.append(buf, n);
  std::fclose(fp);
  return Config::parse(text);
}

}  // namespace nlsw
