#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsw/error.hpp"

namespace nlsw {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(std::size_t(indent) * (depth + 1), ' '), end(std::size_t(indent) * depth, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump(e, out, indent, depth + 1);
      }
      out += "\n" + end + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      out += "\n" + end + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

// JSON text with every double at 17 significant digits (non-finite -> null)
inline std::string to_json_text(const Json& j) {
  std::string out;
  detail::dump(j, out, 2, 0);
  return out + "\n";
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("io", "cannot write " + path);
  f << text;
}

// CSV with a fixed header preceded by a format tag line "# <name> v<version>"
class Csv {
 public:
  Csv(std::string name, int version, std::vector<std::string> header)
      : name_(std::move(name)), version_(version), header_(std::move(header)) {}

  void row(const std::vector<double>& v) {
    if (v.size() != header_.size()) throw Error("io", "CSV row width differs from header");
    std::string line;
    for (std::size_t i = 0; i < v.size(); ++i) line += (i ? "," : "") + fmt17(v[i]);
    rows_.push_back(std::move(line));
  }
  // row with some text cells, given as preformatted strings
  void row_text(const std::vector<std::string>& v) {
    if (v.size() != header_.size()) throw Error("io", "CSV row width differs from header");
    std::string line;
    for (std::size_t i = 0; i < v.size(); ++i) line += (i ? "," : "") + v[i];
    rows_.push_back(std::move(line));
  }

  std::string text() const {
    std::string out = "# " + name_ + " v" + std::to_string(version_) + "\n";
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }
  void write(const std::string& path) const { write_text(path, text()); }

 private:
  std::string name_;
  int version_;
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace nlsw
