#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace qdslab::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string tsv_field(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n') c = ' ';
  return s;
}

}  // namespace

std::string render_table(const Table& t, Format f) {
  const char sep = f == Format::tsv ? '\t' : ',';
  const auto field = [&](const std::string& s) {
    return f == Format::tsv ? tsv_field(s) : csv_field(s);
  };
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += sep;
    out += field(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += sep;
      out += field(row[i]);
    }
    out += '\n';
  }
  return out;
}

json judged(double value, double tolerance) {
  return {{"value", value}, {"tolerance", tolerance}};
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move report into place at '" + path + "'");
  }
}

json strip_wall_clock(json j) {
  if (j.is_object()) {
    j.erase("wall_clock_s");
    for (auto& [k, v] : j.items()) v = strip_wall_clock(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_wall_clock(v);
  }
  return j;
}

}  // namespace qdslab::cli
