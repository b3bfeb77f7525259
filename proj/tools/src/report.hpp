#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace qdslab::cli {

inline constexpr const char* kReportSchema = "qdslab.report/1";

/// Flat rows for the csv/tsv formats. Column orders are fixed per command.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

std::string render_table(const Table& t, Format f);

/// A value and the tolerance it was judged against.
json judged(double value, double tolerance);

/// Writes to a sibling temporary file and renames it over path.
void write_atomically(const std::string& path, const std::string& content);

/// Drops every "wall_clock_s" member, recursively.
json strip_wall_clock(json j);

}  // namespace qdslab::cli
