#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdslab/qdslab.hpp"

namespace qdslab::cli {

using json = nlohmann::ordered_json;

/// A malformed configuration. line/col are 1-based; 0 means unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int col = 0);
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

 private:
  int line_;
  int col_;
};

enum class Format { json, csv, tsv };
const char* to_string(Format f);
Format parse_format(const std::string& s);

struct RunConfig {
  std::string command;
  /// Catalog reference, or an inline model when inline_model is set.
  std::string model_ref;
  std::optional<json> inline_model;
  std::optional<int> level;
  std::vector<double> lambdas;
  std::vector<int> dims;
  std::vector<double> times;
  std::optional<double> t_end;
  std::optional<int> steps;
  std::optional<std::string> grid;
  std::map<std::string, double> tolerance_overrides;
  std::optional<int> threads;
  bool cross_check = false;
  std::string output_path;  ///< empty means stdout
  Format format = Format::json;

  Tolerances tolerances() const;
  /// Canonical form echoed in reports; the output path is left out so that a
  /// report re-run elsewhere reproduces the same document.
  json to_json() const;
};

/// Parses a config document. A report (top-level "schema") is accepted and
/// its "config" member used. Diagnostics carry the line and column.
RunConfig parse_config_text(const std::string& text, const std::string& source);
RunConfig load_config_file(const std::string& path);

/// Every tolerance key understood by --tol and the "tolerances" object.
const std::vector<std::string>& tolerance_keys();
void set_tolerance(Tolerances& tol, const std::string& key, double value);
double get_tolerance(const Tolerances& tol, const std::string& key);

/// Inline model documents: {"dim", "G", "kraus", "domain", "name", "labels"}.
/// Matrices are nested arrays whose entries are reals or [re, im] pairs;
/// "domain" is an index list or a matrix whose columns span D.
ModelSpec model_from_json(const json& j);
json model_to_json(const ModelSpec& spec);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& what);

}  // namespace qdslab::cli
