#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace qdslab::cli {
namespace {

struct Location {
  int line = 0;
  int col = 0;
};

Location offset_location(const std::string& text, std::size_t offset) {
  Location loc{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.col = 1;
    } else {
      ++loc.col;
    }
  }
  return loc;
}

// first occurrence of "key" in the document; good enough to point a reader at
// the offending member
Location key_location(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return {};
  return offset_location(text, pos);
}

[[noreturn]] void fail_at(const std::string& text, const std::string& key,
                          const std::string& msg) {
  const Location loc = key_location(text, key);
  throw ConfigError(msg, loc.line, loc.col);
}

double as_number(const json& v, const std::string& text, const std::string& key) {
  if (!v.is_number()) fail_at(text, key, "'" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& text, const std::string& key) {
  if (!v.is_number_integer()) fail_at(text, key, "'" + key + "' must be an integer");
  return v.get<int>();
}

cplx entry_from_json(const json& e, const std::string& what) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw DomainError(what + ": entries must be numbers or [re, im] pairs");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "command", "model", "dim", "lambda", "lambdas", "dims", "times", "t", "steps",
      "grid", "tolerances", "threads", "cross_check", "output"};
  return k;
}

const std::set<std::string>& known_commands() {
  static const std::set<std::string> k = {"validate", "diagnose", "sweep", "evolve",
                                          "deficiency", "list-models"};
  return k;
}

struct TolField {
  const char* name;
  double Tolerances::*member;
};

const std::vector<TolField>& tol_fields() {
  static const std::vector<TolField> f = {
      {"hermitian", &Tolerances::hermitian},
      {"psd", &Tolerances::psd},
      {"duality", &Tolerances::duality},
      {"contraction", &Tolerances::contraction},
      {"semigroup", &Tolerances::semigroup},
      {"condition_iv", &Tolerances::condition_iv},
      {"ode_abs", &Tolerances::ode_abs},
      {"ode_rel", &Tolerances::ode_rel},
      {"quadrature", &Tolerances::quadrature},
      {"cross_method", &Tolerances::cross_method},
      {"iteration_convergence", &Tolerances::iteration_convergence},
      {"decision_threshold", &Tolerances::decision_threshold},
      {"inconclusive_floor", &Tolerances::inconclusive_floor},
      {"series_tail", &Tolerances::series_tail},
      {"stall", &Tolerances::stall},
      {"annihilator_rank", &Tolerances::annihilator_rank},
  };
  return f;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line, int col)
    : Error(what), line_(line), col_(col) {}

const char* to_string(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::tsv: return "tsv";
  }
  return "json";
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "tsv") return Format::tsv;
  throw ConfigError("unknown output format '" + s + "' (json, csv, tsv)");
}

const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : tol_fields()) k.emplace_back(f.name);
    return k;
  }();
  return keys;
}

void set_tolerance(Tolerances& tol, const std::string& key, double value) {
  for (const auto& f : tol_fields())
    if (key == f.name) {
      if (!(value > 0.0)) throw ConfigError("tolerance '" + key + "' must be > 0");
      tol.*f.member = value;
      return;
    }
  throw ConfigError("unknown tolerance '" + key + "'");
}

double get_tolerance(const Tolerances& tol, const std::string& key) {
  for (const auto& f : tol_fields())
    if (key == f.name) return tol.*f.member;
  throw ConfigError("unknown tolerance '" + key + "'");
}

Tolerances RunConfig::tolerances() const {
  Tolerances t;
  for (const auto& [k, v] : tolerance_overrides) set_tolerance(t, k, v);
  return t;
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  if (inline_model)
    j["model"] = *inline_model;
  else
    j["model"] = model_ref;
  if (level) j["dim"] = *level;
  j["lambdas"] = lambdas;
  if (!dims.empty()) j["dims"] = dims;
  if (!times.empty()) j["times"] = times;
  if (t_end) j["t"] = *t_end;
  if (steps) j["steps"] = *steps;
  if (grid) j["grid"] = *grid;
  json tol = json::object();
  for (const auto& [k, v] : tolerance_overrides) tol[k] = v;
  j["tolerances"] = tol;
  if (cross_check) j["cross_check"] = true;
  j["output"] = {{"format", to_string(format)}};
  return j;
}

static RunConfig parse_config_impl(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const Location loc = offset_location(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    // drop nlohmann's own "[json.exception...] parse error at line L, column C: " prefix
    const std::size_t cut = msg.find(": ", msg.find("parse error"));
    if (cut != std::string::npos) msg = msg.substr(cut + 2);
    throw ConfigError(msg, loc.line, loc.col);
  }
  if (!doc.is_object()) throw ConfigError("top level must be an object", 1, 1);
  if (doc.contains("schema")) {
    if (!doc.contains("config") || !doc["config"].is_object())
      fail_at(text, "schema", "report has no \"config\" member to re-run");
    doc = doc["config"];
  }

  RunConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) fail_at(text, key, "unknown key '" + key + "'");
    if (key == "command") {
      if (!value.is_string() || !known_commands().count(value.get<std::string>()))
        fail_at(text, key, "'command' must name a subcommand");
      c.command = value.get<std::string>();
    } else if (key == "model") {
      if (value.is_string()) {
        c.model_ref = value.get<std::string>();
        try {
          (void)CatalogEntry::parse(c.model_ref);
        } catch (const Error& e) {
          fail_at(text, key, e.what());
        }
      } else if (value.is_object()) {
        try {
          (void)model_from_json(value);
        } catch (const Error& e) {
          fail_at(text, key, std::string("inline model: ") + e.what());
        }
        c.inline_model = value;
      } else {
        fail_at(text, key, "'model' must be a catalog reference or an object");
      }
    } else if (key == "dim") {
      c.level = as_int(value, text, key);
    } else if (key == "lambda") {
      c.lambdas = {as_number(value, text, key)};
    } else if (key == "lambdas") {
      if (!value.is_array()) fail_at(text, key, "'lambdas' must be an array");
      for (const auto& v : value) c.lambdas.push_back(as_number(v, text, key));
    } else if (key == "dims") {
      if (!value.is_array()) fail_at(text, key, "'dims' must be an array");
      for (const auto& v : value) c.dims.push_back(as_int(v, text, key));
    } else if (key == "times") {
      if (!value.is_array()) fail_at(text, key, "'times' must be an array");
      for (const auto& v : value) c.times.push_back(as_number(v, text, key));
    } else if (key == "t") {
      c.t_end = as_number(value, text, key);
    } else if (key == "steps") {
      c.steps = as_int(value, text, key);
    } else if (key == "grid") {
      if (!value.is_string()) fail_at(text, key, "'grid' must be a string a:b:M");
      c.grid = value.get<std::string>();
    } else if (key == "tolerances") {
      if (!value.is_object()) fail_at(text, key, "'tolerances' must be an object");
      for (const auto& [tk, tv] : value.items()) {
        const double x = as_number(tv, text, tk);
        try {
          Tolerances probe;
          set_tolerance(probe, tk, x);
        } catch (const ConfigError& e) {
          fail_at(text, tk, e.what());
        }
        c.tolerance_overrides[tk] = x;
      }
    } else if (key == "threads") {
      c.threads = as_int(value, text, key);
    } else if (key == "cross_check") {
      if (!value.is_boolean()) fail_at(text, key, "'cross_check' must be true or false");
      c.cross_check = value.get<bool>();
    } else if (key == "output") {
      if (!value.is_object()) fail_at(text, key, "'output' must be an object");
      for (const auto& [ok, ov] : value.items()) {
        if (ok == "path" && ov.is_string()) {
          c.output_path = ov.get<std::string>();
        } else if (ok == "format" && ov.is_string()) {
          try {
            c.format = parse_format(ov.get<std::string>());
          } catch (const ConfigError& e) {
            fail_at(text, ok, e.what());
          }
        } else {
          fail_at(text, ok, "'output' takes string members path and format");
        }
      }
    }
  }
  for (double l : c.lambdas)
    if (!(l > 0.0)) fail_at(text, doc.contains("lambda") ? "lambda" : "lambdas",
                            "lambdas must be > 0");
  return c;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  try {
    return parse_config_impl(text);
  } catch (const ConfigError& e) {
    std::string where = source;
    if (e.line() > 0) where += ":" + std::to_string(e.line()) + ":" + std::to_string(e.col());
    throw ConfigError(where + ": " + e.what(), e.line(), e.col());
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw DomainError(what + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw DomainError(what + " rows must be arrays");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw DomainError(what + " row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          entry_from_json(j[r][c], what);
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelSpec model_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("inline model must be an object");
  static const std::set<std::string> keys = {"dim", "G", "kraus", "domain",
                                             "name", "labels", "grid_model"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw DomainError("unknown inline model key '" + k + "'");
  if (!j.contains("G")) throw DomainError("inline model needs \"G\"");
  Matrix g = matrix_from_json(j["G"], "G");
  const int n = static_cast<int>(g.rows());
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<int>() != n))
    throw DimensionError("\"dim\" does not match the size of G");
  std::vector<Matrix> kraus;
  if (j.contains("kraus")) {
    if (!j["kraus"].is_array()) throw DomainError("\"kraus\" must be an array of matrices");
    for (std::size_t k = 0; k < j["kraus"].size(); ++k)
      kraus.push_back(matrix_from_json(j["kraus"][k], "kraus[" + std::to_string(k) + "]"));
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  Subspace d = Subspace::full(n);
  if (j.contains("domain")) {
    const json& dj = j["domain"];
    if (dj.is_array() && !dj.empty() && dj[0].is_array())
      d = Subspace::from_basis(matrix_from_json(dj, "domain"));
    else if (dj.is_array())
      d = Subspace::from_indices(n, dj.get<std::vector<int>>());
    else
      throw DomainError("\"domain\" must be an index list or a matrix");
  }
  const std::string name = j.value("name", std::string("inline"));
  ModelSpec spec(TruncatedSpace(n, std::move(labels)), std::move(g), std::move(kraus),
                 std::move(d), name);
  if (j.value("grid_model", false)) spec.set_grid_model(true);
  return spec;
}

json model_to_json(const ModelSpec& spec) {
  json j;
  j["name"] = spec.name();
  j["dim"] = spec.dim();
  j["G"] = matrix_to_json(spec.G());
  json kraus = json::array();
  for (const auto& l : spec.kraus_ops()) kraus.push_back(matrix_to_json(l));
  j["kraus"] = kraus;
  if (spec.domain().axis_aligned())
    j["domain"] = spec.domain().indices();
  else
    j["domain"] = matrix_to_json(spec.domain().basis());
  if (!spec.space().labels().empty()) j["labels"] = spec.space().labels();
  if (spec.grid_model()) j["grid_model"] = true;
  return j;
}

}  // namespace qdslab::cli
