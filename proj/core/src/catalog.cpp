#include "qdslab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qdslab/linalg.hpp"

namespace qdslab {
namespace {

double parse_double(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || !std::isfinite(v))
    throw DomainError("parameter '" + key + "': expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw DomainError("parameter '" + key + "': expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct GridSpec {
  double a = 0.0, b = 4.0;
  int m = 12;
};

GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw DomainError("grid must be a:b:M, got '" + text + "'");
  GridSpec g{parse_double("grid", parts[0]), parse_double("grid", parts[1]),
             parse_int("grid", parts[2])};
  return g;
}

Matrix random_complex(std::mt19937_64& rng, int n, double sigma) {
  std::normal_distribution<double> nd(0.0, sigma);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

struct KindInfo {
  const char* prefix;
  CatalogKind kind;
};

constexpr KindInfo kKinds[] = {
    {"pure-birth", CatalogKind::pure_birth},
    {"tau-f", CatalogKind::tau_f_transport},
    {"tau-f-adjoint", CatalogKind::tau_f_adjoint},
    {"tau-f-noise", CatalogKind::tau_f_with_noise},
    {"bounded-lindblad", CatalogKind::bounded_lindblad},
    {"shift", CatalogKind::shift_isometry},
};

const char* prefix_of(CatalogKind k) {
  for (const auto& ki : kKinds)
    if (ki.kind == k) return ki.prefix;
  return "?";
}

bool is_transport(CatalogKind k) {
  return k == CatalogKind::tau_f_transport || k == CatalogKind::tau_f_adjoint ||
         k == CatalogKind::tau_f_with_noise;
}

}  // namespace

// ---- rate sequences

RateSequence RateSequence::linear() { return {Kind::linear, 1.0, {}}; }
RateSequence RateSequence::quadratic() { return {Kind::quadratic, 2.0, {}}; }
RateSequence RateSequence::power(double p) { return {Kind::power, p, {}}; }
RateSequence RateSequence::constant(double c) { return {Kind::constant, c, {}}; }
RateSequence RateSequence::list(std::vector<double> q) {
  if (q.empty()) throw DomainError("rate list is empty");
  return {Kind::list, 0.0, std::move(q)};
}

double RateSequence::operator()(int n) const {
  const double k = n + 1.0;
  switch (kind_) {
    case Kind::linear: return k;
    case Kind::quadratic: return k * k;
    case Kind::power: return std::pow(k, param_);
    case Kind::constant: return param_;
    case Kind::list:
      if (n < 0 || n >= static_cast<int>(values_.size()))
        throw DimensionError("rate list has " + std::to_string(values_.size()) +
                             " entries, index " + std::to_string(n) + " requested");
      return values_[static_cast<std::size_t>(n)];
  }
  return 0.0;
}

std::string RateSequence::describe() const {
  switch (kind_) {
    case Kind::linear: return "linear";
    case Kind::quadratic: return "quadratic";
    case Kind::power: return "power:" + format_double(param_);
    case Kind::constant: return "constant:" + format_double(param_);
    case Kind::list: {
      std::string s = "list:";
      for (std::size_t i = 0; i < values_.size(); ++i)
        s += (i ? ";" : "") + format_double(values_[i]);
      return s;
    }
  }
  return "?";
}

RateSequence RateSequence::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "linear") return linear();
  if (head == "quadratic") return quadratic();
  if (head == "power") return power(parse_double("power", arg));
  if (head == "constant") return constant(parse_double("constant", arg));
  if (head == "list") {
    std::vector<double> v;
    for (const auto& p : split(arg, ';')) v.push_back(parse_double("rates", p));
    return list(std::move(v));
  }
  throw DomainError("unknown rate sequence '" + text + "'");
}

// ---- builders

ModelSpec build_pure_birth(const RateSequence& q, int N) {
  if (N < 1) throw DimensionError("pure-birth truncation needs N >= 1");
  const int n = N + 1;
  Matrix g = Matrix::Zero(n, n);
  Matrix l = Matrix::Zero(n, n);
  for (int k = 0; k <= N; ++k) {
    const double rate = q(k);
    if (!(rate > 0.0) || !std::isfinite(rate))
      throw DomainError("birth rate q_" + std::to_string(k) + " = " + format_double(rate) +
                        " is not positive");
    g(k, k) = 0.5 * rate;
    if (k < N) l(k + 1, k) = std::sqrt(rate);
  }
  std::vector<int> d(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) d[k] = k;
  std::vector<std::string> labels;
  for (int k = 0; k < n; ++k) labels.push_back("n=" + std::to_string(k));
  return ModelSpec(TruncatedSpace(n, std::move(labels)), std::move(g), {std::move(l)},
                   Subspace::from_indices(n, std::move(d)),
                   "pure-birth:q=" + q.describe() + ",N=" + std::to_string(N));
}

ModelSpec build_lindblad(const Matrix& h, std::vector<Matrix> kraus, std::string name) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) throw DimensionError("H must be square");
  if (linalg::hermiticity_defect(h) > 1e-12) throw DomainError("H must be Hermitian");
  Matrix g = Matrix::Zero(n, n);
  for (const auto& l : kraus) {
    if (l.rows() != n || l.cols() != n) throw DimensionError("jump operator shape mismatch");
    g.noalias() += 0.5 * l.adjoint() * l;
  }
  g -= cplx(0.0, 1.0) * linalg::hermitian_part(h);
  return ModelSpec(TruncatedSpace(n), std::move(g), std::move(kraus), Subspace::full(n),
                   std::move(name));
}

ModelSpec build_bounded_lindblad(int dim, std::uint64_t seed, int channels) {
  if (dim < 1) throw DimensionError("dim must be >= 1");
  if (channels < 0) throw DomainError("channels must be >= 0");
  std::mt19937_64 rng(seed);
  const Matrix a = random_complex(rng, dim, 1.0 / std::sqrt(2.0 * dim));
  const Matrix h = linalg::hermitian_part(a);
  std::vector<Matrix> ls;
  for (int k = 0; k < channels; ++k)
    ls.push_back(random_complex(rng, dim, 0.3 / std::sqrt(static_cast<double>(dim))));
  return build_lindblad(h, std::move(ls),
                        "bounded-lindblad:seed=" + std::to_string(seed) + ",dim=" +
                            std::to_string(dim) + ",channels=" + std::to_string(channels));
}

ModelSpec build_unitary(int dim, std::uint64_t seed) {
  return build_bounded_lindblad(dim, seed, 0);
}

NoiseFunction NoiseFunction::inverse() {
  return {"inverse", [](double s) { return 1.0 / (1.0 + s); }};
}

NoiseFunction NoiseFunction::parse(const std::string& name) {
  if (name == "inverse") return inverse();
  throw DomainError("unknown noise function '" + name + "' (known: inverse)");
}

RealVector grid_weights(const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  if (n < 2) throw DimensionError("grid needs at least 2 points");
  RealVector mu(static_cast<Eigen::Index>(n));
  mu(0) = 0.5 * (grid[1] - grid[0]);
  mu(n - 1) = 0.5 * (grid[n - 1] - grid[n - 2]);
  for (std::size_t j = 1; j + 1 < n; ++j) mu(j) = 0.5 * (grid[j + 1] - grid[j - 1]);
  return mu;
}

RealMatrix tau_f_skew_operator(const TauFModel& model) {
  model.validate();
  const auto& x = model.grid;
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  const RealVector mu = grid_weights(x);
  RealVector s(n);
  for (Eigen::Index j = 0; j < n; ++j) s(j) = std::sqrt(model.f(x[j]) / mu(j));
  RealMatrix k = RealMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double v = 0.5 * s(j) * s(j + 1);
    k(j, j + 1) = v;
    k(j + 1, j) = -v;
  }
  return k;
}

ModelSpec build_tau_f_transport(const TauFModel& model, Orientation orientation,
                                const std::optional<NoiseFunction>& noise) {
  const RealMatrix k = tau_f_skew_operator(model);
  const auto& x = model.grid;
  const int n = static_cast<int>(x.size());
  const RealVector mu = grid_weights(x);
  Matrix g;
  std::vector<int> d;
  if (orientation == Orientation::forward) {
    g = (-k).cast<cplx>();
    g(0, 0) += 0.5 * model.f(x[0]) / mu(0);
    for (int j = 1; j < n - 1; ++j) d.push_back(j);
  } else {
    g = k.cast<cplx>();
    for (int j = 0; j < n; ++j) d.push_back(j);
  }
  std::vector<Matrix> kraus;
  std::string name = std::string("tau-f:f=") + model.f.describe() +
                     ",orientation=" + to_string(orientation) +
                     ",M=" + std::to_string(n - 1);
  if (noise) {
    Matrix l = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      const double v = noise->ell(x[j]);
      if (!std::isfinite(v)) throw DomainError("noise function is not bounded on the grid");
      l(j, j) = v;
      g(j, j) += 0.5 * v * v;
    }
    kraus.push_back(std::move(l));
    name += ",noise=" + noise->name;
  }
  const double lo = linalg::min_eigenvalue(g + g.adjoint());
  if (lo < -1e-10)
    throw DomainError("transport discretization is not dissipative: lambda_min(G+G*) = " +
                      format_double(lo));
  std::vector<std::string> labels;
  for (double xi : x) labels.push_back("x=" + format_double(xi));
  ModelSpec spec(TruncatedSpace(n, std::move(labels)), std::move(g), std::move(kraus),
                 Subspace::from_indices(n, std::move(d)), std::move(name));
  spec.set_grid_model(true);
  return spec;
}

IsometrySpec build_shift_isometry(int m, int dim) {
  if (m < 1) throw DomainError("shift offset m must be >= 1");
  if (dim <= 2 * m) throw DimensionError("shift isometry needs dim > 2m");
  IsometrySpec s;
  s.m = m;
  s.dim = dim;
  return s;
}

// ---- catalog entries

const char* to_string(CatalogKind k) {
  switch (k) {
    case CatalogKind::pure_birth: return "pure_birth";
    case CatalogKind::tau_f_transport: return "tau_f_transport";
    case CatalogKind::tau_f_adjoint: return "tau_f_adjoint";
    case CatalogKind::tau_f_with_noise: return "tau_f_with_noise";
    case CatalogKind::bounded_lindblad: return "bounded_lindblad";
    case CatalogKind::shift_isometry: return "shift_isometry";
  }
  return "?";
}

CatalogEntry CatalogEntry::parse(const std::string& ref) {
  const auto colon = ref.find(':');
  const std::string head = ref.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : ref.substr(colon + 1);
  CatalogEntry e;
  bool known = false;
  for (const auto& ki : kKinds)
    if (head == ki.prefix) {
      e.kind_ = ki.kind;
      known = true;
    }
  if (head == "unitary") {
    e.kind_ = CatalogKind::bounded_lindblad;
    e.params_["channels"] = "0";
    known = true;
  }
  if (!known) throw DomainError("unknown model kind '" + head + "'");

  for (const auto& item : split(tail, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    std::string key = item.substr(0, eq);
    std::string value = eq == std::string::npos ? "" : item.substr(eq + 1);
    if (e.kind_ == CatalogKind::pure_birth) {
      // shorthand: quadratic | linear | power=p | constant=c | rates=q0;q1;...
      if (key == "quadratic" || key == "linear") {
        value = key;
        key = "q";
      } else if (key == "power" || key == "constant") {
        value = key + ":" + value;
        key = "q";
      } else if (key == "rates") {
        value = "list:" + value;
        key = "q";
      }
    }
    if (eq == std::string::npos && key != "q")
      throw DomainError("model parameter '" + item + "' needs key=value");
    e.params_[key] = value;
  }
  if (e.kind_ == CatalogKind::tau_f_transport) {
    if (auto o = e.param("orientation"); o && *o == "adjoint") e.kind_ = CatalogKind::tau_f_adjoint;
    if (e.param("noise")) e.kind_ = CatalogKind::tau_f_with_noise;
  }
  if (e.kind_ == CatalogKind::tau_f_with_noise && !e.param("noise")) e.params_["noise"] = "inverse";
  e.params_.erase("orientation");

  // validate by building the cheap parts
  static const std::map<CatalogKind, std::vector<std::string>> allowed = {
      {CatalogKind::pure_birth, {"q", "N"}},
      {CatalogKind::tau_f_transport, {"alpha", "c1", "grid"}},
      {CatalogKind::tau_f_adjoint, {"alpha", "c1", "grid"}},
      {CatalogKind::tau_f_with_noise, {"alpha", "c1", "grid", "noise"}},
      {CatalogKind::bounded_lindblad, {"seed", "dim", "channels"}},
      {CatalogKind::shift_isometry, {"m", "dim"}},
  };
  for (const auto& [k, v] : e.params_) {
    const auto& ok = allowed.at(e.kind_);
    if (std::find(ok.begin(), ok.end(), k) == ok.end())
      throw DomainError("model '" + head + "' has no parameter '" + k + "'");
  }
  if (auto q = e.param("q")) (void)RateSequence::parse(*q);
  if (auto g = e.param("grid")) (void)parse_grid(*g);
  if (auto a = e.param("alpha")) (void)PositiveFunction::power(parse_double("alpha", *a));
  if (auto nz = e.param("noise")) (void)NoiseFunction::parse(*nz);
  if (auto c = e.param("c1")) (void)parse_double("c1", *c);
  for (const char* key : {"seed", "channels", "m"})
    if (auto v = e.param(key)) (void)parse_int(key, *v);
  (void)e.default_level();
  return e;
}

std::optional<std::string> CatalogEntry::param(const std::string& key) const {
  const auto it = params_.find(key);
  if (it == params_.end()) return std::nullopt;
  return it->second;
}

void CatalogEntry::set_param(const std::string& key, const std::string& value) {
  params_[key] = value;
}

std::string CatalogEntry::ref() const {
  std::string s = prefix_of(kind_);
  char sep = ':';
  for (const auto& [k, v] : params_) {
    s += sep + k + "=" + v;
    sep = ',';
  }
  return s;
}

int CatalogEntry::default_level() const {
  switch (kind_) {
    case CatalogKind::pure_birth: {
      auto n = param("N");
      return n ? parse_int("N", *n) : 8;
    }
    case CatalogKind::bounded_lindblad:
    case CatalogKind::shift_isometry: {
      auto d = param("dim");
      return d ? parse_int("dim", *d) : (kind_ == CatalogKind::shift_isometry ? 16 : 4);
    }
    default: {
      auto g = param("grid");
      return g ? parse_grid(*g).m : GridSpec{}.m;
    }
  }
}

void CatalogEntry::set_level(int level) {
  switch (kind_) {
    case CatalogKind::pure_birth: params_["N"] = std::to_string(level); break;
    case CatalogKind::bounded_lindblad:
    case CatalogKind::shift_isometry: params_["dim"] = std::to_string(level); break;
    default: {
      auto g = param("grid");
      GridSpec gs = g ? parse_grid(*g) : GridSpec{};
      params_["grid"] = format_double(gs.a) + ":" + format_double(gs.b) + ":" + std::to_string(level);
    }
  }
}

Orientation CatalogEntry::orientation() const {
  return kind_ == CatalogKind::tau_f_adjoint ? Orientation::adjoint : Orientation::forward;
}

TauFModel CatalogEntry::tau_f_model(int level) const {
  if (!is_transport(kind_)) throw DomainError("model is not a transport model");
  auto g = param("grid");
  GridSpec gs = g ? parse_grid(*g) : GridSpec{};
  TauFModel m;
  auto a = param("alpha");
  m.f = PositiveFunction::power(a ? parse_double("alpha", *a) : 0.0);
  m.grid = uniform_grid(gs.a, gs.b, level);
  auto c1 = param("c1");
  m.c1 = c1 ? parse_double("c1", *c1) : 1.0;
  m.validate();
  return m;
}

ModelSpec CatalogEntry::build(int level) const {
  switch (kind_) {
    case CatalogKind::pure_birth: {
      auto q = param("q");
      return build_pure_birth(q ? RateSequence::parse(*q) : RateSequence::quadratic(), level);
    }
    case CatalogKind::bounded_lindblad: {
      auto s = param("seed");
      auto c = param("channels");
      return build_bounded_lindblad(level, s ? static_cast<std::uint64_t>(parse_int("seed", *s)) : 7,
                                    c ? parse_int("channels", *c) : 2);
    }
    case CatalogKind::tau_f_transport:
    case CatalogKind::tau_f_adjoint:
      return build_tau_f_transport(tau_f_model(level), orientation());
    case CatalogKind::tau_f_with_noise:
      return build_tau_f_transport(tau_f_model(level), Orientation::forward,
                                   NoiseFunction::parse(param("noise").value_or("inverse")));
    case CatalogKind::shift_isometry:
      break;
  }
  throw DomainError("shift isometries are not semigroup models; use the deficiency command");
}

ModelFamily CatalogEntry::family() const {
  const CatalogEntry copy = *this;
  return [copy](int level) { return copy.build(level); };
}

IsometrySpec CatalogEntry::isometry() const {
  if (kind_ != CatalogKind::shift_isometry) throw DomainError("model is not an isometry");
  auto m = param("m");
  return build_shift_isometry(m ? parse_int("m", *m) : 1, default_level());
}

std::vector<CatalogSchema> list_catalog() {
  const ParamSchema grid{"grid", "a:b:M", "0:4:12", "uniform grid on [a, b] with M intervals (a = 0)"};
  const ParamSchema alpha{"alpha", "real in [0,1]", "0", "f(x) = (1+x)^alpha"};
  const ParamSchema c1{"c1", "real > 0", "1", "normalization of u_+"};
  return {
      {"pure-birth", CatalogKind::pure_birth,
       "pure-birth chain with killing at the top state",
       {{"q", "quadratic|linear|power:p|constant:c|list:q0;q1;...", "quadratic",
         "birth rates; shorthands: quadratic, linear, power=p, constant=c, rates=q0;q1;..."},
        {"N", "integer >= 1", "8", "truncation level (dim = N + 1)"}}},
      {"tau-f", CatalogKind::tau_f_transport,
       "transport generator -G ~ i tau_f with outflow at x = 0 (explosive)",
       {alpha, c1, grid}},
      {"tau-f-adjoint", CatalogKind::tau_f_adjoint,
       "adjoint orientation, unitary transport (conservative)", {alpha, c1, grid}},
      {"tau-f-noise", CatalogKind::tau_f_with_noise,
       "forward transport plus multiplication noise L = l(x)",
       {alpha, c1, grid, {"noise", "inverse", "inverse", "l(s) = 1/(1+s)"}}},
      {"bounded-lindblad", CatalogKind::bounded_lindblad,
       "seeded random Lindblad generator (conservative control); unitary:... sets channels=0",
       {{"seed", "integer", "7", "random seed"},
        {"dim", "integer >= 1", "4", "dimension"},
        {"channels", "integer >= 0", "2", "number of jump operators"}}},
      {"shift", CatalogKind::shift_isometry, "shift isometry V e_n = e_{n+m}",
       {{"m", "integer >= 1", "1", "shift offset"},
        {"dim", "integer > 2m", "16", "truncation dimension"}}},
  };
}

}  // namespace qdslab
