#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "config.hpp"
#include "report.hpp"

namespace qdslab::cli {
namespace {

enum class Status { conclusive, inconclusive, error };

Status worst(Status a, Status b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

const char* to_string(Status s) {
  switch (s) {
    case Status::conclusive: return "conclusive";
    case Status::inconclusive: return "inconclusive";
    case Status::error: return "error";
  }
  return "error";
}

int exit_code(Status s) {
  switch (s) {
    case Status::conclusive: return kConclusive;
    case Status::inconclusive: return kInconclusive;
    case Status::error: return kError;
  }
  return kError;
}

// dense residual checks on transport grids are capped at this many intervals
constexpr int kDenseGridCap = 512;
constexpr int kAnnihilatorMaxDim = 32;

struct Run {
  RunConfig cfg;
  Tolerances tol;
  std::optional<CatalogEntry> entry;
  json tasks = json::array();
  Table table;
  Status status = Status::conclusive;
  std::vector<std::string> summary;

  void add(json task, Status s) {
    tasks.push_back(std::move(task));
    status = worst(status, s);
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) { return format_number(v); }

void require_catalog(Run& run, const char* command) {
  if (!run.entry)
    throw ConfigError(std::string(command) + " needs a catalog model reference, not an inline model");
}

ModelSpec resolve_model(Run& run) {
  const RunConfig& c = run.cfg;
  if (c.inline_model) {
    if (c.level || c.grid) throw ConfigError("--dim and --grid apply to catalog models only");
    return model_from_json(*c.inline_model);
  }
  if (c.model_ref.empty()) throw ConfigError("no model given (--model or \"model\")");
  CatalogEntry e = CatalogEntry::parse(c.model_ref);
  if (c.grid) e.set_param("grid", *c.grid);
  if (c.level) e.set_level(*c.level);
  run.entry = e;
  if (!e.is_model()) throw ConfigError("'" + e.ref() + "' is an isometry, not a generator model");
  return e.build();
}

json validation_json(const ValidationReport& v, const Tolerances& tol) {
  json j;
  j["dissipativity"] = {{"status", to_string(v.dissipativity)},
                        {"residual", v.dissipativity_residual}, {"tolerance", tol.psd}};
  j["condition_iii"] = {{"status", to_string(v.condition_iii)},
                        {"residual", v.condition_iii_residual}, {"tolerance", tol.psd}};
  j["condition_iii_prime"] = {{"status", to_string(v.condition_iii_prime)},
                              {"residual", v.condition_iii_prime_residual},
                              {"tolerance", tol.psd}};
  j["condition_iv"] = {{"status", to_string(v.condition_iv)},
                       {"residual", v.condition_iv_residual}, {"tolerance", tol.condition_iv}};
  return j;
}

void cmd_validate(Run& run) {
  Stopwatch sw;
  const ModelSpec spec = resolve_model(run);
  const ValidationReport v = validate_model(spec, run.tol);
  json task;
  task["kind"] = "validate";
  task["model"] = spec.name();
  task["dim"] = spec.dim();
  task["domain_dim"] = spec.domain().dim();
  task["conditions"] = validation_json(v, run.tol);
  task["admissible"] = v.admissible();
  task["wall_clock_s"] = sw.seconds();
  run.table.columns = {"condition", "status", "residual", "tolerance"};
  const json& cj = task["conditions"];
  for (const auto& [name, c] : cj.items())
    run.table.rows.push_back({name, c["status"].get<std::string>(),
                              num(c["residual"].get<double>()),
                              num(c["tolerance"].get<double>())});
  run.summary.push_back(spec.name() + (v.admissible() ? " admissible" : " not admissible"));
  run.add(std::move(task), Status::conclusive);
}

json certificate_json(const ExplosionCertificate& c, const Tolerances& tol) {
  const auto thr = [&](double v) {
    return json{{"value", v}, {"threshold", c.decision_threshold},
                {"floor", c.inconclusive_floor}};
  };
  json j;
  j["ell_norm"] = thr(c.ell_norm);
  j["q_limit_norm"] = thr(c.q_limit_norm);
  j["resolvent_gap"] = thr(c.resolvent_gap);
  j["q_limit_increment"] = {{"value", c.q_limit_increment}, {"tolerance", tol.stall},
                            {"converged", c.q_limit_converged}};
  j["series_tail"] = {{"value", c.series_tail}, {"tolerance", tol.series_tail},
                      {"terms", c.series_terms_used}, {"converged", c.series_converged}};
  return j;
}

void cmd_diagnose(Run& run) {
  const ModelSpec spec = resolve_model(run);
  {
    Stopwatch sw;
    const ValidationReport v = validate_model(spec, run.tol);
    json task{{"kind", "validate"}, {"model", spec.name()}, {"dim", spec.dim()},
              {"conditions", validation_json(v, run.tol)}, {"admissible", v.admissible()},
              {"wall_clock_s", sw.seconds()}};
    run.add(std::move(task), Status::conclusive);
    if (!v.admissible())
      throw RefusalError("model " + spec.name() +
                         " fails the structural conditions; see the validate task");
  }
  run.table.columns = {"lambda", "verdict", "ell_norm", "q_limit_norm", "resolvent_gap",
                       "explosion_mass", "series_terms", "residual_on_d",
                       "annihilator_dim", "annihilator_psd", "decision_threshold",
                       "inconclusive_floor"};
  for (double lambda : run.cfg.lambdas) {
    Stopwatch sw;
    const LaplaceContext ctx(spec, lambda, run.tol);
    const ExplosionCertificate cert = conservativity_verdict(ctx);
    const ExplosionSolutionReport sol = verify_explosion_solution(ctx, cert);
    Status st = cert.verdict == Verdict::inconclusive ? Status::inconclusive : Status::conclusive;

    json task;
    task["kind"] = "diagnose";
    task["model"] = spec.name();
    task["dim"] = spec.dim();
    task["lambda"] = lambda;
    task["verdict"] = to_string(cert.verdict);
    task["note"] = cert.note;
    task["explosion_mass"] = cert.explosion_mass;
    task["certificates"] = certificate_json(cert, run.tol);
    if (sol.applicable)
      task["explosion_solution"] = {{"residual_on_d", judged(sol.residual_on_d, run.tol.semigroup)},
                                    {"fixed_point_on_d", sol.fixed_point_on_d},
                                    {"residual_full", sol.residual_full}};

    std::string ann_dim = "", ann_psd = "";
    if (spec.dim() <= kAnnihilatorMaxDim) {
      const AnnihilatorResult a = predual_annihilator_check(ctx);
      task["annihilator"] = {{"dimension", a.dimension},
                             {"has_psd_element", a.has_psd_element},
                             {"psd_min_eigenvalue", judged(a.psd_min_eigenvalue, run.tol.psd)},
                             {"rank_threshold", a.rank_threshold},
                             {"smallest_kept", a.smallest_kept},
                             {"largest_dropped", a.largest_dropped},
                             {"ambiguous_rank", a.ambiguous_rank},
                             {"inconclusive", a.inconclusive},
                             {"method", a.psd_method}};
      ann_dim = std::to_string(a.dimension);
      ann_psd = a.has_psd_element ? "true" : "false";
    } else {
      task["annihilator"] = {{"skipped", "dimension above " + std::to_string(kAnnihilatorMaxDim)}};
    }

    if (run.cfg.cross_check) {
      const int n = spec.dim();
      json cc;
      try {
        const Matrix r = resolvent_identity_quadrature(ctx);
        const Matrix id = Matrix::Identity(n, n);
        const double res = (r + cert.explosion_transform - id / lambda).cwiseAbs().maxCoeff();
        cc["resolvent_identity"] = judged(res, run.tol.cross_method);
        const Matrix fq = first_iterate_quadrature(ctx);
        const Matrix lhs = ell_lambda(ctx).matrix() + q_lambda(ctx, HermitianForm::identity(n)).matrix() / lambda;
        cc["first_iterate"] = judged((lhs - fq).cwiseAbs().maxCoeff(), run.tol.cross_method);
        if (res > run.tol.cross_method) st = worst(st, Status::inconclusive);
      } catch (const ConvergenceError& e) {
        cc["error"] = e.what();
        cc["achieved"] = e.achieved();
        st = worst(st, Status::inconclusive);
      }
      task["cross_check"] = cc;
    }
    task["wall_clock_s"] = sw.seconds();

    run.table.rows.push_back({num(lambda), to_string(cert.verdict), num(cert.ell_norm),
                              num(cert.q_limit_norm), num(cert.resolvent_gap),
                              num(cert.explosion_mass), std::to_string(cert.series_terms_used),
                              sol.applicable ? num(sol.residual_on_d) : "", ann_dim, ann_psd,
                              num(cert.decision_threshold), num(cert.inconclusive_floor)});
    std::ostringstream line;
    line << spec.name() << " lambda=" << num(lambda) << ": " << to_string(cert.verdict);
    run.summary.push_back(line.str());
    run.add(std::move(task), st);
  }
}

std::vector<int> default_sweep_levels(const CatalogEntry& e) {
  if (e.kind() == CatalogKind::pure_birth) return {8, 16, 32, 64, 128};
  const int l = e.default_level();
  return {l, 2 * l, 4 * l, 8 * l};
}

void cmd_sweep(Run& run) {
  (void)resolve_model(run);
  require_catalog(run, "sweep");
  const CatalogEntry& e = *run.entry;
  std::vector<int> levels = run.cfg.dims.empty() ? default_sweep_levels(e) : run.cfg.dims;
  const int threads = run.cfg.threads.value_or(default_thread_count());
  run.table.columns = {"lambda", "level", "dim", "verdict", "explosion_mass", "resolvent_gap",
                       "trend", "extrapolated_limit"};
  for (double lambda : run.cfg.lambdas) {
    Stopwatch sw;
    const SweepResult r = truncation_sweep(e.family(), lambda, levels, run.tol, threads);
    json task;
    task["kind"] = "sweep";
    task["model"] = e.ref();
    task["lambda"] = lambda;
    json lv = json::array();
    const std::string lim = r.extrapolated_limit ? num(*r.extrapolated_limit) : "";
    for (std::size_t i = 0; i < r.dims.size(); ++i) {
      const auto& c = r.certificates[i];
      const int dim = static_cast<int>(c.explosion_transform.rows());
      lv.push_back({{"level", r.dims[i]},
                    {"dim", dim},
                    {"verdict", to_string(c.verdict)},
                    {"explosion_mass", r.observable_trace[i]},
                    {"certificates", certificate_json(c, run.tol)}});
      run.table.rows.push_back({num(lambda), std::to_string(r.dims[i]), std::to_string(dim),
                                to_string(c.verdict), num(r.observable_trace[i]),
                                num(c.resolvent_gap), to_string(r.trend), lim});
    }
    task["levels"] = lv;
    task["trend"] = to_string(r.trend);
    if (r.extrapolated_limit)
      task["extrapolated_limit"] = *r.extrapolated_limit;
    else
      task["extrapolated_limit"] = nullptr;
    task["decision_threshold"] = run.tol.decision_threshold;
    task["inconclusive_floor"] = run.tol.inconclusive_floor;
    task["wall_clock_s"] = sw.seconds();
    run.summary.push_back(e.ref() + " lambda=" + num(lambda) + ": " + to_string(r.trend));
    run.add(std::move(task), r.trend == Trend::undetermined ? Status::inconclusive
                                                             : Status::conclusive);
  }
}

void cmd_evolve(Run& run) {
  const ModelSpec spec = resolve_model(run);
  Stopwatch sw;
  const int n = spec.dim();
  json task;
  task["kind"] = "evolve";
  task["model"] = spec.name();
  task["dim"] = n;
  task["ode"] = {{"abs_tol", run.tol.ode_abs}, {"rel_tol", run.tol.ode_rel}};
  run.table.columns = {"t", "trace", "min_eigenvalue", "max_eigenvalue", "explosion_max",
                       "explosion_e0"};
  Status st = Status::conclusive;
  try {
    const HermitianForm id = HermitianForm::identity(n);
    EvolutionResult r;
    if (!run.cfg.times.empty()) {
      std::vector<double> ts = run.cfg.times;
      if (!std::is_sorted(ts.begin(), ts.end()) || ts.front() < 0.0)
        throw ConfigError("times must be sorted and nonnegative");
      r = evolve_observable(spec, id, ts, run.tol);
    } else {
      const double t = run.cfg.t_end.value_or(1.0);
      const int steps = run.cfg.steps.value_or(10);
      if (!(t > 0.0) || steps < 1) throw ConfigError("--t must be > 0 and --steps >= 1");
      r = evolve_observable(spec, id, t, steps, run.tol);
    }
    json samples = json::array();
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      const Matrix& p = r.observables[i].matrix();
      const RealVector ev = linalg::hermitian_eigenvalues(p);
      const Matrix& ex = r.explosion[i].matrix();
      const double exmax = linalg::max_eigenvalue(ex);
      samples.push_back({{"t", r.times[i]},
                         {"trace", p.trace().real()},
                         {"min_eigenvalue", judged(ev(0), run.tol.psd)},
                         {"max_eigenvalue", ev(ev.size() - 1)},
                         {"explosion_max", judged(exmax, run.tol.decision_threshold)},
                         {"explosion_e0", ex(0, 0).real()}});
      run.table.rows.push_back({num(r.times[i]), num(p.trace().real()), num(ev(0)),
                                num(ev(ev.size() - 1)), num(exmax), num(ex(0, 0).real())});
    }
    task["samples"] = samples;
    const double last = r.explosion.empty() ? 0.0 : linalg::max_eigenvalue(r.explosion.back().matrix());
    run.summary.push_back(spec.name() + ": max eigenvalue of I - P_t(I) at t=" +
                          num(r.times.back()) + " is " + num(last));
  } catch (const ConvergenceError& e) {
    task["error"] = e.what();
    task["achieved"] = e.achieved();
    st = Status::inconclusive;
    run.summary.push_back(spec.name() + ": evolution did not converge");
  }
  task["wall_clock_s"] = sw.seconds();
  run.add(std::move(task), st);
}

TauFModel capped_model(const TauFModel& m, int cap) {
  if (m.intervals() <= cap) return m;
  TauFModel c = m;
  c.grid = uniform_grid(m.grid.front(), m.grid.back(), cap);
  return c;
}

void deficiency_transport(Run& run, json& task) {
  const CatalogEntry& e = *run.entry;
  const TauFModel model = e.tau_f_model();
  const Orientation o = e.orientation();
  const DeficiencyResult d = deficiency_indices_tau_f(model);
  // the adjoint reverses the roles of u_+ and u_-
  const int np = o == Orientation::forward ? d.n_plus : d.n_minus;
  const int nm = o == Orientation::forward ? d.n_minus : d.n_plus;
  const double norm_tol = 1e-8 * std::max(1.0, d.norm_plus_expected);
  task["orientation"] = to_string(o);
  task["intervals"] = model.intervals();
  task["n_plus"] = np;
  task["n_minus"] = nm;
  task["norm_plus"] = {{"value", d.norm_plus},
                       {"expected", d.norm_plus_expected},
                       {"tolerance", norm_tol},
                       {"cutoff", d.norm_plus_cutoff},
                       {"extrapolated", d.norm_plus_extrapolated}};
  task["tail_plus"] = to_string(d.tail_plus);
  task["tail_minus"] = to_string(d.tail_minus);
  json partial = json::array();
  for (const auto& p : d.minus_partial_norms)
    partial.push_back({{"x", p.x}, {"log_value", p.log_value}});
  task["minus_partial_norms"] = partial;
  task["minus_doubling_ratios"] = {{"values", d.minus_doubling_ratios}, {"threshold", 1.05}};
  task["ode_residual"] = {{"plus", d.vectors.residual_plus},
                          {"minus", d.vectors.residual_minus},
                          {"tolerance", kMaxDeficiencyResidual}};
  task["divergence_integral"] = d.divergence_integral;
  task["isometry_verdict"] = to_string(isometric_restriction_verdict(np, nm));

  run.table.rows.push_back({"n_plus", std::to_string(np), ""});
  run.table.rows.push_back({"n_minus", std::to_string(nm), ""});
  run.table.rows.push_back({"norm_plus", num(d.norm_plus), num(d.norm_plus_expected)});
  run.table.rows.push_back({"tail_minus", to_string(d.tail_minus), ""});

  const TauFModel coarse = capped_model(model, kDenseGridCap);
  if (o == Orientation::forward) {
    const Prop42Report p = prop42_certificate(coarse, o);
    json lv = json::array();
    for (const auto& l : p.levels)
      lv.push_back({{"intervals", l.intervals}, {"max_residual", l.max_residual},
                    {"far_tail_residual", l.far_tail_residual}});
    task["boundary_form_residual"] = {{"levels", lv}, {"order", p.order}};
    run.table.rows.push_back({"boundary_form_order", num(p.order), ""});
  }
  json ext;
  ext["intervals"] = coarse.intervals();
  try {
    const VonNeumannExtension x(tau_f_extension_spec(coarse, o));
    ext["symmetry_residual"] = judged(x.symmetry_residual(), 1e-8);
    ext["rank_v"] = x.rank_v();
    ext["discrete_deficiency"] = x.discrete_deficiency();
  } catch (const RefusalError& r) {
    ext["refused"] = r.what();
  }
  task["extension"] = ext;
  run.summary.push_back(e.ref() + ": (n_+, n_-) = (" + std::to_string(np) + ", " +
                        std::to_string(nm) + ")");
}

void deficiency_shift(Run& run, json& task) {
  const CatalogEntry& e = *run.entry;
  const CayleyResult c = cayley_deficiency_from_isometry(e.isometry());
  task["n_plus"] = c.n_plus;
  task["n_minus"] = c.n_minus;
  task["dims"] = c.dims;
  task["n_plus_by_dim"] = c.n_plus_by_dim;
  task["n_minus_by_dim"] = c.n_minus_by_dim;
  task["range_margin"] = c.range_margin;
  task["stabilized"] = c.stabilized;
  json support = json::array();
  for (Eigen::Index j = 0; j < c.n_minus_basis.cols(); ++j) {
    Eigen::Index arg = 0;
    c.n_minus_basis.col(j).cwiseAbs().maxCoeff(&arg);
    support.push_back(arg);
  }
  task["n_minus_peaks"] = support;
  task["isometry_verdict"] = to_string(isometric_restriction_verdict(c.n_plus, c.n_minus));
  run.table.rows.push_back({"n_plus", std::to_string(c.n_plus), ""});
  run.table.rows.push_back({"n_minus", std::to_string(c.n_minus), ""});
  run.table.rows.push_back({"range_margin", num(c.range_margin), ""});
  run.summary.push_back(e.ref() + ": (n_+, n_-) = (" + std::to_string(c.n_plus) + ", " +
                        std::to_string(c.n_minus) + ")");
}

void cmd_deficiency(Run& run) {
  if (run.cfg.inline_model) throw ConfigError("deficiency needs a catalog model reference");
  if (run.cfg.model_ref.empty()) throw ConfigError("no model given (--model or \"model\")");
  CatalogEntry e = CatalogEntry::parse(run.cfg.model_ref);
  if (run.cfg.grid) e.set_param("grid", *run.cfg.grid);
  if (run.cfg.level) e.set_level(*run.cfg.level);
  run.entry = e;
  Stopwatch sw;
  json task;
  task["kind"] = "deficiency";
  task["model"] = e.ref();
  run.table.columns = {"quantity", "value", "reference"};
  Status st = Status::conclusive;
  try {
    switch (e.kind()) {
      case CatalogKind::tau_f_transport:
      case CatalogKind::tau_f_adjoint:
      case CatalogKind::tau_f_with_noise: deficiency_transport(run, task); break;
      case CatalogKind::shift_isometry: deficiency_shift(run, task); break;
      default:
        throw ConfigError("deficiency applies to tau-f models and shift isometries, not " +
                          std::string(to_string(e.kind())));
    }
  } catch (const InconclusiveError& x) {
    task["inconclusive"] = x.what();
    st = Status::inconclusive;
    run.summary.push_back(e.ref() + ": inconclusive");
  } catch (const ConvergenceError& x) {
    task["inconclusive"] = x.what();
    task["achieved"] = x.achieved();
    st = Status::inconclusive;
    run.summary.push_back(e.ref() + ": inconclusive");
  }
  task["wall_clock_s"] = sw.seconds();
  run.add(std::move(task), st);
}

void cmd_list_models(Run& run) {
  json models = json::array();
  run.table.columns = {"prefix", "kind", "param", "type", "default", "description"};
  for (const auto& s : list_catalog()) {
    json params = json::array();
    for (const auto& p : s.params) {
      params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value},
                        {"description", p.description}});
      run.table.rows.push_back({s.prefix, to_string(s.kind), p.name, p.type, p.default_value,
                                p.description});
    }
    models.push_back({{"prefix", s.prefix}, {"kind", to_string(s.kind)},
                      {"description", s.description}, {"params", params}});
  }
  run.summary.push_back(std::to_string(models.size()) + " catalog entries");
  run.add({{"kind", "list-models"}, {"models", models}}, Status::conclusive);
}

constexpr const char* kFooter = R"(Exit status: 0 conclusive, 1 error, 2 inconclusive.

Config files are JSON with keys command, model, dim, lambdas, dims, times,
t, steps, grid, tolerances, threads, cross_check, output {path, format}.
A report written by this tool is itself a valid config. Flags override
file values. QDSLAB_THREADS caps sweep parallelism.

CSV/TSV columns:
  validate     condition,status,residual,tolerance
  diagnose     lambda,verdict,ell_norm,q_limit_norm,resolvent_gap,explosion_mass,
               series_terms,residual_on_d,annihilator_dim,annihilator_psd,
               decision_threshold,inconclusive_floor
  sweep        lambda,level,dim,verdict,explosion_mass,resolvent_gap,trend,
               extrapolated_limit
  evolve       t,trace,min_eigenvalue,max_eigenvalue,explosion_max,explosion_e0
  deficiency   quantity,value,reference
  list-models  prefix,kind,param,type,default,description)";

struct Flags {
  std::string config;
  std::string model;
  std::optional<int> dim;
  std::vector<double> lambdas;
  std::vector<int> dims;
  std::vector<double> times;
  std::optional<double> t;
  std::optional<int> steps;
  std::string grid;
  std::vector<std::string> tol;
  std::optional<int> threads;
  bool cross_check = false;
  std::string out;
  std::string format;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config or a previous report");
  app->add_option("--model", f.model, "catalog reference, e.g. pure-birth:quadratic");
  app->add_option("--dim", f.dim, "truncation level (N for pure-birth, M for grids)");
  app->add_option("--lambda", f.lambdas, "Laplace parameters (comma separated)")->delimiter(',');
  app->add_option("--dims", f.dims, "sweep levels (comma separated)")->delimiter(',');
  app->add_option("--times", f.times, "evolution sample times (comma separated)")->delimiter(',');
  app->add_option("--t", f.t, "evolution horizon");
  app->add_option("--steps", f.steps, "evolution intervals on [0, t]");
  app->add_option("--grid", f.grid, "transport grid a:b:M");
  app->add_option("--tol", f.tol, "tolerance override key=value (repeatable)");
  app->add_option("--threads", f.threads, "worker threads for sweeps");
  app->add_flag("--cross-check", f.cross_check, "diagnose: add quadrature cross-checks");
  app->add_option("--out", f.out, "report path (default stdout)");
  app->add_option("--format", f.format, "json, csv or tsv");
}

RunConfig merge(const Flags& f, const std::string& command) {
  RunConfig c;
  if (!f.config.empty()) c = load_config_file(f.config);
  if (!command.empty()) c.command = command;
  if (c.command.empty()) throw ConfigError("no subcommand given and the config names none");
  if (!f.model.empty()) {
    c.model_ref = f.model;
    c.inline_model.reset();
  }
  if (f.dim) c.level = f.dim;
  if (!f.lambdas.empty()) c.lambdas = f.lambdas;
  if (!f.dims.empty()) c.dims = f.dims;
  if (!f.times.empty()) c.times = f.times;
  if (f.t) {
    c.t_end = f.t;
    c.times.clear();
  }
  if (f.steps) c.steps = f.steps;
  if (!f.grid.empty()) c.grid = f.grid;
  for (const auto& kv : f.tol) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol expects key=value, got '" + kv + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::logic_error&) {
      throw ConfigError("--tol value is not a number in '" + kv + "'");
    }
    Tolerances probe;
    set_tolerance(probe, kv.substr(0, eq), v);
    c.tolerance_overrides[kv.substr(0, eq)] = v;
  }
  if (f.threads) c.threads = f.threads;
  if (f.cross_check) c.cross_check = true;
  if (!f.out.empty()) c.output_path = f.out;
  if (!f.format.empty()) c.format = parse_format(f.format);
  if (c.lambdas.empty()) c.lambdas = {1.0};
  for (double l : c.lambdas)
    if (!(l > 0.0)) throw ConfigError("lambdas must be > 0");
  if (c.threads && *c.threads < 1) throw ConfigError("--threads must be >= 1");
  return c;
}

std::string render(const Run& run, double wall) {
  if (run.cfg.format != Format::json) return render_table(run.table, run.cfg.format);
  json doc;
  doc["schema"] = kReportSchema;
  doc["tool_version"] = kVersion;
  doc["config"] = run.cfg.to_json();
  doc["tasks"] = run.tasks;
  doc["wall_clock_s"] = wall;
  std::string line;
  for (const auto& s : run.summary) line += (line.empty() ? "" : "; ") + s;
  doc["summary"] = {{"status", to_string(run.status)},
                    {"exit_code", exit_code(run.status)},
                    {"line", line}};
  return doc.dump(2) + "\n";
}

void emit(const Run& run, double wall, std::ostream& out) {
  const std::string text = render(run, wall);
  if (run.cfg.output_path.empty())
    out << text;
  else
    write_atomically(run.cfg.output_path, text);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qdslab: conservativity diagnostics for truncated quantum dynamical semigroups",
               "qdslab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.footer(kFooter);
  app.require_subcommand(0, 1);
  Flags top, sub;
  app.add_option("--config", top.config, "JSON config or a previous report");
  app.add_option("--out", top.out, "report path (default stdout)");
  app.add_option("--format", top.format, "json, csv or tsv");
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"validate", "check the structural conditions of a model"},
      {"diagnose", "explosion certificates and verdicts per lambda"},
      {"sweep", "verdict trend over a truncation ladder"},
      {"evolve", "P_t(I) and the explosion observable over time"},
      {"deficiency", "deficiency indices of tau_f models and shift isometries"},
      {"list-models", "the model catalog"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kConclusive;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kConclusive;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kConclusive;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  std::string command;
  Flags flags = top;
  if (!app.get_subcommands().empty()) {
    command = app.get_subcommands().front()->get_name();
    flags = sub;
    if (flags.config.empty()) flags.config = top.config;
    if (flags.out.empty()) flags.out = top.out;
    if (flags.format.empty()) flags.format = top.format;
  } else if (top.config.empty()) {
    out << app.help();
    return kError;
  }

  Stopwatch total;
  Run run;
  try {
    run.cfg = merge(flags, command);
    run.tol = run.cfg.tolerances();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  static const std::map<std::string, std::function<void(Run&)>> dispatch = {
      {"validate", cmd_validate}, {"diagnose", cmd_diagnose},     {"sweep", cmd_sweep},
      {"evolve", cmd_evolve},     {"deficiency", cmd_deficiency}, {"list-models", cmd_list_models}};
  try {
    dispatch.at(run.cfg.command)(run);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    run.status = Status::error;
    run.summary.push_back(std::string("error: ") + e.what());
    if (run.tasks.empty()) return kError;
    // partial results are still written so the failing step can be inspected
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  try {
    emit(run, total.seconds(), out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return exit_code(run.status);
}

}  // namespace qdslab::cli
