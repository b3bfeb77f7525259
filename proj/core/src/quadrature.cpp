#include "qdslab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qdslab/linalg.hpp"

namespace qdslab::quad {
namespace {

template <unsigned N>
GaussRule make_rule() {
  using rule = boost::math::quadrature::gauss<double, N>;
  static_assert(N % 2 == 0, "even orders only");
  GaussRule r;
  const auto& a = rule::abscissa();
  const auto& w = rule::weights();
  for (std::size_t i = a.size(); i-- > 0;) {
    r.nodes.push_back(-a[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.nodes.push_back(a[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

struct Panel {
  double a, b;
};

std::vector<Panel> graded_panels(double first, double horizon) {
  std::vector<Panel> p;
  double a = 0.0, b = std::min(first, horizon);
  p.push_back({a, b});
  while (b < horizon) {
    a = b;
    b = std::min(2.0 * b, horizon);
    p.push_back({a, b});
  }
  return p;
}

std::vector<Panel> bisect(const std::vector<Panel>& in) {
  std::vector<Panel> out;
  out.reserve(2 * in.size());
  for (const auto& p : in) {
    const double m = 0.5 * (p.a + p.b);
    out.push_back({p.a, m});
    out.push_back({m, p.b});
  }
  return out;
}

Matrix integrate_panels(const BatchEvaluator& g, int rows, int cols,
                        const std::vector<Panel>& panels, double lambda,
                        int* evaluations) {
  const GaussRule& rule = gauss_legendre(16);
  std::vector<double> times;
  std::vector<double> weights;
  times.reserve(panels.size() * rule.nodes.size());
  for (const auto& p : panels) {
    const double half = 0.5 * (p.b - p.a);
    const double mid = 0.5 * (p.b + p.a);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = mid + half * rule.nodes[i];
      times.push_back(t);
      weights.push_back(half * rule.weights[i] * std::exp(-lambda * t));
    }
  }
  const std::vector<Matrix> values = g(times);
  if (values.size() != times.size())
    throw Error("laplace_transform: evaluator returned wrong number of values");
  Matrix acc = Matrix::Zero(rows, cols);
  for (std::size_t i = 0; i < times.size(); ++i) acc += weights[i] * values[i];
  *evaluations += static_cast<int>(times.size());
  return acc;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static const GaussRule r8 = make_rule<8>();
  static const GaussRule r16 = make_rule<16>();
  switch (order) {
    case 8: return r8;
    case 16: return r16;
    default: throw DomainError("gauss_legendre: unsupported order");
  }
}

LaplaceResult laplace_transform(const BatchEvaluator& g, int rows, int cols,
                                const LaplaceOptions& opts) {
  if (!(opts.lambda > 0.0)) throw DomainError("laplace_transform: lambda must be > 0");
  // e^{-lambda T} ~ 4e-18 beyond the horizon
  const double horizon = 40.0 / opts.lambda;
  const double first = 0.25 / std::max(opts.rate_scale, opts.lambda);
  std::vector<Panel> panels = graded_panels(first, horizon);

  LaplaceResult res;
  Matrix prev = integrate_panels(g, rows, cols, panels, opts.lambda, &res.evaluations);
  for (int level = 0; level < opts.max_refinements; ++level) {
    panels = bisect(panels);
    Matrix cur = integrate_panels(g, rows, cols, panels, opts.lambda, &res.evaluations);
    res.achieved = linalg::operator_norm(cur - prev);
    res.panels = static_cast<int>(panels.size());
    res.value = std::move(cur);
    if (res.achieved < opts.tol) return res;
    prev = res.value;
  }
  throw ConvergenceError("laplace_transform: refinement did not reach tolerance",
                         res.achieved);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &err);
}

}  // namespace qdslab::quad
