#include "detail/matrix_ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace qdslab::detail {
namespace {

using State = std::vector<double>;

Eigen::Map<Matrix> as_matrix(State& s, Eigen::Index n) {
  return {reinterpret_cast<cplx*>(s.data()), n, n};
}

Eigen::Map<const Matrix> as_matrix(const State& s, Eigen::Index n) {
  return {reinterpret_cast<const cplx*>(s.data()), n, n};
}

}  // namespace

std::vector<Matrix> integrate_matrix_ode(const MatrixRhs& rhs, const Matrix& x0,
                                         const std::vector<double>& times,
                                         const OdeOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  if (x0.rows() != x0.cols()) throw DimensionError("ODE state must be square");
  if (!std::is_sorted(times.begin(), times.end()))
    throw DomainError("output times must be sorted");
  if (!times.empty() && times.front() < 0.0)
    throw DomainError("output times must be nonnegative");

  const Eigen::Index n = x0.rows();
  State x(static_cast<std::size_t>(2 * n * n));
  as_matrix(x, n) = x0;

  Matrix in(n, n), out(n, n);
  auto system = [&](const State& s, State& ds, double /*t*/) {
    in = as_matrix(s, n);
    rhs(in, out);
    as_matrix(ds, n) = out;
  };

  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                         odeint::runge_kutta_dopri5<State>());

  std::vector<Matrix> result;
  result.reserve(times.size());
  double t = 0.0;
  double dt = opts.initial_dt;
  long steps = 0;
  for (double target : times) {
    while (t < target) {
      const double remaining = target - t;
      const bool clamped = dt >= remaining;
      const double saved_dt = dt;
      double h = clamped ? remaining : dt;
      const double t_before = t;
      const auto res = stepper.try_step(system, x, t, h);
      if (++steps > opts.max_steps)
        throw ConvergenceError("matrix ODE: step budget exhausted at t = " +
                                   std::to_string(t),
                               target - t);
      if (res == odeint::success) {
        if (opts.hermitian) {
          auto m = as_matrix(x, n);
          m = (0.5 * (m + m.adjoint())).eval();
          stepper.reset();
        }
        // a step shortened to hit an output time should not shrink the next one
        dt = clamped ? std::max(saved_dt, h) : h;
        if (clamped) t = target;
      } else {
        dt = h;
        t = t_before;
      }
      if (dt < 1e-14 * std::max(1.0, target))
        throw ConvergenceError("matrix ODE: step size underflow at t = " +
                                   std::to_string(t),
                               dt);
    }
    result.emplace_back(as_matrix(x, n));
  }
  return result;
}

}  // namespace qdslab::detail
