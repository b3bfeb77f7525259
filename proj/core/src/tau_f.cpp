#include "qdslab/tau_f.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qdslab {

PositiveFunction PositiveFunction::power(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("f(x) = (1+x)^alpha needs alpha in [0, 1]");
  PositiveFunction p;
  p.alpha_ = alpha;
  return p;
}

PositiveFunction PositiveFunction::sampled(std::vector<double> x, std::vector<double> f) {
  if (x.size() < 2 || x.size() != f.size())
    throw DomainError("sampled f needs matching x and f arrays with >= 2 points");
  if (x.front() != 0.0) throw DomainError("sampled f must start at x = 0");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("sample points must be strictly increasing");
  for (double v : f)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("f must be positive and finite");
  PositiveFunction p;
  p.cumulative_.assign(x.size(), 0.0);
  // exact integral of 1/f for linear f on each interval
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double h = x[i] - x[i - 1];
    const double a = f[i - 1], b = f[i];
    const double piece = std::abs(b - a) < 1e-14 * a ? h / a : h * std::log(b / a) / (b - a);
    p.cumulative_[i] = p.cumulative_[i - 1] + piece;
  }
  p.xs_ = std::move(x);
  p.fs_ = std::move(f);
  return p;
}

double PositiveFunction::domain_end() const {
  return xs_ ? xs_->back() : std::numeric_limits<double>::infinity();
}

double PositiveFunction::operator()(double x) const {
  if (alpha_) return std::pow(1.0 + x, *alpha_);
  const auto& xs = *xs_;
  if (x <= xs.front()) return fs_.front();
  if (x >= xs.back()) return fs_.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - s) * fs_[i - 1] + s * fs_[i];
}

double PositiveFunction::derivative(double x) const {
  if (alpha_) return *alpha_ * std::pow(1.0 + x, *alpha_ - 1.0);
  const auto& xs = *xs_;
  const auto it = std::upper_bound(xs.begin(), xs.end() - 1, std::max(x, 0.0));
  const std::size_t i = std::clamp<std::size_t>(it - xs.begin(), 1, xs.size() - 1);
  return (fs_[i] - fs_[i - 1]) / (xs[i] - xs[i - 1]);
}

double PositiveFunction::inverse_integral(double x) const {
  if (alpha_) {
    const double a = *alpha_;
    if (a == 1.0) return std::log1p(x);
    return (std::pow(1.0 + x, 1.0 - a) - 1.0) / (1.0 - a);
  }
  const auto& xs = *xs_;
  if (x <= 0.0) return 0.0;
  if (x >= xs.back()) return cumulative_.back() + (x - xs.back()) / fs_.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double h = x - xs[i - 1];
  const double a = fs_[i - 1];
  const double b = (*this)(x);
  const double piece = std::abs(b - a) < 1e-14 * a ? h / a : h * std::log(b / a) / (b - a);
  return cumulative_[i - 1] + piece;
}

std::string PositiveFunction::describe() const {
  std::ostringstream os;
  if (alpha_)
    os << "(1+x)^" << *alpha_;
  else
    os << "sampled(" << xs_->size() << " points)";
  return os.str();
}

std::vector<double> uniform_grid(double a, double b, int intervals) {
  if (a != 0.0) throw DomainError("grid must start at x = 0");
  if (!(b > a)) throw DomainError("grid end must exceed its start");
  if (intervals < 2) throw DomainError("grid needs at least 2 intervals");
  std::vector<double> g(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) g[i] = a + (b - a) * i / intervals;
  g.back() = b;
  return g;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.push_back(grid[i]);
    out.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  out.push_back(grid.back());
  return out;
}

void TauFModel::validate() const {
  if (grid.size() < 3) throw DomainError("tau_f grid needs at least 3 points");
  if (grid.front() != 0.0) throw DomainError("tau_f grid must start at x = 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("tau_f grid must be strictly increasing");
  if (grid.back() > f.domain_end() * (1.0 + 1e-12))
    throw DomainError("grid extends beyond the sampled f");
  for (double x : grid)
    if (!(f(x) > 0.0)) throw DomainError("f must be positive on the grid");
  if (!(c1 > 0.0)) throw DomainError("c1 must be positive");
}

double TauFModel::derivative_bound() const {
  double m = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    m = std::max(m, std::abs(f(grid[i]) - f(grid[i - 1])) / (grid[i] - grid[i - 1]));
  return m;
}

double TauFModel::divergence_integral() const { return f.inverse_integral(grid.back()); }

}  // namespace qdslab
