#include "qdslab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

namespace qdslab {

const char* to_string(Trend t) {
  switch (t) {
    case Trend::decaying_to_zero: return "decaying_to_zero";
    case Trend::stabilizing_positive: return "stabilizing_positive";
    case Trend::undetermined: return "undetermined";
  }
  return "unknown";
}

int default_thread_count() {
  if (const char* env = std::getenv("QDSLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult truncation_sweep(const ModelFamily& family, double lambda,
                             const std::vector<int>& levels, const Tolerances& tol,
                             int threads) {
  if (levels.empty()) throw DomainError("sweep needs at least one level");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw DomainError("sweep levels must be strictly increasing");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");

  const std::size_t count = levels.size();
  SweepResult r;
  r.lambda = lambda;
  r.dims = levels;
  r.certificates.resize(count);
  r.observable_trace.resize(count);

  if (threads <= 0) threads = default_thread_count();
  threads = std::min<int>(threads, static_cast<int>(count));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const LaplaceContext ctx(family(levels[i]), lambda, tol);
        r.certificates[i] = conservativity_verdict(ctx);
        r.observable_trace[i] = r.certificates[i].explosion_mass;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const bool any_inconclusive =
      std::any_of(r.certificates.begin(), r.certificates.end(),
                  [](const ExplosionCertificate& c) { return c.verdict == Verdict::inconclusive; });
  const double last = r.observable_trace.back();
  if (count >= 2) {
    const double prev = r.observable_trace[count - 2];
    const double ratio = static_cast<double>(levels[count - 1]) / levels[count - 2];
    r.extrapolated_limit = (ratio * last - prev) / (ratio - 1.0);
  }
  if (any_inconclusive) {
    r.trend = Trend::undetermined;
  } else if (last <= tol.inconclusive_floor) {
    r.trend = Trend::decaying_to_zero;
  } else if (r.extrapolated_limit) {
    const double lim = *r.extrapolated_limit;
    const double prev = r.observable_trace[count - 2];
    const double change = std::abs(last - prev) / std::max(std::abs(last), 1e-300);
    if (std::abs(lim) <= 0.25 * last)
      r.trend = Trend::decaying_to_zero;
    else if (lim > 0.0 && change < 0.5)
      r.trend = Trend::stabilizing_positive;
  }
  return r;
}

}  // namespace qdslab
