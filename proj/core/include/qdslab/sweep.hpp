#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qdslab/resolvent.hpp"

namespace qdslab {

/// Builds the truncation of a model family at a given level (N for
/// pure-birth chains, M for grid models, dim otherwise).
using ModelFamily = std::function<ModelSpec(int level)>;

enum class Trend { decaying_to_zero, stabilizing_positive, undetermined };

const char* to_string(Trend t);

struct SweepResult {
  double lambda = 0.0;
  std::vector<int> dims;  ///< the family levels
  std::vector<ExplosionCertificate> certificates;
  std::vector<double> observable_trace;  ///< lambda <e_0, E~(I) e_0> per level
  Trend trend = Trend::undetermined;
  std::optional<double> extrapolated_limit;
};

/// Number of worker threads: QDSLAB_THREADS when set and positive,
/// otherwise the hardware concurrency.
int default_thread_count();

/// Runs conservativity_verdict at every level and classifies the trend of
/// the explosion mass. The limit is the two-point Richardson estimate
/// (r v_last - v_prev) / (r - 1), r = N_last / N_prev, which removes a 1/N
/// tail. Levels must be strictly increasing.
SweepResult truncation_sweep(const ModelFamily& family, double lambda,
                             const std::vector<int>& levels,
                             const Tolerances& tol = {}, int threads = 0);

}  // namespace qdslab
