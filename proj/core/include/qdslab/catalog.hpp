#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdslab/deficiency.hpp"
#include "qdslab/model.hpp"
#include "qdslab/sweep.hpp"
#include "qdslab/tau_f.hpp"

namespace qdslab {

/// Birth rates q_0, q_1, ... of a pure-birth chain.
class RateSequence {
 public:
  enum class Kind { linear, quadratic, power, constant, list };

  static RateSequence linear();               ///< q_n = n + 1
  static RateSequence quadratic();            ///< q_n = (n + 1)^2
  static RateSequence power(double p);        ///< q_n = (n + 1)^p
  static RateSequence constant(double c);     ///< q_n = c
  static RateSequence list(std::vector<double> q);

  double operator()(int n) const;
  Kind kind() const noexcept { return kind_; }
  /// "linear", "quadratic", "power:p", "constant:c", "list:q0;q1;..."
  std::string describe() const;
  static RateSequence parse(const std::string& text);

 private:
  RateSequence(Kind k, double p, std::vector<double> v)
      : kind_(k), param_(p), values_(std::move(v)) {}
  Kind kind_;
  double param_;
  std::vector<double> values_;
};

/// dim = N + 1, G = diag(q)/2, L e_n = sqrt(q_n) e_{n+1} with L e_N = 0,
/// D = span{e_0, ..., e_{N-1}}. Rejects nonpositive rates.
ModelSpec build_pure_birth(const RateSequence& q, int N);

/// G = (1/2) sum L_k* L_k - iH with D the full space.
ModelSpec build_lindblad(const Matrix& h, std::vector<Matrix> kraus, std::string name);

/// Seeded random Hermitian H and `channels` random jump operators.
/// channels = 0 gives a unitary model.
ModelSpec build_bounded_lindblad(int dim, std::uint64_t seed, int channels = 2);
ModelSpec build_unitary(int dim, std::uint64_t seed);

/// Multiplication operator l(s) for the noisy transport model.
struct NoiseFunction {
  std::string name;
  std::function<double(double)> ell;
  static NoiseFunction inverse();  ///< l(s) = 1 / (1 + s)
  static NoiseFunction parse(const std::string& name);
};

/// Dual cell widths of the grid (half cells at both ends).
RealVector grid_weights(const std::vector<double>& grid);

/// K = F^{1/2} M^{-1/2} S M^{-1/2} F^{1/2} with S the centered skew
/// difference matrix; K approximates f d/dx + f'/2 in weighted coordinates
/// w = sqrt(mu) u, and -iK approximates tau_f.
RealMatrix tau_f_skew_operator(const TauFModel& model);

/// Forward: -G = K - (f_0 / 2 mu_0) e_0 e_0^T (outflow at x = 0), D the
/// interior nodes 1..M-1. Adjoint: -G = -K, D the full space. Noise adds
/// (1/2) diag|l(x_j)|^2 to G and the Kraus operator diag(l(x_j)).
ModelSpec build_tau_f_transport(const TauFModel& model, Orientation orientation,
                                const std::optional<NoiseFunction>& noise = std::nullopt);

/// V e_n = e_{n+m}. Requires m >= 1 and dim > 2m.
IsometrySpec build_shift_isometry(int m, int dim);

enum class CatalogKind {
  pure_birth,
  tau_f_transport,
  tau_f_adjoint,
  tau_f_with_noise,
  bounded_lindblad,
  shift_isometry
};

const char* to_string(CatalogKind k);

/// A catalog reference "kind:key=value,key=value". Kinds: pure-birth,
/// tau-f, tau-f-adjoint, tau-f-noise, bounded-lindblad, unitary, shift.
class CatalogEntry {
 public:
  static CatalogEntry parse(const std::string& ref);

  CatalogKind kind() const noexcept { return kind_; }
  /// Canonical reference that parses back to the same entry.
  std::string ref() const;
  bool is_model() const noexcept { return kind_ != CatalogKind::shift_isometry; }

  std::optional<std::string> param(const std::string& key) const;
  void set_param(const std::string& key, const std::string& value);

  /// N for pure-birth, grid intervals M for transport, dim otherwise.
  int default_level() const;
  void set_level(int level);

  ModelSpec build(int level) const;
  ModelSpec build() const { return build(default_level()); }
  ModelFamily family() const;

  TauFModel tau_f_model(int level) const;
  TauFModel tau_f_model() const { return tau_f_model(default_level()); }
  Orientation orientation() const;
  IsometrySpec isometry() const;

 private:
  CatalogKind kind_ = CatalogKind::pure_birth;
  std::map<std::string, std::string> params_;
};

struct ParamSchema {
  std::string name;
  std::string type;
  std::string default_value;
  std::string description;
};

struct CatalogSchema {
  std::string prefix;
  CatalogKind kind;
  std::string description;
  std::vector<ParamSchema> params;
};

std::vector<CatalogSchema> list_catalog();

}  // namespace qdslab
