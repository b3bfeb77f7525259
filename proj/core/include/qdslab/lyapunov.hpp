#pragma once

#include "qdslab/types.hpp"

namespace qdslab {

/// Solves lambda Y + G* Y + Y G = C for fixed G and lambda by the
/// Bartels-Stewart method on a complex Schur form G = U T U*. The
/// factorization is done once; each solve costs O(n^3).
class ShiftedLyapunovSolver {
 public:
  ShiftedLyapunovSolver(const Matrix& g, double lambda);

  Matrix solve(const Matrix& c) const;

  double lambda() const noexcept { return lambda_; }
  int dim() const noexcept { return static_cast<int>(t_.rows()); }

 private:
  double lambda_;
  Matrix t_;
  Matrix u_;
  bool diagonal_ = false;
  bool identity_u_ = false;
};

}  // namespace qdslab
