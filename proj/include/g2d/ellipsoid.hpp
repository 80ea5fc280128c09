#pragma once

#include <span>
#include <vector>

#include "g2d/matrix.hpp"

namespace g2d {

// Eigenvalues below kRankCutoff * lambda_max count as zero in range tests.
inline constexpr double kRankCutoff = 1e-10;

// Centered ellipsoid E(D) = {z : z^T x <= sqrt(x^T D x) for all x}, stored
// through its PSD dual matrix D. For invertible D this is {z : z^T D^-1 z <= 1}.
class Ellipsoid {
 public:
  Ellipsoid() = default;
  // Requires D square and symmetric within 1e-9 relative. Eigenvalues down to
  // -1e-9 ||D||_2 are clipped to zero; anything more negative is rejected.
  explicit Ellipsoid(const Matrix& dual);

  static Ellipsoid unit_ball(std::size_t m);
  // E(scale * B B^T), PSD by construction so no spectral check is run.
  static Ellipsoid from_factor(const Matrix& b, double scale);

  const Matrix& dual_matrix() const { return dual_; }
  std::size_t dimension() const { return dual_.rows(); }

 private:
  Matrix dual_;
};

// max_i sqrt(d_ii): the largest coordinate any point of E(D) reaches.
double ellipsoid_inf_norm(const Ellipsoid& e);

// v^T D^+ v with eigenvalues below the rank cutoff raised to the cutoff;
// a vector leaving range(D) gets a gauge of order 1 / cutoff.
double ellipsoid_gauge_squared(const Ellipsoid& e, std::span<const double> v);
bool ellipsoid_contains(const Ellipsoid& e, std::span<const double> v, double tol);

// Largest gauge^2 over the columns of a, from one eigendecomposition of D.
double max_column_gauge_squared(const Ellipsoid& e, const Matrix& a);

// E(D1 + D2), which contains both inputs.
Ellipsoid ellipsoid_sum(const Ellipsoid& e1, const Ellipsoid& e2);
// E(diag(D1, D2)); dimension 0 parts are allowed.
Ellipsoid block_diag_ellipsoid(const Ellipsoid& e1, const Ellipsoid& e2);

}  // namespace g2d
