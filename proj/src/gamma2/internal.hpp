#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "g2d/gamma2.hpp"

namespace g2d::detail {

// Spectral data of A~ = diag(p)^{1/2} A diag(q)^{1/2}:
//   row_ratio[i] = ((A~ A~^T)^{1/2})_ii / p_i
//   col_ratio[j] = ((A~^T A~)^{1/2})_jj / q_j
// These are the squared row norms of B and column norms of C in the split
// B = P^{-1/2} U S^{1/2}, C = S^{1/2} V^T Q^{-1/2}, and twice the partial
// derivatives of the nuclear norm in p and q.
struct WeightedSpectrum {
  double nuclear = 0.0;
  std::vector<double> row_ratio;
  std::vector<double> col_ratio;
};

// Evaluates weighted spectra through the Gram matrix of the smaller side,
// with the matrix held as sparse rows. Fast but only accurate to about
// sqrt(machine epsilon) in the small singular values; final numbers are
// recomputed with the Jacobi SVD.
class WeightedEvaluator {
 public:
  explicit WeightedEvaluator(const Matrix& a);
  WeightedSpectrum operator()(std::span<const double> p, std::span<const double> q) const;

 private:
  struct SparseRows {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> start;
    std::vector<std::uint32_t> index;
    std::vector<double> value;
  };
  WeightedSpectrum tall(std::span<const double> p, std::span<const double> q) const;

  SparseRows rows_;
  bool transposed_ = false;
};

struct Factorization {
  Matrix b, c;
  double upper = 0.0;
};

// Rescales B and C so both maxima equal sqrt(upper); sets upper.
void balance(Factorization& f);

// B C = A from the SVD of the weighted matrix; needs p, q > 0. Any residual
// left by rank truncation is absorbed by extra factor columns so the result
// stays exact to rounding.
Factorization factor_at_weights(const Matrix& a, std::span<const double> p,
                                std::span<const double> q);

// B = D'^{1/2}, C = D'^{-1/2} A where D' is D with eigenvalues clipped at 0
// and lifted by 1e-12 ||D||_2.
Factorization factor_from_dual(const Matrix& a, const Matrix& d);

// From an approximate completion X (PSD, (m+n) square, top-right block near
// A): X + [[d I, E], [E^T, d I]] with E = A - X_12 and d = ||E||_2 is PSD with
// top-right block exactly A. Splitting it as G G^T gives B = G_top and
// C = G_bottom^T, whose row and column norms are the diagonal of X + d.
Factorization factor_from_completion(const Matrix& a, const Matrix& x);

// E(upper * B B^T); contains the columns of A = B C once balanced.
Ellipsoid ellipsoid_from_factor(const Matrix& b, double upper);

// Fills the result fields shared by every primal engine.
PrimalResult finish_primal(const Matrix& a, Factorization f, const Gamma2Options& options);

std::vector<double> project_simplex(std::span<const double> v);

bool past_deadline(const Gamma2Options& options);

PrimalResult scaling_upper(const Matrix& a, const Gamma2Options& options,
                           std::span<const double> p0 = {}, std::span<const double> q0 = {});
PrimalResult admm_upper(const Matrix& a, const Gamma2Options& options);
PrimalResult dykstra_upper(const Matrix& a, const Gamma2Options& options);

// Restarted ascent; stops starting new restarts once the value reaches
// within tol of stop_upper.
DualResult dual_ascent(const Matrix& a, const Gamma2Options& options, std::span<const double> seed_p,
                       std::span<const double> seed_q, double stop_upper);

// Trivial factorizations A = A I and A = I A: min of max row norm and max
// column norm.
double trivial_upper(const Matrix& a);

}  // namespace g2d::detail
