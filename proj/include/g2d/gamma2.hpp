#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "g2d/ellipsoid.hpp"
#include "g2d/matrix.hpp"

namespace g2d {

enum class PrimalMethod {
  // Alternating diagonal rescaling toward a fixed point of the dual weights.
  kScaling,
  // ADMM on the semidefinite program, certified through its top-left block.
  kAdmm,
  // Bisection on t with Dykstra alternating-projection feasibility probes.
  kDykstraBisection,
};

using Clock = std::chrono::steady_clock;

struct Gamma2Options {
  double tol = 1e-4;  // relative, on the value
  int max_iter = 4000;
  int restarts = 8;
  int dual_iter = 300;  // ascent steps per restart
  double dual_step = 1.0;
  std::uint64_t seed = 1;
  int threads = 1;
  PrimalMethod method = PrimalMethod::kScaling;
  // Dense ellipsoid matrices are built only up to this many rows.
  std::size_t ellipsoid_max_dim = 2048;
  std::optional<Clock::time_point> deadline;
};

// Relative accuracy of the factorization B C = A.
inline constexpr double kFactorizationTolerance = 1e-8;

// ||diag(p)^{1/2} A diag(q)^{1/2}||_*; a lower bound on gamma2(A) whenever
// p and q are probability vectors.
double weighted_nuclear_norm(const Matrix& a, std::span<const double> p, std::span<const double> q);

struct PrimalResult {
  double upper = 0.0;
  std::optional<Ellipsoid> ellipsoid;  // absent above ellipsoid_max_dim rows
  Matrix factor_left;                  // B, m x r
  Matrix factor_right;                 // C, r x n
  // Weights the engine ended on; a starting point for the dual.
  std::vector<double> weights_p, weights_q;
  double weights_lower = 0.0;  // weighted nuclear norm at those weights
  bool converged = false;
  int iterations = 0;
};

// Certified upper bound: B C = A with max row norm of B times max column
// norm of C equal to `upper`.
PrimalResult gamma2_upper(const Matrix& a, const Gamma2Options& options = {});

struct DualResult {
  double lower = 0.0;
  std::vector<double> p, q;
  int best_restart = -1;  // -1 for a supplied seed point
};

// Projected subgradient ascent over pairs of probability vectors. Restart 0
// is the uniform point; the others are Dirichlet(1) samples drawn from
// options.seed. Optional seed weights are ascended first.
DualResult gamma2_lower_dual(const Matrix& a, const Gamma2Options& options = {},
                             std::span<const double> seed_p = {},
                             std::span<const double> seed_q = {});

struct Gamma2Certificate {
  double upper = 0.0;
  double lower = 0.0;
  double gap = 0.0;  // upper - lower
  std::optional<Ellipsoid> ellipsoid;
  Matrix factor_left;
  Matrix factor_right;
  std::vector<double> dual_p, dual_q;
  bool converged = false;  // gap <= tol * upper
  double relative_gap() const { return upper > 0.0 ? gap / upper : 0.0; }
};

Gamma2Certificate gamma2(const Matrix& a, const Gamma2Options& options = {});

// Independent recheck of every certificate claim against the matrix.
struct CertificateCheck {
  bool ok = true;
  std::vector<std::string> failures;
  double factorization_residual = 0.0;  // ||BC - A||_F / ||A||_F
  double norm_product = 0.0;            // max row norm(B) * max col norm(C)
  double max_gauge = 0.0;               // max over columns of sqrt(a^T D^+ a)
  double recomputed_lower = 0.0;        // weighted nuclear norm at (p, q)
};
CertificateCheck validate_certificate(const Matrix& a, const Gamma2Certificate& cert,
                                      double tol = 1e-4);

// Text bundle: upper=/lower=/gap=/converged= lines, then [D], [B], [C], [p],
// [q] sections in the matrix text format (p and q as column vectors).
std::string format_certificate(const Gamma2Certificate& cert);
Gamma2Certificate parse_certificate(const std::string& text);

}  // namespace g2d
