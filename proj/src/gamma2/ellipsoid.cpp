#include "g2d/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "g2d/linalg.hpp"

namespace g2d {

namespace {

struct RangeBasis {
  SymmetricEigen eig;
  double cutoff = 0.0;
};

RangeBasis decompose(const Matrix& d) {
  RangeBasis r;
  r.eig = symmetric_eigen(d);
  const double top = r.eig.values.empty() ? 0.0 : std::max(0.0, r.eig.values.back());
  r.cutoff = kRankCutoff * top;
  return r;
}

double gauge_squared(const RangeBasis& r, std::span<const double> v) {
  const std::size_t m = v.size();
  if (norm2(v) == 0.0) return 0.0;
  if (r.cutoff == 0.0) return std::numeric_limits<double>::infinity();
  // Eigenvalues under the cutoff are read as the cutoff itself, so a vector
  // leaving range(D) by more than rounding noise gets a huge gauge.
  double gauge = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += r.eig.vectors(i, k) * v[i];
    gauge += c * c / std::max(r.eig.values[k], r.cutoff);
  }
  return gauge;
}

}  // namespace

Ellipsoid::Ellipsoid(const Matrix& dual) {
  if (!dual.is_square()) throw std::invalid_argument("Ellipsoid: dual matrix must be square");
  if (!dual.all_finite()) throw std::invalid_argument("Ellipsoid: non-finite entries");
  if (dual.rows() == 0) return;
  if (asymmetry(dual) > 1e-9) throw std::invalid_argument("Ellipsoid: dual matrix not symmetric");
  const Matrix s = symmetrized(dual);
  const SymmetricEigen e = symmetric_eigen(s);
  const double spectral = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
  if (e.values.front() < -1e-9 * spectral)
    throw std::invalid_argument("Ellipsoid: dual matrix not positive semidefinite");
  if (e.values.front() >= 0.0) {
    dual_ = s;
    return;
  }
  dual_ = psd_project(s);
}

Ellipsoid Ellipsoid::unit_ball(std::size_t m) { return Ellipsoid(Matrix::identity(m)); }

Ellipsoid Ellipsoid::from_factor(const Matrix& b, double scale) {
  if (!(scale >= 0.0) || !b.all_finite()) throw std::invalid_argument("Ellipsoid: bad factor");
  Ellipsoid e;
  e.dual_ = b * b.transposed();
  e.dual_ *= scale;
  e.dual_ = symmetrized(e.dual_);
  return e;
}

double ellipsoid_inf_norm(const Ellipsoid& e) {
  double best = 0.0;
  for (double d : e.dual_matrix().diagonal_entries()) best = std::max(best, d);
  return std::sqrt(best);
}

double ellipsoid_gauge_squared(const Ellipsoid& e, std::span<const double> v) {
  if (v.size() != e.dimension()) throw std::invalid_argument("ellipsoid: dimension mismatch");
  if (norm2(v) == 0.0) return 0.0;
  return gauge_squared(decompose(e.dual_matrix()), v);
}

bool ellipsoid_contains(const Ellipsoid& e, std::span<const double> v, double tol) {
  return ellipsoid_gauge_squared(e, v) <= 1.0 + tol;
}

double max_column_gauge_squared(const Ellipsoid& e, const Matrix& a) {
  if (a.rows() != e.dimension()) throw std::invalid_argument("ellipsoid: dimension mismatch");
  if (a.cols() == 0) return 0.0;
  const RangeBasis r = decompose(e.dual_matrix());
  double worst = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const std::vector<double> col = a.column(j);
    worst = std::max(worst, gauge_squared(r, col));
  }
  return worst;
}

Ellipsoid ellipsoid_sum(const Ellipsoid& e1, const Ellipsoid& e2) {
  if (e1.dimension() != e2.dimension()) throw std::invalid_argument("ellipsoid_sum: dimension mismatch");
  return Ellipsoid(e1.dual_matrix() + e2.dual_matrix());
}

Ellipsoid block_diag_ellipsoid(const Ellipsoid& e1, const Ellipsoid& e2) {
  if (e1.dimension() == 0) return e2;
  if (e2.dimension() == 0) return e1;
  return Ellipsoid(block_diagonal(e1.dual_matrix(), e2.dual_matrix()));
}

}  // namespace g2d
