#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <sstream>
#include <stdexcept>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"
#include "g2d/matrix_io.hpp"
#include "internal.hpp"

namespace g2d {

namespace {

// Above this many rows plus columns the ADMM fallback costs more than it buys.
constexpr std::size_t kAdmmFallbackSize = 400;

void check_input(const Matrix& a, const Gamma2Options& options) {
  if (a.empty()) throw std::invalid_argument("gamma2: empty matrix");
  if (!a.all_finite()) throw std::invalid_argument("gamma2: non-finite entries");
  if (!(options.tol > 0.0)) throw std::invalid_argument("gamma2: tol must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("gamma2: max_iter must be >= 1");
}

PrimalResult zero_primal(const Matrix& a) {
  PrimalResult out;
  out.ellipsoid = Ellipsoid(Matrix(a.rows(), a.rows()));
  out.factor_left = Matrix(a.rows(), 1);
  out.factor_right = Matrix(1, a.cols());
  out.weights_p.assign(a.rows(), 1.0 / static_cast<double>(a.rows()));
  out.weights_q.assign(a.cols(), 1.0 / static_cast<double>(a.cols()));
  out.converged = true;
  return out;
}

}  // namespace

PrimalResult gamma2_upper(const Matrix& a, const Gamma2Options& options) {
  check_input(a, options);
  if (max_abs(a) == 0.0) return zero_primal(a);
  switch (options.method) {
    case PrimalMethod::kAdmm:
      return detail::admm_upper(a, options);
    case PrimalMethod::kDykstraBisection:
      return detail::dykstra_upper(a, options);
    case PrimalMethod::kScaling:
      break;
  }
  PrimalResult out = detail::scaling_upper(a, options);
  if (out.converged || a.rows() + a.cols() > kAdmmFallbackSize || detail::past_deadline(options))
    return out;
  PrimalResult admm = detail::admm_upper(a, options);
  if (admm.upper < out.upper) {
    std::swap(out.upper, admm.upper);
    std::swap(out.ellipsoid, admm.ellipsoid);
    std::swap(out.factor_left, admm.factor_left);
    std::swap(out.factor_right, admm.factor_right);
  }
  if (admm.weights_lower > out.weights_lower) {
    out.weights_lower = admm.weights_lower;
    out.weights_p = std::move(admm.weights_p);
    out.weights_q = std::move(admm.weights_q);
  }
  out.iterations += admm.iterations;
  out.converged = out.upper - out.weights_lower <= options.tol * out.upper;
  return out;
}

Gamma2Certificate gamma2(const Matrix& a, const Gamma2Options& options) {
  check_input(a, options);
  PrimalResult primal = gamma2_upper(a, options);
  Gamma2Certificate cert;
  cert.upper = primal.upper;
  cert.lower = primal.weights_lower;
  cert.dual_p = std::move(primal.weights_p);
  cert.dual_q = std::move(primal.weights_q);
  if (cert.upper > 0.0 && cert.upper - cert.lower > options.tol * cert.upper &&
      !detail::past_deadline(options)) {
    DualResult dual = detail::dual_ascent(a, options, cert.dual_p, cert.dual_q, cert.upper);
    if (dual.lower > cert.lower) {
      cert.lower = dual.lower;
      cert.dual_p = std::move(dual.p);
      cert.dual_q = std::move(dual.q);
    }
  }
  cert.ellipsoid = std::move(primal.ellipsoid);
  cert.factor_left = std::move(primal.factor_left);
  cert.factor_right = std::move(primal.factor_right);
  cert.gap = cert.upper - cert.lower;
  cert.converged = cert.gap <= options.tol * cert.upper;
  return cert;
}

CertificateCheck validate_certificate(const Matrix& a, const Gamma2Certificate& cert, double tol) {
  CertificateCheck check;
  auto fail = [&](const std::string& why) {
    check.ok = false;
    check.failures.push_back(why);
  };
  const Matrix& b = cert.factor_left;
  const Matrix& c = cert.factor_right;
  if (b.rows() != a.rows() || c.cols() != a.cols() || b.cols() != c.rows()) {
    fail("factor shapes do not match the matrix");
    return check;
  }
  const double anorm = frobenius_norm(a);
  const double res = frobenius_norm(b * c - a);
  check.factorization_residual = anorm > 0.0 ? res / anorm : res;
  if (check.factorization_residual > kFactorizationTolerance) fail("B*C differs from A");

  double rb = 0.0, cc = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i) rb = std::max(rb, norm2(b.row(i)));
  for (std::size_t j = 0; j < c.cols(); ++j) cc = std::max(cc, norm2(c.column(j)));
  check.norm_product = rb * cc;
  if (check.norm_product > cert.upper * (1.0 + tol) + 1e-14) fail("factor norms exceed upper");

  if (cert.lower > cert.upper * (1.0 + tol) + 1e-14) fail("lower exceeds upper");
  if (std::abs(cert.gap - (cert.upper - cert.lower)) > 1e-9 * std::max(1.0, cert.upper))
    fail("gap is not upper - lower");

  auto is_distribution = [](const std::vector<double>& w, std::size_t size) {
    if (w.size() != size) return false;
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) return false;
      total += x;
    }
    return std::abs(total - 1.0) <= 1e-9;
  };
  if (!is_distribution(cert.dual_p, a.rows()) || !is_distribution(cert.dual_q, a.cols())) {
    fail("dual weights are not probability vectors");
  } else {
    check.recomputed_lower = weighted_nuclear_norm(a, cert.dual_p, cert.dual_q);
    if (cert.lower > check.recomputed_lower * (1.0 + 1e-9) + 1e-12)
      fail("lower is not attained by the dual weights");
  }

  if (cert.ellipsoid) {
    if (cert.ellipsoid->dimension() != a.rows()) {
      fail("ellipsoid dimension mismatch");
    } else {
      if (ellipsoid_inf_norm(*cert.ellipsoid) > cert.upper * (1.0 + tol) + 1e-14)
        fail("ellipsoid l-infinity norm exceeds upper");
      check.max_gauge = std::sqrt(max_column_gauge_squared(*cert.ellipsoid, a));
      if (check.max_gauge > 1.0 + tol) fail("a column lies outside the ellipsoid");
    }
  }
  return check;
}

std::string format_certificate(const Gamma2Certificate& cert) {
  std::ostringstream out;
  out.precision(17);
  out << "upper=" << cert.upper << '\n'
      << "lower=" << cert.lower << '\n'
      << "gap=" << cert.gap << '\n'
      << "converged=" << (cert.converged ? "true" : "false") << '\n';
  if (cert.ellipsoid) {
    out << "[D]\n";
    write_matrix(out, cert.ellipsoid->dual_matrix());
  }
  out << "[B]\n";
  write_matrix(out, cert.factor_left);
  out << "[C]\n";
  write_matrix(out, cert.factor_right);
  out << "[p]\n";
  write_matrix(out, Matrix::column_vector(cert.dual_p));
  out << "[q]\n";
  write_matrix(out, Matrix::column_vector(cert.dual_q));
  return out.str();
}

Gamma2Certificate parse_certificate(const std::string& text) {
  std::istringstream in(text);
  std::string line, section;
  std::map<std::string, std::string> sections;
  std::map<std::string, std::string> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) throw FormatError("certificate: bad section header");
      section = line.substr(1, close - 1);
      sections[section];
      continue;
    }
    if (section.empty()) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) values[line.substr(0, eq)] = line.substr(eq + 1);
      continue;
    }
    sections[section] += line + '\n';
  }
  auto number = [&](const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end()) throw FormatError("certificate: missing " + key + "=");
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw FormatError("certificate: bad value for " + key);
    }
  };
  auto matrix = [&](const std::string& key) {
    const auto it = sections.find(key);
    if (it == sections.end()) throw FormatError("certificate: missing [" + key + "] section");
    return parse_matrix_text(it->second).matrix;
  };
  auto vector = [&](const std::string& key) {
    const Matrix v = matrix(key);
    if (v.cols() != 1) throw FormatError("certificate: [" + key + "] must be a column vector");
    return v.column(0);
  };
  Gamma2Certificate cert;
  cert.upper = number("upper");
  cert.lower = number("lower");
  cert.gap = number("gap");
  cert.converged = values.count("converged") && values["converged"] == "true";
  if (sections.count("D")) cert.ellipsoid = Ellipsoid(matrix("D"));
  cert.factor_left = matrix("B");
  cert.factor_right = matrix("C");
  cert.dual_p = vector("p");
  cert.dual_q = vector("q");
  return cert;
}

}  // namespace g2d
