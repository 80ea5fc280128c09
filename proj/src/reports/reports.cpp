#include "g2d/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"
#include "g2d/matrix_io.hpp"
#include "g2d/parallel.hpp"
#include "g2d/set_system.hpp"
#include "g2d/spectra.hpp"

namespace g2d {

namespace {

using Seconds = std::chrono::duration<double>;

class Stopwatch {
 public:
  double seconds() const { return Seconds(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void record_seconds(ReportRow& row, const Stopwatch& watch, const ReportConfig& config) {
  if (config.record_seconds) row.set("seconds", watch.seconds());
}

void cap(bool ok, const std::string& what) {
  if (!ok) throw CapExceeded(what);
}

std::vector<double> uniform(std::size_t k) { return std::vector<double>(k, 1.0 / static_cast<double>(k)); }

// a <= b within a relative slack; records a violation otherwise.
void expect_le(ReportRow& row, const char* lhs, double a, const char* rhs, double b, double slack) {
  if (a <= b + slack * std::max(1.0, std::abs(b))) return;
  row.violations.push_back(std::string(lhs) + " = " + format_number(a) + " exceeds " + rhs + " = " + format_number(b));
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

// Quotes a CSV cell when it needs it.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void add_interval(ReportRow& row, const std::string& prefix, const Gamma2Certificate& c) {
  row.set(prefix + "lower", c.lower);
  row.set(prefix + "upper", c.upper);
  if (!c.converged) row.markers.push_back(prefix + "not-converged");
}

double log2_floor_one(double x) { return std::max(1.0, std::log2(x)); }

ReportRow tn_row(std::size_t n, const Gamma2Options& options, const ReportConfig& config) {
  const Stopwatch watch;
  const Matrix t = lower_triangular_ones(n);
  const Gamma2Certificate c = gamma2(t, options);
  double nuclear = 0.0;
  for (double s : tn_singular_values_closed_form(n)) nuclear += s;
  ReportRow row;
  row.label = "T_" + std::to_string(n);
  row.set("n", static_cast<double>(n));
  const double log_bound = std::floor(std::log2(static_cast<double>(n))) + 1.0;
  row.set("log2_bound", log_bound);
  row.set("gamma2_upper", c.upper);
  row.set("gamma2_lower", c.lower);
  row.set("nuclear_uniform", nuclear / static_cast<double>(n));
  row.set("relative_gap", c.relative_gap());
  row.set("converged", c.converged ? 1.0 : 0.0);
  if (!c.converged) row.markers.push_back("not-converged");
  expect_le(row, "nuclear_uniform", nuclear / static_cast<double>(n), "gamma2_lower", c.lower, 1e-9);
  expect_le(row, "gamma2_lower", c.lower, "gamma2_upper", c.upper, options.tol);
  expect_le(row, "gamma2_upper", c.upper, "log2_bound", log_bound, 0.0);
  row.certificates.emplace_back(row.label, c);
  record_seconds(row, watch, config);
  return row;
}

}  // namespace

bool ReportRow::has(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const NamedValue& v) { return v.name == name; });
}

double ReportRow::get(std::string_view name) const {
  for (const NamedValue& v : columns)
    if (v.name == name) return v.value;
  throw std::out_of_range("report row " + label + " has no column " + std::string(name));
}

void ReportRow::set(std::string name, double value) {
  for (NamedValue& v : columns)
    if (v.name == name) {
      v.value = value;
      return;
    }
  columns.push_back({std::move(name), value});
}

bool ReportRow::has_marker(std::string_view marker) const {
  return std::find(markers.begin(), markers.end(), marker) != markers.end();
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_csv(std::span<const ReportRow> rows) {
  std::vector<std::string> names;
  for (const ReportRow& r : rows)
    for (const NamedValue& v : r.columns)
      if (std::find(names.begin(), names.end(), v.name) == names.end()) names.push_back(v.name);
  std::ostringstream out;
  out << "label";
  for (const auto& n : names) out << ',' << n;
  out << ",markers\n";
  for (const ReportRow& r : rows) {
    out << csv_cell(r.label);
    for (const auto& n : names) {
      out << ',';
      if (r.has(n)) out << format_number(r.get(n));
    }
    out << ',' << csv_cell(join(r.markers, ';')) << '\n';
  }
  return out.str();
}

std::vector<ReportRow> tn_figure(std::span<const std::size_t> ns, const Gamma2Options& options,
                                 const ReportConfig& config) {
  for (std::size_t n : ns) {
    if (n == 0) throw std::invalid_argument("tn_figure: n must be positive");
    cap(n <= config.max_tn, "tn_figure: n = " + std::to_string(n) + " exceeds the cap of " + std::to_string(config.max_tn));
  }
  std::vector<ReportRow> rows(ns.size());
  Gamma2Options inner = options;
  inner.threads = 1;
  parallel_for(ns.size(), options.threads, [&](std::size_t k) { rows[k] = tn_row(ns[k], inner, config); });
  return rows;
}

EllipsoidDump ellipsoid_dump(std::size_t n, const Gamma2Options& options, const ReportConfig& config) {
  if (n == 0) throw std::invalid_argument("ellipsoid_dump: n must be positive");
  cap(n <= config.max_ellipsoid_n, "ellipsoid_dump: n = " + std::to_string(n) + " exceeds the cap of " +
                                       std::to_string(config.max_ellipsoid_n));
  EllipsoidDump out;
  out.n = n;
  out.certificate = gamma2(lower_triangular_ones(n), options);
  for (std::size_t i = 0; i < n; ++i)
    out.symmetry_deviation =
        std::max(out.symmetry_deviation, std::abs(out.certificate.dual_q[i] - out.certificate.dual_p[n - 1 - i]));
  return out;
}

void write_ellipsoid_dump(const std::filesystem::path& dir, const EllipsoidDump& dump) {
  std::filesystem::create_directories(dir);
  const Gamma2Certificate& c = dump.certificate;
  if (c.ellipsoid) write_matrix_file(dir / "D.txt", c.ellipsoid->dual_matrix());
  write_matrix_file(dir / "p.txt", Matrix::column_vector(c.dual_p));
  write_matrix_file(dir / "q.txt", Matrix::column_vector(c.dual_q));
  {
    std::ofstream cert(dir / "certificate.txt");
    cert << format_certificate(c);
    if (!cert) throw std::runtime_error("cannot write " + (dir / "certificate.txt").string());
  }
  std::ofstream summary(dir / "summary.txt");
  summary << "n=" << dump.n << "\n"
          << "gamma2_upper=" << format_number(c.upper) << "\n"
          << "gamma2_lower=" << format_number(c.lower) << "\n"
          << "relative_gap=" << format_number(c.relative_gap()) << "\n"
          << "max_diagonal=" << format_number(c.ellipsoid ? c.upper * c.upper : 0.0) << "\n"
          << "symmetry_deviation=" << format_number(dump.symmetry_deviation) << "\n";
  if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.txt").string());
}

ReportRow tusnady_report(int d, std::size_t n, const Gamma2Options& options, const ReportConfig& config) {
  if (d < 1 || n == 0) throw std::invalid_argument("tusnady_report: need d >= 1 and n >= 1");
  cap(n <= config.max_tn, "tusnady_report: n exceeds the cap of " + std::to_string(config.max_tn));
  const Stopwatch watch;
  ReportRow row;
  row.label = "G_" + std::to_string(d) + "_" + std::to_string(n);
  row.set("d", d);
  row.set("n", static_cast<double>(n));
  const Gamma2Certificate tn = gamma2(lower_triangular_ones(n), options);
  add_interval(row, "tn_", tn);
  const double product_lower = std::pow(tn.lower, d), product_upper = std::pow(tn.upper, d);
  row.set("product_lower", product_lower);
  row.set("product_upper", product_upper);
  row.certificates.emplace_back("T_" + std::to_string(n), tn);

  double points = 1.0;
  for (int k = 0; k < d; ++k) points *= static_cast<double>(n);
  const double sets = points;
  if (points <= static_cast<double>(config.max_grid_points)) {
    const Matrix g = grid_anchored(d, n).incidence();
    const Gamma2Certificate direct = gamma2(g, options);
    add_interval(row, "direct_", direct);
    row.set("direct_over_product", direct.upper / product_upper);
    // Kronecker multiplicativity is constant-free: the two intervals meet.
    const double slack = options.tol * (d + 1);
    expect_le(row, "direct_lower", direct.lower, "product_upper", product_upper, slack);
    expect_le(row, "product_lower", product_lower, "direct_upper", direct.upper, slack);
    row.certificates.emplace_back(row.label, direct);
    if (static_cast<std::size_t>(points) <= config.oracles.max_herdisc_cols) {
      const double h = herdisc_exact(g, 1, config.oracles);
      row.set("herdisc", h);
      row.set("herdisc_over_product", h / product_upper);
    } else {
      row.markers.push_back("herdisc-oracle-skipped");
      row.markers.push_back("product-only");
    }
  } else {
    row.markers.push_back("direct-solve-skipped");
    row.markers.push_back("product-only");
  }
  row.set("herdisc_lower_shape", product_upper / log2_floor_one(sets));
  row.set("herdisc_upper_shape", product_upper * std::sqrt(log2_floor_one(sets)));
  record_seconds(row, watch, config);
  return row;
}

ReportRow subcube_report(int d, const Gamma2Options& options, const ReportConfig& config) {
  if (d < 1) throw std::invalid_argument("subcube_report: need d >= 1");
  cap(d <= config.max_subcube_d, "subcube_report: d = " + std::to_string(d) + " exceeds the cap of " +
                                     std::to_string(config.max_subcube_d));
  const Stopwatch watch;
  ReportRow row;
  row.label = "C_" + std::to_string(d);
  row.set("d", d);
  const double base = 2.0 / std::sqrt(3.0);
  const double product = std::pow(base, d);
  row.set("product_value", product);
  const Gamma2Certificate c = gamma2(subcubes(d).incidence(), options);
  add_interval(row, "direct_", c);
  row.set("direct_over_product", c.upper / product);
  row.set("c0_estimate", std::log2(c.upper) / d);
  row.set("c0", std::log2(base));
  const double slack = options.tol * (d + 1);
  expect_le(row, "direct_lower", c.lower, "product_value", product, slack);
  expect_le(row, "product_value", product, "direct_upper", c.upper, slack);
  row.certificates.emplace_back(row.label, c);
  record_seconds(row, watch, config);
  return row;
}

std::vector<ReportRow> ap_report(std::span<const std::size_t> ns, const Gamma2Options& options,
                                 const ReportConfig& config) {
  for (std::size_t n : ns) {
    if (n == 0) throw std::invalid_argument("ap_report: n must be positive");
    cap(n <= config.max_ap_n, "ap_report: n = " + std::to_string(n) + " exceeds the cap of " +
                                  std::to_string(config.max_ap_n));
  }
  std::vector<ReportRow> rows(ns.size());
  Gamma2Options inner = options;
  inner.threads = 1;
  parallel_for(ns.size(), options.threads, [&](std::size_t k) {
    const Stopwatch watch;
    const std::size_t n = ns[k];
    SetSystemLimits limits;
    limits.max_ap_ground = config.max_ap_n;
    const SetSystem ap = arithmetic_progressions(n, limits);
    const Gamma2Certificate c = gamma2(ap.incidence(), inner);
    ReportRow& row = rows[k];
    row.label = "AP_" + std::to_string(n);
    row.set("n", static_cast<double>(n));
    row.set("sets", static_cast<double>(ap.set_count()));
    add_interval(row, "gamma2_", c);
    const double quarter = std::pow(static_cast<double>(n), 0.25);
    row.set("n_quarter", quarter);
    row.set("ratio", c.upper / quarter);
    expect_le(row, "gamma2_lower", c.lower, "gamma2_upper", c.upper, options.tol);
    row.certificates.emplace_back(row.label, c);
    record_seconds(row, watch, config);
  });
  return rows;
}

std::vector<ReportRow> ap_structure_report(std::span<const std::size_t> sizes, const Gamma2Options& options) {
  std::vector<ReportRow> rows;
  for (std::size_t size : sizes) {
    const MaximalAps aps = maximal_aps(size);
    ReportRow row;
    row.label = "M_" + std::to_string(size);
    row.set("size", static_cast<double>(size));
    const double bound = std::pow(static_cast<double>(size), 0.25);
    row.set("bound", bound);
    // Degree bound for the small differences, size bound for the large.
    const Matrix& small = aps.small.incidence();
    const Matrix& large = aps.large.incidence();
    double degree = 0.0, longest = 0.0;
    for (std::size_t j = 0; j < small.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < small.rows(); ++i) s += small(i, j);
      degree = std::max(degree, s);
    }
    for (std::size_t i = 0; i < large.rows(); ++i) {
      double s = 0.0;
      for (double x : large.row(i)) s += x;
      longest = std::max(longest, s);
    }
    row.set("small_max_degree", degree);
    row.set("large_max_size", longest);
    const Gamma2Certificate cs = gamma2(small, options), cl = gamma2(large, options);
    add_interval(row, "small_", cs);
    add_interval(row, "large_", cl);
    expect_le(row, "small_max_degree", degree, "sqrt(size)", std::sqrt(static_cast<double>(size)), 0.0);
    expect_le(row, "large_max_size", longest, "sqrt(size)", std::sqrt(static_cast<double>(size)), 0.0);
    expect_le(row, "small_lower", cs.lower, "bound", bound, options.tol);
    expect_le(row, "large_lower", cl.lower, "bound", bound, options.tol);
    row.certificates.emplace_back(row.label + "_small", cs);
    row.certificates.emplace_back(row.label + "_large", cl);
    rows.push_back(std::move(row));
  }
  return rows;
}

BoundsReport audit(const Matrix& a, const Gamma2Options& options, const ReportConfig& config) {
  if (a.empty()) throw std::invalid_argument("audit: empty matrix");
  BoundsReport r;
  const std::size_t m = a.rows(), n = a.cols();
  const double slack = options.tol;
  auto column = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      r.skipped.push_back(std::string(name) + ": " + e.what());
    }
  };
  auto fail_unless = [&](bool ok, const std::string& what) {
    if (!ok) r.failures.push_back(what);
  };

  std::optional<Gamma2Certificate> cert;
  column("gamma2", [&] {
    cert = gamma2(a, options);
    r.gamma2_interval = {cert->lower, cert->upper};
  });
  const double upper = r.gamma2_interval.second, lower = r.gamma2_interval.first;
  column("nuclear_uniform", [&] { r.nuclear_uniform = weighted_nuclear_norm(a, uniform(m), uniform(n)); });

  column("detlb", [&] {
    const std::size_t full = std::min(m, n);
    std::size_t k = full;
    while (k > 0 && detlb_work(m, n, k) > config.oracles.subset_budget) --k;
    r.detlb = k > 0 ? detlb_exact(a, k, options.threads, config.oracles) : 0.0;
    r.detlb_is_exact = k == full;
    if (!r.detlb_is_exact) {
      r.skipped.push_back("detlb: exact search limited to k <= " + std::to_string(k));
      if (cert && max_abs(a) > 0.0) r.detlb = std::max(r.detlb, detlb_bucketing(a, cert->dual_p, cert->dual_q).value);
    }
  });
  column("detlb2", [&] {
    std::size_t k = n;
    while (k > 0 && detlb2_work(n, k) > config.oracles.subset_budget) --k;
    if (k == 0) throw CapExceeded("no subset size fits the budget");
    r.detlb2 = detlb2_exact(a, k, options.threads, config.oracles);
    if (k < n) r.skipped.push_back("detlb2: limited to |J| <= " + std::to_string(k));
  });
  column("disc", [&] { r.disc_exact = disc_exact(a, options.threads, config.oracles).value; });
  column("herdisc", [&] { r.herdisc_exact = herdisc_exact(a, options.threads, config.oracles); });

  // Constant-free inequalities.
  if (cert) {
    fail_unless(lower <= upper * (1 + slack), "dual lower exceeds primal upper");
    fail_unless(r.detlb <= upper * (1 + slack) + 1e-12, "detlb exceeds gamma2");
    fail_unless(r.nuclear_uniform <= upper * (1 + slack) + 1e-12, "uniform nuclear bound exceeds gamma2");
    const CertificateCheck check = validate_certificate(a, *cert, options.tol);
    for (const auto& f : check.failures) r.failures.push_back("certificate: " + f);
  }
  if (r.herdisc_exact) {
    fail_unless(r.detlb <= 2 * *r.herdisc_exact + 1e-12, "detlb exceeds 2 herdisc");
    if (r.disc_exact) fail_unless(*r.disc_exact <= *r.herdisc_exact, "disc exceeds herdisc");
  }
  // Monotonicity spot-check on the matrix without its last row and column.
  if (cert && m > 1 && n > 1 && m + n <= 400) {
    column("monotonicity", [&] {
      std::vector<std::size_t> rows(m - 1), cols(n - 1);
      for (std::size_t i = 0; i + 1 < m; ++i) rows[i] = i;
      for (std::size_t j = 0; j + 1 < n; ++j) cols[j] = j;
      const Gamma2Certificate sub = gamma2(submatrix(a, rows, cols), options);
      fail_unless(sub.lower <= upper * (1 + slack) + 1e-12, "submatrix gamma2 exceeds gamma2");
    });
  }

  auto ratio = [&](const char* name, double num, double den) {
    if (den > 0.0) r.ratios.push_back({name, num / den});
  };
  if (r.herdisc_exact) {
    ratio("herdisc_over_gamma2", *r.herdisc_exact, upper);
    ratio("detlb_over_herdisc", r.detlb, *r.herdisc_exact);
  }
  if (r.disc_exact) ratio("disc_over_gamma2", *r.disc_exact, upper);
  ratio("gamma2_over_detlb", upper, r.detlb);
  ratio("gamma2_over_detlb_log2m", upper, r.detlb * log2_floor_one(static_cast<double>(m)));
  ratio("nuclear_uniform_over_gamma2", r.nuclear_uniform, upper);
  if (r.detlb2) ratio("detlb2_over_gamma2", *r.detlb2, upper);
  return r;
}

std::string format_bounds_report(const BoundsReport& r) {
  std::ostringstream out;
  out << "gamma2_lower=" << format_number(r.gamma2_interval.first) << "\n";
  out << "gamma2_upper=" << format_number(r.gamma2_interval.second) << "\n";
  out << "detlb=" << format_number(r.detlb) << "\n";
  out << "detlb_exact=" << (r.detlb_is_exact ? 1 : 0) << "\n";
  if (r.detlb2) out << "detlb2=" << format_number(*r.detlb2) << "\n";
  out << "nuclear_uniform=" << format_number(r.nuclear_uniform) << "\n";
  if (r.disc_exact) out << "disc=" << format_number(*r.disc_exact) << "\n";
  if (r.herdisc_exact) out << "herdisc=" << format_number(*r.herdisc_exact) << "\n";
  for (const NamedValue& v : r.ratios) out << v.name << "=" << format_number(v.value) << "\n";
  for (const auto& s : r.skipped) out << "skipped=" << s << "\n";
  for (const auto& f : r.failures) out << "failure=" << f << "\n";
  out << "status=" << (r.failures.empty() ? "ok" : "failed") << "\n";
  return out.str();
}

}  // namespace g2d
