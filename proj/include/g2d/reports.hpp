#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "g2d/gamma2.hpp"
#include "g2d/matrix.hpp"
#include "g2d/oracles.hpp"

namespace g2d {

struct ReportConfig {
  std::size_t max_tn = 256;
  std::size_t max_ellipsoid_n = 128;
  std::size_t max_ap_n = 128;
  int max_subcube_d = 8;
  // Direct solves of the Tusnady grid need n^d <= this.
  std::size_t max_grid_points = 1024;
  OracleLimits oracles;
  // Wall-clock columns break bit-identical reruns, so they are opt-in.
  bool record_seconds = false;
};

// One line of a report. Columns are named reals; markers are free-form
// flags such as "product-only". `violations` lists constant-free
// inequalities that failed when the row was built.
struct ReportRow {
  std::string label;
  std::vector<NamedValue> columns;
  std::vector<std::string> markers;
  std::vector<std::string> violations;
  std::vector<std::pair<std::string, Gamma2Certificate>> certificates;

  bool has(std::string_view name) const;
  // Throws std::out_of_range when absent.
  double get(std::string_view name) const;
  void set(std::string name, double value);
  bool has_marker(std::string_view marker) const;
};

// 12 significant digits.
std::string format_number(double x);

// Header is the union of column names in first-appearance order, preceded
// by "label" and followed by "markers"; missing cells stay empty.
std::string format_csv(std::span<const ReportRow> rows);

// Per n: floor(log2 n) + 1, solved upper, dual lower and (1/n) ||T_n||_*.
// Rows are solved in parallel on options.threads workers.
std::vector<ReportRow> tn_figure(std::span<const std::size_t> ns, const Gamma2Options& options = {},
                                 const ReportConfig& config = {});

struct EllipsoidDump {
  std::size_t n = 0;
  Gamma2Certificate certificate;
  // max_i |q_i - p_{n-1-i}|
  double symmetry_deviation = 0.0;
};

// Optimal ellipsoid and dual weights for T_n.
EllipsoidDump ellipsoid_dump(std::size_t n, const Gamma2Options& options = {}, const ReportConfig& config = {});
// Writes D.txt, p.txt, q.txt, certificate.txt and summary.txt into dir.
void write_ellipsoid_dump(const std::filesystem::path& dir, const EllipsoidDump& dump);

ReportRow tusnady_report(int d, std::size_t n, const Gamma2Options& options = {}, const ReportConfig& config = {});
ReportRow subcube_report(int d, const Gamma2Options& options = {}, const ReportConfig& config = {});

// One row per n with gamma2(AP_n), n^(1/4) and their ratio.
std::vector<ReportRow> ap_report(std::span<const std::size_t> ns, const Gamma2Options& options = {},
                                 const ReportConfig& config = {});
// One row per size s: gamma2 of the small- and large-difference maximal
// progressions against s^(1/4), with the degree and size bounds behind it.
std::vector<ReportRow> ap_structure_report(std::span<const std::size_t> sizes, const Gamma2Options& options = {});

// Sandwich audit of a single matrix. Column failures are recorded in
// `skipped`, violated constant-free inequalities in `failures`.
BoundsReport audit(const Matrix& a, const Gamma2Options& options = {}, const ReportConfig& config = {});
std::string format_bounds_report(const BoundsReport& report);

}  // namespace g2d
