#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "g2d/error.hpp"
#include "g2d/linalg.hpp"
#include "g2d/matrix_io.hpp"
#include "g2d/reports.hpp"
#include "g2d/set_system.hpp"
#include "g2d/spectra.hpp"
#include "test_support.hpp"

namespace g2d {
namespace {

using testing::random_binary;

// gamma2(AP_n) / n^(1/4) from the reference run at the default settings.
const std::vector<std::pair<std::size_t, double>> kApRatioBaseline{
    {8, 1.02730162}, {16, 1.04110610}, {32, 1.05113722}};

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("g2d_reports_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

void expect_certificates_valid(const ReportRow& row, const Matrix& a) {
  ASSERT_FALSE(row.certificates.empty());
  const CertificateCheck check = validate_certificate(a, row.certificates.back().second);
  for (const auto& f : check.failures) ADD_FAILURE() << row.label << ": " << f;
}

TEST(FormatTest, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(std::numbers::pi), "3.14159265359");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(INFINITY), "inf");
}

TEST(FormatTest, CsvUnionOfColumns) {
  ReportRow a, b;
  a.label = "x";
  a.set("u", 1.0);
  a.set("v", 2.0);
  b.label = "y,z";
  b.set("v", 3.0);
  b.set("w", 0.5);
  b.markers = {"m1", "m2"};
  const std::vector<ReportRow> rows{a, b};
  EXPECT_EQ(format_csv(rows), "label,u,v,w,markers\nx,1,2,,\n\"y,z\",,3,0.5,m1;m2\n");
  EXPECT_THROW(a.get("w"), std::out_of_range);
  a.set("u", 5.0);
  EXPECT_EQ(a.get("u"), 5.0);
}

TEST(TnFigureTest, SmallestRow) {
  const std::vector<std::size_t> ns{2};
  const ReportRow row = tn_figure(ns).front();
  const double closed = 0.5 * (1 / (2 * std::sin(std::numbers::pi / 10)) + 1 / (2 * std::sin(3 * std::numbers::pi / 10)));
  EXPECT_NEAR(row.get("nuclear_uniform"), closed, 1e-12);
  EXPECT_EQ(row.get("log2_bound"), 2.0);
  EXPECT_NEAR(row.get("gamma2_upper"), 2 / std::sqrt(3.0), 1e-4);
  EXPECT_FALSE(row.has("seconds"));
}

TEST(TnFigureTest, CurveOrderingAndCertificates) {
  const std::vector<std::size_t> ns{2, 4, 8, 16, 32, 64};
  const std::vector<ReportRow> rows = tn_figure(ns);
  ASSERT_EQ(rows.size(), ns.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ReportRow& r = rows[k];
    EXPECT_TRUE(r.violations.empty()) << r.label;
    EXPECT_LE(r.get("nuclear_uniform"), r.get("gamma2_lower") + 1e-12);
    EXPECT_LE(r.get("gamma2_lower"), r.get("gamma2_upper"));
    EXPECT_LE(r.get("gamma2_upper"), r.get("log2_bound"));
    EXPECT_LE(r.get("relative_gap"), 0.02);
    expect_certificates_valid(r, lower_triangular_ones(ns[k]));
  }
}

TEST(TnFigureTest, RerunIsBitIdentical) {
  const std::vector<std::size_t> ns{4, 16, 24};
  EXPECT_EQ(format_csv(tn_figure(ns)), format_csv(tn_figure(ns)));
  Gamma2Options threaded;
  threaded.threads = 3;
  EXPECT_EQ(format_csv(tn_figure(ns, threaded)), format_csv(tn_figure(ns)));
}

TEST(TnFigureTest, Caps) {
  const std::vector<std::size_t> big{257};
  EXPECT_THROW(tn_figure(big), CapExceeded);
  ReportConfig timed;
  timed.record_seconds = true;
  const std::vector<std::size_t> ns{3};
  EXPECT_TRUE(tn_figure(ns, {}, timed).front().has("seconds"));
}

TEST(EllipsoidDumpTest, TriangleTwoWeights) {
  Gamma2Options options;
  options.tol = 1e-6;
  const EllipsoidDump dump = ellipsoid_dump(2, options);
  const auto& c = dump.certificate;
  EXPECT_NEAR(c.dual_p[0], 1.0 / 3, 1e-3);
  EXPECT_NEAR(c.dual_p[1], 2.0 / 3, 1e-3);
  EXPECT_NEAR(c.dual_q[0], 2.0 / 3, 1e-3);
  EXPECT_NEAR(c.dual_q[1], 1.0 / 3, 1e-3);
}

TEST(EllipsoidDumpTest, DiagonalAndSymmetry) {
  const EllipsoidDump dump = ellipsoid_dump(16);
  const auto& c = dump.certificate;
  ASSERT_TRUE(c.ellipsoid.has_value());
  const Matrix& d = c.ellipsoid->dual_matrix();
  EXPECT_EQ(asymmetry(d), 0.0);
  EXPECT_GE(symmetric_eigen(d).values.front(), -1e-9 * c.upper * c.upper);
  double top = 0.0;
  for (double x : d.diagonal_entries()) top = std::max(top, x);
  EXPECT_NEAR(top, c.upper * c.upper, 1e-9 * top);
  RecordProperty("symmetry_deviation", std::to_string(dump.symmetry_deviation));
  EXPECT_LT(dump.symmetry_deviation, 0.05);
}

TEST(EllipsoidDumpTest, WritesBundle) {
  const EllipsoidDump dump = ellipsoid_dump(5);
  const auto dir = scratch_dir("dump");
  write_ellipsoid_dump(dir, dump);
  const Matrix d = read_matrix_file(dir / "D.txt").matrix;
  EXPECT_EQ(d, dump.certificate.ellipsoid->dual_matrix());
  EXPECT_EQ(read_matrix_file(dir / "p.txt").matrix.column(0), dump.certificate.dual_p);
  std::ifstream in(dir / "certificate.txt");
  std::stringstream text;
  text << in.rdbuf();
  const Gamma2Certificate back = parse_certificate(text.str());
  EXPECT_TRUE(validate_certificate(lower_triangular_ones(5), back).ok);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(ellipsoid_dump(129), CapExceeded);
}

TEST(TusnadyReportTest, TwoDimensionsDirectMatchesProduct) {
  const ReportRow row = tusnady_report(2, 4);
  EXPECT_TRUE(row.violations.empty());
  const double tol = 3e-4;
  EXPECT_NEAR(row.get("direct_upper"), row.get("product_upper"), tol * row.get("product_upper"));
  EXPECT_TRUE(row.has("herdisc"));
  EXPECT_FALSE(row.has_marker("product-only"));
  expect_certificates_valid(row, grid_anchored(2, 4).incidence());
}

TEST(TusnadyReportTest, OneDimensionIsTriangle) {
  const ReportRow row = tusnady_report(1, 8);
  EXPECT_NEAR(row.get("direct_upper"), row.get("tn_upper"), 2e-4 * row.get("tn_upper"));
  EXPECT_EQ(row.get("product_upper"), row.get("tn_upper"));
  EXPECT_EQ(row.get("herdisc"), 1.0);
}

TEST(TusnadyReportTest, CapLogic) {
  const ReportRow three = tusnady_report(3, 4);
  EXPECT_TRUE(three.has_marker("product-only"));
  EXPECT_TRUE(three.has_marker("herdisc-oracle-skipped"));
  EXPECT_FALSE(three.has("herdisc"));
  EXPECT_TRUE(three.violations.empty());
  ReportConfig small;
  small.max_grid_points = 100;
  const ReportRow skipped = tusnady_report(2, 16, {}, small);
  EXPECT_TRUE(skipped.has_marker("direct-solve-skipped"));
  EXPECT_FALSE(skipped.has("direct_upper"));
  EXPECT_NEAR(skipped.get("product_upper"), std::pow(1.70448027, 2), 1e-3);
}

TEST(SubcubeReportTest, OneAndThree) {
  const ReportRow one = subcube_report(1);
  EXPECT_NEAR(one.get("direct_upper"), 2 / std::sqrt(3.0), 1e-4);
  const ReportRow three = subcube_report(3);
  EXPECT_NEAR(three.get("direct_upper"), std::pow(2 / std::sqrt(3.0), 3), 4e-4 * three.get("product_value"));
  EXPECT_TRUE(three.violations.empty());
  expect_certificates_valid(three, subcubes(3).incidence());
}

TEST(SubcubeReportTest, ConstantFromSixDimensions) {
  const ReportRow six = subcube_report(6);
  EXPECT_NEAR(six.get("c0_estimate"), 0.2075, 0.005);
  EXPECT_NEAR(six.get("c0"), std::log2(2 / std::sqrt(3.0)), 1e-15);
  EXPECT_THROW(subcube_report(9), CapExceeded);
}

TEST(ApReportTest, SingletonSystem) {
  const std::vector<std::size_t> ns{1};
  const ReportRow row = ap_report(ns).front();
  EXPECT_NEAR(row.get("gamma2_upper"), 1.0, 1e-4);
  EXPECT_EQ(row.get("sets"), 1.0);
}

TEST(ApReportTest, RatioBandIsStable) {
  std::vector<std::size_t> ns;
  for (auto [n, ratio] : kApRatioBaseline) ns.push_back(n);
  const std::vector<ReportRow> rows = ap_report(ns);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_NEAR(rows[k].get("ratio"), kApRatioBaseline[k].second, 0.01 * kApRatioBaseline[k].second);
    EXPECT_FALSE(rows[k].has_marker("gamma2_not-converged"));
  }
  const std::vector<std::size_t> big{129};
  EXPECT_THROW(ap_report(big), CapExceeded);
}

TEST(ApReportTest, StructuralBounds) {
  const std::vector<std::size_t> sizes{4, 16, 64};
  for (const ReportRow& row : ap_structure_report(sizes)) {
    EXPECT_TRUE(row.violations.empty()) << row.label;
    const double bound = row.get("bound");
    EXPECT_LE(row.get("small_upper"), bound * (1 + 1e-4));
    EXPECT_LE(row.get("large_upper"), bound * (1 + 1e-4));
  }
}

TEST(AuditTest, TriangleEight) {
  const BoundsReport r = audit(lower_triangular_ones(8));
  EXPECT_TRUE(r.failures.empty());
  ASSERT_TRUE(r.herdisc_exact.has_value());
  EXPECT_EQ(*r.herdisc_exact, 1.0);
  // The figure's ordering only pins the interior value between the
  // uniform-weight bound and floor(log2 8) + 1.
  EXPECT_GE(r.gamma2_interval.first, r.nuclear_uniform - 1e-12);
  EXPECT_GE(r.gamma2_interval.first, 1.438);
  EXPECT_LE(r.gamma2_interval.second, 4.0);
  EXPECT_TRUE(r.detlb_is_exact);
  EXPECT_EQ(r.detlb, 1.0);
}

TEST(AuditTest, PowerSetFour) {
  const BoundsReport r = audit(power_set(4).incidence());
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(*r.disc_exact, 2.0);
  EXPECT_LE(r.gamma2_interval.second, 2.0 + 1e-9);
}

TEST(AuditTest, ZeroMatrix) {
  const BoundsReport r = audit(Matrix(3, 4));
  EXPECT_EQ(r.gamma2_interval.first, 0.0);
  EXPECT_EQ(r.gamma2_interval.second, 0.0);
  EXPECT_EQ(r.detlb, 0.0);
  EXPECT_EQ(*r.detlb2, 0.0);
  EXPECT_EQ(r.nuclear_uniform, 0.0);
  EXPECT_EQ(*r.disc_exact, 0.0);
  EXPECT_EQ(*r.herdisc_exact, 0.0);
  EXPECT_TRUE(r.failures.empty());
}

TEST(AuditTest, CapsRecordedNotFatal) {
  std::mt19937_64 rng(51);
  const Matrix a = random_binary(rng, 30, 30);
  const BoundsReport r = audit(a);
  EXPECT_FALSE(r.disc_exact.has_value());
  EXPECT_FALSE(r.herdisc_exact.has_value());
  EXPECT_FALSE(r.detlb_is_exact);
  EXPECT_GT(r.detlb, 0.0);
  EXPECT_GE(r.skipped.size(), 3u);
  EXPECT_TRUE(r.failures.empty());
  const std::string text = format_bounds_report(r);
  EXPECT_NE(text.find("status=ok"), std::string::npos);
  EXPECT_NE(text.find("skipped=disc"), std::string::npos);
}

TEST(AuditTest, RandomSystemsPass) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 5; ++trial) {
    const BoundsReport r = audit(random_binary(rng, 6, 7));
    EXPECT_TRUE(r.failures.empty());
    EXPECT_LE(r.detlb, 2 * *r.herdisc_exact);
  }
}

}  // namespace
}  // namespace g2d
