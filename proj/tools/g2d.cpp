#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "g2d/error.hpp"
#include "g2d/gamma2.hpp"
#include "g2d/matrix_io.hpp"
#include "g2d/oracles.hpp"
#include "g2d/reports.hpp"
#include "g2d/set_system.hpp"
#include "g2d/spectra.hpp"

namespace {

using namespace g2d;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;
constexpr int kExitRefused = 3;

struct Globals {
  double tol = 1e-4;
  std::uint64_t seed = 1;
  int threads = 1;
  double budget_minutes = 0.0;
  int restarts = 8;
  int max_iter = 4000;
  std::string method = "scaling";

  Gamma2Options options() const {
    Gamma2Options o;
    o.tol = tol;
    o.seed = seed;
    o.threads = threads;
    o.restarts = restarts;
    o.max_iter = max_iter;
    if (method == "admm") o.method = PrimalMethod::kAdmm;
    if (method == "dykstra") o.method = PrimalMethod::kDykstraBisection;
    if (budget_minutes > 0.0)
      o.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double, std::ratio<60>>(budget_minutes));
    return o;
  }
};

bool deadline_passed(const Gamma2Options& o) { return o.deadline && Clock::now() >= *o.deadline; }

// "2,4,8" lists values; "a,b,...,c" continues the pattern up to c,
// doubling-style when b is a multiple of a, otherwise with step b - a.
std::vector<std::size_t> parse_ns(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(std::stoul(parts[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 != parts.size() - 1) throw CLI::ValidationError("--ns", "bad range: " + text);
    const std::size_t a = out[out.size() - 2], b = out.back(), last = std::stoul(parts[i + 1]);
    if (b <= a) throw CLI::ValidationError("--ns", "range must increase: " + text);
    const bool geometric = a > 0 && b % a == 0 && b / a >= 2;
    for (std::size_t x = b;;) {
      const std::size_t next = geometric ? x * (b / a) : x + (b - a);
      if (next > last) break;
      out.push_back(next);
      x = next;
    }
    if (out.back() != last) out.push_back(last);
    break;
  }
  return out;
}

Matrix read_input(const std::string& path) {
  if (path == "-") return read_matrix_text(std::cin).matrix;
  return read_matrix_file(path).matrix;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int rows_status(const std::vector<ReportRow>& rows, const Gamma2Options& o) {
  bool converged = true;
  for (const ReportRow& r : rows) {
    for (const auto& v : r.violations) std::cerr << r.label << ": " << v << '\n';
    if (!r.violations.empty()) return kExitViolation;
    for (const auto& m : r.markers)
      if (m.find("not-converged") != std::string::npos) converged = false;
  }
  if (!converged && deadline_passed(o)) {
    std::cerr << "budget exhausted before convergence\n";
    return kExitRefused;
  }
  return kExitOk;
}

std::string coloring_text(const ColoringResult& r) {
  std::string s;
  for (int x : r.coloring) s += std::to_string(x) + '\n';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamma2 factorization norm and discrepancy bounds"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol", g.tol, "relative tolerance on gamma2")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for dual restarts");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--budget-minutes", g.budget_minutes, "wall-clock budget; 0 means none")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--restarts", g.restarts, "dual ascent restarts")->check(CLI::NonNegativeNumber);
  app.add_option("--max-iter", g.max_iter, "primal iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--method", g.method, "primal engine")
      ->check(CLI::IsMember({"scaling", "admm", "dykstra"}));

  std::string ns_text = "2,4,...,128", structure_text, out_path, certs_dir, in_path = "-", cert_path;
  std::size_t n = 8, kmax = 0;
  int d = 2;
  bool seconds = false;

  auto* tn = app.add_subcommand("tn-figure", "gamma2(T_n) curve as CSV");
  tn->add_option("--ns", ns_text, "sizes, e.g. 2,4,...,128");
  tn->add_option("--out", out_path, "CSV path (stdout if absent)");
  tn->add_option("--certs", certs_dir, "directory for per-row certificates");
  tn->add_flag("--seconds", seconds, "add a wall-time column");

  auto* ell = app.add_subcommand("ellipsoid", "optimal ellipsoid and dual weights for T_n");
  ell->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  ell->add_option("--out", out_path, "output directory")->required();

  auto* tus = app.add_subcommand("tusnady", "anchored-box grid report");
  tus->add_option("--d", d)->required()->check(CLI::PositiveNumber);
  tus->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  tus->add_option("--out", out_path);

  auto* sub = app.add_subcommand("subcubes", "Boolean subcube report");
  sub->add_option("--d", d)->required()->check(CLI::PositiveNumber);
  sub->add_option("--out", out_path);

  auto* ap = app.add_subcommand("ap", "arithmetic progression report");
  ap->add_option("--ns", ns_text)->required();
  ap->add_option("--structure", structure_text, "also emit maximal-progression rows for these sizes");
  ap->add_option("--out", out_path);

  auto* aud = app.add_subcommand("audit", "sandwich audit of one matrix or set system");
  aud->add_option("--in", in_path, "input file, - for stdin");

  auto* g2 = app.add_subcommand("gamma2", "solve gamma2 and print a certificate");
  g2->add_option("--in", in_path);
  g2->add_option("--out", out_path, "certificate path (stdout if absent)");

  auto* ver = app.add_subcommand("verify", "re-validate a certificate");
  ver->add_option("--in", in_path)->required();
  ver->add_option("--cert", cert_path)->required();

  std::string kind;
  auto* gen = app.add_subcommand("gen", "write a standard set system");
  gen->add_option("kind", kind)->required()->check(
      CLI::IsMember({"intervals", "grid", "subcubes", "ap", "power-set", "maximal-ap-small", "maximal-ap-large"}));
  gen->add_option("--n", n);
  gen->add_option("--d", d);
  gen->add_option("--out", out_path);

  auto* oracle = app.add_subcommand("oracle", "exact combinatorial oracles");
  oracle->require_subcommand(1);
  std::string coloring_path, weights_path;
  double p = 2.0;
  auto input_opts = [&](CLI::App* c) {
    c->add_option("--in", in_path, "input file, - for stdin");
    c->add_option("--coloring-out", coloring_path, "write the optimal coloring here");
  };
  auto* o_disc = oracle->add_subcommand("disc", "exact discrepancy");
  input_opts(o_disc);
  auto* o_herd = oracle->add_subcommand("herdisc", "exact hereditary discrepancy");
  o_herd->add_option("--in", in_path);
  auto* o_det = oracle->add_subcommand("detlb", "determinant lower bound");
  o_det->add_option("--in", in_path);
  o_det->add_option("--kmax", kmax, "largest minor size (default min(m,n))");
  auto* o_det2 = oracle->add_subcommand("detlb2", "L2 determinant lower bound");
  o_det2->add_option("--in", in_path);
  o_det2->add_option("--kmax", kmax);
  auto* o_discp = oracle->add_subcommand("discp", "weighted l_p discrepancy");
  input_opts(o_discp);
  o_discp->add_option("--p", p)->required();
  o_discp->add_option("--weights", weights_path, "one weight per row");

  CLI11_PARSE(app, argc, argv);

  try {
    const Gamma2Options o = g.options();
    ReportConfig config;
    config.record_seconds = seconds;

    if (*tn) {
      const auto ns = parse_ns(ns_text);
      const auto rows = tn_figure(ns, o, config);
      emit(format_csv(rows), out_path);
      if (!certs_dir.empty()) {
        std::filesystem::create_directories(certs_dir);
        for (const ReportRow& r : rows)
          for (const auto& [name, cert] : r.certificates)
            emit(format_certificate(cert), (std::filesystem::path(certs_dir) / (r.label + "_" + name + ".txt")).string());
      }
      return rows_status(rows, o);
    }
    if (*ell) {
      const EllipsoidDump dump = ellipsoid_dump(n, o, config);
      write_ellipsoid_dump(out_path, dump);
      std::cout << "n=" << n << "\nupper=" << format_number(dump.certificate.upper)
                << "\nlower=" << format_number(dump.certificate.lower)
                << "\nsymmetry_deviation=" << format_number(dump.symmetry_deviation) << '\n';
      if (!validate_certificate(lower_triangular_ones(n), dump.certificate, g.tol).ok) return kExitViolation;
      return dump.certificate.converged || !deadline_passed(o) ? kExitOk : kExitRefused;
    }
    if (*tus || *sub) {
      const std::vector<ReportRow> rows{*tus ? tusnady_report(d, n, o, config) : subcube_report(d, o, config)};
      emit(format_csv(rows), out_path);
      return rows_status(rows, o);
    }
    if (*ap) {
      std::vector<ReportRow> rows = ap_report(parse_ns(ns_text), o, config);
      if (!structure_text.empty())
        for (ReportRow& r : ap_structure_report(parse_ns(structure_text), o)) rows.push_back(std::move(r));
      emit(format_csv(rows), out_path);
      return rows_status(rows, o);
    }
    if (*aud) {
      const BoundsReport r = audit(read_input(in_path), o, config);
      std::cout << format_bounds_report(r);
      return r.failures.empty() ? kExitOk : kExitViolation;
    }
    if (*g2) {
      const Matrix a = read_input(in_path);
      const Gamma2Certificate cert = gamma2(a, o);
      emit(format_certificate(cert), out_path);
      if (!out_path.empty())
        std::cout << "upper=" << format_number(cert.upper) << "\nlower=" << format_number(cert.lower) << '\n';
      if (!cert.converged && deadline_passed(o)) return kExitRefused;
      return kExitOk;
    }
    if (*ver) {
      const Matrix a = read_input(in_path);
      std::ifstream in(cert_path);
      if (!in) throw std::runtime_error("cannot read " + cert_path);
      std::stringstream text;
      text << in.rdbuf();
      const CertificateCheck check = validate_certificate(a, parse_certificate(text.str()), g.tol);
      std::cout << "factorization_residual=" << format_number(check.factorization_residual)
                << "\nnorm_product=" << format_number(check.norm_product)
                << "\nmax_gauge=" << format_number(check.max_gauge)
                << "\nrecomputed_lower=" << format_number(check.recomputed_lower) << '\n';
      for (const auto& f : check.failures) std::cout << "failure=" << f << '\n';
      std::cout << "status=" << (check.ok ? "ok" : "failed") << '\n';
      return check.ok ? kExitOk : kExitViolation;
    }
    if (*gen) {
      SetSystem f;
      if (kind == "intervals") f = initial_segments(n);
      if (kind == "grid") f = grid_anchored(d, n);
      if (kind == "subcubes") f = subcubes(d);
      if (kind == "ap") f = arithmetic_progressions(n);
      if (kind == "power-set") f = power_set(n);
      if (kind == "maximal-ap-small") f = maximal_aps(n).small;
      if (kind == "maximal-ap-large") f = maximal_aps(n).large;
      emit(format_set_system(f), out_path);
      return kExitOk;
    }
    if (*oracle) {
      const Matrix a = read_input(in_path);
      const OracleLimits limits;
      if (*o_disc || *o_discp) {
        ColoringResult r;
        if (*o_disc) {
          r = disc_exact(a, g.threads, limits);
        } else {
          std::vector<double> w;
          if (!weights_path.empty()) {
            const Matrix wm = read_matrix_file(weights_path).matrix;
            w.assign(wm.data().begin(), wm.data().end());
          }
          r = disc_p_exact(a, p, w, g.threads, limits);
          std::cout << "p=" << format_number(p) << '\n';
        }
        std::cout << "disc=" << format_number(r.value) << '\n';
        if (!coloring_path.empty()) emit(coloring_text(r), coloring_path);
        return kExitOk;
      }
      if (*o_herd) {
        std::cout << "herdisc=" << format_number(herdisc_exact(a, g.threads, limits)) << '\n';
        return kExitOk;
      }
      const std::size_t k = kmax ? kmax : std::min(a.rows(), a.cols());
      if (*o_det) std::cout << "k_max=" << k << "\ndetlb=" << format_number(detlb_exact(a, k, g.threads, limits)) << '\n';
      if (*o_det2) std::cout << "k_max=" << k << "\ndetlb2=" << format_number(detlb2_exact(a, k, g.threads, limits)) << '\n';
      return kExitOk;
    }
  } catch (const CapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
