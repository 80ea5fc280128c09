#include "g2d/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "g2d/error.hpp"

namespace g2d {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("matrix text: bad number '" + token + "' on line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

MatrixText parse_matrix_text(const std::string& text) {
  std::istringstream in(text);
  MatrixText out;
  std::string line;
  std::size_t line_no = 0;
  bool in_labels = false;
  bool have_header = false;
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (!t.empty() && t.front() == '#') {
      if (have_header) continue;
      const std::string body = trim(t.substr(1));
      if (body == "labels:") {
        in_labels = true;
      } else if (in_labels) {
        out.labels.push_back(body);
      }
      continue;
    }
    in_labels = false;
    const std::string content = trim(t.substr(0, t.find('#')));
    if (content.empty()) continue;
    std::istringstream tokens(content);
    std::string tok;
    if (!have_header) {
      std::vector<std::string> head;
      while (tokens >> tok) head.push_back(tok);
      if (head.size() != 2) throw FormatError("matrix text: header must be 'm n'");
      const double m = parse_real(head[0], line_no);
      const double n = parse_real(head[1], line_no);
      if (m < 0 || n < 0 || m != static_cast<double>(static_cast<std::size_t>(m)) ||
          n != static_cast<double>(static_cast<std::size_t>(n))) {
        throw FormatError("matrix text: header dimensions must be nonnegative integers");
      }
      rows = static_cast<std::size_t>(m);
      cols = static_cast<std::size_t>(n);
      data.reserve(rows * cols);
      have_header = true;
      continue;
    }
    std::size_t count = 0;
    while (tokens >> tok) {
      data.push_back(parse_real(tok, line_no));
      ++count;
    }
    if (count != cols) {
      throw FormatError("matrix text: line " + std::to_string(line_no) + " has " +
                        std::to_string(count) + " entries, expected " + std::to_string(cols));
    }
  }
  if (!have_header) throw FormatError("matrix text: missing header");
  if (data.size() != rows * cols) throw FormatError("matrix text: wrong number of rows");
  out.matrix = Matrix(rows, cols, std::move(data));
  if (!out.labels.empty() && out.labels.size() != rows) {
    throw FormatError("matrix text: label count does not match row count");
  }
  return out;
}

MatrixText read_matrix_text(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix_text(buf.str());
}

MatrixText read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_matrix_text(in);
}

void write_matrix(std::ostream& out, const Matrix& a, std::span<const std::string> labels) {
  if (!labels.empty()) {
    out << "# labels:\n";
    for (const auto& l : labels) out << "# " << l << '\n';
  }
  out << a.rows() << ' ' << a.cols() << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& a,
                       std::span<const std::string> labels) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  write_matrix(out, a, labels);
}

std::string format_matrix(const Matrix& a, std::span<const std::string> labels) {
  std::ostringstream out;
  write_matrix(out, a, labels);
  return out.str();
}

}  // namespace g2d
