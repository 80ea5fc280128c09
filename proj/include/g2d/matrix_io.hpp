#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "g2d/matrix.hpp"

namespace g2d {

// Matrix text format: a header line "m n", then m lines of n reals.
// '#' starts a comment. An optional "# labels:" comment block ahead of the
// header carries one label per row ("# <label>" lines).
struct MatrixText {
  Matrix matrix;
  std::vector<std::string> labels;
};

MatrixText parse_matrix_text(const std::string& text);
MatrixText read_matrix_text(std::istream& in);
MatrixText read_matrix_file(const std::filesystem::path& path);

// Writes 17 significant digits so values round-trip exactly.
void write_matrix(std::ostream& out, const Matrix& a, std::span<const std::string> labels = {});
void write_matrix_file(const std::filesystem::path& path, const Matrix& a,
                       std::span<const std::string> labels = {});
std::string format_matrix(const Matrix& a, std::span<const std::string> labels = {});

}  // namespace g2d
