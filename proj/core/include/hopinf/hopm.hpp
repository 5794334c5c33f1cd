#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hopinf/types.hpp"

namespace hopinf {

// Dense text matrix: "HOPM1 rows cols", optional "# key = value" header lines,
// then rows of whitespace separated numbers.
struct HopmFile {
  Matrix data;
  std::vector<std::string> comments;  // header lines without the leading '#'

  // Parses "# key = value" comments; unknown shapes are ignored.
  std::map<std::string, std::string> metadata() const;
};

HopmFile read_hopm(const std::filesystem::path& path);
Matrix read_hopm_matrix(const std::filesystem::path& path);

void write_hopm(const std::filesystem::path& path, const Matrix& m,
                const std::vector<std::string>& comments = {});

// Convenience for "key = value" comment lines.
std::string meta_line(const std::string& key, const std::string& value);
std::string meta_line(const std::string& key, double value);

// MatrixMarket coordinate real matrices, general or symmetric.
SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m,
                         bool symmetric = false);

std::string format_real(double v);  // 17 significant digits

}  // namespace hopinf
