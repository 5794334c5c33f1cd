#include "hopinf/hopm.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hopinf {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_real(const std::string& tok, const std::filesystem::path& path, long line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    // from_chars rejects a few spellings strtod accepts (e.g. "inf"); fall back.
    char* end = nullptr;
    v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') {
      std::ostringstream os;
      os << path.string() << ":" << line << ": cannot parse number '" << tok << "'";
      throw IoError(os.str());
    }
  }
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::string, std::string> HopmFile::metadata() const {
  std::map<std::string, std::string> out;
  for (const auto& c : comments) {
    auto eq = c.find('=');
    if (eq == std::string::npos) continue;
    out[trim(c.substr(0, eq))] = trim(c.substr(eq + 1));
  }
  return out;
}

HopmFile read_hopm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  HopmFile f;
  std::string line;
  long lineno = 0;
  bool have_header = false;
  Index rows = 0, cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      f.comments.push_back(trim(t.substr(1)));
      continue;
    }
    std::istringstream ls(t);
    std::string magic;
    ls >> magic >> rows >> cols;
    if (magic != "HOPM1" || !ls || rows < 0 || cols < 0)
      throw IoError(path.string() + ": missing 'HOPM1 <rows> <cols>' header");
    have_header = true;
    break;
  }
  if (!have_header) throw IoError(path.string() + ": empty file");
  f.data.resize(rows, cols);
  Index r = 0;
  while (r < rows && std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      f.comments.push_back(trim(t.substr(1)));
      continue;
    }
    std::istringstream ls(t);
    std::string tok;
    Index c = 0;
    while (ls >> tok) {
      if (c >= cols) {
        std::ostringstream os;
        os << path.string() << ":" << lineno << ": more than " << cols << " values";
        throw IoError(os.str());
      }
      f.data(r, c++) = parse_real(tok, path, lineno);
    }
    if (c != cols) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected " << cols << " values, got " << c;
      throw IoError(os.str());
    }
    ++r;
  }
  if (r != rows) {
    std::ostringstream os;
    os << path.string() << ": expected " << rows << " rows, got " << r;
    throw IoError(os.str());
  }
  return f;
}

Matrix read_hopm_matrix(const std::filesystem::path& path) { return read_hopm(path).data; }

void write_hopm(const std::filesystem::path& path, const Matrix& m,
                const std::vector<std::string>& comments) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "HOPM1 " << m.rows() << " " << m.cols() << "\n";
  for (const auto& c : comments) out << "# " << c << "\n";
  std::string row;
  for (Index i = 0; i < m.rows(); ++i) {
    row.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) row += ' ';
      row += format_real(m(i, j));
    }
    out << row << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::string meta_line(const std::string& key, const std::string& value) {
  return key + " = " + value;
}

std::string meta_line(const std::string& key, double value) {
  return key + " = " + format_real(value);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  std::istringstream bs(line);
  std::string banner, object, format, field, symmetry;
  bs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw IoError(path.string() + ": not a MatrixMarket matrix file");
  if (lower(format) != "coordinate")
    throw IoError(path.string() + ": only coordinate format is supported");
  field = lower(field);
  if (field != "real" && field != "integer")
    throw IoError(path.string() + ": only real matrices are supported");
  symmetry = lower(symmetry);
  const bool sym = symmetry == "symmetric";
  if (!sym && symmetry != "general")
    throw IoError(path.string() + ": symmetry '" + symmetry + "' not supported");

  long lineno = 1;
  Index rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ls(t);
    ls >> rows >> cols >> nnz;
    if (!ls) throw IoError(path.string() + ": bad size line");
    break;
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(sym ? 2 * nnz : nnz));
  Index seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ls(t);
    Index i = 0, j = 0;
    std::string tok;
    ls >> i >> j >> tok;
    if (tok.empty()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": bad entry";
      throw IoError(os.str());
    }
    double v = parse_real(tok, path, lineno);
    if (i < 1 || j < 1 || i > rows || j > cols) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": index out of range";
      throw IoError(os.str());
    }
    trip.emplace_back(i - 1, j - 1, v);
    if (sym && i != j) trip.emplace_back(j - 1, i - 1, v);
    ++seen;
  }
  if (seen != nnz) throw IoError(path.string() + ": fewer entries than declared");
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m,
                         bool symmetric) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::vector<Eigen::Triplet<double>> entries;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      if (!symmetric || it.row() >= it.col())
        entries.emplace_back(it.row(), it.col(), it.value());
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general")
      << "\n";
  out << m.rows() << " " << m.cols() << " " << entries.size() << "\n";
  for (const auto& e : entries)
    out << e.row() + 1 << " " << e.col() + 1 << " " << format_real(e.value()) << "\n";
}

}  // namespace hopinf
