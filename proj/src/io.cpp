#include "shiftqp/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace shiftqp {

namespace {

void write_number(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

void write_row(std::ostream& out, const double* data, int count) {
  for (int i = 0; i < count; ++i) {
    if (i > 0) out << ' ';
    write_number(out, data[i]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const char* name, const Mat& M) {
  out << name << '\n';
  std::vector<double> row(static_cast<size_t>(std::max<Eigen::Index>(M.cols(), 1)));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) row[static_cast<size_t>(j)] = M(i, j);
    write_row(out, row.data(), static_cast<int>(M.cols()));
  }
}

void write_vector(std::ostream& out, const char* name, const Vec& v) {
  out << name << '\n';
  if (v.size() > 0) write_row(out, v.data(), static_cast<int>(v.size()));
}

// Pulls the next content line, stripping comments and blanks. Returns false
// at end of input. line_no tracks the physical 1-based line just read.
bool next_line(std::istream& in, std::string& out, int& line_no) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto begin = raw.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = raw.find_last_not_of(" \t\r");
    out = raw.substr(begin, end - begin + 1);
    return true;
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& line, int line_no) {
  std::vector<double> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(line_no, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) {
      throw ParseError(line_no, "trailing characters in number '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

void expect_header(std::istream& in, const char* name, int& line_no) {
  std::string line;
  if (!next_line(in, line, line_no)) {
    throw ParseError(line_no, std::string("expected '") + name + "' block header");
  }
  if (line != name) {
    throw ParseError(line_no,
                     std::string("expected '") + name + "' block header, got '" + line + "'");
  }
}

Mat read_matrix(std::istream& in, const char* name, int rows, int cols, int& line_no) {
  expect_header(in, name, line_no);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    std::string line;
    if (!next_line(in, line, line_no)) {
      throw ParseError(line_no, std::string("unexpected end of input inside '") + name + "'");
    }
    const auto vals = parse_numbers(line, line_no);
    if (static_cast<int>(vals.size()) != cols) {
      throw ParseError(line_no, std::string("row of '") + name + "' has " +
                                    std::to_string(vals.size()) + " entries, expected " +
                                    std::to_string(cols));
    }
    for (int j = 0; j < cols; ++j) M(i, j) = vals[static_cast<size_t>(j)];
  }
  return M;
}

Vec read_vector(std::istream& in, const char* name, int len, int& line_no) {
  expect_header(in, name, line_no);
  Vec v(len);
  if (len == 0) return v;
  std::string line;
  if (!next_line(in, line, line_no)) {
    throw ParseError(line_no, std::string("unexpected end of input inside '") + name + "'");
  }
  const auto vals = parse_numbers(line, line_no);
  if (static_cast<int>(vals.size()) != len) {
    throw ParseError(line_no, std::string("'") + name + "' has " +
                                  std::to_string(vals.size()) + " entries, expected " +
                                  std::to_string(len));
  }
  for (int j = 0; j < len; ++j) v(j) = vals[static_cast<size_t>(j)];
  return v;
}

}  // namespace

void save_qp(std::ostream& out, const QpModel& qp) {
  validate(qp);
  out << "odqp 1\n";
  out << qp.n << ' ' << qp.m << ' ' << qp.p << '\n';
  write_matrix(out, "Q", qp.Q);
  write_vector(out, "c", qp.c);
  write_matrix(out, "A", qp.A);
  write_vector(out, "b", qp.b);
  write_matrix(out, "G", qp.G);
  write_vector(out, "h", qp.h);
  if (!out) throw IoError("write failed");
}

void save_qp(const std::string& path, const QpModel& qp) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  save_qp(f, qp);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

QpModel load_qp(std::istream& in) {
  int line_no = 0;
  std::string line;

  if (!next_line(in, line, line_no)) throw ParseError(1, "empty input");
  if (line != "odqp 1") {
    throw ParseError(line_no, "expected 'odqp 1' signature, got '" + line + "'");
  }

  if (!next_line(in, line, line_no)) throw ParseError(line_no, "missing dimension line");
  const auto dims = parse_numbers(line, line_no);
  if (dims.size() != 3) throw ParseError(line_no, "dimension line must be 'n m p'");
  for (double d : dims) {
    if (d < 0 || d != static_cast<double>(static_cast<long long>(d))) {
      throw ParseError(line_no, "dimensions must be nonnegative integers");
    }
  }
  const int n = static_cast<int>(dims[0]);
  const int m = static_cast<int>(dims[1]);
  const int p = static_cast<int>(dims[2]);

  Mat Q = read_matrix(in, "Q", n, n, line_no);
  Vec c = read_vector(in, "c", n, line_no);
  Mat A = read_matrix(in, "A", m, n, line_no);
  Vec b = read_vector(in, "b", m, line_no);
  Mat G = read_matrix(in, "G", p, n, line_no);
  Vec h = read_vector(in, "h", p, line_no);

  if (next_line(in, line, line_no)) {
    throw ParseError(line_no, "trailing content after final block: '" + line + "'");
  }

  return make_qp(std::move(Q), std::move(c), std::move(A), std::move(b), std::move(G),
                 std::move(h));
}

QpModel load_qp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return load_qp(f);
}

}  // namespace shiftqp
