#include "rforge/io.hpp"

#include "rforge/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace rforge::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

double parse_double(std::string_view tok, long line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected a number, got '" + std::string(tok) + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite number '" + std::string(tok) + "'", line);
  return v;
}

long long parse_int(std::string_view tok, long line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  return v;
}

// Next line that is neither blank nor a '#' comment; false at end of input.
bool next_content_line(std::istream& in, std::string& buf, long& line, std::string_view& out) {
  while (std::getline(in, buf)) {
    ++line;
    const std::string_view t = trim(buf);
    if (t.empty() || t.front() == '#') continue;
    out = t;
    return true;
  }
  return false;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for reading");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

WeightedGraph read_edge_list(std::istream& in, std::vector<std::string>* warnings) {
  std::string buf;
  long line = 0;
  std::string_view t;
  if (!next_content_line(in, buf, line, t)) throw ParseError("empty edge list", line);
  auto head = fields(t);
  if (head.size() != 2 || head[0] != "n")
    throw ParseError("expected header 'n <vertex count>'", line);
  const long long n = parse_int(head[1], line);
  if (n < 1) throw ParseError("vertex count must be positive", line);

  std::vector<Edge> edges;
  std::map<std::pair<Index, Index>, long> first_seen;
  while (next_content_line(in, buf, line, t)) {
    const auto f = fields(t);
    if (f.size() != 3) throw ParseError("expected 'i<TAB>j<TAB>w'", line);
    const long long i = parse_int(f[0], line);
    const long long j = parse_int(f[1], line);
    const double w = parse_double(f[2], line);
    if (i < 0 || j < 0 || i >= n || j >= n) {
      std::ostringstream os;
      os << "vertex out of range [0, " << n << ")";
      throw ParseError(os.str(), line);
    }
    if (!(w > 0.0)) throw ParseError("edge weight must be positive", line);
    if (i == j) {
      if (warnings)
        warnings->push_back("line " + std::to_string(line) + ": ignored self-loop at vertex " +
                            std::to_string(i));
      continue;
    }
    const std::pair<Index, Index> key{std::min(i, j), std::max(i, j)};
    const auto [it, fresh] = first_seen.emplace(key, line);
    if (!fresh) {
      std::ostringstream os;
      os << "duplicate edge (" << key.first << ", " << key.second << "), first given on line "
         << it->second;
      throw ParseError(os.str(), line);
    }
    edges.push_back({key.first, key.second, w});
  }
  return WeightedGraph(static_cast<Index>(n), edges);
}

WeightedGraph read_edge_list_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream f = open_in(path);
  return read_edge_list(f, warnings);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << "n " << g.vertex_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << '\t' << e.v << '\t' << format_number(e.w) << '\n';
}

void write_edge_list_file(const std::string& path, const WeightedGraph& g) {
  std::ofstream f = open_out(path);
  write_edge_list(f, g);
}

Matrix read_matrix(std::istream& in) {
  std::string buf;
  long line = 0;
  std::string_view t;
  if (!next_content_line(in, buf, line, t)) throw ParseError("empty matrix file", line);
  const auto head = fields(t);
  if (head.size() != 2) throw ParseError("expected header 'rows cols'", line);
  const long long rows = parse_int(head[0], line);
  const long long cols = parse_int(head[1], line);
  if (rows < 0 || cols < 0) throw ParseError("negative dimension", line);

  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    if (!next_content_line(in, buf, line, t)) {
      std::ostringstream os;
      os << "expected " << rows << " rows, found " << r;
      throw ParseError(os.str(), line + 1);
    }
    const auto f = fields(t);
    if (static_cast<long long>(f.size()) != cols) {
      std::ostringstream os;
      os << "expected " << cols << " values, found " << f.size();
      throw ParseError(os.str(), line);
    }
    for (long long c = 0; c < cols; ++c) m(r, c) = parse_double(f[static_cast<std::size_t>(c)], line);
  }
  if (next_content_line(in, buf, line, t)) throw ParseError("trailing data after matrix", line);
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream f = open_in(path);
  return read_matrix(f);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_number(m(r, c));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream f = open_out(path);
  write_matrix(f, m);
}

std::vector<std::pair<Index, double>> read_weights(std::istream& in) {
  std::string buf;
  long line = 0;
  std::string_view t;
  std::vector<std::pair<Index, double>> out;
  while (next_content_line(in, buf, line, t)) {
    const auto f = fields(t);
    if (f.size() != 2) throw ParseError("expected 'index<TAB>weight'", line);
    const long long i = parse_int(f[0], line);
    if (i < 0) throw ParseError("negative index", line);
    out.emplace_back(static_cast<Index>(i), parse_double(f[1], line));
  }
  return out;
}

void write_weights(std::ostream& out, const SparseWeights& w) {
  for (const auto& [i, s] : w.weights) out << i << '\t' << format_number(s) << '\n';
}

void write_weights_file(const std::string& path, const SparseWeights& w) {
  std::ofstream f = open_out(path);
  write_weights(f, w);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f = open_out(path);
  f << text;
}

}  // namespace rforge::io
