#pragma once

// Text formats.
//
// Edge list:     '#' comments, first non-comment line "n <vertex count>", then
//                one "i<TAB>j<TAB>w" line per edge, 0-based vertices.
// Dense matrix:  first line "rows cols", then `rows` lines of `cols` decimals.
// Weights:       one "index<TAB>weight" line per nonzero weight.
// Every number is written with 17 significant digits so reading back
// reproduces the in-memory value exactly.

#include "rforge/bss.hpp"
#include "rforge/graph.hpp"
#include "rforge/linalg.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rforge::io {

/// 17 significant digits, shortest exponent form ("%.17g").
std::string format_number(double x);

/// Throws ParseError with the 1-based line number on malformed input,
/// duplicate pairs, out-of-range vertices or nonpositive weights. Self-loops
/// are skipped with a note in `warnings`.
WeightedGraph read_edge_list(std::istream& in, std::vector<std::string>* warnings = nullptr);
WeightedGraph read_edge_list_file(const std::string& path,
                                  std::vector<std::string>* warnings = nullptr);
void write_edge_list(std::ostream& out, const WeightedGraph& g);
void write_edge_list_file(const std::string& path, const WeightedGraph& g);

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

std::vector<std::pair<Index, double>> read_weights(std::istream& in);
void write_weights(std::ostream& out, const SparseWeights& w);
void write_weights_file(const std::string& path, const SparseWeights& w);

/// Writes `text` to `path`, throwing Error when the file cannot be opened.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rforge::io
