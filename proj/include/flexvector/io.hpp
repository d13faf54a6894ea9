#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "flexvector/csr.hpp"
#include "flexvector/types.hpp"

namespace fv {

// Plain-text edge list: one "u v" pair per line, blank lines and lines whose
// first non-space character is '#' are skipped.  Edge values are 1, duplicate
// (u,v) pairs collapse to a single entry, self-loops are kept as given.  When
// n_nodes is not supplied the node count is max id + 1.
inline CsrMatrix load_edge_list(const std::string& path,
                                std::optional<i32> n_nodes = std::nullopt) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  std::vector<std::tuple<i32, i32, i32>> trip;
  std::string line;
  i64 line_no = 0;
  i32 max_id = -1;
  while (std::getline(is, line)) {
    ++line_no;
    size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '#') continue;
    std::istringstream ls(line);
    i64 u, v;
    if (!(ls >> u >> v))
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'u v'");
    std::string rest;
    if (ls >> rest)
      throw ParseError(path + ":" + std::to_string(line_no) + ": trailing token '" + rest + "'");
    if (u < 0 || v < 0)
      throw ParseError(path + ":" + std::to_string(line_no) + ": negative node id");
    max_id = std::max({max_id, static_cast<i32>(u), static_cast<i32>(v)});
    trip.emplace_back(static_cast<i32>(u), static_cast<i32>(v), 1);
  }
  const i32 n = n_nodes.value_or(max_id + 1);
  if (max_id >= n)
    throw ParseError(path + ": node id " + std::to_string(max_id) +
                     " exceeds declared node count " + std::to_string(n));
  return csr_from_triplets(n, n, std::move(trip));
}

// MatrixMarket coordinate format.  Supports general and symmetric layouts and
// pattern/integer/real fields; symmetric entries are mirrored, real values are
// rounded to the nearest integer.
inline CsrMatrix load_matrix_market(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  std::string header;
  if (!std::getline(is, header)) throw ParseError(path + ": empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw ParseError(path + ": not a MatrixMarket matrix file");
  if (format != "coordinate")
    throw ParseError(path + ": unsupported format '" + format + "'");
  const bool pattern = field == "pattern";
  if (!pattern && field != "integer" && field != "real")
    throw ParseError(path + ": unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general")
    throw ParseError(path + ": unsupported symmetry '" + symmetry + "'");

  std::string line;
  i64 line_no = 1;
  i64 rows = -1, cols = -1, entries = -1;
  while (std::getline(is, line)) {
    ++line_no;
    size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> entries))
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad size line");
    break;
  }
  if (rows < 0) throw ParseError(path + ": missing size line");

  std::vector<std::tuple<i32, i32, i32>> trip;
  trip.reserve(static_cast<size_t>(entries) * (symmetric ? 2 : 1));
  i64 seen = 0;
  while (std::getline(is, line)) {
    ++line_no;
    size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size() || line[i] == '%') continue;
    std::istringstream ls(line);
    i64 r, c;
    if (!(ls >> r >> c))
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad entry line");
    i32 v = 1;
    if (!pattern) {
      double raw;
      if (!(ls >> raw))
        throw ParseError(path + ":" + std::to_string(line_no) + ": missing value");
      v = static_cast<i32>(std::llround(raw));
    }
    if (r < 1 || r > rows || c < 1 || c > cols)
      throw ParseError(path + ":" + std::to_string(line_no) + ": index out of range");
    trip.emplace_back(static_cast<i32>(r - 1), static_cast<i32>(c - 1), v);
    if (symmetric && r != c)
      trip.emplace_back(static_cast<i32>(c - 1), static_cast<i32>(r - 1), v);
    ++seen;
  }
  if (seen != entries)
    throw ParseError(path + ": entry count " + std::to_string(seen) +
                     " does not match declared " + std::to_string(entries));
  return csr_from_triplets(static_cast<i32>(rows), static_cast<i32>(cols), std::move(trip));
}

}  // namespace fv
