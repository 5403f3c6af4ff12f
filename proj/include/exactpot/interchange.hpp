#pragma once

#include <string>

#include <json.hpp>

#include "exactpot/errors.hpp"
#include "exactpot/multipoly.hpp"
#include "exactpot/poly_matrix.hpp"
#include "exactpot/rational.hpp"

namespace exactpot {

using Json = nlohmann::json;

// Polynomial interchange form:
//   polynomial: [{"c": "p/q", "e": [e1, ..., en]}, ...]  (grlex descending)
//   matrix:     {"rows": m, "cols": N, "n": n, "entries": [[poly, ...], ...]}

inline Json to_json(const MultiPoly& p) {
  Json terms = Json::array();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    terms.push_back({{"c", to_string(it->second)}, {"e", it->first}});
  }
  return terms;
}

inline Json to_json(const PolyMatrix& x) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < x.cols(); ++j) row.push_back(to_json(x(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"rows", x.rows()}, {"cols", x.cols()}, {"n", x.num_vars()}, {"entries", std::move(rows)}};
}

inline Json to_json(const RationalMatrix& x) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < x.cols(); ++j) row.push_back(to_string(x(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parses one polynomial; `where` is a JSON-pointer-like location used in
/// diagnostics.
inline MultiPoly poly_from_json(const Json& j, std::size_t num_vars, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": polynomial must be an array of terms");
  MultiPoly p(num_vars);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string at = where + "/" + std::to_string(t);
    const Json& term = j[t];
    if (!term.is_object() || !term.contains("c") || !term.contains("e")) {
      throw InputError(at + ": term must be an object with keys \"c\" and \"e\"");
    }
    if (!term["c"].is_string() && !term["c"].is_number_integer()) {
      throw InputError(at + "/c: coefficient must be a \"p/q\" string");
    }
    Rational c;
    try {
      c = term["c"].is_string() ? parse_rational(term["c"].get<std::string>())
                                : Rational(term["c"].get<long>());
    } catch (const InputError& e) {
      throw InputError(at + "/c: " + e.what());
    }
    const Json& e = term["e"];
    if (!e.is_array() || e.size() != num_vars) {
      throw InputError(at + "/e: exponent must be an array of length " + std::to_string(num_vars));
    }
    Exponent ex(num_vars);
    for (std::size_t k = 0; k < num_vars; ++k) {
      if (!e[k].is_number_unsigned()) {
        throw InputError(at + "/e/" + std::to_string(k) + ": exponent must be a non-negative integer");
      }
      ex[k] = e[k].get<std::uint32_t>();
    }
    p.add_term(ex, c);
  }
  return p;
}

inline PolyMatrix matrix_from_json(const Json& j, const std::string& where = "") {
  if (!j.is_object()) throw InputError(where + ": matrix must be an object");
  for (const char* key : {"rows", "cols", "n", "entries"}) {
    if (!j.contains(key)) throw InputError(where + ": missing key \"" + key + "\"");
  }
  for (const char* key : {"rows", "cols", "n"}) {
    if (!j[key].is_number_unsigned()) {
      throw InputError(where + "/" + key + ": must be a non-negative integer");
    }
  }
  const auto rows = j["rows"].get<std::size_t>();
  const auto cols = j["cols"].get<std::size_t>();
  const auto n = j["n"].get<std::size_t>();
  if (rows == 0 || cols == 0) throw InputError(where + ": rows and cols must be positive");
  const Json& entries = j["entries"];
  if (!entries.is_array() || entries.size() != rows) {
    throw InputError(where + "/entries: expected " + std::to_string(rows) + " rows");
  }
  PolyMatrix x(rows, cols, n);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string at = where + "/entries/" + std::to_string(r);
    if (!entries[r].is_array() || entries[r].size() != cols) {
      throw InputError(at + ": expected " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      x(r, c) = poly_from_json(entries[r][c], n, at + "/" + std::to_string(c));
    }
  }
  return x;
}

/// Parses JSON text; syntax errors are reported with line and column.
inline Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": JSON syntax error: " + e.what());
  }
}

}  // namespace exactpot
