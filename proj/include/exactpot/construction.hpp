#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exactpot/errors.hpp"
#include "exactpot/exact_rank.hpp"
#include "exactpot/interchange.hpp"
#include "exactpot/multipoly.hpp"
#include "exactpot/poly_matrix.hpp"

namespace exactpot {

/// A matrix-valued polynomial symbol whose rows are each homogeneous.
///
/// Construction validates row degrees instead of trusting them: every
/// nonzero entry of row i must be homogeneous of the same degree h_i. Zero
/// rows carry no constraint and are dropped (with a warning) unless the
/// whole symbol vanishes, in which case it is kept as the zero operator.
/// Rows are then stably sorted so that h_1 <= ... <= h_m.
class DiffOperator {
 public:
  static DiffOperator from_symbol(const PolyMatrix& symbol,
                                  std::optional<std::vector<std::uint64_t>> declared_row_degrees = {},
                                  std::optional<std::vector<std::uint64_t>> col_degrees = {}) {
    if (symbol.rows() == 0 || symbol.cols() == 0) throw InputError("operator symbol must be non-empty");
    if (declared_row_degrees && declared_row_degrees->size() != symbol.rows()) {
      throw InputError("row_degrees has " + std::to_string(declared_row_degrees->size()) +
                       " entries, symbol has " + std::to_string(symbol.rows()) + " rows");
    }
    DiffOperator op;
    struct RowInfo {
      std::size_t source;
      std::uint64_t degree;
    };
    std::vector<RowInfo> kept;
    for (std::size_t i = 0; i < symbol.rows(); ++i) {
      std::optional<std::uint64_t> deg;
      for (std::size_t j = 0; j < symbol.cols(); ++j) {
        const auto h = homogeneity_degree(symbol(i, j));
        if (h.zero()) continue;
        if (!h.homogeneous()) {
          throw InputError("row " + std::to_string(i) + ", column " + std::to_string(j) +
                           ": entry " + symbol(i, j).str() + " is not homogeneous");
        }
        if (deg && *deg != h.degree) {
          throw InputError("row " + std::to_string(i) + " mixes degrees " + std::to_string(*deg) +
                           " and " + std::to_string(h.degree));
        }
        deg = h.degree;
      }
      if (!deg) {
        op.warnings_.push_back("row " + std::to_string(i) + " is identically zero and was dropped");
        continue;
      }
      if (declared_row_degrees && (*declared_row_degrees)[i] != *deg) {
        throw InputError("row " + std::to_string(i) + " declared degree " +
                         std::to_string((*declared_row_degrees)[i]) + " but entries have degree " +
                         std::to_string(*deg));
      }
      kept.push_back({i, *deg});
    }

    if (kept.empty()) {
      op.warnings_.clear();
      op.zero_ = true;
      op.symbol_ = PolyMatrix(1, symbol.cols(), symbol.num_vars());
      op.row_degrees_ = {0};
      op.source_rows_ = {0};
    } else {
      std::stable_sort(kept.begin(), kept.end(),
                       [](const RowInfo& a, const RowInfo& b) { return a.degree < b.degree; });
      op.symbol_ = PolyMatrix(kept.size(), symbol.cols(), symbol.num_vars());
      for (std::size_t r = 0; r < kept.size(); ++r) {
        for (std::size_t j = 0; j < symbol.cols(); ++j) op.symbol_(r, j) = symbol(kept[r].source, j);
        op.row_degrees_.push_back(kept[r].degree);
        op.source_rows_.push_back(kept[r].source);
      }
    }

    if (col_degrees) {
      if (col_degrees->size() != symbol.cols()) throw InputError("col_degrees length does not match columns");
      for (std::size_t j = 0; j < symbol.cols(); ++j) {
        for (std::size_t i = 0; i < symbol.rows(); ++i) {
          const auto h = homogeneity_degree(symbol(i, j));
          if (!h.zero() && (!h.homogeneous() || h.degree != (*col_degrees)[j])) {
            throw InputError("column " + std::to_string(j) + " is not homogeneous of declared degree " +
                             std::to_string((*col_degrees)[j]));
          }
        }
      }
      op.col_degrees_ = std::move(col_degrees);
    }
    return op;
  }

  const PolyMatrix& symbol() const { return symbol_; }
  std::span<const std::uint64_t> row_degrees() const { return row_degrees_; }
  std::uint64_t max_row_degree() const { return row_degrees_.back(); }
  const std::optional<std::vector<std::uint64_t>>& col_degrees() const { return col_degrees_; }
  /// Index of each stored row in the symbol the operator was built from.
  std::span<const std::size_t> source_rows() const { return source_rows_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool is_zero() const { return zero_; }
  std::size_t rows() const { return symbol_.rows(); }
  std::size_t cols() const { return symbol_.cols(); }
  std::size_t num_vars() const { return symbol_.num_vars(); }

 private:
  DiffOperator() = default;

  PolyMatrix symbol_;
  std::vector<std::uint64_t> row_degrees_;
  std::vector<std::size_t> source_rows_;
  std::optional<std::vector<std::uint64_t>> col_degrees_;
  std::vector<std::string> warnings_;
  bool zero_ = false;
};

/// Column degrees of a matrix whose every column is homogeneous (zero
/// entries ignored); nullopt when some column mixes degrees. An all-zero
/// column reports degree 0.
inline std::optional<std::vector<std::uint64_t>> column_degrees(const PolyMatrix& x) {
  std::vector<std::uint64_t> out(x.cols(), 0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::optional<std::uint64_t> deg;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto h = homogeneity_degree(x(i, j));
      if (h.zero()) continue;
      if (!h.homogeneous() || (deg && *deg != h.degree)) return std::nullopt;
      deg = h.degree;
    }
    out[j] = deg.value_or(0);
  }
  return out;
}

/// Lifts every row to degree h_m: row i is replaced by the rows
/// A_i(xi) * xi^alpha for all multi-indices |alpha| = h_m - h_i. The
/// kernel is unchanged at every point.
inline DiffOperator homogenize(const DiffOperator& a) {
  if (a.is_zero()) return a;
  const auto hm = a.max_row_degree();
  if (std::all_of(a.row_degrees().begin(), a.row_degrees().end(),
                  [hm](std::uint64_t h) { return h == hm; })) {
    return a;
  }
  const auto& sym = a.symbol();
  std::vector<std::vector<MultiPoly>> rows;
  for (std::size_t i = 0; i < sym.rows(); ++i) {
    const auto lift = static_cast<std::uint32_t>(hm - a.row_degrees()[i]);
    bool nonzero = false;
    for (std::size_t j = 0; j < sym.cols(); ++j) nonzero = nonzero || !sym(i, j).is_zero();
    if (!nonzero) throw InputError("row " + std::to_string(i) + " is zero; its degree is undefined");
    for (const auto& alpha : exponents_of_degree(sym.num_vars(), lift)) {
      const MultiPoly factor = MultiPoly::monomial(alpha, Rational(1));
      std::vector<MultiPoly> row;
      for (std::size_t j = 0; j < sym.cols(); ++j) row.push_back(sym(i, j) * factor);
      rows.push_back(std::move(row));
    }
  }
  PolyMatrix lifted(rows.size(), sym.cols(), sym.num_vars());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < sym.cols(); ++j) lifted(r, j) = rows[r][j];
  return DiffOperator::from_symbol(lifted);
}

/// M = A^T A for a row-homogenized symbol.
inline PolyMatrix gram(const DiffOperator& a_tilde) {
  return a_tilde.symbol().transpose() * a_tilde.symbol();
}

/// Characteristic coefficients c_0..c_N with det(tI - M) = sum c_i t^(N-i),
/// by the Faddeev-LeVerrier recursion
///   M_1 = I, c_k = -tr(M M_k) / k, M_{k+1} = M M_k + c_k I.
/// Only polynomial products and exact division by the integer k occur.
inline std::vector<MultiPoly> char_coeffs(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("char_coeffs needs a square matrix");
  const std::size_t size = m.rows();
  const std::size_t n = m.num_vars();
  std::vector<MultiPoly> c;
  c.reserve(size + 1);
  c.push_back(MultiPoly::constant(n, 1));
  PolyMatrix mk = PolyMatrix::identity(size, n);
  for (std::size_t k = 1; k <= size; ++k) {
    const PolyMatrix product = m * mk;
    MultiPoly ck = product.trace() * Rational(Rational(-1) / Rational(static_cast<long>(k)));
    if (k < size) mk = product.plus_diagonal(ck);
    c.push_back(std::move(ck));
  }
  return c;
}

/// r = max{ i : c_i is not identically zero }.
inline std::size_t generic_rank(std::span<const MultiPoly> coeffs) {
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    if (!coeffs[i].is_zero()) return i;
  }
  return 0;
}

/// Q(M) = sum_{i=0}^{r} c_{r-i} M^i, evaluated by Horner's scheme.
inline PolyMatrix annihilating_polynomial(const PolyMatrix& m, std::span<const MultiPoly> coeffs,
                                          std::size_t r) {
  PolyMatrix q = PolyMatrix::identity(m.rows(), m.num_vars());
  q = coeffs[0] * q;
  for (std::size_t j = 1; j <= r; ++j) q = (q * m).plus_diagonal(coeffs[j]);
  return q;
}

/// Scales a polynomial matrix by a positive rational so that its
/// coefficients become coprime integers.
inline PolyMatrix reduce_content(const PolyMatrix& x) {
  BigInt den_lcm = 1;
  BigInt num_gcd = 0;
  for (const auto& p : x.entries()) {
    for (const auto& [e, c] : p.terms()) {
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
    }
  }
  if (num_gcd == 0) return x;
  // gcd of numerators of the scaled coefficients c * den_lcm
  BigInt g = 0;
  for (const auto& p : x.entries()) {
    for (const auto& [e, c] : p.terms()) {
      const BigInt scaled = c.get_num() * (den_lcm / c.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_mpz_t());
    }
  }
  Rational factor(den_lcm, g);
  factor.canonicalize();
  return factor * x;
}

struct PotentialResult {
  PolyMatrix b;                     ///< N x N potential, A * B == 0
  std::size_t rank = 0;             ///< generic rank r
  std::vector<MultiPoly> char_coeffs;
  MultiPoly a_r;                    ///< c_r; nonzero exactly on the maximal-rank set
  std::optional<std::uint64_t> degree;  ///< nullopt when B is the zero matrix
  std::uint64_t max_row_degree = 0;
  std::vector<std::string> warnings;
};

struct PotentialOptions {
  bool reduce_content = false;
};

/// Potential operator B = Q(M) for M = A~^T A~, where Q(t) = det(tI - M) / t^(N-r).
/// B is homogeneous of degree 2 r h_m in every nonzero entry and
/// im B(xi) = ker A(xi) wherever c_r(xi) != 0.
inline PotentialResult potential(const DiffOperator& a, const PotentialOptions& options = {}) {
  const DiffOperator lifted = homogenize(a);
  const PolyMatrix m = gram(lifted);
  PotentialResult res;
  res.char_coeffs = char_coeffs(m);
  res.rank = generic_rank(res.char_coeffs);
  res.a_r = res.char_coeffs[res.rank];
  res.max_row_degree = a.max_row_degree();
  res.b = annihilating_polynomial(m, res.char_coeffs, res.rank);
  if (options.reduce_content) res.b = reduce_content(res.b);
  res.warnings = a.warnings();

  if (!res.b.is_zero()) {
    const std::uint64_t expected = 2 * res.rank * res.max_row_degree;
    for (const auto& p : res.b.entries()) {
      const auto h = homogeneity_degree(p);
      if (!h.zero() && !(h.homogeneous() && h.degree == expected)) {
        throw std::logic_error("potential entry " + p.str() + " is not homogeneous of degree " +
                               std::to_string(expected));
      }
    }
    res.degree = expected;
  }
  return res;
}

inline Json to_json(const PotentialResult& res) {
  Json coeffs = Json::array();
  for (const auto& c : res.char_coeffs) coeffs.push_back(to_json(c));
  Json out = {{"B", to_json(res.b)}, {"r", res.rank}, {"char_coeffs", std::move(coeffs)}};
  if (res.degree) {
    out["degree"] = *res.degree;
  } else {
    out["degree"] = "zero matrix";
  }
  return out;
}

/// numerator(xi) / denominator(xi).
class RationalMatrixFunction {
 public:
  RationalMatrixFunction(PolyMatrix numerator, MultiPoly denominator)
      : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
    if (denominator_.is_zero()) throw InputError("denominator is identically zero");
    if (denominator_.num_vars() != numerator_.num_vars()) throw InputError("variable-count mismatch");
    // Normalize sign so the grlex-leading coefficient of the denominator is positive.
    if (denominator_.leading_coefficient() < 0) {
      numerator_ = Rational(-1) * numerator_;
      denominator_ = -denominator_;
    }
  }

  const PolyMatrix& numerator() const { return numerator_; }
  const MultiPoly& denominator() const { return denominator_; }

  /// Exact evaluation; throws PreconditionError where the denominator vanishes.
  RationalMatrix eval(std::span<const Rational> point) const {
    const Rational d = denominator_.eval(point);
    if (d == 0) throw PreconditionError("denominator vanishes at the evaluation point");
    RationalMatrix x = numerator_.eval(point);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) /= d;
    return x;
  }
  RationalMatrix eval(const std::vector<Rational>& point) const {
    return eval(std::span<const Rational>(point));
  }

 private:
  PolyMatrix numerator_;
  MultiPoly denominator_;
};

inline Json to_json(const RationalMatrixFunction& f) {
  return {{"numerator", to_json(f.numerator())}, {"denominator", to_json(f.denominator())}};
}

/// Orthogonal projector onto ker A(xi) as Q(M) / c_r.
inline RationalMatrixFunction kernel_projection_symbolic(const DiffOperator& a) {
  const PolyMatrix m = gram(homogenize(a));
  const auto c = char_coeffs(m);
  const auto r = generic_rank(c);
  return RationalMatrixFunction(annihilating_polynomial(m, c, r), c[r]);
}

/// Moore-Penrose pseudoinverse as a rational matrix function:
///   P^+ = -(1/a_r) sum_{i=1}^{r} a_{r-i} P^T (P P^T)^(i-1),
/// with a_i the characteristic coefficients of P P^T.
inline RationalMatrixFunction decell_pseudoinverse_symbolic(const PolyMatrix& p) {
  const std::size_t n = p.num_vars();
  if (p.is_zero()) return RationalMatrixFunction(PolyMatrix(p.cols(), p.rows(), n), MultiPoly::constant(n, 1));
  const PolyMatrix pt = p.transpose();
  const PolyMatrix m = p * pt;
  const auto c = char_coeffs(m);
  const auto r = generic_rank(c);
  // S = sum_{j=0}^{r-1} c_j M^(r-1-j)
  PolyMatrix s = c[0] * PolyMatrix::identity(m.rows(), n);
  for (std::size_t j = 1; j < r; ++j) s = (s * m).plus_diagonal(c[j]);
  return RationalMatrixFunction(Rational(-1) * (pt * s), c[r]);
}

/// Operator file: either a bare interchange matrix or
/// {"id": ..., "symbol": matrix, "row_degrees": [...], "col_degrees": [...]}.
inline DiffOperator operator_from_json(const Json& j) {
  if (j.is_object() && j.contains("symbol")) {
    std::optional<std::vector<std::uint64_t>> rows, cols;
    auto read_degrees = [&](const char* key) -> std::optional<std::vector<std::uint64_t>> {
      if (!j.contains(key)) return std::nullopt;
      const Json& d = j[key];
      if (!d.is_array()) throw InputError(std::string("/") + key + ": must be an array");
      std::vector<std::uint64_t> out;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_number_unsigned()) {
          throw InputError(std::string("/") + key + "/" + std::to_string(i) + ": must be a non-negative integer");
        }
        out.push_back(d[i].get<std::uint64_t>());
      }
      return out;
    };
    rows = read_degrees("row_degrees");
    cols = read_degrees("col_degrees");
    return DiffOperator::from_symbol(matrix_from_json(j["symbol"], "/symbol"), rows, cols);
  }
  return DiffOperator::from_symbol(matrix_from_json(j));
}

inline Json to_json(const DiffOperator& a, const std::string& id = "") {
  Json out = {{"symbol", to_json(a.symbol())},
              {"row_degrees", std::vector<std::uint64_t>(a.row_degrees().begin(), a.row_degrees().end())}};
  if (!id.empty()) out["id"] = id;
  if (a.col_degrees()) out["col_degrees"] = *a.col_degrees();
  return out;
}

}  // namespace exactpot
