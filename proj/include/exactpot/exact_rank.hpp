#pragma once

#include <span>
#include <utility>
#include <vector>

#include "exactpot/poly_matrix.hpp"
#include "exactpot/rational.hpp"

namespace exactpot {

/// Exact rank of a rational matrix by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled by the lcm of its denominators so elimination
/// runs over the integers; every Bareiss division is exact.
inline std::size_t exact_rank(const RationalMatrix& a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::vector<BigInt>> m(rows, std::vector<BigInt>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt scale = 1;
    for (std::size_t j = 0; j < cols; ++j) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), a(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < cols; ++j) m[i][j] = a(i, j).get_num() * (scale / a(i, j).get_den());
  }

  std::size_t rank = 0;
  BigInt prev_pivot = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    const BigInt& p = m[rank][col];
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        m[i][j] = (p * m[i][j] - m[i][col] * m[rank][j]);
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev_pivot.get_mpz_t());
      }
      m[i][col] = 0;
    }
    prev_pivot = p;
    ++rank;
  }
  return rank;
}

/// Exact rank of X(point) for a rational point.
inline std::size_t rank_at_point(const PolyMatrix& x, std::span<const Rational> point) {
  return exact_rank(x.eval(point));
}

inline std::size_t rank_at_point(const PolyMatrix& x, const std::vector<Rational>& point) {
  return rank_at_point(x, std::span<const Rational>(point));
}

}  // namespace exactpot
