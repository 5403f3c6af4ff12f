#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "exactpot/errors.hpp"
#include "exactpot/rational.hpp"

namespace exactpot {

using Exponent = std::vector<std::uint32_t>;

inline std::uint64_t total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

/// Graded lexicographic order: total degree first, then lexicographic with
/// the first variable most significant.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

namespace detail {

template <class T>
T coefficient_as(const Rational& c) {
  if constexpr (std::is_same_v<T, Rational>) {
    return c;
  } else {
    return T(c.get_d());
  }
}

}  // namespace detail

/// Multivariate polynomial in n variables with exact rational coefficients.
///
/// Terms are kept in a map ordered by GrlexLess; zero coefficients are
/// never stored, so the zero polynomial is the empty map and structural
/// equality is mathematical equality.
class MultiPoly {
 public:
  using TermMap = std::map<Exponent, Rational, GrlexLess>;

  MultiPoly() = default;
  explicit MultiPoly(std::size_t num_vars) : n_(num_vars) {}

  static MultiPoly constant(std::size_t num_vars, const Rational& c) {
    MultiPoly p(num_vars);
    p.add_term(Exponent(num_vars, 0), c);
    return p;
  }

  /// The coordinate function xi_k (zero based).
  static MultiPoly variable(std::size_t num_vars, std::size_t k) {
    if (k >= num_vars) throw InputError("variable index out of range");
    Exponent e(num_vars, 0);
    e[k] = 1;
    MultiPoly p(num_vars);
    p.add_term(e, Rational(1));
    return p;
  }

  static MultiPoly monomial(const Exponent& e, const Rational& c) {
    MultiPoly p(e.size());
    p.add_term(e, c);
    return p;
  }

  std::size_t num_vars() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Adds c * xi^e, dropping the term if the coefficient cancels.
  void add_term(const Exponent& e, const Rational& c) {
    if (e.size() != n_) throw InputError("exponent length does not match variable count");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// Largest total degree of a stored term; nullopt for the zero polynomial.
  std::optional<std::uint64_t> degree() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.rbegin()->first);
  }

  /// Leading coefficient in grlex order; zero for the zero polynomial.
  Rational leading_coefficient() const {
    return terms_.empty() ? Rational(0) : terms_.rbegin()->second;
  }

  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }

  MultiPoly& operator+=(const MultiPoly& q) {
    check_compatible(q);
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& q) {
    check_compatible(q);
    for (const auto& [e, c] : q.terms_) add_term(e, -c);
    return *this;
  }
  MultiPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
    } else {
      for (auto& [e, c] : terms_) c *= s;
    }
    return *this;
  }

  friend MultiPoly operator+(MultiPoly p, const MultiPoly& q) { return p += q; }
  friend MultiPoly operator-(MultiPoly p, const MultiPoly& q) { return p -= q; }
  friend MultiPoly operator*(MultiPoly p, const Rational& s) { return p *= s; }
  friend MultiPoly operator*(const Rational& s, MultiPoly p) { return p *= s; }

  friend MultiPoly operator*(const MultiPoly& p, const MultiPoly& q) {
    p.check_compatible(q);
    MultiPoly r(p.n_);
    if (p.is_zero() || q.is_zero()) return r;
    Exponent e(p.n_);
    for (const auto& [ep, cp] : p.terms_) {
      for (const auto& [eq, cq] : q.terms_) {
        for (std::size_t k = 0; k < p.n_; ++k) e[k] = ep[k] + eq[k];
        r.add_term(e, cp * cq);
      }
    }
    return r;
  }

  friend bool operator==(const MultiPoly& p, const MultiPoly& q) {
    return p.n_ == q.n_ && p.terms_ == q.terms_;
  }

  /// Evaluates at a point. Exact for Rational, floating otherwise
  /// (double or std::complex<double>).
  template <class T>
  T eval(std::span<const T> point) const {
    if (point.size() != n_) {
      throw InputError("evaluation point has length " + std::to_string(point.size()) +
                       ", polynomial has " + std::to_string(n_) + " variables");
    }
    T acc = detail::coefficient_as<T>(Rational(0));
    if (terms_.empty()) return acc;
    // powers[k][d] = point[k]^d
    const auto max_deg = *degree();
    std::vector<std::vector<T>> powers(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      powers[k].reserve(max_deg + 1);
      powers[k].push_back(detail::coefficient_as<T>(Rational(1)));
      for (std::uint64_t d = 1; d <= max_deg; ++d) powers[k].push_back(powers[k].back() * point[k]);
    }
    for (const auto& [e, c] : terms_) {
      T term = detail::coefficient_as<T>(c);
      for (std::size_t k = 0; k < n_; ++k) {
        if (e[k] != 0) term *= powers[k][e[k]];
      }
      acc += term;
    }
    return acc;
  }

  template <class T>
  T eval(const std::vector<T>& point) const {
    return eval(std::span<const T>(point));
  }

  /// Human readable form, e.g. "xi1^2 - xi2^2".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      const bool negative = c < 0;
      const Rational mag = negative ? Rational(-c) : c;
      if (first) {
        if (negative) out += "-";
      } else {
        out += negative ? " - " : " + ";
      }
      first = false;
      const bool constant_term = total_degree(e) == 0;
      std::string mono;
      for (std::size_t k = 0; k < n_; ++k) {
        if (e[k] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += "xi" + std::to_string(k + 1);
        if (e[k] > 1) mono += "^" + std::to_string(e[k]);
      }
      if (constant_term) {
        out += to_string(mag);
      } else if (mag == 1) {
        out += mono;
      } else {
        out += to_string(mag) + "*" + mono;
      }
    }
    return out;
  }

 private:
  void check_compatible(const MultiPoly& q) const {
    if (n_ != q.n_) {
      throw InputError("variable-count mismatch: " + std::to_string(n_) + " vs " +
                       std::to_string(q.n_));
    }
  }

  std::size_t n_ = 0;
  TermMap terms_;
};

inline MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q) { return p * q; }

/// Result of a homogeneity audit.
struct Homogeneity {
  enum class Kind { kHomogeneous, kInhomogeneous, kZero };
  Kind kind = Kind::kZero;
  std::uint64_t degree = 0;  // meaningful for kHomogeneous only

  bool homogeneous() const { return kind == Kind::kHomogeneous; }
  bool zero() const { return kind == Kind::kZero; }
  friend bool operator==(const Homogeneity&, const Homogeneity&) = default;

  static Homogeneity of_degree(std::uint64_t d) { return {Kind::kHomogeneous, d}; }
  static Homogeneity inhomogeneous() { return {Kind::kInhomogeneous, 0}; }
  static Homogeneity zero_poly() { return {Kind::kZero, 0}; }
};

inline Homogeneity homogeneity_degree(const MultiPoly& p) {
  if (p.is_zero()) return Homogeneity::zero_poly();
  const auto d = total_degree(p.terms().begin()->first);
  for (const auto& [e, c] : p.terms()) {
    if (total_degree(e) != d) return Homogeneity::inhomogeneous();
  }
  return Homogeneity::of_degree(d);
}

/// All exponent vectors of total degree d in n variables, grlex descending
/// (xi1^d first).
inline std::vector<Exponent> exponents_of_degree(std::size_t n, std::uint32_t d) {
  std::vector<Exponent> out;
  Exponent e(n, 0);
  auto rec = [&](auto&& self, std::size_t k, std::uint32_t remaining) -> void {
    if (k + 1 == n) {
      e[k] = remaining;
      out.push_back(e);
      return;
    }
    for (std::uint32_t a = remaining + 1; a-- > 0;) {
      e[k] = a;
      self(self, k + 1, remaining - a);
    }
  };
  if (n == 0) {
    if (d == 0) out.push_back(e);
    return out;
  }
  rec(rec, 0, d);
  return out;
}

}  // namespace exactpot
