#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "exactpot/construction.hpp"
#include "exactpot/grid_field.hpp"
#include "exactpot/numeric_linalg.hpp"
#include "exactpot/parallel.hpp"
#include "exactpot/verification.hpp"

namespace exactpot {

/// A polynomial matrix compiled for fast evaluation at complex points.
class ComplexSymbol {
 public:
  ComplexSymbol() = default;
  explicit ComplexSymbol(const PolyMatrix& x) : rows_(x.rows()), cols_(x.cols()), n_(x.num_vars()) {
    entries_.resize(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        auto& terms = entries_[i * cols_ + j];
        for (const auto& [e, c] : x(i, j).terms()) {
          terms.push_back({c.get_d(), e});
          for (auto k : e) max_power_ = std::max<std::size_t>(max_power_, k);
        }
      }
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t num_vars() const { return n_; }

  ComplexMatrix eval(std::span<const Complex> z) const {
    if (z.size() != n_) throw InputError("symbol evaluation: point has wrong length");
    std::vector<std::vector<Complex>> powers(n_, std::vector<Complex>(max_power_ + 1, Complex(1.0)));
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t p = 1; p <= max_power_; ++p) powers[k][p] = powers[k][p - 1] * z[k];
    ComplexMatrix out(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        Complex s(0.0);
        for (const auto& t : entries_[i * cols_ + j]) {
          Complex m(t.coeff);
          for (std::size_t k = 0; k < n_; ++k) m *= powers[k][t.exponent[k]];
          s += m;
        }
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      }
    }
    return out;
  }

 private:
  struct Term {
    double coeff;
    Exponent exponent;
  };
  std::size_t rows_ = 0, cols_ = 0, n_ = 0;
  std::size_t max_power_ = 0;
  std::vector<std::vector<Term>> entries_;
};

/// zeta = 2 pi i kappa.
inline std::vector<Complex> fourier_point(std::span<const double> kappa) {
  std::vector<Complex> z(kappa.size());
  for (std::size_t a = 0; a < kappa.size(); ++a) z[a] = Complex(0.0, 2.0 * std::numbers::pi * kappa[a]);
  return z;
}

inline std::vector<Complex> fourier_point(std::span<const std::int64_t> kappa) {
  std::vector<double> k(kappa.begin(), kappa.end());
  return fourier_point(std::span<const double>(k));
}

struct FrequencyMultipliers {
  ComplexMatrix projector;  // N x N, onto ker A(zeta)
  ComplexMatrix a_pinv;     // N x m
  ComplexMatrix b_pinv;     // N x N
};

/// Compiled symbols of A, its homogenization and B. at() evaluates the
/// multipliers at one complex point and reports the numerical rank of the Gram.
struct SymbolSet {
  ComplexSymbol a;
  ComplexSymbol a_tilde;
  ComplexSymbol b;
  std::size_t rank = 0;

  SymbolSet() = default;
  SymbolSet(const DiffOperator& op, const PotentialResult& pot)
      : a(op.symbol()), a_tilde(homogenize(op).symbol()), b(pot.b), rank(pot.rank) {}

  FrequencyMultipliers at(std::span<const Complex> zeta, double tol, bool* ambiguous = nullptr,
                          std::size_t* numeric_rank = nullptr) const {
    const ComplexMatrix at = a_tilde.eval(zeta);
    const ComplexMatrix m = at.adjoint() * at;
    const auto proj = projector_numeric<Complex>(m, tol);
    const auto ap = pseudoinverse_numeric<Complex>(a.eval(zeta), tol);
    const auto bp = pseudoinverse_numeric<Complex>(b.eval(zeta), tol);
    if (ambiguous) *ambiguous = proj.ambiguous_gap || ap.ambiguous_gap || bp.ambiguous_gap;
    if (numeric_rank) *numeric_rank = static_cast<std::size_t>(proj.rank);
    return {proj.projector, ap.pinv, bp.pinv};
  }
};

/// Per-frequency multipliers on a fixed grid. Immutable once built.
struct MultiplierPlan {
  std::vector<std::size_t> shape;
  std::size_t n = 0;
  std::size_t channels = 0;  // N
  std::size_t rank = 0;
  std::vector<std::uint64_t> row_degrees;
  SymbolSet symbols;
  std::vector<FrequencyMultipliers> multipliers;  // indexed like GridField points
  std::size_t ambiguous_frequencies = 0;
  double tol = kDefaultSpectralTol;
  std::string zero_frequency_policy = "Proj(0) = I, A+(0) = 0, B+(0) = 0";

  std::size_t points() const { return multipliers.size(); }
};

struct PlanOptions {
  double tol = kDefaultSpectralTol;
  std::size_t scan_samples = 200;
  std::uint64_t scan_seed = 0;
};

inline std::string format_frequency(std::span<const std::int64_t> kappa) {
  std::string s = "(";
  for (std::size_t a = 0; a < kappa.size(); ++a) s += (a ? "," : "") + std::to_string(kappa[a]);
  return s + ")";
}

inline MultiplierPlan build_multiplier_plan(const DiffOperator& a, const PotentialResult& pot,
                                            const std::vector<std::size_t>& shape, const PlanOptions& options = {}) {
  if (shape.size() != a.num_vars()) {
    throw InputError("grid has " + std::to_string(shape.size()) + " axes but the operator has n = " +
                     std::to_string(a.num_vars()));
  }
  if (pot.b.rows() != a.cols()) throw InputError("potential does not match the operator");
  const auto scan = constant_rank_scan(a, options.scan_samples, options.scan_seed);
  if (scan.constant_rank == ConstantRankVerdict::kNo) {
    std::string where;
    for (const auto& x : *scan.rank_drop_witness) where += (where.empty() ? "" : ",") + to_string(x);
    throw PreconditionError("operator is not of constant rank: rank A(xi) drops below " +
                            std::to_string(scan.generic_rank) + " at xi = (" + where +
                            "); the Fourier multipliers are not defined there");
  }

  MultiplierPlan plan;
  plan.shape = shape;
  plan.n = shape.size();
  plan.channels = a.cols();
  plan.rank = pot.rank;
  plan.row_degrees.assign(a.row_degrees().begin(), a.row_degrees().end());
  plan.symbols = SymbolSet(a, pot);
  plan.tol = options.tol;

  const GridField layout(shape, 1);
  plan.multipliers.resize(layout.points());
  std::vector<char> ambiguous(layout.points(), 0);
  const auto big_n = static_cast<Eigen::Index>(a.cols());
  const auto m = static_cast<Eigen::Index>(a.rows());
  parallel_for(layout.points(), [&](std::size_t p) {
    const auto kappa = layout.frequency(p);
    bool is_zero = true;
    for (auto k : kappa) is_zero = is_zero && k == 0;
    if (is_zero) {
      plan.multipliers[p] = {ComplexMatrix::Identity(big_n, big_n), ComplexMatrix::Zero(big_n, m),
                             ComplexMatrix::Zero(big_n, big_n)};
      return;
    }
    bool amb = false;
    std::size_t numeric_rank = 0;
    plan.multipliers[p] = plan.symbols.at(fourier_point(kappa), options.tol, &amb, &numeric_rank);
    if (numeric_rank != plan.rank) {
      throw RankDropError("numerical rank " + std::to_string(numeric_rank) + " differs from generic rank " +
                          std::to_string(plan.rank) + " at frequency kappa = " + format_frequency(kappa));
    }
    ambiguous[p] = amb ? 1 : 0;
  });
  for (char c : ambiguous) plan.ambiguous_frequencies += c;
  return plan;
}

/// Plans keyed by the canonical JSON of the operator, grid shape and tolerance.
class PlanCache {
 public:
  std::shared_ptr<const MultiplierPlan> get(const DiffOperator& a, const PotentialResult& pot,
                                            const std::vector<std::size_t>& shape, const PlanOptions& options = {}) {
    const auto key = key_of(a, shape, options);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    }
    auto plan = std::make_shared<const MultiplierPlan>(build_multiplier_plan(a, pot, shape, options));
    std::lock_guard<std::mutex> lock(mutex_);
    return plans_.emplace(key, std::move(plan)).first->second;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return plans_.size();
  }

 private:
  static std::string key_of(const DiffOperator& a, const std::vector<std::size_t>& shape, const PlanOptions& o) {
    Json j = {{"op", to_json(a)}, {"shape", shape}, {"tol", o.tol}};
    return j.dump();
  }

  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const MultiplierPlan>> plans_;
};

}  // namespace exactpot
