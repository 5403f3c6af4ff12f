#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exactpot/construction.hpp"
#include "exactpot/exact_rank.hpp"
#include "exactpot/parallel.hpp"
#include "exactpot/random.hpp"

namespace exactpot {

using RationalPoint = std::vector<Rational>;

/// True iff A * B is the zero polynomial matrix.
inline bool verify_annihilation(const DiffOperator& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("annihilation check: A has " + std::to_string(a.cols()) + " columns, B has " +
                     std::to_string(b.rows()) + " rows");
  }
  return (a.symbol() * b).is_zero();
}

enum class ConstantRankVerdict { kYes, kNo, kUnknown };

inline const char* to_string(ConstantRankVerdict v) {
  switch (v) {
    case ConstantRankVerdict::kYes: return "yes";
    case ConstantRankVerdict::kNo: return "no";
    case ConstantRankVerdict::kUnknown: return "unknown";
  }
  return "unknown";
}

struct ExactnessFailure {
  RationalPoint point;
  std::size_t rank_a = 0;
  std::size_t rank_b = 0;
  bool a_r_vanishes = false;
};

struct ExactnessReport {
  std::string operator_id;
  std::size_t samples_tested = 0;
  std::size_t skipped = 0;  // origin points, outside the maximal-rank set by definition
  std::size_t generic_rank = 0;
  std::size_t cols = 0;
  std::vector<ExactnessFailure> failures;
  std::map<std::size_t, std::size_t> rank_histogram;  // rank A(xi) -> count
  ConstantRankVerdict constant_rank = ConstantRankVerdict::kUnknown;
  std::optional<RationalPoint> rank_drop_witness;

  /// Exact iff every failure sits where c_r vanishes.
  bool exact() const {
    for (const auto& f : failures)
      if (!f.a_r_vanishes) return false;
    return true;
  }
};

inline bool is_origin(std::span<const Rational> p) {
  for (const auto& x : p)
    if (x != 0) return false;
  return true;
}

/// Checks rank A(xi) + rank B(xi) = N at every point, recording failures
/// and whether c_r vanishes there. The origin is skipped.
inline ExactnessReport verify_exactness(const DiffOperator& a, const PolyMatrix& b,
                                        std::span<const RationalPoint> points, const std::string& id = "") {
  if (!verify_annihilation(a, b)) {
    throw PreconditionError("A * B is not identically zero; exactness is meaningless");
  }
  const auto coeffs = char_coeffs(gram(homogenize(a)));
  const std::size_t r = generic_rank(coeffs);
  const MultiPoly& a_r = coeffs[r];

  struct Sample {
    bool skipped = false;
    std::size_t rank_a = 0;
    std::size_t rank_b = 0;
    bool a_r_vanishes = false;
  };
  std::vector<Sample> samples(points.size());
  parallel_for(points.size(), [&](std::size_t k) {
    const auto& p = points[k];
    if (p.size() != a.num_vars()) throw InputError("sample point has wrong length");
    Sample& s = samples[k];
    if (is_origin(p)) {
      s.skipped = true;
      return;
    }
    s.rank_a = rank_at_point(a.symbol(), p);
    s.rank_b = rank_at_point(b, p);
    s.a_r_vanishes = a_r.eval(p) == 0;
  });

  ExactnessReport report;
  report.operator_id = id;
  report.generic_rank = r;
  report.cols = a.cols();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Sample& s = samples[k];
    if (s.skipped) {
      ++report.skipped;
      continue;
    }
    ++report.samples_tested;
    ++report.rank_histogram[s.rank_a];
    if (s.rank_a + s.rank_b != a.cols()) {
      report.failures.push_back({points[k], s.rank_a, s.rank_b, s.a_r_vanishes});
    }
    if (s.rank_a < r && !report.rank_drop_witness) report.rank_drop_witness = points[k];
  }
  if (report.rank_drop_witness) {
    report.constant_rank = ConstantRankVerdict::kNo;
  } else if (report.samples_tested > 0) {
    report.constant_rank = ConstantRankVerdict::kYes;
  }
  return report;
}

inline ExactnessReport verify_exactness(const DiffOperator& a, const PolyMatrix& b,
                                        const std::vector<RationalPoint>& points, const std::string& id = "") {
  return verify_exactness(a, b, std::span<const RationalPoint>(points), id);
}

/// Sample points for scanning: all +-unit vectors, then `samples` integer
/// vectors drawn uniformly from [-10, 10]^n without the origin.
inline std::vector<RationalPoint> scan_points(std::size_t n, std::size_t samples, std::uint64_t seed) {
  constexpr std::int64_t kBound = 10;
  std::vector<RationalPoint> pts;
  for (std::size_t k = 0; k < n; ++k) {
    for (int sign : {1, -1}) {
      RationalPoint p(n, Rational(0));
      p[k] = sign;
      pts.push_back(std::move(p));
    }
  }
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) pts.push_back(rng.nonzero_integer_point(n, kBound));
  return pts;
}

/// Scans for rank drops of A away from the origin. A "no" verdict carries a
/// witness; "yes" only means no drop was found among the samples.
inline ExactnessReport constant_rank_scan(const DiffOperator& a, std::size_t samples, std::uint64_t seed,
                                          const std::string& id = "") {
  if (samples < 1) throw InputError("constant_rank_scan needs at least one sample");
  const auto pot = potential(a);
  return verify_exactness(a, pot.b, scan_points(a.num_vars(), samples, seed), id);
}

inline Json point_to_json(std::span<const Rational> p) {
  Json out = Json::array();
  for (const auto& x : p) out.push_back(to_string(x));
  return out;
}

inline Json to_json(const ExactnessReport& report) {
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"point", point_to_json(f.point)},
                        {"rank_A", f.rank_a},
                        {"rank_B", f.rank_b},
                        {"a_r_vanishes", f.a_r_vanishes}});
  }
  Json histogram = Json::object();
  for (const auto& [rank, count] : report.rank_histogram) histogram[std::to_string(rank)] = count;
  Json out = {{"operator", report.operator_id},
              {"samples", report.samples_tested},
              {"skipped", report.skipped},
              {"generic_rank", report.generic_rank},
              {"N", report.cols},
              {"failures", std::move(failures)},
              {"rank_histogram", std::move(histogram)},
              {"verdict", report.exact() ? "exact" : "inexact"},
              {"constant_rank", to_string(report.constant_rank)}};
  if (report.rank_drop_witness) {
    out["rank_drop_witness"] = point_to_json(*report.rank_drop_witness);
  }
  if (report.constant_rank == ConstantRankVerdict::kYes) {
    out["constant_rank_note"] = "no rank drop found among the samples; sampling cannot prove constant rank";
  }
  return out;
}

}  // namespace exactpot
