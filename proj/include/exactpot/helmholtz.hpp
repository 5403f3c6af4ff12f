#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "exactpot/grid_field.hpp"
#include "exactpot/multiplier_plan.hpp"

namespace exactpot {

/// v = v1 + v2 with A v1 = 0, and v1 = B u away from the mean.
struct HelmholtzSplit {
  GridField v1;
  GridField v2;
  GridField u;
};

namespace detail {

using ComplexVector = Eigen::VectorXcd;

inline ComplexVector point_vector(const GridField& f, std::size_t p) {
  const auto s = f.point(p);
  ComplexVector v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t c = 0; c < s.size(); ++c) v(static_cast<Eigen::Index>(c)) = s[c];
  return v;
}

inline void store_point(GridField& f, std::size_t p, const ComplexVector& v) {
  for (Eigen::Index c = 0; c < v.size(); ++c) f.at(p, static_cast<std::size_t>(c)) = v(c);
}

inline bool is_zero_frequency(std::span<const std::int64_t> kappa) {
  for (auto k : kappa)
    if (k != 0) return false;
  return true;
}

/// |2 pi kappa|
inline double frequency_magnitude(std::span<const std::int64_t> kappa) {
  double s = 0.0;
  for (auto k : kappa) s += static_cast<double>(k) * static_cast<double>(k);
  return 2.0 * std::numbers::pi * std::sqrt(s);
}

inline void require_layout(const MultiplierPlan& plan, const GridField& v) {
  if (v.shape() != plan.shape || v.channels() != plan.channels) {
    throw InputError("field layout does not match the multiplier plan");
  }
}

}  // namespace detail

/// Frequency-wise split: v1^ = Proj v^, v2^ = A+ (A v)^, u^ = B+ v1^.
/// The mean of v stays in v1; u has zero mean.
inline HelmholtzSplit helmholtz_decompose(const MultiplierPlan& plan, const GridField& v) {
  detail::require_layout(plan, v);
  const GridField vh = fourier_coefficients(v);
  GridField v1h(v.shape(), v.channels()), v2h(v.shape(), v.channels()), uh(v.shape(), v.channels());
  parallel_for(vh.points(), [&](std::size_t p) {
    const auto x = detail::point_vector(vh, p);
    const auto& mult = plan.multipliers[p];
    const detail::ComplexVector y1 = mult.projector * x;
    detail::store_point(v1h, p, y1);
    const auto kappa = vh.frequency(p);
    if (detail::is_zero_frequency(kappa)) return;
    const ComplexMatrix a = plan.symbols.a.eval(fourier_point(kappa));
    detail::store_point(v2h, p, mult.a_pinv * (a * x));
    detail::store_point(uh, p, mult.b_pinv * y1);
  });
  return {synthesize(v1h), synthesize(v2h), synthesize(uh)};
}

/// sqrt(sum over kappa of w(kappa) |f^(kappa)|^2) for one channel of a
/// coefficient field (all channels when channel is empty), with
/// w = |2 pi kappa|^(2s) for kappa != 0. The zero frequency counts only for s = 0.
inline double weighted_coefficient_norm(const GridField& coeffs, double s,
                                        std::optional<std::size_t> channel = std::nullopt) {
  double total = 0.0;
  for (std::size_t p = 0; p < coeffs.points(); ++p) {
    const auto kappa = coeffs.frequency(p);
    double w;
    if (detail::is_zero_frequency(kappa)) {
      w = s == 0.0 ? 1.0 : 0.0;
    } else {
      w = std::pow(detail::frequency_magnitude(kappa), 2.0 * s);
    }
    if (w == 0.0) continue;
    double mass = 0.0;
    if (channel) {
      mass = std::norm(coeffs.at(p, *channel));
    } else {
      for (const auto& z : coeffs.point(p)) mass += std::norm(z);
    }
    total += w * mass;
  }
  return std::sqrt(total);
}

struct SobolevNorm {
  double value = 0.0;      // over kappa != 0
  double mean_norm = 0.0;  // |f^(0)|
  bool nonzero_mean = false;
};

inline constexpr double kMeanTolerance = 1e-12;

inline SobolevNorm sobolev_negative_norm_of_coefficients(const GridField& coeffs, std::uint64_t h) {
  SobolevNorm out;
  double value = 0.0;
  for (std::size_t p = 0; p < coeffs.points(); ++p) {
    const auto kappa = coeffs.frequency(p);
    double mass = 0.0;
    for (const auto& z : coeffs.point(p)) mass += std::norm(z);
    if (detail::is_zero_frequency(kappa)) {
      out.mean_norm = std::sqrt(mass);
    } else {
      value += mass * std::pow(detail::frequency_magnitude(kappa), -2.0 * static_cast<double>(h));
    }
  }
  out.value = std::sqrt(value);
  out.nonzero_mean = out.mean_norm > kMeanTolerance;
  return out;
}

/// Homogeneous negative Sobolev norm ||f||_{W^{-h,2}} on the mean-zero part of f.
inline SobolevNorm sobolev_negative_norm(const GridField& f, std::uint64_t h) {
  return sobolev_negative_norm_of_coefficients(fourier_coefficients(f), h);
}

struct SplitDiagnostics {
  double v_norm = 0.0;
  double v1_norm = 0.0;
  double v2_norm = 0.0;
  double u_norm = 0.0;
  double reassembly_error = 0.0;  // ||v - v1 - v2|| / ||v||
  double av1_residual = 0.0;      // ||A v1|| / sqrt(sum ||A(zeta)||^2 |v^|^2)
  double bu_minus_v1 = 0.0;       // ||B u - v1|| / ||v|| over kappa != 0
  double energy_defect = 0.0;     // | ||v||^2 - ||v1||^2 - ||v2||^2 | / ||v||^2
  double orthogonality = 0.0;     // sum |<v1^, v2^>| / ||v||^2
  std::vector<SobolevNorm> neg_sobolev_norms;  // ||A_i v||_{W^{-h_i}} per row
};

/// Recomputes every quantity from the synthesized fields, so the FFT round
/// trip is part of what is measured.
inline SplitDiagnostics diagnose_split(const MultiplierPlan& plan, const GridField& v, const HelmholtzSplit& split) {
  detail::require_layout(plan, v);
  SplitDiagnostics d;
  d.v_norm = v.l2_norm();
  d.v1_norm = split.v1.l2_norm();
  d.v2_norm = split.v2.l2_norm();
  d.u_norm = split.u.l2_norm();
  const double scale = d.v_norm > 0.0 ? d.v_norm : 1.0;
  d.reassembly_error = (v - split.v1 - split.v2).l2_norm() / scale;
  d.energy_defect = std::abs(d.v_norm * d.v_norm - d.v1_norm * d.v1_norm - d.v2_norm * d.v2_norm) / (scale * scale);

  const GridField vh = fourier_coefficients(v);
  const GridField v1h = fourier_coefficients(split.v1);
  const GridField v2h = fourier_coefficients(split.v2);
  const GridField uh = fourier_coefficients(split.u);
  const std::size_t rows = plan.symbols.a.rows();

  struct Partial {
    double av1 = 0.0, a_weight = 0.0, bu = 0.0, orth = 0.0;
    std::vector<double> sob;
    std::vector<double> mean;
  };
  std::vector<Partial> parts(vh.points());
  parallel_for(vh.points(), [&](std::size_t p) {
    Partial& part = parts[p];
    part.sob.assign(rows, 0.0);
    part.mean.assign(rows, 0.0);
    const auto kappa = vh.frequency(p);
    const auto x = detail::point_vector(vh, p);
    const auto x1 = detail::point_vector(v1h, p);
    const auto x2 = detail::point_vector(v2h, p);
    part.orth = std::abs(x1.dot(x2));
    const ComplexMatrix a = plan.symbols.a.eval(fourier_point(kappa));
    part.av1 = (a * x1).squaredNorm();
    const double op = operator_norm<Complex>(a);
    part.a_weight = op * op * x.squaredNorm();
    const detail::ComplexVector ax = a * x;
    if (detail::is_zero_frequency(kappa)) {
      for (std::size_t i = 0; i < rows; ++i) part.mean[i] = std::norm(ax(static_cast<Eigen::Index>(i)));
      return;
    }
    const double mag = detail::frequency_magnitude(kappa);
    for (std::size_t i = 0; i < rows; ++i) {
      part.sob[i] = std::norm(ax(static_cast<Eigen::Index>(i))) *
                    std::pow(mag, -2.0 * static_cast<double>(plan.row_degrees[i]));
    }
    const ComplexMatrix b = plan.symbols.b.eval(fourier_point(kappa));
    part.bu = (b * detail::point_vector(uh, p) - x1).squaredNorm();
  });

  double av1 = 0.0, a_weight = 0.0, bu = 0.0, orth = 0.0;
  std::vector<double> sob(rows, 0.0), mean(rows, 0.0);
  for (const auto& part : parts) {
    av1 += part.av1;
    a_weight += part.a_weight;
    bu += part.bu;
    orth += part.orth;
    for (std::size_t i = 0; i < rows; ++i) {
      sob[i] += part.sob[i];
      mean[i] += part.mean[i];
    }
  }
  d.av1_residual = a_weight > 0.0 ? std::sqrt(av1 / a_weight) : 0.0;
  d.bu_minus_v1 = std::sqrt(bu) / scale;
  d.orthogonality = orth / (scale * scale);
  for (std::size_t i = 0; i < rows; ++i) {
    SobolevNorm s;
    s.value = std::sqrt(sob[i]);
    s.mean_norm = std::sqrt(mean[i]);
    s.nonzero_mean = s.mean_norm > kMeanTolerance;
    d.neg_sobolev_norms.push_back(s);
  }
  return d;
}

inline Json to_json(const SobolevNorm& s) {
  Json out = {{"value", s.value}};
  if (s.nonzero_mean) out["mean"] = s.mean_norm;
  return out;
}

inline Json to_json(const SplitDiagnostics& d) {
  Json sob = Json::array();
  for (const auto& s : d.neg_sobolev_norms) sob.push_back(to_json(s));
  return {{"reassembly_error", d.reassembly_error},
          {"Av1_residual", d.av1_residual},
          {"Bu_minus_v1", d.bu_minus_v1},
          {"energy_defect", d.energy_defect},
          {"orthogonality", d.orthogonality},
          {"norms", {{"v", d.v_norm}, {"v1", d.v1_norm}, {"v2", d.v2_norm}, {"u", d.u_norm}}},
          {"neg_sobolev_norms", std::move(sob)}};
}

struct ColumnEstimateReport {
  std::vector<std::uint64_t> col_degrees;
  double bu_norm = 0.0;
  std::vector<double> derivative_norms;                // ||D^{h_j} u_j||
  std::vector<std::optional<double>> ratios;           // nullopt: 0/0
  std::vector<std::optional<double>> projected_ratios;  // u replaced by its part orthogonal to ker B
};

namespace detail {

inline std::vector<std::uint64_t> require_homogeneous_columns(const PolyMatrix& b) {
  const auto degrees = column_degrees(b);
  if (!degrees) throw InputError("column estimate: B has a column mixing degrees");
  return *degrees;
}

inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return std::nullopt;
    return std::numeric_limits<double>::infinity();
  }
  return num / den;
}

}  // namespace detail

/// Ratios ||D^{h_j} u_j||_2 / ||B u||_2 for a field u with B.cols() channels.
inline ColumnEstimateReport column_estimate_check(const PolyMatrix& b, const GridField& u) {
  if (u.dim() != b.num_vars() || u.channels() != b.cols()) {
    throw InputError("column estimate: field layout does not match B");
  }
  ColumnEstimateReport report;
  report.col_degrees = detail::require_homogeneous_columns(b);
  const ComplexSymbol bs(b);
  const GridField uh = fourier_coefficients(u);
  GridField ph(u.shape(), u.channels());
  std::vector<double> bu(uh.points(), 0.0);
  parallel_for(uh.points(), [&](std::size_t p) {
    const auto kappa = uh.frequency(p);
    if (detail::is_zero_frequency(kappa)) {
      detail::store_point(ph, p, detail::point_vector(uh, p));
      const ComplexMatrix b0 = bs.eval(fourier_point(kappa));
      bu[p] = (b0 * detail::point_vector(uh, p)).squaredNorm();
      return;
    }
    const ComplexMatrix bz = bs.eval(fourier_point(kappa));
    const auto x = detail::point_vector(uh, p);
    const detail::ComplexVector y = bz * x;
    bu[p] = y.squaredNorm();
    detail::store_point(ph, p, pseudoinverse_numeric<Complex>(bz).pinv * y);
  });
  double total = 0.0;
  for (double x : bu) total += x;
  report.bu_norm = std::sqrt(total);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const double h = static_cast<double>(report.col_degrees[j]);
    const double dn = weighted_coefficient_norm(uh, h, j);
    report.derivative_norms.push_back(dn);
    report.ratios.push_back(detail::ratio(dn, report.bu_norm));
    report.projected_ratios.push_back(detail::ratio(weighted_coefficient_norm(ph, h, j), report.bu_norm));
  }
  return report;
}

/// Empirical multiplier bound per column: the maximum over sampled unit
/// kappa of ||R_j(zeta)|| |zeta|^{h_j}, R_j the j-th row of B+(zeta),
/// zeta = 2 pi i kappa. Bounds the projected ratios.
inline std::vector<double> column_multiplier_bound(const PolyMatrix& b, std::size_t samples, std::uint64_t seed) {
  const auto degrees = detail::require_homogeneous_columns(b);
  const ComplexSymbol bs(b);
  Rng rng(seed);
  std::vector<double> bound(b.cols(), 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> kappa(b.num_vars());
    double norm = 0.0;
    for (auto& k : kappa) {
      k = rng.normal();
      norm += k * k;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (auto& k : kappa) k /= norm;
    const ComplexMatrix pinv = pseudoinverse_numeric<Complex>(bs.eval(fourier_point(std::span<const double>(kappa)))).pinv;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const double row = pinv.row(static_cast<Eigen::Index>(j)).norm();
      bound[j] = std::max(bound[j], row * std::pow(2.0 * std::numbers::pi, static_cast<double>(degrees[j])));
    }
  }
  return bound;
}

inline Json to_json(const ColumnEstimateReport& r) {
  auto ratios = [](const std::vector<std::optional<double>>& xs) {
    Json out = Json::array();
    for (const auto& x : xs) {
      if (x && std::isinf(*x)) {
        out.push_back("unbounded");
      } else if (x) {
        out.push_back(*x);
      } else {
        out.push_back("undefined");
      }
    }
    return out;
  };
  return {{"col_degrees", r.col_degrees},
          {"Bu_norm", r.bu_norm},
          {"derivative_norms", r.derivative_norms},
          {"ratios", ratios(r.ratios)},
          {"projected_ratios", ratios(r.projected_ratios)}};
}

}  // namespace exactpot
