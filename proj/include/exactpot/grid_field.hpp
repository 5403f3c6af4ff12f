#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>
#include <json.hpp>

#include "exactpot/errors.hpp"
#include "exactpot/random.hpp"

namespace exactpot {

using Complex = std::complex<double>;

/// Complex samples of an N-channel field on a uniform grid over the unit
/// torus [0,1)^n. Storage is row-major over grid points (last axis fastest)
/// with the channel index fastest of all.
///
/// The same container holds Fourier coefficients: the entry at grid index
/// k stands for the signed frequency returned by frequency().
class GridField {
 public:
  GridField() = default;
  GridField(std::vector<std::size_t> shape, std::size_t channels) : shape_(std::move(shape)), channels_(channels) {
    if (shape_.empty()) throw InputError("grid needs at least one axis");
    if (channels_ == 0) throw InputError("grid needs at least one channel");
    points_ = 1;
    for (auto s : shape_) {
      if (s < 2 || !std::has_single_bit(s)) throw InputError("grid sizes must be powers of two >= 2");
      points_ *= s;
    }
    data_.assign(points_ * channels_, Complex(0.0, 0.0));
  }

  std::size_t dim() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t channels() const { return channels_; }
  std::size_t points() const { return points_; }

  Complex& at(std::size_t point, std::size_t channel) { return data_[point * channels_ + channel]; }
  const Complex& at(std::size_t point, std::size_t channel) const { return data_[point * channels_ + channel]; }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  std::span<Complex> point(std::size_t p) { return {data_.data() + p * channels_, channels_}; }
  std::span<const Complex> point(std::size_t p) const { return {data_.data() + p * channels_, channels_}; }

  /// Grid multi-index of a flat point index.
  std::vector<std::size_t> multi_index(std::size_t p) const {
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t a = shape_.size(); a-- > 0;) {
      idx[a] = p % shape_[a];
      p /= shape_[a];
    }
    return idx;
  }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    std::size_t p = 0;
    for (std::size_t a = 0; a < shape_.size(); ++a) p = p * shape_[a] + idx[a];
    return p;
  }

  /// Signed frequency of a flat index: k for k < s/2, k - s otherwise.
  std::vector<std::int64_t> frequency(std::size_t p) const {
    const auto idx = multi_index(p);
    std::vector<std::int64_t> kappa(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const auto s = static_cast<std::int64_t>(shape_[a]);
      const auto k = static_cast<std::int64_t>(idx[a]);
      kappa[a] = k < s / 2 ? k : k - s;
    }
    return kappa;
  }

  /// Flat index holding frequency kappa (taken modulo the grid).
  std::size_t index_of_frequency(std::span<const std::int64_t> kappa) const {
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t a = 0; a < shape_.size(); ++a) {
      const auto s = static_cast<std::int64_t>(shape_[a]);
      idx[a] = static_cast<std::size_t>(((kappa[a] % s) + s) % s);
    }
    return flat_index(idx);
  }

  /// Discrete L2 norm on the unit torus: sqrt(mean over points of |f|^2).
  double l2_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s / static_cast<double>(points_));
  }

  /// Plain Euclidean norm of the stored array (for coefficient fields this
  /// is the L2 norm of the synthesized field, by Plancherel).
  double coefficient_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  bool same_layout(const GridField& other) const {
    return shape_ == other.shape_ && channels_ == other.channels_;
  }

  friend GridField operator-(GridField a, const GridField& b) {
    if (!a.same_layout(b)) throw InputError("grid layout mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend GridField operator+(GridField a, const GridField& b) {
    if (!a.same_layout(b)) throw InputError("grid layout mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend bool operator==(const GridField&, const GridField&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::size_t channels_ = 0;
  std::size_t points_ = 0;
  std::vector<Complex> data_;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline GridField run_fft(const GridField& in, int sign) {
  GridField out(in.shape(), in.channels());
  std::vector<int> dims(in.shape().begin(), in.shape().end());
  const int howmany = static_cast<int>(in.channels());
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data().data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data().data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    // FFTW_ESTIMATE never touches the arrays while planning.
    plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, src, nullptr, howmany, 1, dst,
                              nullptr, howmany, 1, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
  fftw_execute_dft(plan, src, dst);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace detail

/// Fourier coefficients fhat(k) = (1/P) sum_x f(x) exp(-2 pi i k.x), so that
/// sum_k |fhat(k)|^2 equals the squared L2 norm on the torus.
inline GridField fourier_coefficients(const GridField& f) {
  GridField out = detail::run_fft(f, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(f.points());
  for (auto& z : out.data()) z *= scale;
  return out;
}

/// Inverse of fourier_coefficients: f(x) = sum_k fhat(k) exp(2 pi i k.x).
inline GridField synthesize(const GridField& coeffs) { return detail::run_fft(coeffs, FFTW_BACKWARD); }

/// Random field whose Fourier coefficients are supported on |k_a| <= max_freq
/// (and strictly inside the Nyquist band). With `real` the coefficients are
/// Hermitian-symmetric, so the synthesized samples are real.
inline GridField random_band_limited_coefficients(const std::vector<std::size_t>& shape, std::size_t channels,
                                                  std::int64_t max_freq, std::uint64_t seed, bool real = true,
                                                  bool zero_mean = true) {
  GridField c(shape, channels);
  Rng rng(seed);
  // Draw in a grid-independent order: iterate over the frequency box.
  const std::size_t n = shape.size();
  std::vector<std::int64_t> kappa(n, -max_freq);
  auto in_band = [&](const std::vector<std::int64_t>& k) {
    for (std::size_t a = 0; a < n; ++a)
      if (2 * std::abs(k[a]) >= static_cast<std::int64_t>(shape[a])) return false;
    return true;
  };
  while (true) {
    bool is_zero = true;
    for (auto k : kappa) is_zero = is_zero && k == 0;
    // For real fields, draw only for kappa lexicographically positive and mirror.
    bool positive = false;
    for (auto k : kappa) {
      if (k != 0) {
        positive = k > 0;
        break;
      }
    }
    for (std::size_t ch = 0; ch < channels; ++ch) {
      const double re = rng.normal();
      const double im = rng.normal();
      if (!in_band(kappa)) continue;
      if (is_zero) {
        if (!zero_mean) c.at(c.index_of_frequency(kappa), ch) = Complex(re, real ? 0.0 : im);
      } else if (!real) {
        c.at(c.index_of_frequency(kappa), ch) = Complex(re, im);
      } else if (positive) {
        std::vector<std::int64_t> neg(kappa);
        for (auto& k : neg) k = -k;
        c.at(c.index_of_frequency(kappa), ch) = Complex(re, im);
        c.at(c.index_of_frequency(neg), ch) = Complex(re, -im);
      }
    }
    std::size_t a = n;
    while (a-- > 0) {
      if (++kappa[a] <= max_freq) break;
      kappa[a] = -max_freq;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return c;
}

inline GridField random_band_limited(const std::vector<std::size_t>& shape, std::size_t channels,
                                     std::int64_t max_freq, std::uint64_t seed, bool real = true,
                                     bool zero_mean = true) {
  return synthesize(random_band_limited_coefficients(shape, channels, max_freq, seed, real, zero_mean));
}

/// Gradient of a random band-limited scalar potential (n channels, real, mean zero).
inline GridField gradient_field(const std::vector<std::size_t>& shape, std::int64_t max_freq, std::uint64_t seed) {
  const GridField phi = random_band_limited_coefficients(shape, 1, max_freq, seed);
  GridField c(shape, shape.size());
  for (std::size_t p = 0; p < c.points(); ++p) {
    const auto kappa = c.frequency(p);
    for (std::size_t a = 0; a < shape.size(); ++a) {
      c.at(p, a) = Complex(0.0, 2.0 * std::numbers::pi * static_cast<double>(kappa[a])) * phi.at(p, 0);
    }
  }
  return synthesize(c);
}

/// Divergence-free random field: the rotated gradient for n = 2, the curl of
/// a random vector potential for n = 3.
inline GridField solenoidal_field(const std::vector<std::size_t>& shape, std::int64_t max_freq, std::uint64_t seed) {
  const std::size_t n = shape.size();
  if (n != 2 && n != 3) throw InputError("solenoidal fields are available for n = 2 and n = 3");
  const GridField psi = random_band_limited_coefficients(shape, n == 2 ? 1 : 3, max_freq, seed);
  GridField c(shape, n);
  for (std::size_t p = 0; p < c.points(); ++p) {
    const auto kappa = c.frequency(p);
    auto d = [&](std::size_t a) { return Complex(0.0, 2.0 * std::numbers::pi * static_cast<double>(kappa[a])); };
    if (n == 2) {
      c.at(p, 0) = -d(1) * psi.at(p, 0);
      c.at(p, 1) = d(0) * psi.at(p, 0);
    } else {
      c.at(p, 0) = d(1) * psi.at(p, 2) - d(2) * psi.at(p, 1);
      c.at(p, 1) = d(2) * psi.at(p, 0) - d(0) * psi.at(p, 2);
      c.at(p, 2) = d(0) * psi.at(p, 1) - d(1) * psi.at(p, 0);
    }
  }
  return synthesize(c);
}

// Binary format: one line of JSON header
//   {"channels":N,"layout":"row-major","n":n,"scalar":"complex128 little-endian","shape":[...]}
// terminated by '\n', followed by points*channels pairs of little-endian
// IEEE doubles (real, imaginary).

namespace detail {

inline void put_le_double(std::ostream& os, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  unsigned char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

inline double get_le_double(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw InputError("grid field file is truncated");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace detail

inline void write_grid_field(std::ostream& os, const GridField& f) {
  nlohmann::json header = {{"n", f.dim()},
                           {"shape", f.shape()},
                           {"channels", f.channels()},
                           {"layout", "row-major"},
                           {"scalar", "complex128 little-endian"}};
  os << header.dump() << '\n';
  for (const auto& z : f.data()) {
    detail::put_le_double(os, z.real());
    detail::put_le_double(os, z.imag());
  }
}

inline GridField read_grid_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("grid field file: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("grid field header: ") + e.what());
  }
  if (!h.is_object() || h.value("layout", "") != "row-major" || h.value("scalar", "") != "complex128 little-endian" ||
      !h.contains("shape") || !h.contains("channels") || !h.contains("n")) {
    throw InputError("grid field header: unsupported layout or scalar type");
  }
  const auto shape = h["shape"].get<std::vector<std::size_t>>();
  if (shape.size() != h["n"].get<std::size_t>()) throw InputError("grid field header: n does not match shape");
  GridField f(shape, h["channels"].get<std::size_t>());
  for (auto& z : f.data()) {
    const double re = detail::get_le_double(is);
    const double im = detail::get_le_double(is);
    z = Complex(re, im);
  }
  return f;
}

inline void save_grid_field(const std::string& path, const GridField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path);
  write_grid_field(os, f);
}

inline GridField load_grid_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path);
  return read_grid_field(is);
}

/// CSV import for small fields. First line: "# shape=16x16 channels=2".
/// Each following line is one grid point in row-major order with either
/// `channels` real values or `2*channels` values (re, im pairs).
inline GridField read_grid_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0) throw InputError("CSV field: missing '# shape=... channels=...' line");
  std::vector<std::size_t> shape;
  std::size_t channels = 0;
  std::istringstream hs(line.substr(1));
  std::string tok;
  while (hs >> tok) {
    if (tok.rfind("shape=", 0) == 0) {
      std::istringstream ss(tok.substr(6));
      std::string dimtok;
      while (std::getline(ss, dimtok, 'x')) shape.push_back(std::stoul(dimtok));
    } else if (tok.rfind("channels=", 0) == 0) {
      channels = std::stoul(tok.substr(9));
    }
  }
  GridField f(shape, channels);
  std::size_t p = 0;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (p >= f.points()) throw InputError("CSV field line " + std::to_string(line_no) + ": too many rows");
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("CSV field line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (vals.size() == channels) {
      for (std::size_t c = 0; c < channels; ++c) f.at(p, c) = Complex(vals[c], 0.0);
    } else if (vals.size() == 2 * channels) {
      for (std::size_t c = 0; c < channels; ++c) f.at(p, c) = Complex(vals[2 * c], vals[2 * c + 1]);
    } else {
      throw InputError("CSV field line " + std::to_string(line_no) + ": expected " + std::to_string(channels) +
                       " or " + std::to_string(2 * channels) + " values");
    }
    ++p;
  }
  if (p != f.points()) throw InputError("CSV field: expected " + std::to_string(f.points()) + " rows");
  return f;
}

}  // namespace exactpot
