#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exactpot/construction.hpp"
#include "exactpot/exact_rank.hpp"
#include "exactpot/random.hpp"

namespace exactpot {

struct CatalogEntry {
  std::string id;
  DiffOperator op;
  std::size_t expected_generic_rank = 0;
  std::optional<std::uint64_t> expected_b_degree;  // nullopt: B is the zero matrix
  std::optional<PolyMatrix> known_b_up_to_image;
  bool constant_rank_expected = true;
  std::string notes;
};

namespace catalog {

namespace detail {

inline MultiPoly xi(std::size_t n, std::size_t k) { return MultiPoly::variable(n, k); }

inline PolyMatrix div_symbol(std::size_t n) {
  PolyMatrix a(1, n, n);
  for (std::size_t k = 0; k < n; ++k) a(0, k) = xi(n, k);
  return a;
}

/// xi xi^T - |xi|^2 I, whose image is the orthogonal complement of xi.
inline PolyMatrix tangential_projector_symbol(std::size_t n) {
  PolyMatrix x = div_symbol(n);
  PolyMatrix outer = x.transpose() * x;
  return outer.plus_diagonal(-outer.trace());
}

inline PolyMatrix curl3_symbol() {
  const std::size_t n = 3;
  const MultiPoly z(n);
  return PolyMatrix(n, {{z, -xi(n, 2), xi(n, 1)},
                        {xi(n, 2), z, -xi(n, 0)},
                        {-xi(n, 1), xi(n, 0), z}});
}

/// Checks the stored expectations against the construction. Throws
/// std::logic_error on mismatch.
inline void self_verify(const CatalogEntry& e) {
  const auto pot = potential(e.op);
  if (pot.rank != e.expected_generic_rank) {
    throw std::logic_error("catalog entry " + e.id + ": generic rank " + std::to_string(pot.rank) +
                           ", expected " + std::to_string(e.expected_generic_rank));
  }
  if (pot.degree != e.expected_b_degree) {
    throw std::logic_error("catalog entry " + e.id + ": unexpected potential degree");
  }
  if (!(e.op.symbol() * pot.b).is_zero()) {
    throw std::logic_error("catalog entry " + e.id + ": A * B is not zero");
  }
  if (!e.known_b_up_to_image) return;
  const PolyMatrix& known = *e.known_b_up_to_image;
  Rng rng(0x5eed);
  std::size_t checked = 0;
  while (checked < 50) {
    const auto p = rng.nonzero_rational_point(e.op.num_vars(), 12, 7);
    if (pot.a_r.eval(p) == 0) continue;
    const RationalMatrix bp = pot.b.eval(p);
    const RationalMatrix kp = known.eval(p);
    RationalMatrix joined(bp.rows(), bp.cols() + kp.cols());
    for (std::size_t i = 0; i < bp.rows(); ++i) {
      for (std::size_t j = 0; j < bp.cols(); ++j) joined(i, j) = bp(i, j);
      for (std::size_t j = 0; j < kp.cols(); ++j) joined(i, bp.cols() + j) = kp(i, j);
    }
    const auto rb = exact_rank(bp);
    if (exact_rank(joined) != rb || exact_rank(kp) != rb) {
      throw std::logic_error("catalog entry " + e.id + ": image of B differs from the stored ground truth");
    }
    ++checked;
  }
}

inline std::map<std::string, CatalogEntry> build() {
  std::map<std::string, CatalogEntry> entries;
  auto add = [&](CatalogEntry e) {
    self_verify(e);
    auto id = e.id;
    entries.emplace(std::move(id), std::move(e));
  };

  add({"div2", DiffOperator::from_symbol(div_symbol(2)), 1, 2,
       PolyMatrix(2, {{-xi(2, 1)}, {xi(2, 0)}}), true,
       "divergence in two variables; kernel spanned by the rotated frequency"});

  add({"div3", DiffOperator::from_symbol(div_symbol(3)), 1, 2, tangential_projector_symbol(3), true,
       "divergence; potential xi xi^T - |xi|^2 I"});

  add({"curl3", DiffOperator::from_symbol(curl3_symbol()), 2, 4, div_symbol(3).transpose(), true,
       "curl; potential |xi|^2 xi xi^T has the image of the gradient"});

  add({"grad_scalar", DiffOperator::from_symbol(div_symbol(3).transpose()), 1, std::nullopt,
       PolyMatrix(1, 1, 3), true, "gradient of a scalar; injective symbol, potential vanishes"});

  {
    const std::size_t n = 2;
    PolyMatrix wave(1, 1, n);
    wave(0, 0) = xi(n, 0) * xi(n, 0) - xi(n, 1) * xi(n, 1);
    add({"wave2", DiffOperator::from_symbol(wave), 1, std::nullopt, PolyMatrix(1, 1, n), false,
         "wave operator; rank drops on the cone xi1 = +-xi2, where ker A is strictly larger than im B"});
  }

  {
    const std::size_t n = 2;
    PolyMatrix mixed(n, {{xi(n, 0), xi(n, 1)}, {xi(n, 0) * xi(n, 0), xi(n, 0) * xi(n, 1)}});
    add({"mixed", DiffOperator::from_symbol(mixed), 1, 4, PolyMatrix(n, {{-xi(n, 1)}, {xi(n, 0)}}), true,
         "rows of degrees 1 and 2; potential (|xi|^2 + xi1^2)(xi xi^T - |xi|^2 I)"});
  }

  add({"zero", DiffOperator::from_symbol(PolyMatrix(1, 3, 3)), 0, 0, PolyMatrix::identity(3, 3), true,
       "zero operator; kernel is everything and B is the identity"});
  return entries;
}

inline const std::map<std::string, CatalogEntry>& registry() {
  static const std::map<std::string, CatalogEntry> entries = build();
  return entries;
}

}  // namespace detail

inline std::vector<std::string> list() {
  std::vector<std::string> ids;
  for (const auto& [id, e] : detail::registry()) ids.push_back(id);
  return ids;
}

inline bool contains(const std::string& id) { return detail::registry().count(id) != 0; }

inline const CatalogEntry& get(const std::string& id) {
  const auto& reg = detail::registry();
  const auto it = reg.find(id);
  if (it == reg.end()) throw InputError("unknown catalog operator '" + id + "'");
  return it->second;
}

}  // namespace catalog

inline Json to_json(const CatalogEntry& e) {
  Json out = to_json(e.op, e.id);
  out["expected_generic_rank"] = e.expected_generic_rank;
  if (e.expected_b_degree) {
    out["expected_B_degree"] = *e.expected_b_degree;
  } else {
    out["expected_B_degree"] = "zero matrix";
  }
  out["constant_rank_expected"] = e.constant_rank_expected;
  out["notes"] = e.notes;
  return out;
}

}  // namespace exactpot
