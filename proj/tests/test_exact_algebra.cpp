#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "exactpot/catalog.hpp"
#include "exactpot/exact_rank.hpp"
#include "exactpot/interchange.hpp"
#include "exactpot/multipoly.hpp"
#include "exactpot/poly_matrix.hpp"
#include "test_support.hpp"

using namespace exactpot;
using exactpot::test::cst;
using exactpot::test::norm_sq;
using exactpot::test::xi;

namespace {

MultiPoly wave() { return xi(2, 0) * xi(2, 0) - xi(2, 1) * xi(2, 1); }

PolyMatrix curl() { return catalog::get("curl3").op.symbol(); }
PolyMatrix div_row() { return catalog::get("div3").op.symbol(); }

}  // namespace

TEST(PolyMul, DifferenceOfSquares) {
  EXPECT_EQ((xi(2, 0) + xi(2, 1)) * (xi(2, 0) - xi(2, 1)), wave());
}

TEST(PolyMul, ZeroAbsorbs) {
  EXPECT_TRUE((MultiPoly(2) * wave()).is_zero());
  EXPECT_TRUE((wave() * MultiPoly(2)).is_zero());
}

TEST(PolyMul, SquareOfWave) {
  // Expanded by hand: xi1^4 - 2 xi1^2 xi2^2 + xi2^4.
  MultiPoly expected(2);
  expected.add_term({4, 0}, 1);
  expected.add_term({2, 2}, -2);
  expected.add_term({0, 4}, 1);
  EXPECT_EQ(poly_mul(wave(), wave()), expected);
  EXPECT_EQ(*poly_mul(wave(), wave()).degree(), 4u);
}

TEST(PolyMul, VariableCountMismatchThrows) {
  EXPECT_THROW(xi(2, 0) * xi(3, 0), InputError);
}

TEST(PolyEval, Examples) {
  EXPECT_EQ(wave().eval(std::vector<Rational>{1, 1}), 0);
  EXPECT_EQ(wave().eval(std::vector<Rational>{2, 1}), 3);
  EXPECT_EQ(norm_sq(2).eval(std::vector<Rational>{Rational(3, 5), Rational(4, 5)}), 1);
  const auto z = wave().eval(std::vector<std::complex<double>>{{0, 2}, {0, 1}});
  EXPECT_DOUBLE_EQ(z.real(), -3.0);
  EXPECT_DOUBLE_EQ(z.imag(), 0.0);
}

TEST(PolyEval, LengthMismatchThrows) {
  EXPECT_THROW(wave().eval(std::vector<Rational>{1, 2, 3}), InputError);
}

TEST(Homogeneity, Examples) {
  EXPECT_EQ(homogeneity_degree(wave()), Homogeneity::of_degree(2));
  EXPECT_EQ(homogeneity_degree(xi(2, 0) + xi(2, 1) * xi(2, 1)), Homogeneity::inhomogeneous());
  EXPECT_EQ(homogeneity_degree(MultiPoly(2)), Homogeneity::zero_poly());
}

TEST(Homogeneity, ExponentsOfDegreeCountsMultiIndices) {
  // C(n + d - 1, d)
  EXPECT_EQ(exponents_of_degree(3, 2).size(), 6u);
  EXPECT_EQ(exponents_of_degree(2, 1).size(), 2u);
  EXPECT_EQ(exponents_of_degree(4, 0).size(), 1u);
  EXPECT_EQ(exponents_of_degree(2, 1).front(), (Exponent{1, 0}));
}

TEST(MatMul, CurlTimesTransposeIsTangentialProjection) {
  const auto c = curl();
  PolyMatrix outer = div_row().transpose() * div_row();
  const PolyMatrix expected = norm_sq(3) * PolyMatrix::identity(3, 3) - outer;
  EXPECT_EQ(mat_mul(c, mat_transpose(c)), expected);

  Rng rng(7);
  for (int k = 0; k < 5; ++k) {
    const auto p = rng.nonzero_rational_point(3, 9, 5);
    EXPECT_EQ(mat_mul(c, c.transpose()).eval(p), c.eval(p) * c.eval(p).transpose());
  }
}

TEST(MatMul, IdentityIsNeutral) {
  EXPECT_EQ(curl() * PolyMatrix::identity(3, 3), curl());
}

TEST(MatMul, DivOuterProduct) {
  const auto d = div_row();
  const auto outer = d.transpose() * d;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(outer(i, j), xi(3, i) * xi(3, j));
}

TEST(MatMul, DimensionMismatchThrows) {
  EXPECT_THROW(div_row() * div_row(), InputError);
}

TEST(MatMul, TransposeOfProduct) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    PolyMatrix x(2, 3, 2), y(3, 2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        x(i, j) = test::random_poly(rng, 2, 2, 3);
        y(j, i) = test::random_poly(rng, 2, 2, 3);
      }
    EXPECT_EQ((x * y).transpose(), y.transpose() * x.transpose());
  }
}

TEST(RankAtPoint, Examples) {
  EXPECT_EQ(rank_at_point(div_row(), std::vector<Rational>{1, 2, 3}), 1u);
  PolyMatrix w(1, 1, 2);
  w(0, 0) = wave();
  EXPECT_EQ(rank_at_point(w, std::vector<Rational>{1, 1}), 0u);
  EXPECT_EQ(rank_at_point(curl(), std::vector<Rational>{0, 0, 1}), 2u);
  EXPECT_THROW(rank_at_point(curl(), std::vector<Rational>{0, 1}), InputError);
}

TEST(RankAtPoint, AgreesWithMinorsOnRandomRationalMatrices) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 4));
    const auto target = static_cast<std::size_t>(rng.uniform_int(0, std::min(rows, cols)));
    // product of random rows x target and target x cols factors
    RationalMatrix l(rows, target), r(target, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < target; ++k) l(i, k) = test::rat(rng.uniform_int(-3, 3), rng.uniform_int(1, 4));
    for (std::size_t k = 0; k < target; ++k)
      for (std::size_t j = 0; j < cols; ++j) r(k, j) = test::rat(rng.uniform_int(-3, 3), rng.uniform_int(1, 4));
    RationalMatrix a = target == 0 ? RationalMatrix(rows, cols) : l * r;
    EXPECT_EQ(exact_rank(a), test::rank_by_minors(a));
  }
}

TEST(RankAtPoint, AgreesWithSingularValuesOnRandomIntegerMatrices) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const auto target = static_cast<std::size_t>(rng.uniform_int(0, std::min(rows, cols)));
    Eigen::MatrixXd l(rows, target), r(target, cols);
    RationalMatrix li(rows, target), ri(target, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < target; ++k) {
        const auto v = rng.uniform_int(-4, 4);
        l(i, k) = static_cast<double>(v);
        li(i, k) = test::rat(v, 1);
      }
    for (std::size_t k = 0; k < target; ++k)
      for (std::size_t j = 0; j < cols; ++j) {
        const auto v = rng.uniform_int(-4, 4);
        r(k, j) = static_cast<double>(v);
        ri(k, j) = test::rat(v, 1);
      }
    Eigen::MatrixXd a = target == 0 ? Eigen::MatrixXd::Zero(rows, cols) : Eigen::MatrixXd(l * r);
    RationalMatrix ai = target == 0 ? RationalMatrix(rows, cols) : li * ri;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    std::size_t float_rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > 1e-8 * std::max(1.0, s(0))) ++float_rank;
    EXPECT_EQ(exact_rank(ai), float_rank);
  }
}

TEST(RingAxioms, RandomPolynomials) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::random_poly(rng, 3, 2, 4);
    const auto q = test::random_poly(rng, 3, 2, 4);
    const auto s = test::random_poly(rng, 3, 2, 4);
    EXPECT_EQ(p * q, q * p);
    EXPECT_EQ((p * q) * s, p * (q * s));
    EXPECT_EQ(p * (q + s), p * q + p * s);
    EXPECT_EQ(p + q, q + p);
    EXPECT_TRUE((p - p).is_zero());
    if (!p.is_zero() && !q.is_zero()) {
      EXPECT_EQ(*(p * q).degree(), *p.degree() + *q.degree());
    }
  }
}

TEST(RingAxioms, EvaluationIsHomomorphism) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = test::random_poly(rng, 3, 3, 5);
    const auto q = test::random_poly(rng, 3, 3, 5);
    const auto pt = rng.nonzero_rational_point(3, 7, 6);
    EXPECT_EQ((p * q).eval(pt), p.eval(pt) * q.eval(pt));
    EXPECT_EQ((p + q).eval(pt), p.eval(pt) + q.eval(pt));
  }
}

TEST(Interchange, RoundTripPreservesMatrices) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    PolyMatrix x(2, 3, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = test::random_poly(rng, 3, 3, 4);
    const Json j = to_json(x);
    EXPECT_EQ(matrix_from_json(Json::parse(j.dump())), x);
  }
}

TEST(Interchange, SerializationIsCanonical) {
  MultiPoly a(2), b(2);
  a.add_term({0, 2}, -1);
  a.add_term({2, 0}, 1);
  b.add_term({2, 0}, 1);
  b.add_term({0, 2}, -1);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(to_json(a).dump(), R"([{"c":"1","e":[2,0]},{"c":"-1","e":[0,2]}])");
}

TEST(Interchange, Diagnostics) {
  EXPECT_THROW(parse_rational("1/0"), InputError);
  EXPECT_THROW(parse_rational("x"), InputError);
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  const Json bad = Json::parse(R"({"rows":1,"cols":1,"n":1,"entries":[[[{"c":"1","e":[1,2]}]]]})");
  try {
    matrix_from_json(bad);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("/entries/0/0/0/e"), std::string::npos);
  }
  try {
    parse_json_text("{\n  \"rows\": 1,\n  oops\n}", "op.json");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("op.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Constants, StringForm) {
  EXPECT_EQ(wave().str(), "xi1^2 - xi2^2");
  EXPECT_EQ(cst(2, -3).str(), "-3");
}
