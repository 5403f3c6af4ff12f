#include <gtest/gtest.h>

#include <complex>

#include "exactpot/numeric_linalg.hpp"
#include "numeric_support.hpp"

using namespace exactpot;
using Eigen::MatrixXd;

namespace {

double opnorm(const MatrixXd& x) { return operator_norm<double>(x); }

}  // namespace

TEST(ProjectorNumeric, RankOneAllOnes) {
  MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  const auto p = projector_numeric<double>(m);
  MatrixXd expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LT(opnorm(p.projector - expected), 1e-15);
  EXPECT_EQ(p.rank, 1);
  EXPECT_FALSE(p.ambiguous_gap);
}

TEST(ProjectorNumeric, IdentityAndZero) {
  EXPECT_LT(projector_numeric<double>(MatrixXd::Identity(3, 3)).projector.norm(), 1e-15);
  const auto z = projector_numeric<double>(MatrixXd::Zero(3, 3));
  EXPECT_EQ(z.projector, MatrixXd::Identity(3, 3));
  EXPECT_EQ(z.rank, 0);
}

TEST(ProjectorNumeric, RejectsNonSymmetric) {
  MatrixXd m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(projector_numeric<double>(m), InputError);
}

TEST(ProjectorNumeric, FlagsAmbiguousGap) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 2e-9;  // within a factor 10 of the 1e-9 threshold
  EXPECT_TRUE(projector_numeric<double>(m).ambiguous_gap);
}

TEST(ProjectorNumeric, TwoPathsAgreeOnControlledPsdMatrices) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = rng.uniform_int(1, 10);
    const auto r = rng.uniform_int(0, std::min<std::int64_t>(n, 8));
    const MatrixXd x = test::random_matrix_with_rank(rng, r == 0 ? 1 : r, n, r);
    const MatrixXd m = x.transpose() * x;
    const auto p = projector_numeric<double>(m);
    EXPECT_EQ(p.rank, r);
    EXPECT_LT(p.path_discrepancy(), 1e-10);
    EXPECT_LT(opnorm(p.projector - test::svd_kernel_projector<double>(m)), 1e-10);
    EXPECT_LT(opnorm(p.projector * p.projector - p.projector), 1e-12);
    EXPECT_LT(opnorm(p.projector - p.projector.transpose()), 1e-12);
  }
}

TEST(ProjectorNumeric, ComplexHermitian) {
  using C = std::complex<double>;
  ComplexMatrix a(1, 2);
  a << C(0, 1), C(0, 2);  // i (1, 2)
  const ComplexMatrix m = a.adjoint() * a;
  const auto p = projector_numeric<C>(m);
  ComplexMatrix expected(2, 2);
  expected << C(0.8), C(-0.4), C(-0.4), C(0.2);
  EXPECT_LT(operator_norm<C>(p.projector - expected), 1e-14);
}

TEST(PseudoinverseNumeric, Examples) {
  MatrixXd p(2, 2);
  p << 1, 1, 0, 0;
  MatrixXd expected(2, 2);
  expected << 0.5, 0, 0.5, 0;
  EXPECT_LT(opnorm(pseudoinverse_numeric<double>(p).pinv - expected), 1e-15);

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2;
  MatrixXd dinv = MatrixXd::Zero(2, 2);
  dinv(0, 0) = 0.5;
  EXPECT_LT(opnorm(pseudoinverse_numeric<double>(d).pinv - dinv), 1e-15);

  EXPECT_LT(opnorm(pseudoinverse_numeric<double>(MatrixXd::Identity(3, 3)).pinv - MatrixXd::Identity(3, 3)), 1e-15);
  EXPECT_EQ(pseudoinverse_numeric<double>(MatrixXd::Zero(2, 3)).pinv, MatrixXd::Zero(3, 2));
}

TEST(PseudoinverseNumeric, MatchesSvdAndPenroseIdentities) {
  Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = rng.uniform_int(1, 8);
    const auto n = rng.uniform_int(1, 10);
    const auto r = rng.uniform_int(0, std::min(m, n));
    const MatrixXd p = test::random_matrix_with_rank(rng, m, n, r);
    const auto d = pseudoinverse_numeric<double>(p);
    const MatrixXd& x = d.pinv;
    EXPECT_EQ(d.rank, r);
    EXPECT_LT(opnorm(x - test::svd_pseudoinverse<double>(p)), 1e-10);
    EXPECT_LT(opnorm(x * p * x - x), 1e-10);
    EXPECT_LT(opnorm(p * x * p - p), 1e-10);
    EXPECT_LT(opnorm((p * x).transpose() - p * x), 1e-10);
    EXPECT_LT(opnorm((x * p).transpose() - x * p), 1e-10);
  }
}

TEST(PseudoinverseNumeric, ComplexMatchesSvd) {
  using C = std::complex<double>;
  Rng rng(107);
  for (int trial = 0; trial < 50; ++trial) {
    // U diag(s) V^* with complex orthonormal U, V from QR of complex Gaussians
    ComplexMatrix gu = test::gaussian(rng, 3, 2).cast<C>() + C(0, 1) * test::gaussian(rng, 3, 2).cast<C>();
    ComplexMatrix gv = test::gaussian(rng, 4, 2).cast<C>() + C(0, 1) * test::gaussian(rng, 4, 2).cast<C>();
    Eigen::HouseholderQR<ComplexMatrix> qu(gu), qv(gv);
    const ComplexMatrix u = qu.householderQ() * ComplexMatrix::Identity(3, 2);
    const ComplexMatrix v = qv.householderQ() * ComplexMatrix::Identity(4, 2);
    Eigen::VectorXcd s(2);
    s << C(rng.uniform(1, 2)), C(rng.uniform(1, 2));
    const ComplexMatrix p = u * s.asDiagonal() * v.adjoint();
    const auto d = pseudoinverse_numeric<C>(p);
    EXPECT_LT(operator_norm<C>(d.pinv - test::svd_pseudoinverse<C>(p)), 1e-10);
  }
}

TEST(PseudoinverseNumeric, ScaleInvariantFactorization) {
  // Scaling P by s scales P^+ by 1/s exactly up to rounding.
  Rng rng(109);
  const MatrixXd p = test::random_matrix_with_rank(rng, 4, 5, 3);
  const MatrixXd a = pseudoinverse_numeric<double>(p).pinv;
  const MatrixXd b = pseudoinverse_numeric<double>(MatrixXd(1e6 * p)).pinv;
  EXPECT_LT(opnorm(1e6 * b - a), 1e-12);
}
