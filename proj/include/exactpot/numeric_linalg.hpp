#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "exactpot/errors.hpp"

namespace exactpot {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ComplexMatrix = MatrixX<std::complex<double>>;

constexpr double kDefaultSpectralTol = 1e-9;

/// Split of a Hermitian PSD spectrum into "nonzero" and "zero" parts.
struct SpectrumSplit {
  std::vector<double> nonzero;  // descending
  double threshold = 0.0;
  bool ambiguous_gap = false;   // some eigenvalue within a factor 10 of the threshold
};

/// Eigenvalue lambda counts as nonzero iff |lambda| > tol * max |lambda|.
inline SpectrumSplit classify_spectrum(const Eigen::VectorXd& eigenvalues, double tol) {
  SpectrumSplit split;
  const double scale = eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
  split.threshold = tol * scale;
  if (scale == 0.0) return split;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const double mag = std::abs(eigenvalues(k));
    if (mag > split.threshold) split.nonzero.push_back(eigenvalues(k));
    if (mag > split.threshold / 10.0 && mag <= split.threshold * 10.0) split.ambiguous_gap = true;
  }
  std::sort(split.nonzero.begin(), split.nonzero.end(), std::greater<>());
  return split;
}

template <class Scalar>
void require_hermitian(const MatrixX<Scalar>& m, double tol) {
  if (m.rows() != m.cols()) throw InputError("matrix must be square");
  const double norm = m.norm();
  if ((m - m.adjoint()).norm() > std::max(tol, 1e-12) * norm) {
    throw InputError("matrix is not symmetric within tolerance");
  }
}

template <class Scalar>
struct NumericProjector {
  MatrixX<Scalar> projector;  // Q(M) / a_r
  MatrixX<Scalar> spectral;   // V_0 V_0^* from the eigenvectors of the zero cluster
  Eigen::Index rank = 0;      // number of nonzero eigenvalues
  bool ambiguous_gap = false;

  double path_discrepancy() const { return (projector - spectral).norm(); }
};

/// Orthogonal projector onto the numerical kernel of a Hermitian PSD matrix.
///
/// The primary result evaluates Q(M)/a_r with Q(t) = prod (t - lambda_i) over
/// the nonzero eigenvalues, in the factored form prod (I - M / lambda_i),
/// largest lambda first. The eigenvector projector is returned alongside as
/// a second route.
template <class Scalar>
NumericProjector<Scalar> projector_numeric(const MatrixX<Scalar>& m, double tol = kDefaultSpectralTol) {
  require_hermitian(m, tol);
  const Eigen::Index n = m.rows();
  const MatrixX<Scalar> h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(h);
  if (eig.info() != Eigen::Success) throw PreconditionError("eigen decomposition failed");
  const SpectrumSplit split = classify_spectrum(eig.eigenvalues(), tol);

  NumericProjector<Scalar> out;
  out.rank = static_cast<Eigen::Index>(split.nonzero.size());
  out.ambiguous_gap = split.ambiguous_gap;
  out.projector = MatrixX<Scalar>::Identity(n, n);
  for (double lambda : split.nonzero) {
    out.projector = out.projector - out.projector * h / lambda;
  }
  out.spectral = MatrixX<Scalar>::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(eig.eigenvalues()(k)) <= split.threshold) {
      const auto v = eig.eigenvectors().col(k);
      out.spectral += v * v.adjoint();
    }
  }
  return out;
}

template <class Scalar>
struct NumericPseudoinverse {
  MatrixX<Scalar> pinv;
  Eigen::Index rank = 0;
  bool ambiguous_gap = false;
};

/// Moore-Penrose pseudoinverse by the Decell formula
///   P^+ = -(1/a_r) sum_{i=1}^{r} a_{r-i} P^* (P P^*)^(i-1),
/// with a_i the coefficients of Q(t) = prod (t - lambda_i) over the nonzero
/// eigenvalues of P P^*.
///
/// The matrix polynomial -(1/a_r) sum a_{r-i} t^(i-1) equals
/// (1 - prod (1 - t/lambda_i)) / t and is evaluated through
///   R_k = R_{k-1} + q_{k-1} / lambda_k,  q_k = q_{k-1} (I - M / lambda_k),
/// which avoids forming the expanded coefficients.
template <class Scalar>
NumericPseudoinverse<Scalar> pseudoinverse_numeric(const MatrixX<Scalar>& p, double tol = kDefaultSpectralTol) {
  const Eigen::Index m = p.rows();
  const MatrixX<Scalar> gram = p * p.adjoint();
  const MatrixX<Scalar> h = (gram + gram.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(h, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw PreconditionError("eigen decomposition failed");
  const SpectrumSplit split = classify_spectrum(eig.eigenvalues(), tol);

  MatrixX<Scalar> r = MatrixX<Scalar>::Zero(m, m);
  MatrixX<Scalar> q = MatrixX<Scalar>::Identity(m, m);
  for (double lambda : split.nonzero) {
    r += q / lambda;
    q = q - q * h / lambda;
  }
  NumericPseudoinverse<Scalar> out;
  out.pinv = p.adjoint() * r;
  out.rank = static_cast<Eigen::Index>(split.nonzero.size());
  out.ambiguous_gap = split.ambiguous_gap;
  return out;
}

/// Largest singular value.
template <class Scalar>
double operator_norm(const MatrixX<Scalar>& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(x);
  return svd.singularValues()(0);
}

}  // namespace exactpot
