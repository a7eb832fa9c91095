#pragma once

#include <Eigen/Core>

#include "hbml/rng.hpp"

namespace hbml {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric positive-definite matrix. Construction symmetrizes the input as
/// (S + S^T)/2 and verifies that a Cholesky factor exists, so every live
/// value is usable as a covariance.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);
  static SpdMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  /// Lower Cholesky factor, computed once at construction.
  const Matrix& lower() const { return l_; }
  double log_det() const;

  SpdMatrix scaled(double factor) const;

 private:
  Matrix m_;
  Matrix l_;
};

/// Lower-triangular L with L L^T = S. Throws NumericalError("not positive
/// definite") on a non-positive pivot. Only the lower triangle of the
/// symmetrized input is read.
Matrix cholesky(const Matrix& s);

double mvn_logpdf(const Vector& x, const Vector& mean, const SpdMatrix& cov);
Vector mvn_sample(const Vector& mean, const SpdMatrix& cov, RngStream& rng);

/// Inverse Wishart draw with density proportional to
/// |X|^{-(dof+p+1)/2} exp(-tr(scale X^{-1})/2). Bartlett decomposition of
/// Wishart(dof, scale^{-1}), then inversion.
SpdMatrix invwishart_sample(double dof, const SpdMatrix& scale, RngStream& rng);

/// Two-sided tail probability P(|T| > |t|) for Student-t with `df` degrees.
double student_t_tail(double t, double df);
/// Inverse CDF of Student-t.
double student_t_quantile(double p, double df);

}  // namespace hbml
