#include "hbml/distributions.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "hbml/error.hpp"

namespace hbml {

Matrix cholesky(const Matrix& s) {
  if (s.rows() != s.cols()) throw ValidationError("cholesky: matrix is not square");
  const Matrix sym = 0.5 * (s + s.transpose());
  if (!sym.allFinite()) throw NumericalError("cholesky: non-finite entries; not positive definite");
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) throw NumericalError("not positive definite");
  Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    if (!(l(i, i) > 0.0)) throw NumericalError("not positive definite");
  }
  return l;
}

SpdMatrix::SpdMatrix(const Matrix& m) : m_(0.5 * (m + m.transpose())), l_(cholesky(m_)) {}

SpdMatrix SpdMatrix::identity(Eigen::Index dim) { return SpdMatrix(Matrix::Identity(dim, dim)); }

double SpdMatrix::log_det() const { return 2.0 * l_.diagonal().array().log().sum(); }

SpdMatrix SpdMatrix::scaled(double factor) const { return SpdMatrix(m_ * factor); }

double mvn_logpdf(const Vector& x, const Vector& mean, const SpdMatrix& cov) {
  if (x.size() != mean.size() || x.size() != cov.dim()) {
    throw ValidationError("mvn_logpdf: dimension mismatch");
  }
  const Vector z = cov.lower().triangularView<Eigen::Lower>().solve(x - mean);
  const double k = static_cast<double>(x.size());
  return -0.5 * (k * std::log(2.0 * std::numbers::pi) + cov.log_det() + z.squaredNorm());
}

Vector mvn_sample(const Vector& mean, const SpdMatrix& cov, RngStream& rng) {
  if (mean.size() != cov.dim()) throw ValidationError("mvn_sample: dimension mismatch");
  Vector z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov.lower().triangularView<Eigen::Lower>() * z;
}

SpdMatrix invwishart_sample(double dof, const SpdMatrix& scale, RngStream& rng) {
  const Eigen::Index p = scale.dim();
  if (!(dof > static_cast<double>(p) - 1.0)) {
    throw ValidationError("invwishart_sample: degrees of freedom must exceed dim - 1");
  }
  // If scale = L L^T then scale^{-1} = C C^T with C = L^{-T}. A Wishart draw is
  // C A A^T C^T, so its inverse is L A^{-T} A^{-1} L^T = (L A^{-T})(L A^{-T})^T.
  Matrix a = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  // Solve A Y = L^T for Y = A^{-1} L^T; the draw is Y^T Y.
  const Matrix y = a.triangularView<Eigen::Lower>().solve(Matrix(scale.lower().transpose()));
  return SpdMatrix(y.transpose() * y);
}

double student_t_tail(double t, double df) {
  if (!(df >= 1.0)) throw ValidationError("student_t_tail: df must be >= 1");
  if (std::isnan(t)) throw ValidationError("student_t_tail: t is NaN");
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double student_t_quantile(double p, double df) {
  if (!(df >= 1.0)) throw ValidationError("student_t_quantile: df must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("student_t_quantile: p must lie in (0, 1)");
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, p);
}

}  // namespace hbml
