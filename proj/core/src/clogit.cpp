#include "hbml/clogit.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "hbml/error.hpp"

namespace hbml {
namespace {

class ClogitProblem {
 public:
  ClogitProblem(const ChoiceDataset& data, const std::vector<std::string>& vars)
      : x_(data.columns(vars)), index_(build_index(data)) {}

  Eigen::Index dim() const { return x_.cols(); }

  ClogitValue evaluate(const Vector& beta, bool want_hessian) const {
    if (beta.size() != x_.cols()) throw ValidationError("clogit: coefficient length mismatch");
    if (!beta.allFinite()) throw ValidationError("clogit: non-finite coefficients");
    const auto k = x_.cols();
    ClogitValue out{0.0, Vector::Zero(k), want_hessian ? Matrix::Zero(k, k) : Matrix()};
    const Vector u_all = x_ * beta;
    Vector p;
    for (const auto& person : index_.persons) {
      for (const auto& occ : person.occasions) {
        const auto first = static_cast<Eigen::Index>(occ.first_row);
        const auto n = static_cast<Eigen::Index>(occ.n_rows);
        const auto u = u_all.segment(first, n);
        const double umax = u.maxCoeff();
        p = (u.array() - umax).exp().matrix();
        const double denom = p.sum();
        p /= denom;
        const auto chosen = first + static_cast<Eigen::Index>(occ.chosen_offset);
        out.value += u_all(chosen) - umax - std::log(denom);
        const auto xo = x_.middleRows(first, n);
        const Vector xbar = xo.transpose() * p;
        out.gradient += x_.row(chosen).transpose() - xbar;
        if (want_hessian) {
          const Matrix centered = xo.rowwise() - xbar.transpose();
          out.hessian.noalias() -= centered.transpose() * p.asDiagonal() * centered;
        }
      }
    }
    return out;
  }

 private:
  Matrix x_;
  ChoiceIndex index_;
};

}  // namespace

double ClogitFit::coefficient(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return coefficients(static_cast<Eigen::Index>(i));
  }
  throw ValidationError("clogit: no coefficient named " + name);
}

ClogitValue clogit_loglik(const ChoiceDataset& data, const std::vector<std::string>& vars,
                          const Vector& coefs) {
  return ClogitProblem(data, vars).evaluate(coefs, true);
}

ClogitFit clogit_fit(const ChoiceDataset& data, const std::vector<std::string>& vars,
                     const ClogitOptions& options) {
  if (vars.empty()) throw ValidationError("clogit: no variables");
  const ClogitProblem problem(data, vars);
  ClogitFit fit;
  fit.names = vars;
  fit.coefficients = Vector::Zero(problem.dim());
  auto current = problem.evaluate(fit.coefficients, true);
  // Under separation the gradient vanishes while Newton keeps taking unit
  // steps toward infinity, so a small gradient alone does not mean a maximum.
  bool settled = true;

  for (;;) {
    fit.loglik = current.value;
    fit.gradient_norm = current.gradient.norm();
    if (settled && fit.gradient_norm < options.tolerance * (1.0 + std::fabs(current.value))) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= options.max_iterations) break;
    ++fit.iterations;

    // -H is positive semidefinite; fall back to steepest ascent when it is singular.
    Eigen::LDLT<Matrix> ldlt(-current.hessian);
    Vector step = ldlt.solve(current.gradient);
    bool newton = true;
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(current.gradient) <= 0.0) {
      step = current.gradient;
      newton = false;
    }
    bool improved = false;
    double t = 1.0;
    for (int h = 0; h <= options.max_halvings; ++h, t *= 0.5) {
      const Vector trial = fit.coefficients + t * step;
      auto value = problem.evaluate(trial, true);
      if (std::isfinite(value.value) && value.value >= current.value) {
        settled = newton && t * step.norm() < 1e-4 * (1.0 + fit.coefficients.norm());
        fit.coefficients = trial;
        current = std::move(value);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return fit;
}

}  // namespace hbml
