#pragma once

#include <string>
#include <vector>

#include "hbml/choicedata.hpp"
#include "hbml/distributions.hpp"

namespace hbml {

struct ClogitValue {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

struct ClogitFit {
  std::vector<std::string> names;
  Vector coefficients;
  double loglik = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  int iterations = 0;

  double coefficient(const std::string& name) const;
};

struct ClogitOptions {
  /// Convergence when |gradient| < tolerance * (1 + |loglik|).
  double tolerance = 1e-6;
  int max_iterations = 200;
  int max_halvings = 60;
};

/// Pooled conditional logit over `vars`: returns the log likelihood with its
/// analytic gradient and Hessian. Utilities are max-shifted per occasion.
ClogitValue clogit_loglik(const ChoiceDataset& data, const std::vector<std::string>& vars,
                          const Vector& coefs);

/// Newton-Raphson from zero with step halving. Non-convergence (for instance
/// under perfect separation) is reported through `converged`, not thrown.
ClogitFit clogit_fit(const ChoiceDataset& data, const std::vector<std::string>& vars,
                     const ClogitOptions& options = {});

}  // namespace hbml
