#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hbml {

/// Which variables enter the model and how.
struct ModelSpec {
  std::string depvar;
  std::vector<std::string> fixed_vars;
  std::vector<std::string> rand_vars;
  /// Set for the willingness-to-pay form: this column carries coefficient
  /// -exp(b) with b the first coordinate of each individual's random block.
  std::optional<std::string> price_var;
  std::string group_var;
  std::string id_var;

  bool wtp() const { return price_var.has_value(); }

  /// Names of the random block in parameter order (price first in WTP form).
  std::vector<std::string> random_names() const;
  /// Every covariate the likelihood reads: fixed, random, then price.
  std::vector<std::string> model_vars() const;
  /// Independent variables as listed in stored results: fixed then random block.
  std::vector<std::string> indepvars() const;

  std::size_t n_random() const { return rand_vars.size() + (wtp() ? 1 : 0); }
  std::size_t n_fixed() const { return fixed_vars.size(); }

  /// Throws ValidationError on an unusable spec.
  void validate() const;
};

}  // namespace hbml
