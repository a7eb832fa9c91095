#include "hbml/model.hpp"

#include <set>

#include "hbml/error.hpp"

namespace hbml {

std::vector<std::string> ModelSpec::random_names() const {
  std::vector<std::string> out;
  if (price_var) out.push_back(*price_var);
  out.insert(out.end(), rand_vars.begin(), rand_vars.end());
  return out;
}

std::vector<std::string> ModelSpec::model_vars() const {
  std::vector<std::string> out = fixed_vars;
  out.insert(out.end(), rand_vars.begin(), rand_vars.end());
  if (price_var) out.push_back(*price_var);
  return out;
}

std::vector<std::string> ModelSpec::indepvars() const {
  std::vector<std::string> out = fixed_vars;
  const auto r = random_names();
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

void ModelSpec::validate() const {
  if (rand_vars.empty()) {
    throw ValidationError("at least one random-coefficient independent variable is required");
  }
  if (depvar.empty()) throw ValidationError("dependent variable is required");
  if (group_var.empty()) throw ValidationError("group() is required");
  if (id_var.empty()) throw ValidationError("identifier() is required");
  std::set<std::string> seen;
  for (const auto& v : model_vars()) {
    if (v.empty()) throw ValidationError("empty variable name");
    if (!seen.insert(v).second) {
      if (price_var && v == *price_var) {
        throw ValidationError("price variable " + v + " must not also appear in rand() or fixed list");
      }
      throw ValidationError("variable " + v + " listed more than once");
    }
    if (v == depvar) throw ValidationError("dependent variable " + v + " used as a regressor");
  }
}

}  // namespace hbml
