#include "hbml/wtp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hbml/error.hpp"

namespace hbml::wtp {

ModelSpec make_wtp_spec(ModelSpec base, const std::string& price_var,
                        std::span<const std::string> data_columns) {
  if (price_var.empty()) throw ValidationError("price() is required");
  const auto listed = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), price_var) != v.end();
  };
  if (listed(base.rand_vars) || listed(base.fixed_vars)) {
    throw ValidationError("price variable " + price_var +
                          " must not also appear in rand() or fixed list");
  }
  if (!data_columns.empty() &&
      std::find(data_columns.begin(), data_columns.end(), price_var) == data_columns.end()) {
    throw ValidationError("price variable " + price_var + " not found in data");
  }
  base.price_var = price_var;
  base.validate();
  return base;
}

double transform_price(double mean_b) {
  if (!std::isfinite(mean_b)) throw ValidationError("transform_price: mean is not finite");
  return -std::exp(mean_b);
}

WtpTransform price_transform(const DrawStore& store) {
  if (store.rows() == 0) throw ValidationError("price_transform: no draws");
  auto values = store.column(0);
  std::sort(values.begin(), values.end());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  return {mean, transform_price(mean)};
}

}  // namespace hbml::wtp
