#pragma once

#include <span>
#include <string>

#include "hbml/model.hpp"
#include "hbml/results.hpp"

namespace hbml::wtp {

/// Reported price coefficient: -exp of the mean price-parameter draw (not the
/// mean of -exp(b)).
struct WtpTransform {
  double price_param_mean = 0.0;
  double transformed = 0.0;
};

/// Adds a price variable to a preference-space spec. The price parameter
/// becomes the first coordinate of the random block. When `data_columns` is
/// non-empty the price variable must be one of them.
ModelSpec make_wtp_spec(ModelSpec base, const std::string& price_var,
                        std::span<const std::string> data_columns = {});

double transform_price(double mean_b);

/// Transform of the price column (column 0) of a WTP draw store.
WtpTransform price_transform(const DrawStore& store);

}  // namespace hbml::wtp
