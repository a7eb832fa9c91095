#pragma once

#include <string>
#include <vector>

#include "hbml/hbsampler.hpp"
#include "hbml/results.hpp"

namespace hbml {

struct Estimation {
  ChainOutput chain;
  std::vector<SummaryRow> summary;
  StoredResults stored;
  /// Full display text, as printed by the command-line tool.
  std::string table;
};

/// e() bundle for a finished run.
StoredResults collect_stored_results(const ModelSpec& spec, const SamplerConfig& config,
                                     const ChainOutput& chain);

/// Run the chain, write the draw and individual files the config asks for,
/// summarize, and render the display.
Estimation estimate(const ChoiceDataset& data, const ModelSpec& spec, const SamplerConfig& config);

}  // namespace hbml
