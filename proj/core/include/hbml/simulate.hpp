#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "hbml/choicedata.hpp"
#include "hbml/distributions.hpp"
#include "hbml/model.hpp"

namespace hbml {

/// Synthetic mixed logit panel. Covariates are i.i.d. Normal(0, covariate_sd^2);
/// beta_n ~ Normal(b, W); choices follow the exact logit probabilities.
/// In WTP form the first coordinate of b is the price parameter.
struct SimulationSpec {
  std::size_t persons = 100;
  std::size_t occasions = 5;
  std::size_t alternatives = 3;
  Vector b;
  Matrix w;
  Vector alpha;
  bool wtp = false;
  std::uint64_t seed = 1;
  double covariate_sd = 1.0;
};

struct SimulatedData {
  ChoiceDataset data;
  /// Columns: pid, gid, choice; x1..xK (random), z1..zF (fixed), price.
  ModelSpec spec;
  /// True individual coefficients, one row per person.
  Matrix beta;
};

SimulatedData simulate(const SimulationSpec& sim);

/// Sidecar path for the true parameters: data.csv -> data.truth.json.
std::filesystem::path truth_path(const std::filesystem::path& csv_path);

/// Writes the long-format CSV and the true-parameter sidecar JSON.
void write_simulation(const SimulatedData& sim_data, const SimulationSpec& sim,
                      const std::filesystem::path& csv_path);

}  // namespace hbml
