#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hbml/csv.hpp"
#include "hbml/model.hpp"

namespace hbml {

/// Long-format choice data: one row per alternative, rows grouped into choice
/// occasions (group id), occasions nested in decision makers (person id).
///
/// Instances are only produced by `create`, which validates:
///   - every group has at least two rows and exactly one chosen row,
///   - every group belongs to a single person,
///   - all covariates are finite.
/// Rows are stored sorted by (person id, group id, original order).
class ChoiceDataset {
 public:
  static ChoiceDataset create(std::vector<std::int64_t> group_ids,
                              std::vector<std::int64_t> person_ids,
                              std::vector<std::uint8_t> chosen,
                              std::vector<std::string> variable_names,
                              Eigen::MatrixXd covariates);

  std::size_t rows() const { return group_ids_.size(); }
  std::int64_t group_id(std::size_t row) const { return group_ids_[row]; }
  std::int64_t person_id(std::size_t row) const { return person_ids_[row]; }
  bool chosen(std::size_t row) const { return chosen_[row] != 0; }

  const std::vector<std::string>& variable_names() const { return names_; }
  const Eigen::MatrixXd& covariates() const { return x_; }
  /// Column position of a covariate; throws ValidationError when absent.
  std::size_t variable(std::string_view name) const;
  /// Covariate columns for `names`, in that order, as an O x |names| matrix.
  Eigen::MatrixXd columns(const std::vector<std::string>& names) const;

 private:
  ChoiceDataset() = default;

  std::vector<std::int64_t> group_ids_;
  std::vector<std::int64_t> person_ids_;
  std::vector<std::uint8_t> chosen_;
  std::vector<std::string> names_;
  Eigen::MatrixXd x_;
};

struct Occasion {
  std::int64_t group_id = 0;
  std::size_t first_row = 0;
  std::size_t n_rows = 0;
  /// Offset of the chosen row inside [first_row, first_row + n_rows).
  std::size_t chosen_offset = 0;
};

struct PersonOccasions {
  std::int64_t person_id = 0;
  std::vector<Occasion> occasions;
};

struct ChoiceIndex {
  std::vector<PersonOccasions> persons;
  std::size_t n_persons = 0;
  std::size_t n_groups = 0;
  std::size_t n_choices = 0;
  std::size_t n_observations = 0;
};

/// Read a long-format CSV. Only depvar, group, identifier and the model
/// variables are converted; other columns may hold anything.
ChoiceDataset load_long_csv(const std::filesystem::path& path, const ModelSpec& spec);
ChoiceDataset load_long_table(const csv::Table& table, const ModelSpec& spec,
                              const std::string& source_name = "<table>");

ChoiceIndex build_index(const ChoiceDataset& data);

/// Writes the dataset as long-format CSV with the given id/choice column names.
void write_long_csv(const ChoiceDataset& data, const std::filesystem::path& path,
                    const std::string& group_var, const std::string& id_var,
                    const std::string& choice_var);

struct CaseConversionOptions {
  /// Name of a column to carry through as the person identifier. When empty
  /// each case is its own decision maker.
  std::string id_var;
};

struct ConvertedCases {
  ChoiceDataset data;
  /// Alternative levels in sorted order; levels[0] is the base.
  std::vector<std::string> levels;
  /// Level position of every output row.
  std::vector<std::size_t> row_level;
};

/// Expand one-row-per-case data into one row per alternative. For each
/// non-base level L and case variable v the output has a column "LXv" equal
/// to v on rows of alternative L and 0 elsewhere, plus a constant column "L".
/// Numeric levels are prefixed with "y" ("y1", "y1Xage").
ConvertedCases case_to_alternatives(const csv::Table& cases, const std::string& choice_var,
                                    const std::vector<std::string>& case_vars,
                                    const CaseConversionOptions& options = {});

}  // namespace hbml
