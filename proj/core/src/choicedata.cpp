#include "hbml/choicedata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "hbml/error.hpp"

namespace hbml {
namespace {

std::int64_t to_id(const std::string& cell, const std::string& column, std::size_t row,
                   const std::string& source) {
  const auto value = csv::to_double(cell);
  if (!value || std::trunc(*value) != *value || std::fabs(*value) > 9.007199254740992e15) {
    throw ValidationError(source + ": column " + column + " row " + std::to_string(row + 1) +
                          ": identifier '" + cell + "' is not an integer");
  }
  return static_cast<std::int64_t>(*value);
}

double to_value(const std::string& cell, const std::string& column, std::size_t row,
                const std::string& source) {
  if (csv::is_missing(cell)) {
    throw ValidationError(source + ": column " + column + " row " + std::to_string(row + 1) +
                          ": missing value");
  }
  const auto value = csv::to_double(cell);
  if (!value) {
    throw ValidationError(source + ": column " + column + " row " + std::to_string(row + 1) +
                          ": non-numeric value '" + cell + "'");
  }
  return *value;
}

}  // namespace

ChoiceDataset ChoiceDataset::create(std::vector<std::int64_t> group_ids,
                                    std::vector<std::int64_t> person_ids,
                                    std::vector<std::uint8_t> chosen,
                                    std::vector<std::string> variable_names,
                                    Eigen::MatrixXd covariates) {
  const std::size_t n = group_ids.size();
  if (person_ids.size() != n || chosen.size() != n ||
      static_cast<std::size_t>(covariates.rows()) != n ||
      static_cast<std::size_t>(covariates.cols()) != variable_names.size()) {
    throw ValidationError("choice data: column lengths disagree");
  }
  if (n == 0) throw ValidationError("choice data: no observations");
  if (!covariates.allFinite()) throw ValidationError("choice data: non-finite covariate value");

  struct GroupInfo {
    std::int64_t person = 0;
    std::size_t rows = 0;
    std::size_t chosen = 0;
  };
  std::map<std::int64_t, GroupInfo> groups;
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i] > 1) throw ValidationError("choice data: chosen indicator must be 0 or 1");
    auto [it, inserted] = groups.try_emplace(group_ids[i], GroupInfo{person_ids[i], 0, 0});
    if (!inserted && it->second.person != person_ids[i]) {
      throw ValidationError("group " + std::to_string(group_ids[i]) +
                            " spans multiple identifiers (" + std::to_string(it->second.person) +
                            ", " + std::to_string(person_ids[i]) + ")");
    }
    ++it->second.rows;
    it->second.chosen += chosen[i];
  }
  for (const auto& [gid, info] : groups) {
    if (info.chosen > 1) throw ValidationError("multiple choices in group " + std::to_string(gid));
    if (info.chosen == 0) throw ValidationError("no choice in group " + std::to_string(gid));
    if (info.rows < 2) {
      throw ValidationError("group " + std::to_string(gid) + " has fewer than 2 alternatives");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (person_ids[a] != person_ids[b]) return person_ids[a] < person_ids[b];
    return group_ids[a] < group_ids[b];
  });

  ChoiceDataset out;
  out.group_ids_.resize(n);
  out.person_ids_.resize(n);
  out.chosen_.resize(n);
  out.x_.resize(static_cast<Eigen::Index>(n), covariates.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = order[i];
    out.group_ids_[i] = group_ids[src];
    out.person_ids_[i] = person_ids[src];
    out.chosen_[i] = chosen[src];
    out.x_.row(static_cast<Eigen::Index>(i)) = covariates.row(static_cast<Eigen::Index>(src));
  }
  out.names_ = std::move(variable_names);
  return out;
}

std::size_t ChoiceDataset::variable(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw ValidationError("variable " + std::string(name) + " not found");
}

Eigen::MatrixXd ChoiceDataset::columns(const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(x_.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = x_.col(static_cast<Eigen::Index>(variable(names[j])));
  }
  return out;
}

ChoiceDataset load_long_table(const csv::Table& table, const ModelSpec& spec,
                              const std::string& source_name) {
  auto require = [&](const std::string& name) {
    const auto col = table.column(name);
    if (!col) throw ValidationError(source_name + ": missing column " + name);
    return *col;
  };
  const auto dep_col = require(spec.depvar);
  const auto group_col = require(spec.group_var);
  const auto id_col = require(spec.id_var);
  const auto vars = spec.model_vars();
  std::vector<std::size_t> var_cols;
  for (const auto& v : vars) var_cols.push_back(require(v));

  const std::size_t n = table.rows.size();
  std::vector<std::int64_t> groups(n);
  std::vector<std::int64_t> persons(n);
  std::vector<std::uint8_t> chosen(n);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(vars.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    groups[i] = to_id(row[group_col], spec.group_var, i, source_name);
    persons[i] = to_id(row[id_col], spec.id_var, i, source_name);
    const double y = to_value(row[dep_col], spec.depvar, i, source_name);
    if (y != 0.0 && y != 1.0) {
      throw ValidationError(source_name + ": dependent variable " + spec.depvar + " row " +
                            std::to_string(i + 1) + " is not 0/1");
    }
    chosen[i] = static_cast<std::uint8_t>(y);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          to_value(row[var_cols[j]], vars[j], i, source_name);
    }
  }
  return ChoiceDataset::create(std::move(groups), std::move(persons), std::move(chosen), vars,
                               std::move(x));
}

ChoiceDataset load_long_csv(const std::filesystem::path& path, const ModelSpec& spec) {
  return load_long_table(csv::read(path), spec, path.string());
}

ChoiceIndex build_index(const ChoiceDataset& data) {
  ChoiceIndex index;
  index.n_observations = data.rows();
  std::size_t row = 0;
  while (row < data.rows()) {
    const auto pid = data.person_id(row);
    PersonOccasions person{pid, {}};
    while (row < data.rows() && data.person_id(row) == pid) {
      Occasion occ;
      occ.group_id = data.group_id(row);
      occ.first_row = row;
      while (row < data.rows() && data.person_id(row) == pid && data.group_id(row) == occ.group_id) {
        if (data.chosen(row)) occ.chosen_offset = row - occ.first_row;
        ++row;
      }
      occ.n_rows = row - occ.first_row;
      person.occasions.push_back(occ);
    }
    index.n_groups += person.occasions.size();
    index.persons.push_back(std::move(person));
  }
  index.n_persons = index.persons.size();
  index.n_choices = index.n_groups;
  return index;
}

void write_long_csv(const ChoiceDataset& data, const std::filesystem::path& path,
                    const std::string& group_var, const std::string& id_var,
                    const std::string& choice_var) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << group_var;
  if (id_var != group_var) out << ',' << id_var;
  out << ',' << choice_var;
  for (const auto& name : data.variable_names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out << data.group_id(i);
    if (id_var != group_var) out << ',' << data.person_id(i);
    out << ',' << (data.chosen(i) ? 1 : 0);
    for (Eigen::Index j = 0; j < data.covariates().cols(); ++j) {
      out << ',' << csv::format_number(data.covariates()(static_cast<Eigen::Index>(i), j), 17);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

ConvertedCases case_to_alternatives(const csv::Table& cases, const std::string& choice_var,
                                    const std::vector<std::string>& case_vars,
                                    const CaseConversionOptions& options) {
  const auto choice_col = cases.column(choice_var);
  if (!choice_col) throw ValidationError("case data: missing choice column " + choice_var);
  std::vector<std::size_t> var_cols;
  for (const auto& v : case_vars) {
    const auto c = cases.column(v);
    if (!c) throw ValidationError("case data: missing column " + v);
    var_cols.push_back(*c);
  }
  std::optional<std::size_t> id_col;
  if (!options.id_var.empty()) {
    id_col = cases.column(options.id_var);
    if (!id_col) throw ValidationError("case data: missing identifier column " + options.id_var);
  }

  std::vector<std::string> levels;
  {
    std::set<std::string> distinct;
    for (const auto& row : cases.rows) {
      if (csv::is_missing(row[*choice_col])) throw ValidationError("case data: missing choice value");
      distinct.insert(row[*choice_col]);
    }
    levels.assign(distinct.begin(), distinct.end());
  }
  if (levels.size() < 2) throw ValidationError("case data: choice needs at least 2 levels");
  const bool numeric = std::all_of(levels.begin(), levels.end(),
                                   [](const std::string& s) { return csv::to_double(s).has_value(); });
  if (numeric) {
    std::stable_sort(levels.begin(), levels.end(), [](const std::string& a, const std::string& b) {
      return *csv::to_double(a) < *csv::to_double(b);
    });
  }
  auto level_name = [&](const std::string& level) { return numeric ? "y" + level : level; };

  std::vector<std::string> names;
  for (std::size_t l = 1; l < levels.size(); ++l) {
    for (const auto& v : case_vars) names.push_back(level_name(levels[l]) + "X" + v);
    names.push_back(level_name(levels[l]));
  }

  const std::size_t k = levels.size();
  const std::size_t n_out = cases.rows.size() * k;
  std::vector<std::int64_t> groups(n_out);
  std::vector<std::int64_t> persons(n_out);
  std::vector<std::uint8_t> chosen(n_out, 0);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_out),
                                            static_cast<Eigen::Index>(names.size()));
  std::vector<std::size_t> row_level(n_out);
  const std::size_t per_level = case_vars.size() + 1;

  for (std::size_t c = 0; c < cases.rows.size(); ++c) {
    const auto& row = cases.rows[c];
    const auto case_id = static_cast<std::int64_t>(c + 1);
    const auto person = id_col ? to_id(row[*id_col], options.id_var, c, "case data") : case_id;
    std::vector<double> values;
    for (std::size_t j = 0; j < case_vars.size(); ++j) {
      values.push_back(to_value(row[var_cols[j]], case_vars[j], c, "case data"));
    }
    const auto hit = std::find(levels.begin(), levels.end(), row[*choice_col]);
    if (hit == levels.end()) throw ValidationError("case data: choice value not among levels");
    const auto chosen_level = static_cast<std::size_t>(hit - levels.begin());
    for (std::size_t l = 0; l < k; ++l) {
      const std::size_t r = c * k + l;
      groups[r] = case_id;
      persons[r] = person;
      chosen[r] = l == chosen_level ? 1 : 0;
      row_level[r] = l;
      if (l == 0) continue;
      const auto base = static_cast<Eigen::Index>((l - 1) * per_level);
      for (std::size_t j = 0; j < values.size(); ++j) {
        x(static_cast<Eigen::Index>(r), base + static_cast<Eigen::Index>(j)) = values[j];
      }
      x(static_cast<Eigen::Index>(r), base + static_cast<Eigen::Index>(values.size())) = 1.0;
    }
  }

  // create() sorts by (person, group); carry the level through the same order.
  std::vector<std::size_t> order(n_out);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (persons[a] != persons[b]) return persons[a] < persons[b];
    return groups[a] < groups[b];
  });
  std::vector<std::size_t> sorted_level(n_out);
  for (std::size_t i = 0; i < n_out; ++i) sorted_level[i] = row_level[order[i]];

  auto data = ChoiceDataset::create(std::move(groups), std::move(persons), std::move(chosen),
                                    std::move(names), std::move(x));
  return ConvertedCases{std::move(data), std::move(levels), std::move(sorted_level)};
}

}  // namespace hbml
