#include "hbml/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hbml/csv.hpp"
#include "hbml/error.hpp"

namespace hbml {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path, csv::WriteMode mode,
                             const std::string& header_line) {
  const bool exists = std::filesystem::exists(path);
  if (mode == csv::WriteMode::Create && exists) {
    throw IoError("file " + path.string() + " already exists; specify replace or append");
  }
  if (mode == csv::WriteMode::Append && exists) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header_line) {
      throw ValidationError("cannot append to " + path.string() + ": column header differs");
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open " + path.string() + " for appending");
    return out;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << header_line << '\n';
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> cov_column_names(const std::vector<std::string>& rand_names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < rand_names.size(); ++i) {
    out.push_back("var_" + rand_names[i]);
    for (std::size_t j = i + 1; j < rand_names.size(); ++j) {
      out.push_back("cov_" + rand_names[i] + rand_names[j]);
    }
  }
  return out;
}

DrawStore::DrawStore(std::vector<std::string> random_names, std::vector<std::string> fixed_names)
    : random_(std::move(random_names)), fixed_(std::move(fixed_names)) {
  if (random_.empty()) throw ValidationError("draw store needs at least one random coefficient");
  columns_ = random_;
  const auto cov = cov_column_names(random_);
  columns_.insert(columns_.end(), cov.begin(), cov.end());
  columns_.insert(columns_.end(), fixed_.begin(), fixed_.end());
  columns_.push_back("fun_val");
  columns_.push_back("t");
}

DrawStore DrawStore::from_header(const std::vector<std::string>& header) {
  const auto bad = [](const std::string& why) {
    return ValidationError("draw file does not match the draw schema: " + why);
  };
  if (header.size() < 4) throw bad("too few columns");
  if (header[header.size() - 2] != "fun_val" || header.back() != "t") {
    throw bad("last columns must be fun_val, t");
  }
  const auto var0 = std::find(header.begin(), header.end(), "var_" + header[0]);
  if (var0 == header.end()) throw bad("no var_" + header[0] + " column");
  const std::vector<std::string> random(header.begin(), var0);
  const auto cov = cov_column_names(random);
  const auto cov_end = static_cast<std::size_t>(var0 - header.begin()) + cov.size();
  if (cov_end > header.size() - 2 ||
      !std::equal(cov.begin(), cov.end(), header.begin() + (var0 - header.begin()))) {
    throw bad("covariance columns out of order");
  }
  std::vector<std::string> fixed(header.begin() + static_cast<std::ptrdiff_t>(cov_end),
                                 header.end() - 2);
  return DrawStore(random, fixed);
}

void DrawStore::append(const Vector& b, const Matrix& w, const Vector& alpha, double fun_val) {
  const auto k = static_cast<Eigen::Index>(random_.size());
  if (b.size() != k || w.rows() != k || w.cols() != k ||
      alpha.size() != static_cast<Eigen::Index>(fixed_.size())) {
    throw ValidationError("draw store: parameter dimensions do not match the layout");
  }
  std::vector<double> row;
  row.reserve(columns_.size());
  for (Eigen::Index i = 0; i < k; ++i) row.push_back(b(i));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) row.push_back(w(i, j));
  }
  for (Eigen::Index i = 0; i < alpha.size(); ++i) row.push_back(alpha(i));
  row.push_back(fun_val);
  row.push_back(static_cast<double>(rows_.size() + 1));
  append_row(std::move(row));
}

void DrawStore::append_row(std::vector<double> row) {
  if (row.size() != columns_.size()) throw ValidationError("draw store: row has wrong width");
  for (auto& v : row) v = csv::quantize(v);
  rows_.push_back(std::move(row));
}

std::vector<double> DrawStore::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[j]);
  return out;
}

void DrawStore::permute(const std::vector<std::size_t>& order) {
  if (order.size() != rows_.size()) throw ValidationError("draw store: bad permutation");
  std::vector<std::vector<double>> next;
  next.reserve(rows_.size());
  for (auto i : order) next.push_back(rows_.at(i));
  rows_ = std::move(next);
}

SummaryRow summarize_column(const std::string& name, double mean, double sd, std::size_t retained) {
  if (retained < 2) throw ValidationError("summaries need at least 2 retained draws");
  SummaryRow row;
  row.name = name;
  row.mean = mean;
  row.sd = sd;
  if (!(sd > 0.0)) {
    row.degenerate = true;
    return row;
  }
  const auto df = static_cast<double>(retained);
  row.t_stat = mean / sd;
  row.p_value = student_t_tail(row.t_stat, df);
  const double q = student_t_quantile(0.975, df);
  row.ci_low = mean - q * sd;
  row.ci_high = mean + q * sd;
  return row;
}

std::vector<SummaryRow> summarize_draws(const DrawStore& store) {
  const auto r = store.rows();
  if (r < 2) throw ValidationError("summaries need at least 2 retained draws");
  std::vector<SummaryRow> out;
  for (std::size_t j = 0; j < store.n_parameters(); ++j) {
    // Sorting first makes the result independent of row order.
    auto values = store.column(j);
    std::sort(values.begin(), values.end());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(r - 1));
    out.push_back(summarize_column(store.column_names()[j], mean, sd, r));
  }
  return out;
}

void write_draw_file(const DrawStore& store, const std::filesystem::path& path, bool replace,
                     bool append) {
  auto out = open_for_write(path, csv::write_mode(replace, append), join(store.column_names()));
  for (std::size_t i = 0; i < store.rows(); ++i) {
    const auto& row = store.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << csv::format_number(row[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

DrawStore read_draw_file(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  auto store = DrawStore::from_header(table.header);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::vector<double> row;
    for (const auto& cell : table.rows[i]) {
      const auto v = csv::to_double(cell);
      if (!v) {
        throw ValidationError(path.string() + ": row " + std::to_string(i + 1) +
                              ": non-numeric value '" + cell + "'");
      }
      row.push_back(*v);
    }
    store.append_row(std::move(row));
  }
  return store;
}

void write_individual_draws(const IndividualDraws& draws, const std::string& id_var,
                            const std::filesystem::path& path, bool wide, bool replace,
                            bool append) {
  const auto k = draws.names.size();
  std::vector<std::string> header{id_var};
  if (wide) {
    for (std::size_t d = 1; d <= draws.kept(); ++d) {
      for (const auto& n : draws.names) header.push_back(n + "_" + std::to_string(d));
    }
  } else {
    header.push_back("t");
    header.insert(header.end(), draws.names.begin(), draws.names.end());
  }
  auto out = open_for_write(path, csv::write_mode(replace, append), join(header));
  const auto n = draws.ids.size();
  if (wide) {
    for (std::size_t p = 0; p < n; ++p) {
      out << draws.ids[p];
      for (const auto& m : draws.draws) {
        for (std::size_t j = 0; j < k; ++j) {
          out << ',' << csv::format_number(m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)));
        }
      }
      out << '\n';
    }
  } else {
    for (std::size_t d = 0; d < draws.kept(); ++d) {
      for (std::size_t p = 0; p < n; ++p) {
        out << draws.ids[p] << ',' << draws.t[d];
        for (std::size_t j = 0; j < k; ++j) {
          out << ','
              << csv::format_number(
                     draws.draws[d](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(j)));
        }
        out << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hbml
