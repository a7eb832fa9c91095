#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hbml/distributions.hpp"

namespace hbml {

/// var_<a>, cov_<a><b>, ... in row-wise upper-triangle order.
std::vector<std::string> cov_column_names(const std::vector<std::string>& rand_names);

/// Retained posterior draws. Columns: random-coefficient means, covariance
/// elements (row-wise upper triangle), fixed coefficients, fun_val, t.
/// Values are stored rounded to 9 significant digits, which is also the
/// precision of the CSV files, so write/read round-trips exactly.
class DrawStore {
 public:
  DrawStore() = default;
  DrawStore(std::vector<std::string> random_names, std::vector<std::string> fixed_names);
  /// Rebuild the layout from a draw-file header; throws ValidationError when
  /// the header does not follow the schema.
  static DrawStore from_header(const std::vector<std::string>& header);

  const std::vector<std::string>& column_names() const { return columns_; }
  const std::vector<std::string>& random_names() const { return random_; }
  const std::vector<std::string>& fixed_names() const { return fixed_; }
  std::size_t n_random() const { return random_.size(); }
  std::size_t n_fixed() const { return fixed_.size(); }
  std::size_t n_cov() const { return random_.size() * (random_.size() + 1) / 2; }
  /// Columns that are model parameters (everything but fun_val and t).
  std::size_t n_parameters() const { return columns_.size() - 2; }
  std::size_t fun_val_column() const { return columns_.size() - 2; }

  /// Append a draw; t is the 1-based position at append time.
  void append(const Vector& b, const Matrix& w, const Vector& alpha, double fun_val);
  /// Append a full row (including fun_val and t) as read from a file.
  void append_row(std::vector<double> row);

  std::size_t rows() const { return rows_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  std::vector<double> column(std::size_t j) const;
  /// Reorder rows: new row i is old row order[i].
  void permute(const std::vector<std::size_t>& order);

 private:
  std::vector<std::string> random_;
  std::vector<std::string> fixed_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

struct SummaryRow {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double t_stat = 0.0;
  double p_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Zero spread: t, p and the interval are undefined and print as ".".
  bool degenerate = false;
};

/// t = mean/sd, two-sided p and 95% interval from Student-t with df = R.
SummaryRow summarize_column(const std::string& name, double mean, double sd, std::size_t retained);
/// One row per parameter column (fun_val and t excluded); sd uses divisor R-1.
std::vector<SummaryRow> summarize_draws(const DrawStore& store);

void write_draw_file(const DrawStore& store, const std::filesystem::path& path, bool replace,
                     bool append);
DrawStore read_draw_file(const std::filesystem::path& path);

/// Kept draws of the individual-level coefficients.
struct IndividualDraws {
  std::vector<std::int64_t> ids;
  std::vector<std::string> names;
  /// Retained-draw index (1-based) of each kept draw.
  std::vector<int> t;
  /// One N x K matrix per kept draw.
  std::vector<Matrix> draws;

  std::size_t kept() const { return draws.size(); }
};

/// Long form: header id_var,t,<names>; one row per (draw, person).
/// Wide form: header id_var,<name>_<k>...; one row per person holding all kept
/// draws (draw-major).
void write_individual_draws(const IndividualDraws& draws, const std::string& id_var,
                            const std::filesystem::path& path, bool wide, bool replace,
                            bool append);

struct RunReport {
  std::size_t observations = 0;
  std::size_t groups = 0;
  std::size_t choices = 0;
  int draws = 0;
  int burn = 0;
  int thin = 1;
  /// Empty when the model has no fixed coefficients.
  std::optional<double> fixed_rate;
  std::vector<double> fixed_rates;
  double random_ave = 0.0;
  double random_min = 0.0;
  double random_max = 0.0;
  std::vector<double> person_rates;
  /// fun_val after every pass, burn-in included.
  std::vector<double> ln_fc;
  std::vector<std::string> warnings;
};

/// Text surrounding the coefficient table.
struct TableText {
  std::string title = "Bayesian Mixed Logit Model";
  std::string depvar;
  std::optional<std::string> saving;
  std::optional<std::string> indsave;
  std::size_t inddraws = 0;
  std::optional<std::string> price_var;
  std::optional<double> price_coef;
};

/// Section table only: Fixed, Random, Cov_Random.
std::string render_coefficient_table(const std::vector<SummaryRow>& rows, const DrawStore& store,
                                     const std::string& depvar);
/// Full display: header block, coefficient table, footers, caution note.
std::string render_table(const std::vector<SummaryRow>& rows, const DrawStore& store,
                         const RunReport& report, const TableText& text);

/// Stata %9.0g: at most 8 characters of magnitude, leading zero dropped.
std::string format_g9(double value);
/// Name cell abbreviated to `width` with "~" like Stata output.
std::string abbreviate(const std::string& name, std::size_t width);

/// Mirror of the documented e() results.
struct StoredResults {
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> macros;
  std::map<std::string, Matrix> matrices;
  /// Column names of b/V.
  std::vector<std::string> b_names;
  /// Stand-in for e(sample): identifiers of the persons used.
  std::vector<std::int64_t> sample_ids;

  std::string to_json() const;
};

void export_stored_results(const StoredResults& results, const std::filesystem::path& path);

}  // namespace hbml
