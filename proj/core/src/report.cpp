#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hbml/error.hpp"
#include "hbml/results.hpp"

namespace hbml {
namespace {

constexpr std::size_t kHeaderLeftWidth = 51;
constexpr std::size_t kMinNameWidth = 12;
constexpr std::size_t kMaxNameWidth = 13;

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string printf_str(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string header_stat(const std::string& label, long long value) {
  return pad_right(label, 16) + "=" + pad_left(std::to_string(value), 10);
}

std::string rate(double v) { return printf_str("%.3f", v); }

}  // namespace

std::string format_g9(double value) {
  if (std::isnan(value)) return ".";
  if (value == 0.0) return "0";
  const double a = std::fabs(value);
  const std::string sign = value < 0.0 ? "-" : "";
  constexpr int kWidth = 8;
  std::string body;
  const int int_digits = a >= 1.0 ? static_cast<int>(std::floor(std::log10(a))) + 1 : 0;
  if (int_digits <= kWidth && a >= 1e-4) {
    int decimals = a >= 1.0 ? kWidth - int_digits - 1 : kWidth - 1;
    for (; decimals >= 0; --decimals) {
      body = printf_str(("%." + std::to_string(decimals) + "f").c_str(), a);
      if (body.find('.') != std::string::npos) {
        while (body.back() == '0') body.pop_back();
        if (body.back() == '.') body.pop_back();
      }
      if (body.rfind("0.", 0) == 0) body.erase(0, 1);
      if (body.size() <= static_cast<std::size_t>(kWidth)) break;
    }
    if (body == "0" || body.empty()) body.clear();
  }
  if (body.empty()) {
    body = printf_str("%.2e", a);
  }
  return sign + body;
}

std::string abbreviate(const std::string& name, std::size_t width) {
  if (name.size() <= width) return name;
  if (width < 3) return name.substr(0, width);
  return name.substr(0, width - 2) + "~" + name.back();
}

std::string render_coefficient_table(const std::vector<SummaryRow>& rows, const DrawStore& store,
                                     const std::string& depvar) {
  std::size_t width = std::max(kMinNameWidth, depvar.size());
  for (const auto& r : rows) width = std::max(width, r.name.size());
  width = std::min(width, kMaxNameWidth);

  const std::string rule(width + 66, '-');
  const std::string mid = std::string(width + 1, '-') + "+" + std::string(64, '-');
  std::ostringstream out;
  out << rule << '\n';
  out << pad_left(abbreviate(depvar, width), width)
      << " |      Coef.   Std. Err.      t    P>|t|     [95% Conf. Interval]\n";

  auto print_row = [&](const SummaryRow& r) {
    out << pad_left(abbreviate(r.name, width), width) << " |  " << pad_left(format_g9(r.mean), 9)
        << "  " << pad_left(format_g9(r.sd), 9);
    if (r.degenerate) {
      out << ' ' << pad_left(".", 8) << "   " << pad_left(".", 5) << "    " << pad_left(".", 9)
          << "   " << pad_left(".", 9) << '\n';
    } else {
      out << ' ' << pad_left(printf_str("%.2f", r.t_stat), 8) << "   "
          << printf_str("%5.3f", r.p_value) << "    " << pad_left(format_g9(r.ci_low), 9) << "   "
          << pad_left(format_g9(r.ci_high), 9) << '\n';
    }
  };
  auto section = [&](const std::string& label, std::size_t first, std::size_t count) {
    if (count == 0) return;
    out << mid << '\n';
    out << pad_right(label, width + 1) << "|\n";
    for (std::size_t i = first; i < first + count && i < rows.size(); ++i) print_row(rows[i]);
  };
  const auto nr = store.n_random();
  const auto nc = store.n_cov();
  section("Fixed", nr + nc, store.n_fixed());
  section("Random", 0, nr);
  section("Cov_Random", nr, nc);
  out << rule << '\n';
  return out.str();
}

std::string render_table(const std::vector<SummaryRow>& rows, const DrawStore& store,
                         const RunReport& report, const TableText& text) {
  std::ostringstream out;
  out << "\n";
  out << pad_right(text.title, kHeaderLeftWidth)
      << header_stat("Observations", static_cast<long long>(report.observations)) << '\n';
  out << std::string(kHeaderLeftWidth, ' ')
      << header_stat("Groups", static_cast<long long>(report.groups)) << '\n';
  out << pad_right("Acceptance rates:", kHeaderLeftWidth)
      << header_stat("Choices", static_cast<long long>(report.choices)) << '\n';
  std::string fixed = " Fixed coefs              =";
  if (report.fixed_rate) fixed += " " + rate(*report.fixed_rate);
  out << pad_right(fixed, kHeaderLeftWidth) << header_stat("Total draws", report.draws) << '\n';
  const std::string random = " Random coefs(ave,min,max)= " + rate(report.random_ave) + ", " +
                             rate(report.random_min) + ", " + rate(report.random_max);
  out << pad_right(random, kHeaderLeftWidth) << header_stat("Burn-in draws", report.burn) << '\n';
  if (report.thin > 1) {
    out << std::string(kHeaderLeftWidth, ' ') << "*One of every " << report.thin
        << " draws kept\n";
  }
  out << render_coefficient_table(rows, store, text.depvar);
  if (text.saving) out << "   Draws saved in " << *text.saving << '\n';
  if (text.indsave) {
    out << "   " << text.inddraws << " value(s) of individual-level random parameters saved in "
        << *text.indsave << '\n';
  }
  if (text.price_var && text.price_coef) {
    out << "The price variable is " << *text.price_var
        << " with transformed coef (-exp(b)): " << printf_str("%.3f", *text.price_coef) << '\n';
  }
  out << "\n\n";
  out << "   Attention!\n";
  out << "   *Results are presented to conform with Stata convention, but\n";
  out << "    are summary statistics of draws, not coefficient estimates.\n";
  return out.str();
}

std::string StoredResults::to_json() const {
  nlohmann::ordered_json doc;
  auto& s = doc["scalars"];
  s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scalars) s[k] = v;
  auto& m = doc["macros"];
  m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : macros) m[k] = v;
  auto& mats = doc["matrices"];
  mats = nlohmann::ordered_json::object();
  for (const auto& [k, v] : matrices) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      auto row = nlohmann::ordered_json::array();
      for (Eigen::Index j = 0; j < v.cols(); ++j) row.push_back(v(i, j));
      rows.push_back(std::move(row));
    }
    mats[k] = std::move(rows);
  }
  doc["b_names"] = b_names;
  doc["functions"]["sample"] = {{"N_persons", sample_ids.size()}, {"ids", sample_ids}};
  return doc.dump(2) + "\n";
}

void export_stored_results(const StoredResults& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << results.to_json();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hbml
