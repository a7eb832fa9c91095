#include "hbml/estimate.hpp"

#include <algorithm>
#include <numeric>

#include "hbml/wtp.hpp"

namespace hbml {
namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

Matrix row_vector(const std::vector<double>& v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

}  // namespace

StoredResults collect_stored_results(const ModelSpec& spec, const SamplerConfig& config,
                                     const ChainOutput& chain) {
  const auto& store = chain.draws;
  const auto& report = chain.report;
  StoredResults e;
  const auto r = store.rows();
  auto& s = e.scalars;
  s["N"] = static_cast<double>(report.observations);
  s["df_r"] = static_cast<double>(r);
  s["krnd"] = static_cast<double>(spec.n_random());
  s["kfix"] = static_cast<double>(spec.n_fixed());
  s["draws"] = config.draws;
  s["burn"] = config.burn;
  s["thin"] = config.thin;
  s["random_draws"] = config.draws_random;
  s["fixed_draws"] = config.draws_fixed;
  s["damper_fixed"] = config.damp_fixed;
  s["damper_random"] = config.damp_random;
  s["opt_arate_fixed"] = config.arate_fixed;
  s["opt_arate_random"] = config.arate_random;
  s["N_groups"] = static_cast<double>(report.groups);
  s["N_choices"] = static_cast<double>(report.choices);
  s["arates_fa"] = report.fixed_rate.value_or(0.0);
  s["arates_ra"] = report.random_ave;
  s["arates_rmax"] = report.random_max;
  s["arates_rmin"] = report.random_min;
  s["inddraws"] = static_cast<double>(chain.individual.kept());

  auto& m = e.macros;
  m["cmd"] = spec.wtp() ? "bayesmixedlogitwtp" : "bayesmixedlogit";
  m["depvar"] = spec.depvar;
  m["indepvars"] = join_names(spec.indepvars());
  m["title"] = spec.wtp() ? "Bayesian Mixed Logit Model - WTP Form" : "Bayesian Mixed Logit Model";
  m["properties"] = "b V";
  m["saving"] = config.saving ? config.saving->string() : "";
  m["fixed_sampler"] = std::string(amcmc::to_string(config.sampler_fixed));
  m["random_sampler"] = std::string(amcmc::to_string(config.sampler_random));
  m["random"] = join_names(spec.random_names());
  m["fixed"] = join_names(spec.fixed_vars);
  m["identifier"] = spec.id_var;
  m["group"] = spec.group_var;
  m["indsave"] = config.indsave ? config.indsave->string() : "";

  // b and V cover every parameter column: means, covariance elements, fixed.
  const auto p = store.n_parameters();
  e.b_names.assign(store.column_names().begin(),
                   store.column_names().begin() + static_cast<std::ptrdiff_t>(p));
  Matrix draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = store.row(i)[j];
    }
  }
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(p));
  Matrix cov = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  if (r > 0) {
    mean = draws.colwise().mean().transpose();
    if (r > 1) {
      const Matrix centered = draws.rowwise() - mean.transpose();
      cov = centered.transpose() * centered / static_cast<double>(r - 1);
    }
  }
  e.matrices["b"] = mean.transpose();
  e.matrices["V"] = cov;
  e.matrices["b_init"] = chain.start.b.transpose();
  e.matrices["V_init"] = chain.start.w;
  e.matrices["arates_fixed"] = row_vector(report.fixed_rates);
  e.matrices["arates_rand"] = row_vector(report.person_rates);
  e.sample_ids = chain.individual.ids;

  if (spec.wtp()) {
    s["price_coef"] = wtp::price_transform(store).transformed;
    m["pricevar"] = *spec.price_var;
  }
  return e;
}

Estimation estimate(const ChoiceDataset& data, const ModelSpec& spec, const SamplerConfig& config) {
  Estimation est;
  est.chain = run_chain(data, spec, config);
  if (config.saving) write_draw_file(est.chain.draws, *config.saving, config.replace, config.append);
  if (config.indsave) {
    write_individual_draws(est.chain.individual, spec.id_var, *config.indsave, config.indwide,
                           config.replaceind, config.appendind);
  }
  est.summary = summarize_draws(est.chain.draws);
  est.stored = collect_stored_results(spec, config, est.chain);

  TableText text;
  text.title = est.stored.macros["title"];
  text.depvar = spec.depvar;
  if (config.saving) text.saving = config.saving->string();
  if (config.indsave) {
    text.indsave = config.indsave->string();
    text.inddraws = est.chain.individual.kept();
  }
  if (spec.wtp()) {
    text.price_var = *spec.price_var;
    text.price_coef = est.stored.scalars["price_coef"];
  }
  est.table = render_table(est.summary, est.chain.draws, est.chain.report, text);
  return est;
}

}  // namespace hbml
