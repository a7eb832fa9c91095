#include "hbml/hbsampler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "hbml/error.hpp"

namespace hbml {
namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker, so results written per index do not depend
/// on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

int SamplerConfig::retained() const { return thin > 0 ? (draws - burn) / thin : 0; }

void SamplerConfig::validate() const {
  if (draws < 1) throw ValidationError("draws() must be positive");
  if (burn < 0) throw ValidationError("burn() must be non-negative");
  if (thin < 1) throw ValidationError("thin() must be at least 1");
  if (burn >= draws) throw ValidationError("burn() must be smaller than draws()");
  if (retained() < 1) throw ValidationError("no draws retained after burn-in and thinning");
  if (draws_random < 1) throw ValidationError("drawsrandom() must be at least 1");
  if (draws_fixed < 1) throw ValidationError("drawsfixed() must be at least 1");
  for (double r : {arate_random, arate_fixed}) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("acceptance rates must lie in (0, 1)");
  }
  for (double d : {damp_random, damp_fixed}) {
    if (!(d > 0.0 && d <= 1.0)) throw ValidationError("damping parameters must lie in (0, 1]");
  }
  if (indkeep && *indkeep < 1) throw ValidationError("indkeep() must be positive");
  if (replace && append) throw ValidationError("replace and append are mutually exclusive");
  if (replaceind && appendind) {
    throw ValidationError("replaceind and appendind are mutually exclusive");
  }
}

double occasion_choice_logprob(std::span<const double> utilities, std::size_t chosen) {
  const double umax = *std::max_element(utilities.begin(), utilities.end());
  double sum = 0.0;
  for (double u : utilities) sum += std::exp(u - umax);
  return utilities[chosen] - umax - std::log(sum);
}

ChoiceModel::ChoiceModel(const ChoiceDataset& data, const ModelSpec& spec)
    : index_(build_index(data)),
      n_random_(static_cast<Eigen::Index>(spec.n_random())),
      n_fixed_(static_cast<Eigen::Index>(spec.n_fixed())),
      wtp_(spec.wtp()) {
  spec.validate();
  const Matrix x_rand = data.columns(spec.rand_vars);
  const Matrix x_fixed = data.columns(spec.fixed_vars);
  const Vector price = wtp_ ? Vector(data.columns({*spec.price_var}).col(0)) : Vector();
  persons_.reserve(index_.persons.size());
  for (const auto& p : index_.persons) {
    const auto first = static_cast<Eigen::Index>(p.occasions.front().first_row);
    const auto& last_occ = p.occasions.back();
    const auto n_rows = static_cast<Eigen::Index>(last_occ.first_row + last_occ.n_rows) - first;
    PersonBlock block;
    block.id = p.person_id;
    block.x_rand = x_rand.middleRows(first, n_rows);
    block.x_fixed = x_fixed.middleRows(first, n_rows);
    if (wtp_) block.price = price.segment(first, n_rows);
    for (auto occ : p.occasions) {
      occ.first_row -= static_cast<std::size_t>(first);
      block.occasions.push_back(occ);
    }
    persons_.push_back(std::move(block));
  }
}

double ChoiceModel::person_loglik(std::size_t n, const Vector& beta_n, const Vector& alpha) const {
  const auto& p = persons_[n];
  Vector u;
  if (wtp_) {
    const Eigen::Index k = n_random_ - 1;
    u = p.x_rand * beta_n.tail(k) - p.price;
    if (n_fixed_ > 0) u.noalias() += p.x_fixed * alpha;
    u *= std::exp(beta_n(0));
  } else {
    u = p.x_rand * beta_n;
    if (n_fixed_ > 0) u.noalias() += p.x_fixed * alpha;
  }
  double total = 0.0;
  for (const auto& occ : p.occasions) {
    total += occasion_choice_logprob(
        std::span<const double>(u.data() + occ.first_row, occ.n_rows), occ.chosen_offset);
  }
  return total;
}

double ChoiceModel::total_loglik(const Matrix& beta, const Vector& alpha, unsigned threads) const {
  std::vector<double> parts(persons_.size());
  parallel_for(persons_.size(), threads, [&](std::size_t n) {
    parts[n] = person_loglik(n, beta.row(static_cast<Eigen::Index>(n)).transpose(), alpha);
  });
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

StartValues compute_start_values(const ChoiceDataset& data, const ModelSpec& spec,
                                 const SamplerConfig& config) {
  const auto kr = static_cast<Eigen::Index>(spec.n_random());
  const auto kf = static_cast<Eigen::Index>(spec.n_fixed());
  StartValues start;
  if (config.from) {
    if (config.from->size() != kr + kf) {
      throw ValidationError("from() must hold " + std::to_string(kr + kf) +
                            " values (random means, then fixed coefficients)");
    }
    start.b = config.from->head(kr);
    start.alpha = config.from->tail(kf);
  } else {
    const auto vars = spec.model_vars();
    auto fit = clogit_fit(data, vars);
    if (!fit.converged) {
      start.warnings.push_back("conditional logit for starting values did not converge after " +
                               std::to_string(fit.iterations) + " iterations");
    }
    start.b.resize(kr);
    start.alpha.resize(kf);
    double divisor = 1.0;
    Eigen::Index offset = 0;
    if (spec.wtp()) {
      const double price_coef = fit.coefficient(*spec.price_var);
      divisor = std::max(std::fabs(price_coef), 0.01);
      start.b(0) = std::log(divisor);
      offset = 1;
    }
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(spec.rand_vars.size()); ++j) {
      start.b(offset + j) = fit.coefficient(spec.rand_vars[static_cast<std::size_t>(j)]) / divisor;
    }
    for (Eigen::Index j = 0; j < kf; ++j) {
      start.alpha(j) = fit.coefficient(spec.fixed_vars[static_cast<std::size_t>(j)]) / divisor;
    }
    start.clogit = std::move(fit);
  }
  if (config.from_variance) {
    if (config.from_variance->rows() != kr || config.from_variance->cols() != kr) {
      throw ValidationError("fromvariance() must be " + std::to_string(kr) + " x " +
                            std::to_string(kr));
    }
    start.w = SpdMatrix(*config.from_variance).matrix();
  } else {
    start.w = Matrix::Identity(kr, kr);
  }
  if (!start.b.allFinite() || !start.alpha.allFinite()) {
    throw NumericalError("starting values are not finite");
  }
  return start;
}

Vector gibbs_layer_b(const Matrix& beta, const SpdMatrix& w, RngStream& rng) {
  const auto n = beta.rows();
  if (n < 1) throw ValidationError("gibbs_layer_b: no individuals");
  const Vector mean = beta.colwise().mean().transpose();
  return mvn_sample(mean, w.scaled(1.0 / static_cast<double>(n)), rng);
}

SpdMatrix gibbs_layer_w(const Matrix& beta, const Vector& b, RngStream& rng) {
  const auto n = beta.rows();
  const auto k = beta.cols();
  if (n < 1) throw ValidationError("gibbs_layer_w: no individuals");
  const Matrix centered = beta.rowwise() - b.transpose();
  const Matrix scale = Matrix::Identity(k, k) + centered.transpose() * centered;
  return invwishart_sample(CovariancePrior::dof(k) + static_cast<double>(n), SpdMatrix(scale), rng);
}

void gibbs_layer_beta(const ChoiceModel& model, std::size_t n, amcmc::AdaptiveKernelState& kernel,
                      const Vector& b, const SpdMatrix& w, const Vector& alpha, int steps,
                      RngStream& rng) {
  const amcmc::LogTarget target = [&](const Vector& beta_n) {
    return model.person_loglik(n, beta_n, alpha) + mvn_logpdf(beta_n, b, w);
  };
  amcmc::refresh(kernel, target);
  for (int s = 0; s < steps; ++s) amcmc::kernel_step(kernel, target, rng);
}

void gibbs_layer_alpha(const ChoiceModel& model, amcmc::AdaptiveKernelState& kernel,
                       const Matrix& beta, int steps, RngStream& rng, unsigned threads) {
  const amcmc::LogTarget target = [&](const Vector& alpha) {
    return model.total_loglik(beta, alpha, threads);
  };
  amcmc::refresh(kernel, target);
  for (int s = 0; s < steps; ++s) amcmc::kernel_step(kernel, target, rng);
}

ChainOutput run_chain(const ChoiceDataset& data, const ModelSpec& spec, const SamplerConfig& config) {
  config.validate();
  spec.validate();
  const ChoiceModel model(data, spec);
  const auto n = model.n_persons();
  const auto kf = model.n_fixed();
  const unsigned threads = std::max(1u, config.threads);

  ChainOutput out;
  out.start = compute_start_values(data, spec, config);

  ChainState& state = out.final_state;
  state.b = out.start.b;
  state.w = SpdMatrix(out.start.w);
  state.alpha = out.start.alpha;
  state.beta = state.b.transpose().replicate(static_cast<Eigen::Index>(n), 1);
  const std::optional<Matrix> initial_cov =
      config.from_variance ? std::optional<Matrix>(state.w.matrix()) : std::nullopt;
  state.person_kernels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    state.person_kernels.push_back(amcmc::make_state(config.sampler_random, state.b,
                                                     config.arate_random, config.damp_random,
                                                     initial_cov));
  }
  if (kf > 0) {
    state.fixed_kernel = amcmc::make_state(config.sampler_fixed, state.alpha, config.arate_fixed,
                                           config.damp_fixed);
  }

  auto random_names = spec.random_names();
  out.draws = DrawStore(random_names, spec.fixed_vars);
  const bool keep_individual = config.indsave.has_value();
  const auto retained_total = static_cast<std::size_t>(config.retained());
  const std::size_t ind_capacity =
      config.indkeep ? std::min<std::size_t>(static_cast<std::size_t>(*config.indkeep), retained_total)
                     : retained_total;
  std::deque<std::pair<int, Matrix>> ind_history;

  RunReport& report = out.report;
  report.ln_fc.reserve(static_cast<std::size_t>(config.draws));
  const std::uint64_t seed = config.seed;
  int retained_index = 0;

  for (int t = 1; t <= config.draws; ++t) {
    state.iteration = t;
    const auto iter = static_cast<std::uint64_t>(t);

    // Individual coefficients; conditionally independent given (b, W, alpha).
    parallel_for(n, threads, [&](std::size_t i) {
      RngStream rng(seed, {StreamTag::IndividualCoefs, iter,
                           static_cast<std::uint64_t>(model.person_id(i))});
      auto& kernel = state.person_kernels[i];
      gibbs_layer_beta(model, i, kernel, state.b, state.w, state.alpha, config.draws_random, rng);
      state.beta.row(static_cast<Eigen::Index>(i)) = kernel.current.transpose();
    });

    {
      RngStream rng(seed, {StreamTag::PopulationMean, iter, 0});
      state.b = gibbs_layer_b(state.beta, state.w, rng);
    }
    {
      RngStream rng(seed, {StreamTag::PopulationCov, iter, 0});
      state.w = gibbs_layer_w(state.beta, state.b, rng);
    }
    double fun_val = 0.0;
    if (state.fixed_kernel) {
      RngStream rng(seed, {StreamTag::FixedCoefs, iter, 0});
      gibbs_layer_alpha(model, *state.fixed_kernel, state.beta, config.draws_fixed, rng, threads);
      state.alpha = state.fixed_kernel->current;
      fun_val = state.fixed_kernel->log_target_value;
    } else {
      fun_val = model.total_loglik(state.beta, state.alpha, threads);
    }
    if (!std::isfinite(fun_val)) {
      throw NumericalError("log likelihood is not finite at pass " + std::to_string(t));
    }
    report.ln_fc.push_back(fun_val);

    if (t > config.burn && (t - config.burn) % config.thin == 0) {
      ++retained_index;
      out.draws.append(state.b, state.w.matrix(), state.alpha, fun_val);
      if (keep_individual) {
        ind_history.emplace_back(retained_index, state.beta);
        if (ind_history.size() > ind_capacity) ind_history.pop_front();
      }
    }

    if (config.noisy && config.progress) {
      *config.progress << '.';
      if (t % 50 == 0) *config.progress << "\nln_fc(p) = " << fun_val << '\n';
      config.progress->flush();
    }
  }
  if (config.noisy && config.progress && config.draws % 50 != 0) *config.progress << '\n';

  if (config.jumble) {
    std::vector<std::size_t> order(out.draws.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(seed, {StreamTag::Jumble, 0, 0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    out.draws.permute(order);
  }

  // Individual draws.
  out.individual.names = random_names;
  for (std::size_t i = 0; i < n; ++i) out.individual.ids.push_back(model.person_id(i));
  for (auto& [idx, m] : ind_history) {
    out.individual.t.push_back(idx);
    out.individual.draws.push_back(std::move(m));
  }

  // Report.
  const auto& index = model.index();
  report.observations = index.n_observations;
  report.groups = index.n_persons;
  report.choices = index.n_choices;
  report.draws = config.draws;
  report.burn = config.burn;
  report.thin = config.thin;
  for (const auto& k : state.person_kernels) report.person_rates.push_back(k.acceptance_rate());
  const auto [mn, mx] = std::minmax_element(report.person_rates.begin(), report.person_rates.end());
  report.random_min = *mn;
  report.random_max = *mx;
  report.random_ave = std::accumulate(report.person_rates.begin(), report.person_rates.end(), 0.0) /
                      static_cast<double>(report.person_rates.size());
  if (state.fixed_kernel) {
    report.fixed_rates = state.fixed_kernel->acceptance_rates();
    report.fixed_rate = state.fixed_kernel->acceptance_rate();
  }
  report.warnings = out.start.warnings;
  return out;
}

}  // namespace hbml
