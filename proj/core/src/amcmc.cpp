#include "hbml/amcmc.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hbml/error.hpp"

namespace hbml::amcmc {
namespace {

constexpr double kInitialScale = 2.38;

double evaluate(const LogTarget& target, const Vector& x) {
  const double v = target(x);
  if (std::isnan(v)) throw NumericalError("log target returned NaN");
  if (v == std::numeric_limits<double>::infinity()) {
    throw NumericalError("log target returned +inf");
  }
  return v;
}

bool metropolis_accept(double proposed, double current, RngStream& rng) {
  // Always draw the uniform so the stream position does not depend on the
  // outcome.
  const double u = rng.uniform();
  if (proposed == -std::numeric_limits<double>::infinity()) return false;
  if (current == -std::numeric_limits<double>::infinity()) return true;
  const double log_ratio = proposed - current;
  return log_ratio >= 0.0 || std::log(u) < log_ratio;
}

}  // namespace

SamplerKind parse_sampler_kind(std::string_view text) {
  if (text == "global") return SamplerKind::Global;
  if (text == "mwg") return SamplerKind::Mwg;
  throw ValidationError("sampler must be global or mwg, got '" + std::string(text) + "'");
}

std::string_view to_string(SamplerKind kind) {
  return kind == SamplerKind::Global ? "global" : "mwg";
}

double AdaptiveKernelState::acceptance_rate() const {
  if (draw_count == 0) return 0.0;
  const auto total = std::accumulate(accept_count.begin(), accept_count.end(), std::int64_t{0});
  return static_cast<double>(total) /
         (static_cast<double>(draw_count) * static_cast<double>(accept_count.size()));
}

std::vector<double> AdaptiveKernelState::acceptance_rates() const {
  std::vector<double> out;
  for (auto a : accept_count) {
    out.push_back(draw_count == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(draw_count));
  }
  return out;
}

AdaptiveKernelState make_state(SamplerKind kind, const Vector& start, double target_rate,
                               double damper, const std::optional<Matrix>& initial_cov) {
  const auto k = start.size();
  if (k == 0) throw ValidationError("adaptive kernel: empty parameter vector");
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw ValidationError("acceptance rate target must lie in (0, 1)");
  }
  if (!(damper > 0.0 && damper <= 1.0)) throw ValidationError("damping parameter must lie in (0, 1]");
  AdaptiveKernelState s;
  s.kind = kind;
  s.current = start;
  s.running_mean = start;
  if (initial_cov) {
    if (initial_cov->rows() != k || initial_cov->cols() != k) {
      throw ValidationError("adaptive kernel: initial covariance has wrong shape");
    }
    s.running_cov = SpdMatrix(*initial_cov).matrix();
  } else {
    s.running_cov = Matrix::Identity(k, k);
  }
  if (kind == SamplerKind::Global) {
    s.scale = Vector::Constant(1, kInitialScale / std::sqrt(static_cast<double>(k)));
    s.accept_count.assign(1, 0);
  } else {
    s.scale = Vector::Constant(k, kInitialScale);
    s.accept_count.assign(static_cast<std::size_t>(k), 0);
  }
  s.target_rate = target_rate;
  s.damper = damper;
  return s;
}

void refresh(AdaptiveKernelState& state, const LogTarget& target) {
  state.log_target_value = evaluate(target, state.current);
}

double adaptation_weight(double damper, std::int64_t t) {
  return damper * std::pow(static_cast<double>(t), -kAdaptationDecay);
}

void adapt_update(AdaptiveKernelState& state, std::span<const std::uint8_t> accepted) {
  if (state.draw_count < 1) throw ValidationError("adapt_update: draw_count must be >= 1");
  if (accepted.size() != static_cast<std::size_t>(state.scale.size())) {
    throw ValidationError("adapt_update: acceptance flags do not match scale dimension");
  }
  if (!state.adapt) return;
  const double gamma = adaptation_weight(state.damper, state.draw_count);
  for (Eigen::Index j = 0; j < state.scale.size(); ++j) {
    const double hit = accepted[static_cast<std::size_t>(j)] != 0 ? 1.0 : 0.0;
    state.scale(j) *= std::exp(gamma * (hit - state.target_rate));
  }
  const Vector dev = state.current - state.running_mean;
  state.running_mean += gamma * dev;
  state.running_cov += gamma * (dev * dev.transpose() - state.running_cov);
}

void kernel_global_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng) {
  const auto k = state.dim();
  Matrix cov = 0.5 * (state.running_cov + state.running_cov.transpose());
  cov.diagonal().array() += kProposalRidge;
  Eigen::LLT<Matrix> llt(cov);
  Matrix l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    l = cov.diagonal().cwiseMax(kProposalRidge).cwiseSqrt().asDiagonal();
  }
  Vector z(k);
  for (Eigen::Index i = 0; i < k; ++i) z(i) = rng.normal();
  const Vector proposal = state.current + state.scale(0) * (l * z);
  const double value = evaluate(target, proposal);
  const bool accepted = metropolis_accept(value, state.log_target_value, rng);
  if (accepted) {
    state.current = proposal;
    state.log_target_value = value;
    ++state.accept_count[0];
  }
  ++state.draw_count;
  const std::uint8_t flags[1] = {static_cast<std::uint8_t>(accepted)};
  adapt_update(state, flags);
}

void kernel_mwg_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng) {
  const auto k = state.dim();
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(k), 0);
  Vector proposal = state.current;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double old = proposal(j);
    proposal(j) = old + state.scale(j) * rng.normal();
    const double value = evaluate(target, proposal);
    if (metropolis_accept(value, state.log_target_value, rng)) {
      state.log_target_value = value;
      ++state.accept_count[static_cast<std::size_t>(j)];
      flags[static_cast<std::size_t>(j)] = 1;
    } else {
      proposal(j) = old;
    }
  }
  state.current = proposal;
  ++state.draw_count;
  adapt_update(state, flags);
}

void kernel_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng) {
  if (state.kind == SamplerKind::Global) {
    kernel_global_step(state, target, rng);
  } else {
    kernel_mwg_step(state, target, rng);
  }
}

}  // namespace hbml::amcmc
