#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hbml/distributions.hpp"

namespace hbml::amcmc {

/// global: one joint proposal for the whole vector.
/// mwg: Metropolis within Gibbs, one coordinate at a time.
enum class SamplerKind { Global, Mwg };

SamplerKind parse_sampler_kind(std::string_view text);
std::string_view to_string(SamplerKind kind);

/// Log unnormalized density. May return -inf outside the support; NaN is a
/// hard error.
using LogTarget = std::function<double(const Vector&)>;

/// Ridge added to the running covariance before factorization.
inline constexpr double kProposalRidge = 1e-8;
/// Exponent of the adaptation weight gamma_t = damper * t^-kAdaptationDecay.
inline constexpr double kAdaptationDecay = 0.6;

struct AdaptiveKernelState {
  SamplerKind kind = SamplerKind::Global;
  Vector current;
  double log_target_value = 0.0;
  /// Proposal scale: one entry for global, one per coordinate for mwg.
  Vector scale;
  Vector running_mean;
  Matrix running_cov;
  std::int64_t draw_count = 0;
  /// Accepted proposals: one entry for global, one per coordinate for mwg.
  std::vector<std::int64_t> accept_count;
  double target_rate = 0.234;
  double damper = 1.0;
  /// When false, steps never touch scale/mean/covariance.
  bool adapt = true;

  Eigen::Index dim() const { return current.size(); }
  /// Accepted fraction; for mwg the mean over coordinates.
  double acceptance_rate() const;
  /// Per-coordinate (mwg) or single (global) acceptance rates.
  std::vector<double> acceptance_rates() const;
};

/// Fresh state at `start`. Initial scale is 2.38/sqrt(dim) for global and
/// 2.38 per coordinate for mwg; the running covariance starts at
/// `initial_cov` or the identity. `log_target_value` is left at zero until
/// `refresh` is called.
AdaptiveKernelState make_state(SamplerKind kind, const Vector& start, double target_rate,
                               double damper, const std::optional<Matrix>& initial_cov = {});

/// Re-evaluates the target at the current point. Gibbs layers call this
/// whenever the conditioning values have changed.
void refresh(AdaptiveKernelState& state, const LogTarget& target);

void kernel_global_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng);
void kernel_mwg_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng);
/// Dispatches on state.kind.
void kernel_step(AdaptiveKernelState& state, const LogTarget& target, RngStream& rng);

/// One adaptation step at t = draw_count (which the caller has already
/// incremented): with gamma = damper * t^-0.6,
///   log scale += gamma * (accepted - target_rate)     (per coordinate for mwg)
///   mean      += gamma * (x - mean)
///   cov       += gamma * ((x - mean_old)(x - mean_old)^T - cov)
void adapt_update(AdaptiveKernelState& state, std::span<const std::uint8_t> accepted);

double adaptation_weight(double damper, std::int64_t t);

}  // namespace hbml::amcmc
