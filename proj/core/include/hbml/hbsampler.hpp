#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbml/amcmc.hpp"
#include "hbml/choicedata.hpp"
#include "hbml/clogit.hpp"
#include "hbml/distributions.hpp"
#include "hbml/model.hpp"
#include "hbml/results.hpp"

namespace hbml {

/// Every run option. Defaults follow the documented command defaults; burn,
/// thin and the dampers have no documented default and use 0, 1 and 1.0.
struct SamplerConfig {
  int draws = 1000;
  int burn = 0;
  int thin = 1;
  bool jumble = false;
  int draws_random = 1;
  int draws_fixed = 1;
  double arate_random = 0.234;
  double arate_fixed = 0.234;
  amcmc::SamplerKind sampler_random = amcmc::SamplerKind::Global;
  amcmc::SamplerKind sampler_fixed = amcmc::SamplerKind::Global;
  double damp_random = 1.0;
  double damp_fixed = 1.0;
  /// Random-coefficient means, then fixed coefficients.
  std::optional<Vector> from;
  /// Starting covariance of the random coefficients.
  std::optional<Matrix> from_variance;
  std::uint64_t seed = 20140623;
  bool noisy = false;
  /// Where noisy progress goes; nothing is printed when null.
  std::ostream* progress = nullptr;
  /// Worker threads for the individual-coefficient layer. Output does not
  /// depend on this value.
  unsigned threads = 1;

  std::optional<std::filesystem::path> saving;
  bool replace = false;
  bool append = false;
  std::optional<std::filesystem::path> indsave;
  std::optional<int> indkeep;
  bool indwide = false;
  bool replaceind = false;
  bool appendind = false;

  /// floor((draws - burn) / thin).
  int retained() const;
  void validate() const;
};

/// Inverse-Wishart prior on the random-coefficient covariance: identity
/// scale, degrees of freedom equal to the number of random coefficients.
struct CovariancePrior {
  static double dof(Eigen::Index k) { return static_cast<double>(k); }
};

/// u_chosen - logsumexp(u), computed with max-shifting.
double occasion_choice_logprob(std::span<const double> utilities, std::size_t chosen);

/// Per-person design blocks, laid out for fast repeated likelihood calls.
class ChoiceModel {
 public:
  ChoiceModel(const ChoiceDataset& data, const ModelSpec& spec);

  std::size_t n_persons() const { return persons_.size(); }
  Eigen::Index n_random() const { return n_random_; }
  Eigen::Index n_fixed() const { return n_fixed_; }
  bool wtp() const { return wtp_; }
  std::int64_t person_id(std::size_t n) const { return persons_[n].id; }
  const ChoiceIndex& index() const { return index_; }

  /// Sum over the person's occasions of the logit choice log-probability.
  /// Preference space: u = x_rand . beta + x_fixed . alpha.
  /// WTP space: beta = (b_price, w) and u = exp(b_price) (x_rand . w + x_fixed . alpha - price).
  double person_loglik(std::size_t n, const Vector& beta_n, const Vector& alpha) const;
  /// Sum of person_loglik over all persons (rows of `beta`), summed in person order.
  double total_loglik(const Matrix& beta, const Vector& alpha, unsigned threads = 1) const;

 private:
  struct PersonBlock {
    std::int64_t id = 0;
    Matrix x_rand;
    Matrix x_fixed;
    Vector price;
    std::vector<Occasion> occasions;
  };

  std::vector<PersonBlock> persons_;
  ChoiceIndex index_;
  Eigen::Index n_random_ = 0;
  Eigen::Index n_fixed_ = 0;
  bool wtp_ = false;
};

struct ChainState {
  Vector b;
  SpdMatrix w = SpdMatrix::identity(1);
  Vector alpha;
  /// N x K_r, one row per person in index order.
  Matrix beta;
  std::vector<amcmc::AdaptiveKernelState> person_kernels;
  std::optional<amcmc::AdaptiveKernelState> fixed_kernel;
  std::int64_t iteration = 0;
};

struct StartValues {
  Vector b;
  Vector alpha;
  Matrix w;
  /// Present when starts came from a conditional logit fit.
  std::optional<ClogitFit> clogit;
  std::vector<std::string> warnings;
};

StartValues compute_start_values(const ChoiceDataset& data, const ModelSpec& spec,
                                 const SamplerConfig& config);

/// b | beta, W under a flat prior: Normal(column means of beta, W / N).
Vector gibbs_layer_b(const Matrix& beta, const SpdMatrix& w, RngStream& rng);
/// W | beta, b: InverseWishart(K + N, I + sum_n (beta_n - b)(beta_n - b)^T).
SpdMatrix gibbs_layer_w(const Matrix& beta, const Vector& b, RngStream& rng);
/// `steps` kernel steps on person n's conditional
/// log p(beta_n) = person_loglik(beta_n, alpha) + log N(beta_n; b, W).
void gibbs_layer_beta(const ChoiceModel& model, std::size_t n, amcmc::AdaptiveKernelState& kernel,
                      const Vector& b, const SpdMatrix& w, const Vector& alpha, int steps,
                      RngStream& rng);
/// `steps` kernel steps on alpha under a flat prior.
void gibbs_layer_alpha(const ChoiceModel& model, amcmc::AdaptiveKernelState& kernel,
                       const Matrix& beta, int steps, RngStream& rng, unsigned threads = 1);

struct ChainOutput {
  DrawStore draws;
  RunReport report;
  IndividualDraws individual;
  ChainState final_state;
  StartValues start;
};

/// The full Gibbs run: per pass beta_n (all persons) -> b -> W -> alpha, then
/// burn-in removal, thinning and optional jumbling of the recorded rows.
ChainOutput run_chain(const ChoiceDataset& data, const ModelSpec& spec, const SamplerConfig& config);

}  // namespace hbml
