#include "doctest.h"
#include "hbml/amcmc.hpp"
#include "hbml/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace hbml;
using namespace hbml::amcmc;

namespace {

double std_normal_log(const Vector& x) { return -0.5 * x.squaredNorm(); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov distance between a sample and the standard normal.
double ks_distance(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST_CASE("sampler kind parsing") {
  CHECK(parse_sampler_kind("global") == SamplerKind::Global);
  CHECK(parse_sampler_kind("mwg") == SamplerKind::Mwg);
  CHECK(to_string(SamplerKind::Mwg) == "mwg");
  CHECK_THROWS_AS(parse_sampler_kind("gibbs"), ValidationError);
}

TEST_CASE("initial state") {
  const auto g = make_state(SamplerKind::Global, Vector::Zero(4), 0.234, 1.0);
  CHECK(g.scale.size() == 1);
  CHECK(g.scale(0) == doctest::Approx(2.38 / 2.0));
  CHECK(g.running_cov.isIdentity());
  const auto m = make_state(SamplerKind::Mwg, Vector::Zero(4), 0.234, 1.0);
  CHECK(m.scale.size() == 4);
  CHECK(m.scale(2) == doctest::Approx(2.38));
  CHECK_THROWS_AS(make_state(SamplerKind::Global, Vector::Zero(2), 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_state(SamplerKind::Global, Vector::Zero(2), 0.3, 0.0), ValidationError);
  CHECK_THROWS_AS(make_state(SamplerKind::Global, Vector::Zero(2), 0.3, 1.5), ValidationError);
}

TEST_CASE("flat target: every move is accepted") {
  const LogTarget flat = [](const Vector&) { return 1.5; };
  for (auto kind : {SamplerKind::Global, SamplerKind::Mwg}) {
    auto s = make_state(kind, Vector::Zero(3), 0.234, 1.0);
    refresh(s, flat);
    RngStream rng(1);
    for (int i = 0; i < 200; ++i) kernel_step(s, flat, rng);
    CHECK(s.acceptance_rate() == 1.0);
  }
}

TEST_CASE("global kernel on a standard normal") {
  const LogTarget target = std_normal_log;
  auto s = make_state(SamplerKind::Global, Vector::Zero(1), 0.234, 1.0);
  refresh(s, target);
  RngStream rng(2);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    kernel_global_step(s, target, rng);
    if (i == 19999) CHECK(std::abs(s.acceptance_rate() - 0.234) < 0.05);
    sum += s.current(0);
    sq += s.current(0) * s.current(0);
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.1);
}

TEST_CASE("frozen adaptation passes a KS test at the 0.1% level") {
  for (auto kind : {SamplerKind::Global, SamplerKind::Mwg}) {
    const LogTarget target = std_normal_log;
    auto s = make_state(kind, Vector::Zero(1), 0.234, 1.0);
    s.adapt = false;
    refresh(s, target);
    RngStream rng(3);
    std::vector<double> kept;
    const int thin = 10;
    for (int i = 0; i < 50000 * thin; ++i) {
      kernel_step(s, target, rng);
      if ((i + 1) % thin == 0) kept.push_back(s.current(0));
    }
    // Asymptotic critical value for alpha = 0.001.
    CHECK(ks_distance(kept) < 1.9495 / std::sqrt(static_cast<double>(kept.size())));
  }
}

TEST_CASE("mwg and global coincide in law in one dimension") {
  const LogTarget target = std_normal_log;
  double rate[2];
  double var[2];
  int slot = 0;
  for (auto kind : {SamplerKind::Global, SamplerKind::Mwg}) {
    auto s = make_state(kind, Vector::Zero(1), 0.234, 1.0);
    s.adapt = false;
    refresh(s, target);
    RngStream rng(4);
    double sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      kernel_step(s, target, rng);
      sq += s.current(0) * s.current(0);
    }
    rate[slot] = s.acceptance_rate();
    var[slot] = sq / n;
    ++slot;
  }
  CHECK(std::abs(rate[0] - rate[1]) < 0.01);
  CHECK(std::abs(var[0] - var[1]) < 0.1);
}

TEST_CASE("mwg adapts per-coordinate scales to an anisotropic target") {
  const LogTarget target = [](const Vector& x) {
    return -0.5 * (x(0) * x(0) + x(1) * x(1) / 100.0);
  };
  auto s = make_state(SamplerKind::Mwg, Vector::Zero(2), 0.234, 1.0);
  refresh(s, target);
  RngStream rng(5);
  for (int i = 0; i < 20000; ++i) kernel_mwg_step(s, target, rng);
  const double ratio = s.scale(1) / s.scale(0);
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("mwg recovers from a poorly scaled start") {
  const LogTarget target = std_normal_log;
  auto s = make_state(SamplerKind::Mwg, Vector::Constant(2, 1000.0), 0.234, 1.0);
  refresh(s, target);
  RngStream rng(6);
  int reached = -1;
  for (int i = 0; i < 5000; ++i) {
    kernel_mwg_step(s, target, rng);
    if (s.current.norm() < 5.0) {
      reached = i;
      break;
    }
  }
  CHECK(reached >= 0);
}

TEST_CASE("adapt_update sign and size") {
  auto s = make_state(SamplerKind::Global, Vector::Zero(1), 0.234, 1.0);
  const std::uint8_t yes[1] = {1};
  const std::uint8_t no[1] = {0};
  s.draw_count = 1;
  double before = s.scale(0);
  adapt_update(s, yes);
  CHECK(s.scale(0) > before);
  for (int t = 2; t <= 50; ++t) {
    s.draw_count = t;
    before = s.scale(0);
    adapt_update(s, no);
    CHECK(s.scale(0) < before);
    CHECK(s.scale(0) / before ==
          doctest::Approx(std::exp(-0.234 * std::pow(static_cast<double>(t), -0.6))));
  }
  CHECK(adaptation_weight(0.5, 32) == doctest::Approx(0.5 * std::pow(32.0, -0.6)));
  s.draw_count = 0;
  CHECK_THROWS_AS(adapt_update(s, yes), ValidationError);
}

TEST_CASE("a damper near one adapts more aggressively early on") {
  const LogTarget target = std_normal_log;
  double moved[2];
  int slot = 0;
  for (double damper : {1.0, 0.1}) {
    auto s = make_state(SamplerKind::Global, Vector::Zero(2), 0.234, damper);
    refresh(s, target);
    const double initial = std::log(s.scale(0));
    RngStream rng(7);
    for (int i = 0; i < 100; ++i) kernel_global_step(s, target, rng);
    moved[slot++] = std::abs(std::log(s.scale(0)) - initial);
  }
  CHECK(moved[0] > moved[1]);
}

TEST_CASE("acceptance rate is the exact fraction of accepted proposals") {
  const LogTarget target = std_normal_log;
  for (auto kind : {SamplerKind::Global, SamplerKind::Mwg}) {
    auto s = make_state(kind, Vector::Zero(3), 0.3, 1.0);
    refresh(s, target);
    RngStream rng(8);
    std::int64_t moves = 0;
    for (int i = 0; i < 3000; ++i) {
      const Vector before = s.current;
      kernel_step(s, target, rng);
      for (Eigen::Index j = 0; j < 3; ++j) {
        moves += s.current(j) != before(j);
        if (kind == SamplerKind::Global) break;
      }
    }
    const double slots = kind == SamplerKind::Global ? 1.0 : 3.0;
    CHECK(s.acceptance_rate() == doctest::Approx(static_cast<double>(moves) / (3000.0 * slots)));
    CHECK(s.acceptance_rate() >= 0.0);
    CHECK(s.acceptance_rate() <= 1.0);
    for (auto a : s.accept_count) CHECK(a <= s.draw_count);
  }
}

TEST_CASE("identical inputs give identical trajectories") {
  const LogTarget target = std_normal_log;
  auto a = make_state(SamplerKind::Global, Vector::Constant(2, 3.0), 0.234, 1.0);
  auto b = a;
  refresh(a, target);
  refresh(b, target);
  RngStream ra(9);
  RngStream rb(9);
  for (int i = 0; i < 500; ++i) {
    kernel_step(a, target, ra);
    kernel_step(b, target, rb);
  }
  CHECK(a.current == b.current);
  CHECK(a.running_cov == b.running_cov);
}

TEST_CASE("scale stays positive and proposals stay usable over long runs") {
  const LogTarget target = [](const Vector& x) { return -0.5 * (x(0) * x(0) * 1e4 + x(1) * x(1)); };
  auto s = make_state(SamplerKind::Global, Vector::Zero(2), 0.234, 1.0);
  refresh(s, target);
  RngStream rng(10);
  for (int i = 0; i < 20000; ++i) kernel_global_step(s, target, rng);
  CHECK(s.scale(0) > 0.0);
  CHECK(std::abs(s.acceptance_rate() - 0.234) < 0.08);
}

TEST_CASE("out-of-support proposals are rejected; NaN is an error") {
  const LogTarget half = [](const Vector& x) {
    return x(0) < 0 ? -std::numeric_limits<double>::infinity() : -x(0);
  };
  auto s = make_state(SamplerKind::Global, Vector::Constant(1, 1.0), 0.234, 1.0);
  refresh(s, half);
  RngStream rng(11);
  for (int i = 0; i < 2000; ++i) {
    kernel_step(s, half, rng);
    REQUIRE(s.current(0) >= 0.0);
  }
  const LogTarget bad = [](const Vector&) { return std::nan(""); };
  CHECK_THROWS_AS(kernel_step(s, bad, rng), NumericalError);
}
