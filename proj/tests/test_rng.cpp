#include "doctest.h"
#include "hbml/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace hbml;

namespace {

std::vector<std::uint64_t> take(RngStream r, int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(r());
  return out;
}

}  // namespace

TEST_CASE("identical seed and key reproduce the sequence") {
  const StreamKey key{StreamTag::IndividualCoefs, 12, 345};
  CHECK(take(RngStream(9, key), 100) == take(RngStream(9, key), 100));
}

TEST_CASE("any change of seed or key changes the sequence") {
  const auto base = take(RngStream(9, {StreamTag::IndividualCoefs, 12, 345}), 8);
  CHECK(base != take(RngStream(10, {StreamTag::IndividualCoefs, 12, 345}), 8));
  CHECK(base != take(RngStream(9, {StreamTag::PopulationMean, 12, 345}), 8));
  CHECK(base != take(RngStream(9, {StreamTag::IndividualCoefs, 13, 345}), 8));
  CHECK(base != take(RngStream(9, {StreamTag::IndividualCoefs, 12, 346}), 8));
}

TEST_CASE("neighbouring streams do not share early outputs") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t unit = 0; unit < 200; ++unit) {
    for (auto v : take(RngStream(1, {StreamTag::IndividualCoefs, 1, unit}), 5)) seen.insert(v);
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform stays in the open unit interval with mean one half") {
  RngStream r(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal moments") {
  RngStream r(4);
  const int n = 200000;
  double s1 = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("gamma mean and variance equal the shape") {
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    RngStream r(5, {StreamTag::Test, 0, static_cast<std::uint64_t>(shape * 10)});
    const int n = 100000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = r.gamma(shape);
      REQUIRE(g > 0.0);
      s1 += g;
      s2 += g * g;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    CAPTURE(shape);
    CHECK(std::abs(mean - shape) < 5.0 * std::sqrt(shape / n));
    CHECK(var == doctest::Approx(shape).epsilon(0.05));
  }
}

TEST_CASE("below is uniform over its range") {
  RngStream r(6);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
