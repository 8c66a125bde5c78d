#include "twinbeam/distribution.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "twinbeam/rng.hpp"

using namespace twinbeam;

namespace {

PhotonDistribution random_distribution(TrialRng& rng, long long max_offset = 5,
                                       std::size_t max_len = 8) {
  PhotonDistribution d;
  d.support_offset = static_cast<long long>(rng.next_u64() % (max_offset + 1));
  const std::size_t len = 1 + rng.next_u64() % max_len;
  d.weights.resize(len);
  for (auto& w : d.weights) w = rng.uniform01();
  d.recompute_total();
  return d;
}

double max_abs_diff(const PhotonDistribution& a, const PhotonDistribution& b) {
  const long long lo = std::min(a.min_count(), b.min_count());
  const long long hi = std::max(a.max_count(), b.max_count());
  double worst = 0.0;
  for (long long n = lo; n <= hi; ++n) {
    worst = std::max(worst, std::abs(a.prob_at(n) - b.prob_at(n)));
  }
  return worst;
}

}  // namespace

TEST_CASE("point distribution is the convolution identity") {
  PhotonDistribution d = PhotonDistribution::from_weights(2, {0.1, 0.5, 0.4});
  const PhotonDistribution conv = convolve(PhotonDistribution::point(0), d);
  CHECK(max_abs_diff(conv, d) == 0.0);
}

TEST_CASE("convolution adds means and multiplies total weights") {
  TrialRng rng(314, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const PhotonDistribution a = random_distribution(rng);
    const PhotonDistribution b = random_distribution(rng);
    const PhotonDistribution c = convolve(a, b);
    CHECK_THAT(c.mean(), Catch::Matchers::WithinAbs(a.mean() + b.mean(), 1e-10));
    CHECK_THAT(c.total_weight,
               Catch::Matchers::WithinRel(a.total_weight * b.total_weight, 1e-12));
  }
}

TEST_CASE("convolution is commutative and associative") {
  TrialRng rng(2718, 0, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const PhotonDistribution a = random_distribution(rng);
    const PhotonDistribution b = random_distribution(rng);
    const PhotonDistribution c = random_distribution(rng);
    CHECK(max_abs_diff(convolve(a, b), convolve(b, a)) < 1e-12);
    CHECK(max_abs_diff(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) < 1e-12);
  }
}

TEST_CASE("normalization and moments") {
  PhotonDistribution d = PhotonDistribution::from_weights(0, {1.0, 1.0, 2.0});
  const PhotonDistribution n = d.normalized();
  CHECK_THAT(n.total_weight, Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(n.mean(), Catch::Matchers::WithinAbs(1.25, 1e-12));
  CHECK_THAT(d.mean(), Catch::Matchers::WithinAbs(1.25, 1e-12));
  PhotonDistribution zero = PhotonDistribution::from_weights(0, {0.0});
  CHECK_THROWS_AS(zero.normalized(), std::domain_error);
}
