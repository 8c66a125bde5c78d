#include "twinbeam/rng.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

using namespace twinbeam;

TEST_CASE("identical keys reproduce identical streams") {
  TrialRng a(42, 7, 3);
  TrialRng b(42, 7, 3);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different trials give different streams") {
  TrialRng a(42, 7, 3);
  TrialRng b(42, 8, 3);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniform01 stays strictly inside (0,1)") {
  TrialRng rng(1, 2, 3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("poisson means and variances track lambda across both samplers") {
  for (double lambda : {0.7, 4.0, 80.0, 1e4}) {
    TrialRng rng(11, 0, 0);
    const int n = 200000;
    long double sum = 0.0L, sum_sq = 0.0L;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<long double>(rng.poisson(lambda));
      sum += k;
      sum_sq += k * k;
    }
    const double mean = static_cast<double>(sum / n);
    const double var = static_cast<double>(sum_sq / n) - mean * mean;
    const double se = std::sqrt(lambda / n);
    CHECK_THAT(mean, Catch::Matchers::WithinAbs(lambda, 5.0 * se));
    CHECK_THAT(var, Catch::Matchers::WithinRel(lambda, 0.05));
  }
}

TEST_CASE("binomial matches mean and edge cases") {
  TrialRng rng(5, 1, 0);
  CHECK(rng.binomial(10, 0.0) == 0);
  CHECK(rng.binomial(10, 1.0) == 10);
  const int n = 100000;
  long double sum = 0.0L;
  for (int i = 0; i < n; ++i) sum += rng.binomial(40, 0.3);
  CHECK_THAT(static_cast<double>(sum / n), Catch::Matchers::WithinAbs(12.0, 0.1));
}

TEST_CASE("bose_einstein has thermal mean and g2") {
  TrialRng rng(17, 0, 0);
  const double mean = 3.0;
  const int n = 300000;
  long double sum = 0.0L, sum_nn1 = 0.0L;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<long double>(rng.bose_einstein(mean));
    sum += k;
    sum_nn1 += k * (k - 1);
  }
  const double m = static_cast<double>(sum / n);
  const double g2 = static_cast<double>(sum_nn1 / n) / (m * m);
  CHECK_THAT(m, Catch::Matchers::WithinAbs(mean, 0.05));
  CHECK_THAT(g2, Catch::Matchers::WithinAbs(2.0, 0.05));
}

TEST_CASE("gamma sampler matches shape/scale moments") {
  TrialRng rng(23, 0, 0);
  const double shape = 3.4, scale = 2.0;
  const int n = 200000;
  long double sum = 0.0L, sum_sq = 0.0L;
  for (int i = 0; i < n; ++i) {
    const auto x = static_cast<long double>(rng.gamma(shape, scale));
    sum += x;
    sum_sq += x * x;
  }
  const double mean = static_cast<double>(sum / n);
  const double var = static_cast<double>(sum_sq / n) - mean * mean;
  CHECK_THAT(mean, Catch::Matchers::WithinRel(shape * scale, 0.02));
  CHECK_THAT(var, Catch::Matchers::WithinRel(shape * scale * scale, 0.05));
}
