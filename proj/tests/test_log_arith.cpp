#include "twinbeam/log_arith.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

using namespace twinbeam;

namespace {

// Exact big-integer factorial (base 2^32 limbs) with the log taken from the
// top limbs; independent of the table/lgamma path under test.
double log_factorial_bignum(long long k) {
  std::vector<std::uint32_t> limbs{1};
  for (long long f = 2; f <= k; ++f) {
    std::uint64_t carry = 0;
    for (auto& limb : limbs) {
      const std::uint64_t prod = static_cast<std::uint64_t>(limb) * f + carry;
      limb = static_cast<std::uint32_t>(prod);
      carry = prod >> 32;
    }
    while (carry != 0) {
      limbs.push_back(static_cast<std::uint32_t>(carry));
      carry >>= 32;
    }
  }
  long double top = 0.0L;
  const std::size_t n = limbs.size();
  const std::size_t used = std::min<std::size_t>(n, 3);
  for (std::size_t i = 0; i < used; ++i) {
    top = top * 4294967296.0L + limbs[n - 1 - i];
  }
  return static_cast<double>(std::log(top) +
                             static_cast<long double>(n - used) * std::log(4294967296.0L));
}

// Stirling series with three correction terms; sub-1e-15 relative for k >= 10.
double log_factorial_stirling(long long k) {
  const long double x = static_cast<long double>(k);
  return static_cast<double>(0.5L * std::log(2.0L * std::numbers::pi_v<long double> * x) +
                             x * std::log(x) - x + 1.0L / (12.0L * x) -
                             1.0L / (360.0L * x * x * x) +
                             1.0L / (1260.0L * x * x * x * x * x));
}

}  // namespace

TEST_CASE("log_factorial base cases") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK_THAT(log_factorial(5), Catch::Matchers::WithinAbs(std::log(120.0), 1e-14));
  CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
}

TEST_CASE("log_factorial matches exact big-integer factorials") {
  for (long long k : {2, 3, 10, 20, 21, 50, 100, 171, 300, 1000}) {
    const double expected = log_factorial_bignum(k);
    CHECK_THAT(log_factorial(k), Catch::Matchers::WithinRel(expected, 1e-13));
  }
}

TEST_CASE("log_factorial matches the Stirling series up to 1e6") {
  for (long long k : {30LL, 100LL, 1000LL, 65535LL, 65536LL, 100000LL, 1000000LL}) {
    const double expected = log_factorial_stirling(k);
    CHECK_THAT(log_factorial(k), Catch::Matchers::WithinRel(expected, 1e-13));
  }
}

TEST_CASE("log_binomial") {
  CHECK_THAT(log_binomial(4, 2), Catch::Matchers::WithinAbs(std::log(6.0), 1e-13));
  CHECK(log_binomial(4, 5) == -std::numeric_limits<double>::infinity());
  CHECK(log_binomial(4, -1) == -std::numeric_limits<double>::infinity());
  CHECK(std::exp(log_binomial(0, 0)) == 1.0);
}

TEST_CASE("SignedLog round trips and multiplies") {
  const SignedLog a = SignedLog::from_value(-3.5);
  const SignedLog b = SignedLog::from_value(2.0);
  CHECK_THAT(a.value(), Catch::Matchers::WithinRel(-3.5, 1e-15));
  CHECK_THAT((a * b).value(), Catch::Matchers::WithinRel(-7.0, 1e-15));
  CHECK(SignedLog::from_value(0.0).sign == 0);
  CHECK((SignedLog::from_value(0.0) * a).value() == 0.0);
}
