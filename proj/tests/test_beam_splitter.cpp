#include "twinbeam/beam_splitter.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "twinbeam/log_arith.hpp"

using namespace twinbeam;

namespace {

// Independent series evaluation of C_m^(alpha)(x) through the explicit sum
// over k of (-1)^k Gamma(alpha+m-k) / (Gamma(alpha) k! (m-2k)!) (2x)^(m-2k).
double gegenbauer_series(long long m, double alpha, double x) {
  long double acc = 0.0L;
  for (long long k = 0; 2 * k <= m; ++k) {
    const long double log_term = std::lgamma(static_cast<long double>(alpha + m - k)) -
                                 std::lgamma(static_cast<long double>(alpha)) -
                                 std::lgamma(static_cast<long double>(k + 1)) -
                                 std::lgamma(static_cast<long double>(m - 2 * k + 1));
    const long double pow_term =
        std::pow(2.0L * static_cast<long double>(x), static_cast<long double>(m - 2 * k));
    acc += (k % 2 == 0 ? 1.0L : -1.0L) * std::exp(log_term) * pow_term;
  }
  return static_cast<double>(acc);
}

}  // namespace

TEST_CASE("BeamSplitterSpec validates and reduces phases") {
  CHECK_THROWS_AS(BeamSplitterSpec(1.5), std::domain_error);
  CHECK_THROWS_AS(BeamSplitterSpec(-0.1), std::domain_error);
  const BeamSplitterSpec bs(0.3, 7.0 * std::numbers::pi, -5.0 * std::numbers::pi);
  CHECK(std::abs(bs.phi_tau) <= std::numbers::pi + 1e-12);
  CHECK(std::abs(bs.phi_rho) <= std::numbers::pi + 1e-12);
  CHECK_THAT(bs.rho(), Catch::Matchers::WithinAbs(0.7, 1e-15));
}

TEST_CASE("gegenbauer base cases") {
  CHECK(gegenbauer(0, 2.5, 0.7) == 1.0);
  CHECK_THAT(gegenbauer(1, 0.5, 0.3), Catch::Matchers::WithinAbs(0.3, 1e-15));
  // C_2^(1/2)(x) is the Legendre P_2.
  CHECK_THAT(gegenbauer(2, 0.5, 0.5), Catch::Matchers::WithinAbs(-0.125, 1e-14));
}

TEST_CASE("gegenbauer recurrence matches the series oracle") {
  for (double alpha : {0.5, 1.5, 3.5, 7.5}) {
    for (double x : {-0.9, -0.3, 0.0, 0.4, 0.99}) {
      for (long long m : {1, 2, 3, 5, 10, 17}) {
        const double expected = gegenbauer_series(m, alpha, x);
        const double got = gegenbauer(m, alpha, x);
        CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-9 * (1.0 + std::abs(expected))));
      }
    }
  }
}

TEST_CASE("gegenbauer log form survives huge orders") {
  const SignedLog big = gegenbauer_log(900, 200.5, 0.4);
  CHECK(std::isfinite(big.log_mag));
  CHECK(big.sign != 0);
  CHECK(big.log_mag > 300.0);  // far past double overflow as a plain value
}

TEST_CASE("bs_coefficient HOM cases") {
  // Two single photons on a balanced splitter never split up.
  CHECK(bs_coefficient(1, 1, 0.5) == 0.0);
  CHECK_THAT(bs_coefficient(1, 2, 0.5), Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
  CHECK_THAT(bs_coefficient(1, 0, 0.5), Catch::Matchers::WithinAbs(-1.0 / std::sqrt(2.0), 1e-14));
  CHECK_THROWS_AS(bs_coefficient(2, 5, 0.5), std::domain_error);
  CHECK_THROWS_AS(bs_coefficient(2, -1, 0.5), std::domain_error);
  CHECK_THROWS_AS(bs_coefficient(2, 2, 0.0), std::domain_error);
}

TEST_CASE("reflection rule: signs exact, magnitudes equal") {
  for (double tau : {0.2, 0.35, 0.5, 0.8}) {
    for (long long n : {1, 2, 3, 5, 9}) {
      for (long long N = 0; N <= 2 * n; ++N) {
        const SignedLog a = bs_coefficient_log(n, N, tau);
        SignedLog b = bs_coefficient_log(n, 2 * n - N, tau);
        if ((N - n) % 2 != 0) b.sign = -b.sign;
        CHECK(a.sign == b.sign);
        if (a.sign != 0) {
          CHECK_THAT(a.log_mag, Catch::Matchers::WithinAbs(b.log_mag, 1e-12));
        }
      }
    }
  }
}

TEST_CASE("unitarity of the splitting rows up to n = 500") {
  for (double tau : {0.2, 0.35, 0.5, 0.8}) {
    for (long long n : {1, 5, 25, 100, 500}) {
      const PhotonDistribution d = bs_output_distribution(n, tau);
      CHECK_THAT(d.total_weight, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
  }
}

TEST_CASE("balanced splitter kills all odd output counts") {
  for (long long n : {1, 2, 10, 50, 200}) {
    const PhotonDistribution d = bs_output_distribution(n, 0.5);
    for (long long N = 1; N <= 2 * n; N += 2) {
      CHECK(d.prob_at(N) < 1e-20);
    }
  }
}

TEST_CASE("bs_output_distribution edge cases") {
  const PhotonDistribution hom = bs_output_distribution(1, 0.5);
  CHECK_THAT(hom.prob_at(0), Catch::Matchers::WithinAbs(0.5, 1e-14));
  CHECK(hom.prob_at(1) == 0.0);
  CHECK_THAT(hom.prob_at(2), Catch::Matchers::WithinAbs(0.5, 1e-14));

  const PhotonDistribution vac = bs_output_distribution(0, 0.3);
  CHECK(vac.prob_at(0) == 1.0);

  const PhotonDistribution pass = bs_output_distribution(4, 1.0);
  CHECK(pass.prob_at(4) == 1.0);
  CHECK(pass.total_weight == 1.0);
}

TEST_CASE("general amplitude reduces to the equal-input coefficient") {
  for (double tau : {0.2, 0.35, 0.5, 0.8}) {
    const BeamSplitterSpec bs(tau);
    for (long long n = 0; n <= 6; ++n) {
      for (long long N = 0; N <= 2 * n; ++N) {
        const double expected = std::abs(bs_coefficient(n, N, tau));
        const double got = std::abs(general_bs_amplitude(n, n, N, bs));
        CHECK_THAT(got, Catch::Matchers::WithinAbs(expected, 1e-12));
      }
    }
  }
}

TEST_CASE("single photon splits with |amplitude|^2 = tau") {
  const BeamSplitterSpec bs(0.5);
  CHECK_THAT(std::abs(general_bs_amplitude(1, 0, 1, bs)),
             Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-14));
  const BeamSplitterSpec biased(0.3);
  CHECK_THAT(std::norm(general_bs_amplitude(1, 0, 1, biased)),
             Catch::Matchers::WithinAbs(0.3, 1e-14));
  CHECK_THROWS_AS(general_bs_amplitude(1, 0, 2, bs), std::domain_error);
}

TEST_CASE("general amplitude rows are normalized") {
  const BeamSplitterSpec bs(0.35, 0.4, -1.1);
  for (long long n1 : {0, 1, 3, 6}) {
    for (long long n2 : {0, 2, 5}) {
      const PhotonDistribution row = general_bs_probability_row(n1, n2, bs);
      CHECK_THAT(row.total_weight, Catch::Matchers::WithinAbs(1.0, 1e-11));
    }
  }
}

TEST_CASE("output probabilities do not depend on the splitter phases") {
  const BeamSplitterSpec zero(0.35);
  const BeamSplitterSpec shifted(0.35, 1.234, -0.777);
  for (long long n1 : {1, 2, 4}) {
    for (long long n2 : {0, 3, 5}) {
      for (long long N = 0; N <= n1 + n2; ++N) {
        CHECK_THAT(std::norm(general_bs_amplitude(n1, n2, N, shifted)),
                   Catch::Matchers::WithinAbs(std::norm(general_bs_amplitude(n1, n2, N, zero)),
                                              1e-12));
      }
    }
  }
}

TEST_CASE("arcsine distribution hand values") {
  const PhotonDistribution two = arcsine_distribution(2);
  CHECK_THAT(two.prob_at(0), Catch::Matchers::WithinAbs(0.5, 1e-14));
  CHECK(two.prob_at(1) == 0.0);
  CHECK_THAT(two.prob_at(2), Catch::Matchers::WithinAbs(0.5, 1e-14));

  const PhotonDistribution four = arcsine_distribution(4);
  CHECK_THAT(four.prob_at(0), Catch::Matchers::WithinAbs(3.0 / 8.0, 1e-14));
  CHECK_THAT(four.prob_at(2), Catch::Matchers::WithinAbs(1.0 / 4.0, 1e-14));
  CHECK_THAT(four.prob_at(4), Catch::Matchers::WithinAbs(3.0 / 8.0, 1e-14));

  const PhotonDistribution odd = arcsine_distribution(5);
  CHECK(odd.total_weight == 0.0);
  CHECK(odd.weights.size() == 6);
}

TEST_CASE("arcsine sigma=100 shape: U with zeros at odd N") {
  const PhotonDistribution d = arcsine_distribution(100);
  CHECK_THAT(d.total_weight, Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (long long N = 1; N < 100; N += 2) CHECK(d.prob_at(N) == 0.0);
  const double peak = d.prob_at(0);
  CHECK_THAT(d.prob_at(100), Catch::Matchers::WithinAbs(peak, 1e-15));
  for (long long N = 2; N < 100; N += 2) CHECK(d.prob_at(N) < peak);
  // Symmetric U: interior minimum at the center.
  CHECK(d.prob_at(50) < d.prob_at(2));
}

TEST_CASE("arcsine equals the balanced splitting rows elementwise") {
  for (long long n : {1, 2, 7, 25}) {
    const PhotonDistribution a = arcsine_distribution(2 * n);
    const PhotonDistribution b = bs_output_distribution(n, 0.5);
    for (long long N = 0; N <= 2 * n; ++N) {
      CHECK_THAT(a.prob_at(N), Catch::Matchers::WithinAbs(b.prob_at(N), 1e-10));
    }
  }
}

TEST_CASE("arcsine prefactor carries the twin-beam weight") {
  const double gain = 0.8;
  const PhotonDistribution d = arcsine_distribution(6, true, gain);
  const double expected = std::pow(std::tanh(gain), 6.0) / std::pow(std::cosh(gain), 2.0);
  CHECK_THAT(d.total_weight, Catch::Matchers::WithinRel(expected, 1e-12));
  CHECK_THROWS_AS(arcsine_distribution(6, true, 0.0), std::domain_error);
}

TEST_CASE("binomial reference distribution") {
  const PhotonDistribution d = binomial_reference_distribution(2, 0.5);
  CHECK_THAT(d.prob_at(0), Catch::Matchers::WithinAbs(0.25, 1e-14));
  CHECK_THAT(d.prob_at(1), Catch::Matchers::WithinAbs(0.5, 1e-14));
  CHECK_THAT(d.prob_at(2), Catch::Matchers::WithinAbs(0.25, 1e-14));

  CHECK(binomial_reference_distribution(0, 0.7).prob_at(0) == 1.0);

  const PhotonDistribution big = binomial_reference_distribution(100, 0.5);
  CHECK_THAT(big.mean(), Catch::Matchers::WithinAbs(50.0, 1e-9));
  CHECK_THAT(std::sqrt(big.variance()), Catch::Matchers::WithinAbs(5.0, 1e-9));
  const double peak = big.prob_at(50);
  for (long long N = 0; N <= 100; ++N) CHECK(big.prob_at(N) <= peak);
}
