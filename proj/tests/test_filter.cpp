#include "twinbeam/filter.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "twinbeam/fock_oracle.hpp"

using namespace twinbeam;

namespace {

MacroAmplitudes uniform_band(long long imax, long long jmax) {
  MacroAmplitudes amps;
  for (long long i = 0; i < imax; ++i) {
    for (long long j = 0; j < jmax; ++j) amps.gamma[{i, j}] = 1.0;
  }
  amps.normalize();
  return amps;
}

MacroAmplitudes geometric_decay(long long imax, long long jmax, double ratio) {
  MacroAmplitudes amps;
  for (long long i = 0; i < imax; ++i) {
    for (long long j = 0; j < jmax; ++j) {
      amps.gamma[{i, j}] = std::pow(ratio, static_cast<double>(i + j));
    }
  }
  amps.normalize();
  return amps;
}

}  // namespace

TEST_CASE("single-photon component routes by tau") {
  MacroAmplitudes amps;
  amps.gamma[{0, 0}] = 1.0;  // Phi -> |1, 0>
  for (double tau : {0.3, 0.5, 0.8}) {
    const JointCountDistribution jcd =
        macro_joint_distribution(amps, BeamSplitterSpec(tau), 1.0);
    CHECK_THAT(jcd.prob_at(1, 0), Catch::Matchers::WithinAbs(tau, 1e-12));
    CHECK_THAT(jcd.prob_at(0, 1), Catch::Matchers::WithinAbs(1.0 - tau, 1e-12));
  }
}

TEST_CASE("gamma00 Phi and PhiPerp give identical joint tables on a balanced splitter") {
  MacroAmplitudes amps;
  amps.gamma[{0, 0}] = 1.0;
  const JointCountDistribution phi =
      macro_joint_distribution(amps, BeamSplitterSpec(0.5), 1.0);
  const JointCountDistribution perp = macro_joint_distribution(
      amps.with_orientation(MacroOrientation::PhiPerp), BeamSplitterSpec(0.5), 1.0);
  for (const auto& [k, p] : phi.entries) {
    CHECK_THAT(perp.prob_at(k.m1, k.m2), Catch::Matchers::WithinAbs(p, 1e-13));
  }
}

TEST_CASE("macro distribution matches the dense oracle, coherences included") {
  MacroAmplitudes amps;
  amps.gamma[{0, 1}] = std::complex<double>(0.6, 0.3);
  amps.gamma[{1, 0}] = std::complex<double>(-0.5, 0.2);
  amps.gamma[{1, 1}] = std::complex<double>(0.4, 0.0);
  amps.normalize();
  for (double eta : {1.0, 0.5}) {
    for (MacroOrientation o : {MacroOrientation::Phi, MacroOrientation::PhiPerp}) {
      const MacroAmplitudes oriented = amps.with_orientation(o);
      const BeamSplitterSpec bs(0.35);
      const JointCountDistribution direct = macro_joint_distribution(oriented, bs, eta);

      std::vector<std::tuple<long long, long long, std::complex<double>>> comps =
          oriented.fock_components();
      FockOracleState st = FockOracleState::from_components(comps);
      st.apply_beam_splitter(bs);
      const JointCountDistribution via_oracle = st.joint_counts(eta);

      for (const auto& [k, p] : via_oracle.entries) {
        CHECK_THAT(direct.prob_at(k.m1, k.m2), Catch::Matchers::WithinAbs(p, 1e-10));
      }
    }
  }
}

TEST_CASE("filter threshold zero is the identity") {
  const JointCountDistribution jcd =
      macro_joint_distribution(uniform_band(2, 3), BeamSplitterSpec(0.5), 0.7);
  const FilterResult r = filter_condition(jcd, 0);
  CHECK_THAT(r.pass_probability, Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (const auto& [k, p] : jcd.entries) {
    CHECK_THAT(r.conditioned.prob_at(k.m1, k.m2), Catch::Matchers::WithinRel(p, 1e-12));
  }
}

TEST_CASE("filter flags empty pass sets without throwing") {
  JointCountDistribution diag;
  diag.add(3, 3, 1.0);
  const FilterResult r = filter_condition(diag, 1);
  CHECK(r.empty);
  CHECK(r.pass_probability == 0.0);
  CHECK_THROWS_AS(filter_condition(diag, -1), std::domain_error);
}

TEST_CASE("filtering a U-shaped table removes the central band") {
  JointCountDistribution arcsine_like;
  const PhotonDistribution arc = arcsine_distribution(20);
  for (long long N = 0; N <= 20; ++N) {
    const double p = arc.prob_at(N);
    if (p > 0.0) arcsine_like.add(N, 20 - N, p);
  }
  const FilterResult r = filter_condition(arcsine_like, 10);
  CHECK(r.pass_probability > 0.5);  // edge-heavy input passes easily
  CHECK(r.conditioned.prob_at(10, 10) == 0.0);
  const FilterResult tight = filter_condition(arcsine_like, 2);
  CHECK(tight.pass_probability > r.pass_probability);
}

TEST_CASE("effective overlap reference points") {
  JointCountDistribution a;
  a.add(0, 0, 0.5);
  a.add(1, 1, 0.5);
  CHECK_THAT(effective_overlap(a, a), Catch::Matchers::WithinAbs(1.0, 1e-12));
  JointCountDistribution b;
  b.add(2, 0, 1.0);
  CHECK(effective_overlap(a, b) == 0.0);
  CHECK_THAT(total_variation_distance(a, b), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(total_variation_distance(a, a) == 0.0);
}

TEST_CASE("filter response equality and overlap monotonicity on test families") {
  const BeamSplitterSpec bs(0.5);
  for (const MacroAmplitudes& base :
       {uniform_band(3, 3), geometric_decay(4, 3, 0.6), uniform_band(1, 4)}) {
    for (double eta : {1.0, 0.4}) {
      const JointCountDistribution phi =
          macro_joint_distribution(base.with_orientation(MacroOrientation::Phi), bs, eta);
      const JointCountDistribution perp =
          macro_joint_distribution(base.with_orientation(MacroOrientation::PhiPerp), bs, eta);
      double previous_overlap = 1.0 + 1e-12;
      for (long long threshold : {0, 1, 2, 3, 5}) {
        const FilterResult fp = filter_condition(phi, threshold);
        const FilterResult fq = filter_condition(perp, threshold);
        CHECK_THAT(fp.pass_probability,
                   Catch::Matchers::WithinAbs(fq.pass_probability, 1e-12));
        if (!fp.empty && !fq.empty) {
          const double overlap = effective_overlap(fp.conditioned, fq.conditioned);
          CHECK(overlap <= previous_overlap + 1e-9);
          previous_overlap = overlap;
        }
      }
    }
  }
}

TEST_CASE("macro cutoff guard") {
  MacroAmplitudes too_big;
  too_big.gamma[{80, 40}] = 1.0;  // |161, 80>: total 241 photons
  CHECK_THROWS_AS(macro_joint_distribution(too_big, BeamSplitterSpec(0.5), 1.0), ResourceError);
}
