#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "twinbeam/beam_splitter.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/errors.hpp"

namespace twinbeam {

namespace detail {

// exp(A) for a small dense real matrix by scaling-and-squaring with a Taylor
// series; plenty for the <= few-hundred-dimensional photon-number blocks.
inline std::vector<double> expm_real(std::vector<double> a, std::size_t n) {
  double norm1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i * n + j]);
    norm1 = std::max(norm1, col);
  }
  int squarings = 0;
  while (norm1 > 0.5) {
    norm1 *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (double& v : a) v *= scale;

  auto matmul = [n](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> z(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const double xv = x[i * n + k];
        if (xv == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) z[i * n + j] += xv * y[k * n + j];
      }
    }
    return z;
  };

  std::vector<double> result(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) result[i * n + i] = 1.0;
  std::vector<double> term = result;
  for (int k = 1; k <= 24; ++k) {
    term = matmul(term, a);
    for (double& v : term) v /= static_cast<double>(k);
    for (std::size_t i = 0; i < n * n; ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

}  // namespace detail

// Dense two-mode Fock-space oracle. Amplitudes are stored per total-photon
// block (the splitter conserves the total), so every block with
// n1 + n2 <= max_total evolves exactly unitarily. The beam splitter is
// applied by exponentiating the mode-mixing generator block by block; the
// construction never touches the Gegenbauer/combinatorial formulas it is
// used to check.
class FockOracleState {
 public:
  explicit FockOracleState(long long max_total) : max_total_(max_total) {
    if (max_total < 0 || max_total > 400) {
      throw ResourceError("FockOracleState: max_total must lie in [0, 400]");
    }
    blocks_.resize(static_cast<std::size_t>(max_total + 1));
    for (long long s = 0; s <= max_total; ++s) {
      blocks_[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(s + 1), 0.0);
    }
  }

  static FockOracleState from_fock(long long n1, long long n2) {
    FockOracleState st(n1 + n2);
    st.set_amplitude(n1, n2, 1.0);
    return st;
  }

  static FockOracleState from_components(
      const std::vector<std::tuple<long long, long long, std::complex<double>>>& comps) {
    long long max_total = 0;
    for (const auto& [n1, n2, amp] : comps) max_total = std::max(max_total, n1 + n2);
    FockOracleState st(max_total);
    for (const auto& [n1, n2, amp] : comps) {
      st.set_amplitude(n1, n2, st.amplitude(n1, n2) + amp);
    }
    return st;
  }

  long long max_total() const { return max_total_; }

  std::complex<double> amplitude(long long n1, long long n2) const {
    const long long s = n1 + n2;
    if (n1 < 0 || n2 < 0 || s > max_total_) return 0.0;
    return blocks_[static_cast<std::size_t>(s)][static_cast<std::size_t>(n1)];
  }

  void set_amplitude(long long n1, long long n2, std::complex<double> v) {
    const long long s = n1 + n2;
    if (n1 < 0 || n2 < 0 || s > max_total_) {
      throw std::domain_error("FockOracleState: amplitude outside cutoff");
    }
    blocks_[static_cast<std::size_t>(s)][static_cast<std::size_t>(n1)] = v;
  }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& block : blocks_) {
      for (const auto& amp : block) acc += std::norm(amp);
    }
    return acc;
  }

  void normalize() {
    const double n2 = norm_squared();
    if (n2 <= 0.0) throw std::domain_error("FockOracleState: zero state");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& block : blocks_) {
      for (auto& amp : block) amp *= inv;
    }
  }

  // Applies the creation-operator transform b^+ = M a^+ of the given splitter.
  // Decomposition: M* = D(alpha) R(theta) D(beta) with a real rotation R, so
  // the Fock representation is phase ∘ exp(theta (a1^+ a2 - a2^+ a1)) ∘ phase.
  void apply_beam_splitter(const BeamSplitterSpec& bs) {
    const double theta = std::atan2(std::sqrt(bs.rho()), std::sqrt(bs.tau));
    const double alpha = -0.5 * (bs.phi_tau + bs.phi_rho);
    const double beta = 0.5 * (bs.phi_rho - bs.phi_tau);

    apply_mode_phases(beta, -beta);
    for (long long s = 0; s <= max_total_; ++s) {
      auto& block = blocks_[static_cast<std::size_t>(s)];
      bool occupied = false;
      for (const auto& amp : block) {
        if (amp != std::complex<double>(0.0, 0.0)) {
          occupied = true;
          break;
        }
      }
      if (!occupied || s == 0) continue;
      const std::size_t dim = static_cast<std::size_t>(s + 1);
      std::vector<double> gen(dim * dim, 0.0);
      for (long long n1 = 0; n1 < s; ++n1) {
        // <n1+1, s-n1-1| a1^+ a2 |n1, s-n1>
        const double up = std::sqrt(static_cast<double>((n1 + 1) * (s - n1)));
        gen[static_cast<std::size_t>(n1 + 1) * dim + static_cast<std::size_t>(n1)] = theta * up;
        gen[static_cast<std::size_t>(n1) * dim + static_cast<std::size_t>(n1 + 1)] = -theta * up;
      }
      const std::vector<double> u = detail::expm_real(std::move(gen), dim);
      std::vector<std::complex<double>> out(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += u[i * dim + j] * block[j];
        out[i] = acc;
      }
      block = std::move(out);
    }
    apply_mode_phases(alpha, -alpha);
  }

  // Photon-pair probabilities |amp(N1, N2)|^2; equal-total components have
  // already interfered coherently in the amplitudes.
  JointCountDistribution photon_pair_probabilities() const {
    JointCountDistribution out;
    for (long long s = 0; s <= max_total_; ++s) {
      const auto& block = blocks_[static_cast<std::size_t>(s)];
      for (long long n1 = 0; n1 <= s; ++n1) {
        const double p = std::norm(block[static_cast<std::size_t>(n1)]);
        if (p > 0.0) out.add(n1, s - n1, p);
      }
    }
    return out;
  }

  // Detected joint counts after independent binomial loss eta on each port.
  JointCountDistribution joint_counts(double eta) const {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::domain_error("FockOracleState: eta must lie in [0, 1]");
    }
    const JointCountDistribution pairs = photon_pair_probabilities();
    if (eta == 1.0) return pairs;
    JointCountDistribution out;
    if (eta == 0.0) {
      out.add(0, 0, pairs.total());
      return out;
    }
    const double le = std::log(eta);
    const double l1e = std::log(1.0 - eta);
    for (const auto& [k, p] : pairs.entries) {
      for (long long m1 = 0; m1 <= k.m1; ++m1) {
        const double w1 = std::exp(log_binomial(k.m1, m1) + static_cast<double>(m1) * le +
                                   static_cast<double>(k.m1 - m1) * l1e);
        for (long long m2 = 0; m2 <= k.m2; ++m2) {
          const double w2 = std::exp(log_binomial(k.m2, m2) + static_cast<double>(m2) * le +
                                     static_cast<double>(k.m2 - m2) * l1e);
          out.add(m1, m2, p * w1 * w2);
        }
      }
    }
    return out;
  }

 private:
  void apply_mode_phases(double theta1, double theta2) {
    if (theta1 == 0.0 && theta2 == 0.0) return;
    for (long long s = 0; s <= max_total_; ++s) {
      auto& block = blocks_[static_cast<std::size_t>(s)];
      for (long long n1 = 0; n1 <= s; ++n1) {
        block[static_cast<std::size_t>(n1)] *=
            std::polar(1.0, theta1 * static_cast<double>(n1) +
                                theta2 * static_cast<double>(s - n1));
      }
    }
  }

  long long max_total_;
  std::vector<std::vector<std::complex<double>>> blocks_;
};

}  // namespace twinbeam
