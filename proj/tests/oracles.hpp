// oracles.hpp - independent reference computations used only by tests:
// fixed-step RK4 integration, the pulse-to-pulse polarization recursion,
// the analytic exponential-Gaussian convolution, and a frozen NV-J-style
// parameter fixture.

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nvcycle/generator.hpp"
#include "nvcycle/populations.hpp"
#include "nvcycle/rate_parameters.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle::test {

// Classic fixed-step RK4 on v' = (G * 1e-3) v, dt in ns.
inline Populations rk4_propagate(const RateMatrix& g_MHz, const Populations& initial,
                                 double duration_ns, double dt_ns) {
  const RateMatrix a = g_MHz * kInvNsPerMHz;
  Eigen::Matrix<double, kNumLevels, 1> v = initial.v;
  const auto n_steps = static_cast<long long>(std::llround(duration_ns / dt_ns));
  for (long long i = 0; i < n_steps; ++i) {
    const auto k1 = (a * v).eval();
    const auto k2 = (a * (v + 0.5 * dt_ns * k1)).eval();
    const auto k3 = (a * (v + 0.5 * dt_ns * k2)).eval();
    const auto k4 = (a * (v + dt_ns * k3)).eval();
    v += (dt_ns / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Populations(v);
}

// One step of the pulse-train recursion for the ground populations and the
// post-pulse excited populations.
struct RecursionState {
  double P1 = 0.0;
  double P2 = 0.0;
};

inline RecursionState recursion_step(const RecursionState& s, double alpha, double p12,
                                     double p21) {
  RecursionState next;
  next.P1 = alpha * p21 * s.P2 + (1.0 - alpha * p12) * s.P1;
  next.P2 = alpha * p12 * s.P1 + (1.0 - alpha * p21) * s.P2;
  return next;
}

// Excited-state polarization right after a pulse on ground state (P1, P2).
inline double recursion_pes(const RecursionState& s, double epsilon) {
  const double p3 = epsilon * s.P2 + s.P1;  // common alpha/(1+eps) factor cancels
  const double p4 = epsilon * s.P1 + s.P2;
  return p3 / (p3 + p4);
}

// Analytic convolution of exp(-t/tau) (t >= 0) with a unit Gaussian of
// width sigma.
inline double exp_gauss(double t, double tau, double sigma) {
  const double arg = sigma * sigma / (2.0 * tau * tau) - t / tau;
  const double z = (sigma / tau - t / sigma) / std::sqrt(2.0);
  return 0.5 * std::exp(arg) * std::erfc(z);
}

// Frozen NV-J-style rate set: radiative-equality closure reproducing
// T13 = 13.26 ns, T14 = 6.89 ns and per-cycle flips (0.078, 0.315) at
// epsilon = 0.01, with the singlet lifetime at room temperature.
inline constexpr double kNvjK35 = 10.618446423175158;
inline constexpr double kNvjK45 = 80.34154611297852;
inline constexpr double kNvjKr = 64.79633487395908;
inline constexpr double kNvjBranchingR = 0.5499894012888761;
inline constexpr double kNvjEpsilon = 0.01;
inline constexpr double kNvjP12 = 0.078;
inline constexpr double kNvjP21 = 0.315;
inline constexpr double kNvjT13 = 13.26;
inline constexpr double kNvjT14 = 6.89;
// tau0 = 371 ns, deltaE = 16.6 meV evaluated at 300 K (30-digit arithmetic).
inline constexpr double kSingletTau300K = 175.788194696865692;
inline constexpr double kSingletTau13K = 370.999863867316362;

inline RateParameters nvj_parameters(double singlet_lifetime_ns = kSingletTau300K) {
  RateParameters p;
  p.epsilon = kNvjEpsilon;
  const double wc = 1.0 / (1.0 + p.epsilon);
  p.k31_MHz = kNvjKr * wc;
  p.k32_MHz = kNvjKr * p.epsilon * wc;
  p.k42_MHz = kNvjKr * wc;
  p.k41_MHz = kNvjKr * p.epsilon * wc;
  p.k35_MHz = kNvjK35;
  p.k45_MHz = kNvjK45;
  const double total5 = kMHzPerInvNs / singlet_lifetime_ns;
  p.k51_MHz = kNvjBranchingR * total5;
  p.k52_MHz = (1.0 - kNvjBranchingR) * total5;
  return p;
}

// Random rate set obeying the radiative-equality and emission-mixing
// closure (the family the ISC inversion is defined on).
inline RateParameters random_closure_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps = 0.04 * u(rng);
  const double kr = 30.0 + 90.0 * u(rng);
  const double p35 = 0.02 + 0.58 * u(rng);
  const double p45 = 0.05 + 0.70 * u(rng);
  const double r = 0.05 + 0.90 * u(rng);
  const double tau5 = 100.0 + 300.0 * u(rng);
  RateParameters p;
  p.epsilon = eps;
  const double wc = 1.0 / (1.0 + eps);
  p.k31_MHz = kr * wc;
  p.k32_MHz = kr * eps * wc;
  p.k42_MHz = kr * wc;
  p.k41_MHz = kr * eps * wc;
  p.k35_MHz = kr * p35 / (1.0 - p35);
  p.k45_MHz = kr * p45 / (1.0 - p45);
  const double total5 = kMHzPerInvNs / tau5;
  p.k51_MHz = r * total5;
  p.k52_MHz = (1.0 - r) * total5;
  return p;
}

// Random rate set without the closure (generic positive rates).
inline RateParameters random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RateParameters p;
  p.k31_MHz = 20.0 + 100.0 * u(rng);
  p.k32_MHz = 3.0 * u(rng);
  p.k35_MHz = 60.0 * u(rng);
  p.k41_MHz = 3.0 * u(rng);
  p.k42_MHz = 20.0 + 100.0 * u(rng);
  p.k45_MHz = 120.0 * u(rng);
  p.k51_MHz = 0.5 + 10.0 * u(rng);
  p.k52_MHz = 0.5 + 10.0 * u(rng);
  p.epsilon = 0.04 * u(rng);
  return p;
}

}  // namespace nvcycle::test
