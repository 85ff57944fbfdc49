// cycle.hpp - per-excitation-cycle spin-flip map and derived lifetime /
// branching quantities.

#pragma once

#include <cmath>

#include "nvcycle/errors.hpp"
#include "nvcycle/rate_parameters.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

// Probabilities that one excitation-and-full-relaxation cycle moves the
// spin between the m_s=0 and m_s=+-1 ground manifolds.
struct CycleProbabilities {
  double p12 = 0.0;  // |1> -> |2>
  double p21 = 0.0;  // |2> -> |1>
};

struct DerivedQuantities {
  double T13_ns = 0.0;         // 1/(k31+k32+k35)
  double T14_ns = 0.0;         // 1/(k41+k42+k45)
  double p35 = 0.0;            // k35/(k31+k32+k35)
  double p45 = 0.0;            // k45/(k41+k42+k45)
  double branching_r = 0.0;    // k51/(k51+k52)
};

inline DerivedQuantities derived_quantities(const RateParameters& params) {
  params.validate(true);
  const double K3 = params.total_rate_3_MHz();
  const double K4 = params.total_rate_4_MHz();
  if (!(K3 > 0.0) || !(K4 > 0.0)) {
    throw ValidationError("excited level has no decay channel");
  }
  DerivedQuantities d;
  d.T13_ns = kMHzPerInvNs / K3;
  d.T14_ns = kMHzPerInvNs / K4;
  d.p35 = params.k35_MHz / K3;
  d.p45 = params.k45_MHz / K4;
  const double K5 = params.total_rate_5_MHz();
  d.branching_r = K5 > 0.0 ? params.k51_MHz / K5 : 0.0;
  return d;
}

// Path summation over one excitation cycle (single excitation, full
// relaxation through the singlet included):
//
//   p12 = 1/(1+eps) * (k32/K3 + p35 (1-r)) + eps/(1+eps) * (k42/K4 + p45 (1-r))
//   p21 = 1/(1+eps) * (k41/K4 + p45 r)     + eps/(1+eps) * (k31/K3 + p35 r)
//
// with K3, K4 the total depletion rates and r = k51/(k51+k52).
inline CycleProbabilities cycle_map(const RateParameters& params) {
  params.validate(true);
  const double K3 = params.total_rate_3_MHz();
  const double K4 = params.total_rate_4_MHz();
  if (!(K3 > 0.0) || !(K4 > 0.0)) {
    throw ValidationError("excited level has no decay channel");
  }
  const DerivedQuantities d = derived_quantities(params);
  const double eps = params.epsilon;
  const double w_conserving = 1.0 / (1.0 + eps);
  const double w_flipping = eps / (1.0 + eps);
  const double r = d.branching_r;

  CycleProbabilities out;
  out.p12 = w_conserving * (params.k32_MHz / K3 + d.p35 * (1.0 - r)) +
            w_flipping * (params.k42_MHz / K4 + d.p45 * (1.0 - r));
  out.p21 = w_conserving * (params.k41_MHz / K4 + d.p45 * r) +
            w_flipping * (params.k31_MHz / K3 + d.p35 * r);
  return out;
}

}  // namespace nvcycle
