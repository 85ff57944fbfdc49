// extraction.hpp - inversion from measured flip probabilities and lifetimes
// to intersystem-crossing probabilities, plus Monte-Carlo uncertainty
// propagation.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvcycle/cycle.hpp"
#include "nvcycle/rate_parameters.hpp"

namespace nvcycle {

struct IscProbabilities {
  double p35 = 0.0;              // k35/(k31+k32+k35)
  double p45 = 0.0;              // k45/(k41+k42+k45)
  double branching_ratio = 0.0;  // p51/p52 = k51/k52
};

// Converts the fitted pulse-train series (steady-state excited polarization
// P_inf_ES and rate constant c) into per-cycle flip probabilities:
//   P1 = ((1+eps) P_ES - eps) / (1-eps)
//   p12 + p21 = (1 - exp(-1/c)) / alpha,  p21 = P1_inf (p12 + p21)
CycleProbabilities extract_flip_probabilities(double P_inf_ES, double c, double alpha,
                                              double epsilon);

// Full rate solution behind extract_isc_probabilities. The system solved is
//   1/T13 = k_r + k35,  1/T14 = k_r + k45,
//   cycle_map(rates) = (p12, p21)
// under equal radiative rates for the two spin branches and the same
// mixing fraction epsilon on emission as on excitation.
struct IscSolution {
  double k_r_MHz = 0.0;
  double k35_MHz = 0.0;
  double k45_MHz = 0.0;
  double branching_r = 0.0;  // k51/(k51+k52)
  double residual = 0.0;     // max-norm of the scaled residual at the root
  double epsilon = 0.0;

  IscProbabilities probabilities() const;

  // Rate set reproducing the solution; the total singlet rate is fixed by
  // the given lifetime since the inversion determines only the branching.
  RateParameters to_rate_parameters(double singlet_lifetime_ns) const;
};

IscSolution solve_isc_system(double p12, double p21, double T13_ns, double T14_ns,
                             double epsilon);

IscProbabilities extract_isc_probabilities(double p12, double p21, double T13_ns,
                                           double T14_ns, double epsilon);

// ---------------------------------------------------------------------------
// Monte-Carlo uncertainty propagation through the extraction chain.

struct ExtractionInputs {
  double p12 = 0.0;
  double p21 = 0.0;
  double T13_ns = 0.0;
  double T14_ns = 0.0;
  double alpha = 0.95;
  double epsilon = 0.01;
};

struct ExtractionSigmas {
  double p12 = 0.0;
  double p21 = 0.0;
  double T13_ns = 0.0;
  double T14_ns = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
};

struct IscUncertainty {
  IscProbabilities nominal;
  IscProbabilities spread;  // 1-sigma over feasible draws
  double feasible_fraction = 1.0;
  std::vector<std::string> warnings;
};

// Seeded plain Monte-Carlo (>= 1000 draws recommended). A draw of alpha
// rescales p12 and p21 jointly by alpha_nominal/alpha_draw: the flip-sum is
// inversely proportional to alpha while the polarization is alpha-free.
IscUncertainty propagate_extraction_uncertainty(const ExtractionInputs& inputs,
                                                const ExtractionSigmas& sigmas,
                                                int n_draws = 2000,
                                                std::uint64_t seed = 1);

}  // namespace nvcycle
