// fit.hpp - curve fitting for lifetimes, recovery curves, the singlet
// temperature model and the pulse-train polarization series.
//
// All fits run a damped Gauss-Newton with analytic Jacobians; histogram
// fits minimize Poisson-weighted squared error with weight 1/max(model,1).

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvcycle/histogram.hpp"
#include "nvcycle/instrument.hpp"

namespace nvcycle {

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  // 1-sigma from the local quadratic model
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> parameters;
  double residual_norm = 0.0;  // sqrt of the weighted squared error
  bool converged = false;      // false => estimates are not authoritative
  int iterations = 0;
  std::vector<std::string> warnings;

  double value(const std::string& name) const;
  double sigma(const std::string& name) const;
  bool has_warning(const std::string& substring) const;
};

struct BiexpFitOptions {
  double irf_sigma_ns = kDefaultIrfSigmaNs;
  // When set, only amplitudes and background are free.
  std::optional<std::pair<double, double>> fixed_taus_ns;
};

// Model A3 exp(-t/T13) + A4 exp(-t/T14) + background, fit from 2 IRF sigma
// past the histogram peak. T13 labels the longer lifetime; amplitudes are
// reported extrapolated to t = 0 (the ps-pulse arrival).
FitResult fit_biexponential(const TcspcHistogram& hist, const BiexpFitOptions& options = {});

// Single-exponential counterpart, for residual comparison.
FitResult fit_monoexponential(const TcspcHistogram& hist,
                              double irf_sigma_ns = kDefaultIrfSigmaNs);

// P_ES = A3 / (A3 + A4); valid because the radiative rates of the two spin
// branches are equal.
double polarization_from_amplitudes(double A3, double A4);

// offset - amplitude * exp(-delay/tau_singlet)
FitResult fit_recovery(const std::vector<double>& delays_ns,
                       const std::vector<double>& counts);

// tau(T) = tau0 * (1 - exp(-deltaE / kB T))
FitResult fit_temperature_model(const std::vector<double>& temperatures_K,
                                const std::vector<double>& taus_ns);

// P_ES(n) = P_inf + a * exp(-n/c)
FitResult fit_polarization_series(const std::vector<double>& pulse_index,
                                  const std::vector<double>& pes);

}  // namespace nvcycle
