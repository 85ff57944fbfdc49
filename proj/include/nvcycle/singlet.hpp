// singlet.hpp - temperature dependence of the singlet-shelf lifetime via
// phonon-stimulated decay:  tau(T) = tau0 * (1 - exp(-dE / kB T)).

#pragma once

#include <cmath>

#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

struct SingletTemperatureModel {
  double tau0_ns = 0.0;    // spontaneous lifetime
  double deltaE_meV = 0.0; // phonon energy of the stimulated channel

  void validate() const {
    if (!(tau0_ns > 0.0) || !std::isfinite(tau0_ns)) {
      throw ValidationError("tau0 must be finite and > 0");
    }
    if (!(deltaE_meV > 0.0) || !std::isfinite(deltaE_meV)) {
      throw ValidationError("deltaE must be finite and > 0");
    }
  }
};

inline double singlet_lifetime_ns(const SingletTemperatureModel& model, double T_kelvin) {
  model.validate();
  if (!std::isfinite(T_kelvin) || T_kelvin < 0.0) {
    throw ValidationError("temperature must be finite and >= 0");
  }
  if (T_kelvin == 0.0) return model.tau0_ns;
  return model.tau0_ns *
         (1.0 - std::exp(-model.deltaE_meV / (kBoltzmannMeVPerK * T_kelvin)));
}

}  // namespace nvcycle
