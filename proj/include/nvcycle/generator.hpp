// generator.hpp - construction of the 6x6 rate-equation generator over the
// basis (m0, sym, asym, p3, p4, p5). Entries are in MHz; every column sums
// to zero so that probability is conserved.

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "nvcycle/errors.hpp"
#include "nvcycle/populations.hpp"
#include "nvcycle/rate_parameters.hpp"

namespace nvcycle {

template <typename Scalar>
using RateMatrixT = Eigen::Matrix<Scalar, kNumLevels, kNumLevels>;

using RateMatrix = RateMatrixT<double>;

// Builds the generator for the given rates and a CW pump rate (MHz).
//
// Decay channels:
//   |3> -> m0 (k31), sym/asym equally (k32), |5> (k35)
//   |4> -> m0 (k41), sym/asym equally (k42), |5> (k45)
//   |5> -> m0 (k51), sym/asym equally (k52)
// Pump channels (spin mixing fraction epsilon):
//   m0        -> p3 with pump/(1+eps), -> p4 with pump*eps/(1+eps)
//   sym, asym -> p4 with pump/(1+eps), -> p3 with pump*eps/(1+eps)
template <typename Scalar = double>
RateMatrixT<Scalar> build_generator(const RateParameters& params, double pump_rate_MHz) {
  params.validate(true);
  if (!std::isfinite(pump_rate_MHz) || pump_rate_MHz < 0.0) {
    throw ValidationError("pump rate must be finite and >= 0");
  }

  RateMatrixT<Scalar> g = RateMatrixT<Scalar>::Zero();
  auto add = [&g](int to, int from, double rate) {
    g(to, from) += Scalar(rate);
    g(from, from) -= Scalar(rate);
  };

  add(kIdxM0, kIdxP3, params.k31_MHz);
  add(kIdxSym, kIdxP3, 0.5 * params.k32_MHz);
  add(kIdxAsym, kIdxP3, 0.5 * params.k32_MHz);
  add(kIdxP5, kIdxP3, params.k35_MHz);

  add(kIdxM0, kIdxP4, params.k41_MHz);
  add(kIdxSym, kIdxP4, 0.5 * params.k42_MHz);
  add(kIdxAsym, kIdxP4, 0.5 * params.k42_MHz);
  add(kIdxP5, kIdxP4, params.k45_MHz);

  add(kIdxM0, kIdxP5, params.k51_MHz);
  add(kIdxSym, kIdxP5, 0.5 * params.k52_MHz);
  add(kIdxAsym, kIdxP5, 0.5 * params.k52_MHz);

  if (pump_rate_MHz > 0.0) {
    const double conserving = pump_rate_MHz / (1.0 + params.epsilon);
    const double flipping = pump_rate_MHz * params.epsilon / (1.0 + params.epsilon);
    add(kIdxP3, kIdxM0, conserving);
    add(kIdxP4, kIdxM0, flipping);
    add(kIdxP4, kIdxSym, conserving);
    add(kIdxP3, kIdxSym, flipping);
    add(kIdxP4, kIdxAsym, conserving);
    add(kIdxP3, kIdxAsym, flipping);
  }
  return g;
}

}  // namespace nvcycle
