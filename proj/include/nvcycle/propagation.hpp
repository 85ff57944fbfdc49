// propagation.hpp - exact propagation of the linear rate equations,
// time-series sampling, and the pumped steady state.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <limits>
#include <vector>

#include "nvcycle/errors.hpp"
#include "nvcycle/generator.hpp"
#include "nvcycle/populations.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

// Threshold below which the second-smallest singular value marks a
// degenerate (non-unique) steady state.
inline constexpr double kSteadyStateDegeneracyTol = 1e-10;

// Negative populations above this magnitude indicate a numerical problem;
// smaller ones are clamped to zero.
inline constexpr double kNegativeClampTol = 1e-12;

namespace detail {

template <typename Scalar>
void check_finite(const RateMatrixT<Scalar>& g) {
  if (!g.allFinite()) throw NumericError("generator has non-finite entries");
}

template <typename Scalar>
void clamp_tiny_negatives(Eigen::Matrix<Scalar, kNumLevels, 1>& v) {
  for (int i = 0; i < kNumLevels; ++i) {
    if (v[i] < Scalar(0)) {
      if (v[i] < Scalar(-kNegativeClampTol)) {
        throw NumericError("propagation produced a significantly negative population");
      }
      v[i] = Scalar(0);
    }
  }
}

}  // namespace detail

// exp(duration * G) as a dense propagator. duration in ns, G in MHz.
template <typename Scalar>
RateMatrixT<Scalar> propagator(const RateMatrixT<Scalar>& generator_MHz, double duration_ns) {
  detail::check_finite(generator_MHz);
  if (!std::isfinite(duration_ns) || duration_ns < 0.0) {
    throw ValidationError("duration must be finite and >= 0");
  }
  if (duration_ns == 0.0) return RateMatrixT<Scalar>::Identity();
  const RateMatrixT<Scalar> scaled =
      generator_MHz * Scalar(duration_ns * kInvNsPerMHz);
  return scaled.exp();
}

template <typename Scalar>
PopulationsT<Scalar> propagate(const RateMatrixT<Scalar>& generator_MHz,
                               const PopulationsT<Scalar>& initial,
                               double duration_ns) {
  if (!initial.v.allFinite()) throw NumericError("initial populations not finite");
  if (duration_ns == 0.0) return initial;
  PopulationsT<Scalar> out(
      (propagator(generator_MHz, duration_ns) * initial.v).eval());
  if (!out.v.allFinite()) throw NumericError("propagation produced non-finite values");
  detail::clamp_tiny_negatives(out.v);
  return out;
}

// Samples at t = 0, dt, 2dt, ... while t <= duration. A duration shorter
// than dt yields only the t=0 sample.
template <typename Scalar>
std::vector<PopulationsT<Scalar>> propagate_trace(const RateMatrixT<Scalar>& generator_MHz,
                                                  const PopulationsT<Scalar>& initial,
                                                  double duration_ns, double dt_ns) {
  if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) {
    throw ValidationError("dt must be finite and > 0");
  }
  if (!std::isfinite(duration_ns) || duration_ns < 0.0) {
    throw ValidationError("duration must be finite and >= 0");
  }
  const auto n_steps = static_cast<std::size_t>(std::floor(duration_ns / dt_ns + 1e-12));
  std::vector<PopulationsT<Scalar>> samples;
  samples.reserve(n_steps + 1);
  samples.push_back(initial);
  if (n_steps == 0) return samples;
  const RateMatrixT<Scalar> step = propagator(generator_MHz, dt_ns);
  Eigen::Matrix<Scalar, kNumLevels, 1> v = initial.v;
  for (std::size_t i = 0; i < n_steps; ++i) {
    v = step * v;
    PopulationsT<Scalar> p(v);
    detail::clamp_tiny_negatives(p.v);
    samples.push_back(p);
  }
  return samples;
}

// Normalized kernel vector of the generator. Throws
// DegenerateSteadyStateError when the kernel is not one-dimensional.
template <typename Scalar>
PopulationsT<Scalar> steady_state(const RateMatrixT<Scalar>& generator_MHz) {
  detail::check_finite(generator_MHz);
  using Mat = Eigen::Matrix<Scalar, kNumLevels, kNumLevels>;
  Eigen::JacobiSVD<Mat> svd(generator_MHz, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[kNumLevels - 2] < Scalar(kSteadyStateDegeneracyTol)) {
    throw DegenerateSteadyStateError(
        "non-unique steady state: generator kernel is degenerate");
  }
  Eigen::Matrix<Scalar, kNumLevels, 1> kernel = svd.matrixV().col(kNumLevels - 1);
  const Scalar sum = kernel.sum();
  if (std::abs(static_cast<double>(sum)) < 1e-6) {
    throw DegenerateSteadyStateError("steady-state kernel vector has no probability mass");
  }
  kernel /= sum;
  PopulationsT<Scalar> out(kernel);
  detail::clamp_tiny_negatives(out.v);
  return out;
}

// Ground-manifold distribution after all excited and singlet population has
// relaxed in the dark. Propagates the pump-free generator for many
// lifetimes of the slowest level.
inline Populations relax_to_ground(const RateParameters& params, const Populations& start) {
  const RateMatrix g = build_generator(params, 0.0);
  double slowest_MHz = std::numeric_limits<double>::infinity();
  for (double rate : {params.total_rate_3_MHz(), params.total_rate_4_MHz(),
                      params.total_rate_5_MHz()}) {
    if (rate > 0.0) slowest_MHz = std::min(slowest_MHz, rate);
  }
  if (!std::isfinite(slowest_MHz)) {
    throw ValidationError("relax_to_ground requires at least one decay channel");
  }
  const double duration_ns = 80.0 * kMHzPerInvNs / slowest_MHz;
  return propagate(g, start, duration_ns);
}

}  // namespace nvcycle
