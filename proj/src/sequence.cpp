#include "nvcycle/sequence.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <string>

#include "nvcycle/errors.hpp"
#include "nvcycle/generator.hpp"
#include "nvcycle/propagation.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

namespace {

double emission_rate_per_ns(const RateParameters& params, const Populations& p) {
  return (params.radiative_rate_3_MHz() * p.p3() +
          params.radiative_rate_4_MHz() * p.p4()) *
         kInvNsPerMHz;
}

void validate_segment(const Segment& seg) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PsPulse>) {
          if (!std::isfinite(s.alpha) || s.alpha < 0.0 || s.alpha > 1.0) {
            throw ValidationError("ps pulse alpha must be in [0,1]");
          }
        } else if constexpr (std::is_same_v<T, MwRotation>) {
          if (!std::isfinite(s.theta_rad)) {
            throw ValidationError("MW rotation angle must be finite");
          }
        } else if constexpr (std::is_same_v<T, CwSegment>) {
          if (!std::isfinite(s.pump_rate_MHz) || s.pump_rate_MHz < 0.0) {
            throw ValidationError("CW pump rate must be finite and >= 0");
          }
          if (!std::isfinite(s.duration_ns) || s.duration_ns < 0.0) {
            throw ValidationError("CW duration must be finite and >= 0");
          }
        } else if constexpr (std::is_same_v<T, Delay>) {
          if (!std::isfinite(s.duration_ns) || s.duration_ns < 0.0) {
            throw ValidationError("delay duration must be finite and >= 0");
          }
        }
      },
      seg);
}

// 7x7 propagator over [populations; cumulative emission], per ns.
using Augmented = Eigen::Matrix<double, kNumLevels + 1, kNumLevels + 1>;

Augmented augmented_step(const RateParameters& params, const RateMatrix& g,
                         double dt_ns) {
  Augmented m = Augmented::Zero();
  m.topLeftCorner<kNumLevels, kNumLevels>() = g * kInvNsPerMHz;
  m(kNumLevels, kIdxP3) = params.radiative_rate_3_MHz() * kInvNsPerMHz;
  m(kNumLevels, kIdxP4) = params.radiative_rate_4_MHz() * kInvNsPerMHz;
  return (m * dt_ns).exp();
}

}  // namespace

void PulseSequence::validate() const {
  params.validate(true);
  if (segments.empty()) throw ValidationError("pulse sequence must be non-empty");
  for (const auto& seg : segments) validate_segment(seg);
}

Populations apply_ps_pulse(const Populations& pops, double alpha, double epsilon,
                           bool allow_excited) {
  if (!std::isfinite(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("ps pulse alpha must be in [0,1]");
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ValidationError("epsilon must be finite and >= 0");
  }
  if (!allow_excited && pops.excited_population() >= kSequencingTol) {
    throw SequencingError(
        "ps pulse on a state with excited remnants (pass the override to allow)");
  }
  Populations out = pops;
  const double conserving = 1.0 / (1.0 + epsilon);
  const double flipping = epsilon / (1.0 + epsilon);
  const double from_m0 = alpha * pops.m0();
  const double from_ms1 = alpha * (pops.sym() + pops.asym());
  out.m0() -= from_m0;
  out.sym() *= (1.0 - alpha);
  out.asym() *= (1.0 - alpha);
  out.p3() += from_m0 * conserving + from_ms1 * flipping;
  out.p4() += from_m0 * flipping + from_ms1 * conserving;
  return out;
}

Populations apply_mw_rotation(const Populations& pops, double theta_rad) {
  if (!std::isfinite(theta_rad)) {
    throw ValidationError("MW rotation angle must be finite");
  }
  if (pops.excited_population() + pops.p5() >= kSequencingTol) {
    throw SequencingError("MW rotation while the centre is optically excited");
  }
  const double s = std::sin(0.5 * theta_rad);
  const double transfer = s * s * (pops.m0() - pops.sym());
  Populations out = pops;
  out.m0() -= transfer;
  out.sym() += transfer;
  return out;
}

SequenceResult run_sequence(const PulseSequence& seq, const Populations& initial,
                            const RunOptions& options) {
  seq.validate();
  if (!(options.dt_ns > 0.0) || !std::isfinite(options.dt_ns)) {
    throw ValidationError("run option dt must be finite and > 0");
  }
  initial.validate();

  SequenceResult result;
  Populations p = initial;
  double t = 0.0;
  double cum = 0.0;
  result.trace.append(t, emission_rate_per_ns(seq.params, p), cum);

  auto run_cw = [&](double pump_MHz, double duration_ns, const char* label) {
    result.trace.marks.push_back({t, label});
    if (duration_ns <= 0.0) return;
    const RateMatrix g = build_generator(seq.params, pump_MHz);
    const auto n_steps = static_cast<std::size_t>(
        std::ceil(duration_ns / options.dt_ns - 1e-9));
    const double dt = duration_ns / static_cast<double>(n_steps);
    const Augmented step = augmented_step(seq.params, g, dt);
    Eigen::Matrix<double, kNumLevels + 1, 1> v;
    v << p.v, 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
      v = step * v;
      Populations pi(v.head<kNumLevels>());
      detail::clamp_tiny_negatives(pi.v);
      // Last step lands exactly on the segment end.
      const double ti = (i + 1 == n_steps) ? t + duration_ns
                                           : t + dt * static_cast<double>(i + 1);
      result.trace.append(ti, emission_rate_per_ns(seq.params, pi), cum + v[kNumLevels]);
    }
    cum += v[kNumLevels];
    p = Populations(v.head<kNumLevels>());
    detail::clamp_tiny_negatives(p.v);
    t += duration_ns;
  };

  for (const auto& seg : seq.segments) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PsPulse>) {
            p = apply_ps_pulse(p, s.alpha, seq.params.epsilon,
                               options.allow_ps_pulse_on_excited);
            result.trace.marks.push_back({t, "ps_pulse"});
            result.events.push_back({t, "ps_pulse", p});
            result.trace.append(t + kJumpSliverNs,
                                emission_rate_per_ns(seq.params, p), cum);
            t += kJumpSliverNs;
          } else if constexpr (std::is_same_v<T, MwRotation>) {
            p = apply_mw_rotation(p, s.theta_rad);
            result.trace.marks.push_back({t, "mw"});
            result.events.push_back({t, "mw", p});
          } else if constexpr (std::is_same_v<T, CwSegment>) {
            run_cw(s.pump_rate_MHz, s.duration_ns, "cw");
          } else if constexpr (std::is_same_v<T, Delay>) {
            run_cw(0.0, s.duration_ns, "delay");
          }
        },
        seg);
  }

  result.final_populations = p;
  return result;
}

}  // namespace nvcycle
