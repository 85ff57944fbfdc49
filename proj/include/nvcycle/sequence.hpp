// sequence.hpp - pulse-sequence segments and their interpretation over the
// kinetic model.

#pragma once

#include <variant>
#include <vector>

#include "nvcycle/populations.hpp"
#include "nvcycle/rate_parameters.hpp"
#include "nvcycle/trace.hpp"

namespace nvcycle {

// Population threshold used by the sequencing guards of the instantaneous
// operations (ps pulse, MW rotation).
inline constexpr double kSequencingTol = 1e-6;

// Instantaneous picosecond excitation pulse: promotes a fraction alpha of
// the ground manifold, split (1 : epsilon)/(1+epsilon) between the
// spin-conserving and spin-flip branch.
struct PsPulse {
  double alpha = 1.0;
};

// Instantaneous resonant MW rotation of angle theta acting on (m0, sym).
struct MwRotation {
  double theta_rad = 0.0;
};

// Continuous-wave excitation at a fixed pump rate.
struct CwSegment {
  double pump_rate_MHz = 0.0;
  double duration_ns = 0.0;
};

// Dark evolution (CW segment with zero pump).
struct Delay {
  double duration_ns = 0.0;
};

using Segment = std::variant<PsPulse, MwRotation, CwSegment, Delay>;

struct PulseSequence {
  RateParameters params;
  std::vector<Segment> segments;

  void validate() const;
};

struct RunOptions {
  // Target sampling step inside CW/Delay segments; the actual step is the
  // largest value <= dt_ns that divides the segment duration evenly.
  double dt_ns = 0.5;
  // Ignore the excited-remnant guard of ps pulses.
  bool allow_ps_pulse_on_excited = false;
};

// Moves fraction alpha of the ground manifold into the excited state.
// Requires excited remnants < kSequencingTol unless allow_excited.
Populations apply_ps_pulse(const Populations& pops, double alpha, double epsilon,
                           bool allow_excited = false);

// Classical probability rotation in the (m0, sym) subspace:
//   m0'  = m0 cos^2(theta/2) + sym sin^2(theta/2)
//   sym' = sym cos^2(theta/2) + m0 sin^2(theta/2)
// asym is untouched. Requires excited and singlet populations below
// kSequencingTol.
Populations apply_mw_rotation(const Populations& pops, double theta_rad);

struct SequenceResult {
  EmissionTrace trace;
  Populations final_populations;

  // Populations right after each instantaneous event (ps pulse / MW).
  struct Event {
    double time_ns;
    std::string label;
    Populations after;
  };
  std::vector<Event> events;
};

// Applies the segments in order, recording the emission rate
// (k31+k32) p3 + (k41+k42) p4 throughout (in photons/ns).
SequenceResult run_sequence(const PulseSequence& seq, const Populations& initial,
                            const RunOptions& options = {});

}  // namespace nvcycle
