#include "nvcycle/presets.hpp"

#include <cmath>
#include <numbers>

#include "nvcycle/errors.hpp"
#include "nvcycle/propagation.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

double singlet_guard_delay_ns(const RateParameters& params) {
  const double total5 = params.total_rate_5_MHz();
  if (!(total5 > 0.0)) return 0.0;
  const double tau5_ns = kMHzPerInvNs / total5;
  // exp(-16) ~ 1e-7 of a fully shelved population, comfortably below the
  // 1e-6 sequencing guard.
  return 16.0 * tau5_ns;
}

std::vector<RabiPoint> preset_rabi_lifetime(const RateParameters& params,
                                            const std::vector<double>& theta_grid,
                                            const RabiSettings& settings) {
  params.validate(true);
  if (theta_grid.empty()) throw ValidationError("theta grid must be non-empty");

  const double wait_mw = settings.wait_before_mw_ns >= 0.0
                             ? settings.wait_before_mw_ns
                             : singlet_guard_delay_ns(params);

  std::vector<RabiPoint> out;
  out.reserve(theta_grid.size());
  RunOptions options;
  options.dt_ns = settings.dt_ns;

  for (double theta : theta_grid) {
    PulseSequence seq;
    seq.params = params;
    seq.segments = {CwSegment{settings.pump_rate_MHz, settings.polarize_ns},
                    Delay{wait_mw},
                    MwRotation{theta},
                    Delay{settings.wait_after_mw_ns},
                    PsPulse{settings.alpha},
                    Delay{settings.decay_window_ns},
                    CwSegment{settings.pump_rate_MHz, settings.readout_pulse_ns}};
    const SequenceResult run = run_sequence(seq, Populations::polarized_m0(), options);

    RabiPoint point;
    point.theta_rad = theta;
    double t_pulse = 0.0;
    for (const auto& ev : run.events) {
      if (ev.label == "ps_pulse") {
        t_pulse = ev.time_ns;
        point.pes_after_pulse = ev.after.excited_polarization();
      } else if (ev.label == "mw") {
        point.ground_before_pulse = ev.after;
      }
    }
    point.decay = run.trace.slice(t_pulse, t_pulse + settings.decay_window_ns);
    const double t_readout = t_pulse + kJumpSliverNs + settings.decay_window_ns;
    point.readout_counts =
        run.trace.integral(t_readout, t_readout + settings.readout_window_ns);
    out.push_back(std::move(point));
  }
  return out;
}

DoublePulseResult preset_double_pulse(const RateParameters& params,
                                      const SingletTemperatureModel& model,
                                      double temperature_K,
                                      const std::vector<double>& delays_ns,
                                      const DoublePulseSettings& settings) {
  params.validate(true);
  if (delays_ns.empty()) throw ValidationError("delay list must be non-empty");
  for (double d : delays_ns) {
    if (!std::isfinite(d) || d < 0.0) {
      throw ValidationError("delays must be finite and >= 0");
    }
  }

  DoublePulseResult result;
  result.singlet_lifetime_ns = singlet_lifetime_ns(model, temperature_K);
  const RateParameters scaled = params.with_singlet_lifetime(result.singlet_lifetime_ns);

  RunOptions options;
  options.dt_ns = settings.dt_ns;

  bool have_pulse1 = false;
  for (double d : delays_ns) {
    PulseSequence seq;
    seq.params = scaled;
    seq.segments = {CwSegment{settings.pump_rate_MHz, settings.pulse_ns}, Delay{d},
                    CwSegment{settings.pump_rate_MHz, settings.pulse_ns}};
    const SequenceResult run = run_sequence(seq, Populations::polarized_m0(), options);
    const double t2 = settings.pulse_ns + d;
    result.delays_ns.push_back(d);
    result.counts.push_back(run.trace.integral(t2, t2 + settings.window_ns));
    if (!have_pulse1) {
      result.pulse1_counts = run.trace.integral(0.0, settings.window_ns);
      have_pulse1 = true;
    }
  }
  return result;
}

PulseTrainResult preset_pulse_train(const RateParameters& params, int n_pulses,
                                    double pulse_spacing_ns, bool mw_after_first,
                                    const PulseTrainSettings& settings) {
  params.validate(true);
  if (n_pulses < 0) throw ValidationError("pulse count must be >= 0");
  if (!(pulse_spacing_ns > 0.0)) throw ValidationError("pulse spacing must be > 0");

  PulseTrainResult result;
  const double tau5_ns = params.total_rate_5_MHz() > 0.0
                             ? kMHzPerInvNs / params.total_rate_5_MHz()
                             : 0.0;
  result.spacing_warning = pulse_spacing_ns < 5.0 * tau5_ns;

  const double wait_pol = settings.wait_after_polarize_ns >= 0.0
                              ? settings.wait_after_polarize_ns
                              : singlet_guard_delay_ns(params);
  const double guard = singlet_guard_delay_ns(params);

  PulseSequence seq;
  seq.params = params;
  seq.segments.push_back(CwSegment{settings.pump_rate_MHz, settings.polarize_ns});
  seq.segments.push_back(Delay{wait_pol});
  seq.segments.push_back(PsPulse{settings.alpha});
  if (mw_after_first) {
    seq.segments.push_back(Delay{std::max(pulse_spacing_ns - settings.wait_after_mw_ns,
                                          guard)});
    seq.segments.push_back(MwRotation{std::numbers::pi});
    seq.segments.push_back(Delay{settings.wait_after_mw_ns});
  } else {
    seq.segments.push_back(Delay{pulse_spacing_ns});
  }
  for (int i = 0; i < n_pulses; ++i) {
    seq.segments.push_back(PsPulse{settings.alpha});
    seq.segments.push_back(Delay{pulse_spacing_ns});
  }

  RunOptions options;
  options.dt_ns = settings.dt_ns;
  const SequenceResult run = run_sequence(seq, Populations::polarized_m0(), options);

  const double window = std::min(settings.decay_window_ns, pulse_spacing_ns);
  for (const auto& ev : run.events) {
    if (ev.label != "ps_pulse") continue;
    result.pes.push_back(ev.after.excited_polarization());
    result.pulse_decays.push_back(run.trace.slice(ev.time_ns, ev.time_ns + window));
  }
  return result;
}

std::vector<PowerPoint> preset_power_dependence(const RateParameters& params,
                                                const std::vector<double>& pump_rates_MHz,
                                                bool mw_flag,
                                                const PowerSettings& settings) {
  params.validate(true);
  if (pump_rates_MHz.empty()) throw ValidationError("pump rate list must be non-empty");

  // CW-polarized ground state: fixed point of the per-cycle flip map.
  const CycleProbabilities cp = cycle_map(params);
  const double flip_total = cp.p12 + cp.p21;
  const double p1_inf = flip_total > 0.0 ? cp.p21 / flip_total : 1.0;
  const Populations polarized = Populations::ground_with_polarization(p1_inf);

  RunOptions options;
  options.dt_ns = settings.dt_ns;

  std::vector<PowerPoint> out;
  out.reserve(pump_rates_MHz.size());
  for (double pump : pump_rates_MHz) {
    if (!std::isfinite(pump) || pump < 0.0) {
      throw ValidationError("pump rates must be finite and >= 0");
    }
    PowerPoint point;
    point.pump_rate_MHz = pump;
    PulseSequence seq;
    seq.params = params;
    seq.segments = {CwSegment{pump, settings.duration_ns}};
    point.trace_ms0 = run_sequence(seq, polarized, options).trace;
    if (mw_flag) {
      const Populations inverted =
          apply_mw_rotation(polarized, std::numbers::pi);
      point.trace_ms1 = run_sequence(seq, inverted, options).trace;
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace nvcycle
