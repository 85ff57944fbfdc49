// presets.hpp - canned experiment protocols: Rabi-resolved lifetime,
// double-pulse singlet recovery, ps pulse train, and CW power dependence.

#pragma once

#include <vector>

#include "nvcycle/cycle.hpp"
#include "nvcycle/rate_parameters.hpp"
#include "nvcycle/sequence.hpp"
#include "nvcycle/singlet.hpp"
#include "nvcycle/trace.hpp"

namespace nvcycle {

// Delay long enough for the singlet shelf to drain below the MW sequencing
// guard, given the current total singlet rate.
double singlet_guard_delay_ns(const RateParameters& params);

// ---------------------------------------------------------------------------
// Rabi-resolved lifetime (polarize, MW of variable angle, ps pulse, readout).

struct RabiSettings {
  double pump_rate_MHz = 4.0;
  double polarize_ns = 1300.0;
  // Dark wait between polarization and MW; < 0 selects the guard delay.
  double wait_before_mw_ns = -1.0;
  double wait_after_mw_ns = 200.0;
  double alpha = 0.95;
  double decay_window_ns = 200.0;
  double readout_pulse_ns = 1300.0;
  double readout_window_ns = 300.0;
  double dt_ns = 0.1;
};

struct RabiPoint {
  double theta_rad = 0.0;
  EmissionTrace decay;        // time rebased to the ps pulse
  double readout_counts = 0;  // first readout_window_ns of the next CW pulse
  double pes_after_pulse = 0; // P_ES right after the ps pulse
  Populations ground_before_pulse;
};

std::vector<RabiPoint> preset_rabi_lifetime(const RateParameters& params,
                                            const std::vector<double>& theta_grid,
                                            const RabiSettings& settings = {});

// ---------------------------------------------------------------------------
// Double-pulse singlet recovery.

struct DoublePulseSettings {
  double pump_rate_MHz = 4.0;
  double pulse_ns = 1000.0;
  double window_ns = 30.0;
  double dt_ns = 0.5;
};

struct DoublePulseResult {
  std::vector<double> delays_ns;
  std::vector<double> counts;   // window integral of pulse 2
  double pulse1_counts = 0.0;   // same window at the start of pulse 1
  double singlet_lifetime_ns = 0.0;
};

DoublePulseResult preset_double_pulse(const RateParameters& params,
                                      const SingletTemperatureModel& model,
                                      double temperature_K,
                                      const std::vector<double>& delays_ns,
                                      const DoublePulseSettings& settings = {});

// ---------------------------------------------------------------------------
// Consecutive ps-pulse train after optional spin inversion.

struct PulseTrainSettings {
  double pump_rate_MHz = 4.0;
  double polarize_ns = 2000.0;
  // Dark wait after polarization; < 0 selects the guard delay.
  double wait_after_polarize_ns = -1.0;
  double wait_after_mw_ns = 200.0;
  double alpha = 0.95;
  double decay_window_ns = 300.0;
  double dt_ns = 0.1;
};

struct PulseTrainResult {
  // Index 0 is the reference pulse, 1..n the train.
  std::vector<EmissionTrace> pulse_decays;  // rebased to each pulse
  std::vector<double> pes;                  // P_ES right after each pulse
  bool spacing_warning = false;             // spacing < 5x singlet lifetime
};

PulseTrainResult preset_pulse_train(const RateParameters& params, int n_pulses,
                                    double pulse_spacing_ns, bool mw_after_first,
                                    const PulseTrainSettings& settings = {});

// ---------------------------------------------------------------------------
// CW power dependence (Fig-5-style two-pulse traces).

struct PowerSettings {
  double duration_ns = 1000.0;
  double dt_ns = 1.0;
};

struct PowerPoint {
  double pump_rate_MHz = 0.0;
  EmissionTrace trace_ms0;  // polarized start
  EmissionTrace trace_ms1;  // after MW pi (present when mw_flag)
};

std::vector<PowerPoint> preset_power_dependence(const RateParameters& params,
                                                const std::vector<double>& pump_rates_MHz,
                                                bool mw_flag,
                                                const PowerSettings& settings = {});

}  // namespace nvcycle
