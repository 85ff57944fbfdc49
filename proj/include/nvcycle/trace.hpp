// trace.hpp - time-resolved expected photon emission rate produced by a
// sequence run.
//
// Samples carry the exact cumulative emission (photons since trace start),
// computed by augmented propagation rather than quadrature, so window
// integrals taken at sample points are exact and independent of the
// sampling step. Instantaneous events appear as a pair of samples a
// negligible sliver apart.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nvcycle {

// Width of the time sliver used to represent an instantaneous rate jump.
inline constexpr double kJumpSliverNs = 1e-9;

struct EmissionTrace {
  std::vector<double> time_ns;     // strictly increasing
  std::vector<double> rate;        // photons/ns, >= 0
  std::vector<double> cumulative;  // photons emitted since trace start

  struct Mark {
    double time_ns;
    std::string label;
  };
  std::vector<Mark> marks;  // segment boundaries and instantaneous events

  std::size_t size() const { return time_ns.size(); }
  bool empty() const { return time_ns.empty(); }
  double t_begin() const { return time_ns.front(); }
  double t_end() const { return time_ns.back(); }

  // Total emission over the whole trace.
  double integral() const {
    return empty() ? 0.0 : cumulative.back() - cumulative.front();
  }

  // Emission over [t0, t1]. Exact when t0, t1 are sample points; otherwise
  // partial cells are interpolated along the piecewise-linear rate.
  double integral(double t0, double t1) const;

  // Piecewise-linear interpolation of the rate.
  double rate_at(double t) const;

  void append(double t, double r, double cum);

  // Copy of the [t0, t1] portion. With rebase, times are shifted so the
  // slice starts at 0 and cumulative restarts at 0.
  EmissionTrace slice(double t0, double t1, bool rebase = true) const;

  // Basic invariants: strictly increasing times, non-negative rates,
  // non-decreasing cumulative.
  void validate() const;
};

}  // namespace nvcycle
