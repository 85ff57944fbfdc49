// instrument.hpp - detector response, binning and shot noise applied to
// deterministic emission traces.

#pragma once

#include <cstdint>
#include <optional>

#include "nvcycle/histogram.hpp"
#include "nvcycle/trace.hpp"

namespace nvcycle {

// Default combined IRF width: avalanche-photodiode jitter dominates.
inline constexpr double kDefaultIrfSigmaNs = 0.45;

// Gaussian convolution of the emission rate. The output is uniformly
// sampled and extends 6 sigma beyond the input span; the total integral is
// preserved. sigma = 0 returns the trace unchanged.
EmissionTrace convolve_irf(const EmissionTrace& trace, double sigma_ns);

struct SamplingOptions {
  bool noiseless = false;
  // Bin-edge alignment time; when unset the latest ps-pulse mark is used,
  // falling back to the trace start.
  std::optional<double> origin_ns;
};

// Bins the trace and draws independent Poisson counts per bin, scaled so the
// expected total equals total_photons. Identical seeds give identical
// histograms. Bin centers are reported relative to the origin.
TcspcHistogram sample_histogram(const EmissionTrace& trace, double bin_width_ns,
                                double total_photons, std::uint64_t seed,
                                const SamplingOptions& options = {});

// Expected counts (integral of the emission rate) over [start, start+width].
double window_counts(const EmissionTrace& trace, double start_ns, double width_ns);

}  // namespace nvcycle
