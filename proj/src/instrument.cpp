#include "nvcycle/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "nvcycle/errors.hpp"

namespace nvcycle {

void TcspcHistogram::validate() const {
  if (!(bin_width_ns > 0.0)) throw ValidationError("bin width must be > 0");
  for (double c : counts) {
    if (!std::isfinite(c) || c < 0.0) {
      throw ValidationError("histogram counts must be finite and >= 0");
    }
  }
}

void TcspcHistogram::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << "time_ns,counts\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", bin_center(i));
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", counts[i]);
    out << buf << '\n';
  }
}

TcspcHistogram read_histogram_csv_impl(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_ns,counts", 0) != 0) {
    throw ValidationError("histogram CSV missing 'time_ns,counts' header: " + name);
  }
  std::vector<double> centers, counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("malformed histogram CSV row: " + line);
    }
    try {
      centers.push_back(std::stod(line.substr(0, comma)));
      counts.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ValidationError("malformed histogram CSV row: " + line);
    }
  }
  if (centers.size() < 2) {
    throw ValidationError("histogram CSV needs at least two bins: " + name);
  }
  const double w = centers[1] - centers[0];
  if (!(w > 0.0)) throw ValidationError("histogram CSV times must increase");
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (std::abs(centers[i] - centers[i - 1] - w) > 1e-6 * w) {
      throw ValidationError("histogram CSV bins are not uniform");
    }
  }
  TcspcHistogram hist;
  hist.bin_width_ns = w;
  hist.origin_ns = centers.front() - 0.5 * w;
  hist.counts = std::move(counts);
  for (double c : hist.counts) {
    if (c != std::floor(c)) {
      hist.noiseless = true;
      break;
    }
  }
  hist.validate();
  return hist;
}

TcspcHistogram TcspcHistogram::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open histogram CSV: " + path);
  return read_histogram_csv_impl(in, path);
}

EmissionTrace convolve_irf(const EmissionTrace& trace, double sigma_ns) {
  if (!std::isfinite(sigma_ns) || sigma_ns < 0.0) {
    throw ValidationError("IRF sigma must be finite and >= 0");
  }
  if (trace.empty()) throw ValidationError("cannot convolve an empty trace");
  if (sigma_ns == 0.0) return trace;

  const double dt = sigma_ns / 8.0;
  const double pad = 6.0 * sigma_ns;
  const double t0 = trace.t_begin() - pad;
  const auto n_cells = static_cast<std::size_t>(
      std::ceil((trace.t_end() + pad - t0) / dt));

  // Exact per-cell mass of the input trace.
  std::vector<double> mass(n_cells, 0.0);
  for (std::size_t k = 0; k < n_cells; ++k) {
    const double a = std::max(t0 + static_cast<double>(k) * dt, trace.t_begin());
    const double b = std::min(t0 + static_cast<double>(k + 1) * dt, trace.t_end());
    if (b > a) mass[k] = trace.integral(a, b);
  }

  // Normalized discrete Gaussian kernel out to 6 sigma.
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(pad / dt));
  std::vector<double> kernel(2 * half + 1);
  double sum = 0.0;
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double x = static_cast<double>(j) * dt / sigma_ns;
    kernel[j + half] = std::exp(-0.5 * x * x);
    sum += kernel[j + half];
  }
  for (double& w : kernel) w /= sum;

  std::vector<double> out_mass(n_cells, 0.0);
  for (std::size_t k = 0; k < n_cells; ++k) {
    if (mass[k] == 0.0) continue;
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(k) - half);
    const auto hi = std::min<std::ptrdiff_t>(n_cells - 1,
                                             static_cast<std::ptrdiff_t>(k) + half);
    for (std::ptrdiff_t m = lo; m <= hi; ++m) {
      out_mass[m] += mass[k] * kernel[m - static_cast<std::ptrdiff_t>(k) + half];
    }
  }

  // Samples at cell edges; prefix sums keep the total integral exact.
  EmissionTrace out;
  double cum = 0.0;
  for (std::size_t k = 0; k <= n_cells; ++k) {
    const double left = k > 0 ? out_mass[k - 1] : 0.0;
    const double right = k < n_cells ? out_mass[k] : 0.0;
    out.append(t0 + static_cast<double>(k) * dt, (left + right) / (2.0 * dt), cum);
    cum += right;
  }
  out.marks = trace.marks;
  return out;
}

TcspcHistogram sample_histogram(const EmissionTrace& trace, double bin_width_ns,
                                double total_photons, std::uint64_t seed,
                                const SamplingOptions& options) {
  if (trace.empty()) throw ValidationError("cannot sample an empty trace");
  if (!(bin_width_ns > 0.0)) throw ValidationError("bin width must be > 0");
  if (!(total_photons > 0.0)) throw ValidationError("total photons must be > 0");

  double origin = trace.t_begin();
  if (options.origin_ns) {
    origin = *options.origin_ns;
  } else {
    for (const auto& m : trace.marks) {
      if (m.label == "ps_pulse") origin = m.time_ns;
    }
  }
  // Align bin edges to the origin and cover the whole trace.
  const double first_edge =
      origin - std::ceil((origin - trace.t_begin()) / bin_width_ns) * bin_width_ns;
  const auto n_bins = static_cast<std::size_t>(
      std::ceil((trace.t_end() - first_edge) / bin_width_ns - 1e-12));

  const double total_mass = trace.integral();
  if (!(total_mass > 0.0)) {
    throw ValidationError("trace carries no emission to sample");
  }
  const double scale = total_photons / total_mass;

  TcspcHistogram hist;
  hist.bin_width_ns = bin_width_ns;
  hist.origin_ns = first_edge - origin;
  hist.noiseless = options.noiseless;
  hist.counts.resize(n_bins);

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double a = std::max(first_edge + static_cast<double>(i) * bin_width_ns,
                              trace.t_begin());
    const double b = std::min(first_edge + static_cast<double>(i + 1) * bin_width_ns,
                              trace.t_end());
    const double expected = b > a ? trace.integral(a, b) * scale : 0.0;
    if (options.noiseless) {
      hist.counts[i] = expected;
    } else {
      std::poisson_distribution<long long> poisson(expected);
      hist.counts[i] = expected > 0.0 ? static_cast<double>(poisson(rng)) : 0.0;
    }
  }
  return hist;
}

double window_counts(const EmissionTrace& trace, double start_ns, double width_ns) {
  if (!std::isfinite(start_ns) || !std::isfinite(width_ns) || width_ns < 0.0) {
    throw ValidationError("window must be finite with width >= 0");
  }
  if (width_ns == 0.0) {
    if (start_ns < trace.t_begin() || start_ns > trace.t_end()) {
      throw ValidationError("window outside trace span");
    }
    return 0.0;
  }
  return trace.integral(start_ns, start_ns + width_ns);
}

}  // namespace nvcycle
