// histogram.hpp - binned TCSPC photon counts. Time axis is relative to the
// ps-pulse arrival; pre-pulse bins carry negative centers.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nvcycle {

struct TcspcHistogram {
  double bin_width_ns = 0.0;
  double origin_ns = 0.0;  // left edge of the first bin
  std::vector<double> counts;  // Poisson integers, or expected real values
  bool noiseless = false;

  std::size_t size() const { return counts.size(); }
  double bin_center(std::size_t i) const {
    return origin_ns + (static_cast<double>(i) + 0.5) * bin_width_ns;
  }

  void validate() const;

  // CSV with header "time_ns,counts"; times are bin centers. Integer counts
  // round-trip bit-exactly.
  void write_csv(const std::string& path) const;
  static TcspcHistogram read_csv(const std::string& path);
};

}  // namespace nvcycle
