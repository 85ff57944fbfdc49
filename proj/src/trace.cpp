#include "nvcycle/trace.hpp"

#include <algorithm>
#include <cmath>

#include "nvcycle/errors.hpp"

namespace nvcycle {

namespace {

// Integral of the piecewise-linear rate over [t_lo, t] inside cell i,
// rescaled so that the full cell reproduces the exact cell mass.
double partial_cell_mass(const EmissionTrace& tr, std::size_t i, double t) {
  const double t0 = tr.time_ns[i];
  const double t1 = tr.time_ns[i + 1];
  const double cell_mass = tr.cumulative[i + 1] - tr.cumulative[i];
  if (t <= t0) return 0.0;
  if (t >= t1) return cell_mass;
  const double r0 = tr.rate[i];
  const double r1 = tr.rate[i + 1];
  const double u = (t - t0) / (t1 - t0);
  const double full_trap = 0.5 * (r0 + r1);
  if (full_trap <= 0.0) return cell_mass * u;
  const double part_trap = u * (r0 + 0.5 * u * (r1 - r0));
  return cell_mass * (part_trap / full_trap);
}

}  // namespace

double EmissionTrace::integral(double t0, double t1) const {
  if (empty()) throw ValidationError("integral of an empty trace");
  if (!(t0 <= t1)) throw ValidationError("window start must not exceed window end");
  const double tol = 1e-9 * std::max(1.0, std::abs(t_end()));
  if (t0 < t_begin() - tol || t1 > t_end() + tol) {
    throw ValidationError("window outside trace span");
  }
  t0 = std::clamp(t0, t_begin(), t_end());
  t1 = std::clamp(t1, t_begin(), t_end());
  auto cum_at = [this](double t) {
    const auto it = std::upper_bound(time_ns.begin(), time_ns.end(), t);
    if (it == time_ns.begin()) return cumulative.front();
    if (it == time_ns.end()) return cumulative.back();
    const auto i = static_cast<std::size_t>(it - time_ns.begin()) - 1;
    return cumulative[i] + partial_cell_mass(*this, i, t);
  };
  return cum_at(t1) - cum_at(t0);
}

double EmissionTrace::rate_at(double t) const {
  if (empty()) throw ValidationError("rate_at on an empty trace");
  if (t <= t_begin()) return rate.front();
  if (t >= t_end()) return rate.back();
  const auto it = std::upper_bound(time_ns.begin(), time_ns.end(), t);
  const auto i = static_cast<std::size_t>(it - time_ns.begin()) - 1;
  const double u = (t - time_ns[i]) / (time_ns[i + 1] - time_ns[i]);
  return rate[i] + u * (rate[i + 1] - rate[i]);
}

void EmissionTrace::append(double t, double r, double cum) {
  if (!empty() && !(t > time_ns.back())) {
    throw NumericError("trace samples must have strictly increasing times");
  }
  time_ns.push_back(t);
  rate.push_back(r);
  cumulative.push_back(cum);
}

EmissionTrace EmissionTrace::slice(double t0, double t1, bool rebase) const {
  if (empty()) throw ValidationError("slice of an empty trace");
  const double tol = 1e-9 * std::max(1.0, std::abs(t_end()));
  if (t0 < t_begin() - tol || t1 > t_end() + tol || !(t0 < t1)) {
    throw ValidationError("slice window outside trace span");
  }
  t0 = std::clamp(t0, t_begin(), t_end());
  t1 = std::clamp(t1, t_begin(), t_end());
  EmissionTrace out;
  const double t_shift = rebase ? t0 : 0.0;
  double cum_base = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < size(); ++i) {
    if (time_ns[i] < t0 - 1e-15 || time_ns[i] > t1 + 1e-15) continue;
    if (first) {
      cum_base = rebase ? cumulative[i] : 0.0;
      first = false;
    }
    out.append(time_ns[i] - t_shift, rate[i], cumulative[i] - cum_base);
  }
  if (out.empty()) throw ValidationError("slice window contains no samples");
  for (const auto& m : marks) {
    if (m.time_ns >= t0 - 1e-15 && m.time_ns <= t1 + 1e-15) {
      out.marks.push_back({m.time_ns - t_shift, m.label});
    }
  }
  return out;
}

void EmissionTrace::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(time_ns[i]) || !std::isfinite(rate[i]) ||
        !std::isfinite(cumulative[i])) {
      throw ValidationError("trace contains non-finite values");
    }
    if (rate[i] < 0.0) throw ValidationError("trace rate is negative");
    if (i > 0) {
      if (!(time_ns[i] > time_ns[i - 1])) {
        throw ValidationError("trace times are not strictly increasing");
      }
      if (cumulative[i] < cumulative[i - 1] - 1e-12) {
        throw ValidationError("trace cumulative emission decreases");
      }
    }
  }
}

}  // namespace nvcycle
