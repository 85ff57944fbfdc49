// rate_parameters.hpp - the eight relaxation rates of the five-level model
// plus the spin-mixing fraction epsilon. Single source of truth for the
// kinetic model.
//
// Level labels: |1> ground m_s=0, |2> ground m_s=+-1 (merged), |3> excited
// m_s=0, |4> excited m_s=+-1, |5> singlet shelf (lumped). k_mn is the rate
// from |m> to |n> in MHz.

#pragma once

#include <cmath>
#include <string>

#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

// Upper bound on the spin-mixing fraction accepted by default validation.
inline constexpr double kEpsilonUpperBound = 0.04;

struct RateParameters {
  double k31_MHz = 0.0;  // |3> -> |1>, spin-conserving radiative
  double k32_MHz = 0.0;  // |3> -> |2>, spin-flip radiative
  double k35_MHz = 0.0;  // |3> -> |5>, ISC out of m_s=0
  double k41_MHz = 0.0;  // |4> -> |1>, spin-flip radiative
  double k42_MHz = 0.0;  // |4> -> |2>, spin-conserving radiative
  double k45_MHz = 0.0;  // |4> -> |5>, ISC out of m_s=+-1
  double k51_MHz = 0.0;  // |5> -> |1>
  double k52_MHz = 0.0;  // |5> -> |2>
  double epsilon = 0.0;  // spin non-conserving fraction in optical excitation

  // Throws ValidationError unless all rates are finite and non-negative,
  // epsilon is within [0, kEpsilonUpperBound] (unless allow_large_epsilon),
  // and the singlet drains whenever it can fill.
  void validate(bool allow_large_epsilon = false) const;

  bool is_valid(bool allow_large_epsilon = false) const {
    try {
      validate(allow_large_epsilon);
    } catch (const ValidationError&) {
      return false;
    }
    return true;
  }

  // Total depletion rates of the excited levels and the singlet.
  double total_rate_3_MHz() const { return k31_MHz + k32_MHz + k35_MHz; }
  double total_rate_4_MHz() const { return k41_MHz + k42_MHz + k45_MHz; }
  double total_rate_5_MHz() const { return k51_MHz + k52_MHz; }

  // Radiative rates entering the emission observable.
  double radiative_rate_3_MHz() const { return k31_MHz + k32_MHz; }
  double radiative_rate_4_MHz() const { return k41_MHz + k42_MHz; }

  // Returns a copy whose total singlet rate k51+k52 equals
  // 1000/lifetime_ns with the k51:k52 ratio preserved.
  RateParameters with_singlet_lifetime(double lifetime_ns) const;
};

inline void RateParameters::validate(bool allow_large_epsilon) const {
  const struct {
    const char* name;
    double value;
  } rates[] = {{"k31_MHz", k31_MHz}, {"k32_MHz", k32_MHz},
               {"k35_MHz", k35_MHz}, {"k41_MHz", k41_MHz},
               {"k42_MHz", k42_MHz}, {"k45_MHz", k45_MHz},
               {"k51_MHz", k51_MHz}, {"k52_MHz", k52_MHz}};
  for (const auto& r : rates) {
    if (!std::isfinite(r.value) || r.value < 0.0) {
      throw ValidationError(std::string(r.name) + " must be finite and >= 0");
    }
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw ValidationError("epsilon must be finite and >= 0");
  }
  if (!allow_large_epsilon && epsilon > kEpsilonUpperBound) {
    throw ValidationError("epsilon exceeds the 0.04 bound (pass the override to allow)");
  }
  if (k35_MHz + k45_MHz > 0.0 && k51_MHz + k52_MHz <= 0.0) {
    throw ValidationError("singlet fills (k35+k45 > 0) but never drains (k51+k52 = 0)");
  }
}

inline RateParameters RateParameters::with_singlet_lifetime(double lifetime_ns) const {
  if (!(lifetime_ns > 0.0)) {
    throw ValidationError("singlet lifetime must be > 0");
  }
  RateParameters out = *this;
  const double total = kMHzPerInvNs / lifetime_ns;
  const double old_total = k51_MHz + k52_MHz;
  if (old_total > 0.0) {
    out.k51_MHz = total * (k51_MHz / old_total);
    out.k52_MHz = total * (k52_MHz / old_total);
  } else {
    // No branching information available: split equally.
    out.k51_MHz = 0.5 * total;
    out.k52_MHz = 0.5 * total;
  }
  return out;
}

}  // namespace nvcycle
