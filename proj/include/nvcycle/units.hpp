// units.hpp - unit conventions and physical constants
//
// Conventions used throughout: rates in MHz, times in ns, energies in meV,
// temperatures in K. Emission rates are photons/ns.

#pragma once

namespace nvcycle {

// 1 MHz = 1e-3 / ns
inline constexpr double kMHzPerInvNs = 1e3;
inline constexpr double kInvNsPerMHz = 1e-3;

// Boltzmann constant in meV/K
inline constexpr double kBoltzmannMeVPerK = 0.0861733;

// Zero-field splittings of the spin-1 manifolds. These enter only as MW
// resonance conditions; the rate model itself carries no coherent dynamics.
inline constexpr double kGroundSplittingMHz = 2870.0;   // D_GS
inline constexpr double kExcitedSplittingMHz = 1430.0;  // D_ES

}  // namespace nvcycle
