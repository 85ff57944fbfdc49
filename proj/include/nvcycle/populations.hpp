// populations.hpp - occupation of the five levels over the ordered basis
// (m0, sym, asym, p3, p4, p5).
//
// The m_s=+-1 ground doublet is split into a symmetric and an antisymmetric
// component so that resonant MW driving can be tracked classically: only the
// symmetric part couples back to m_s=0. All rate processes fill sym and asym
// equally.

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "nvcycle/errors.hpp"

namespace nvcycle {

enum LevelIndex : int {
  kIdxM0 = 0,   // |1>  ground m_s=0
  kIdxSym = 1,  // |2>  symmetric half
  kIdxAsym = 2, // |2>  antisymmetric half
  kIdxP3 = 3,   // |3>
  kIdxP4 = 4,   // |4>
  kIdxP5 = 5,   // |5>
};

inline constexpr int kNumLevels = 6;

template <typename Scalar>
struct PopulationsT {
  using Vector = Eigen::Matrix<Scalar, kNumLevels, 1>;

  Vector v = Vector::Zero();

  PopulationsT() = default;
  explicit PopulationsT(const Vector& values) : v(values) {}
  PopulationsT(Scalar m0, Scalar sym, Scalar asym, Scalar p3, Scalar p4, Scalar p5) {
    v << m0, sym, asym, p3, p4, p5;
  }

  Scalar m0() const { return v[kIdxM0]; }
  Scalar sym() const { return v[kIdxSym]; }
  Scalar asym() const { return v[kIdxAsym]; }
  Scalar p3() const { return v[kIdxP3]; }
  Scalar p4() const { return v[kIdxP4]; }
  Scalar p5() const { return v[kIdxP5]; }

  Scalar& m0() { return v[kIdxM0]; }
  Scalar& sym() { return v[kIdxSym]; }
  Scalar& asym() { return v[kIdxAsym]; }
  Scalar& p3() { return v[kIdxP3]; }
  Scalar& p4() { return v[kIdxP4]; }
  Scalar& p5() { return v[kIdxP5]; }

  // Population of the merged m_s=+-1 ground level |2>.
  Scalar p2() const { return sym() + asym(); }

  Scalar total() const { return v.sum(); }

  Scalar ground_population() const { return m0() + sym() + asym(); }
  Scalar excited_population() const { return p3() + p4(); }

  // Ground-state spin polarization P_GS = P1/(P1+P2).
  Scalar ground_polarization() const {
    const Scalar denom = ground_population();
    if (!(denom > Scalar(0))) {
      throw NumericError("ground polarization undefined: no ground population");
    }
    return m0() / denom;
  }

  // Excited-state spin polarization P_ES = P3/(P3+P4).
  Scalar excited_polarization() const {
    const Scalar denom = excited_population();
    if (!(denom > Scalar(0))) {
      throw NumericError("excited polarization undefined: no excited population");
    }
    return p3() / denom;
  }

  // A probability vector: components in [0,1], total = 1 within tol.
  void validate(Scalar tol = Scalar(1e-9)) const {
    for (int i = 0; i < kNumLevels; ++i) {
      if (!std::isfinite(static_cast<double>(v[i])) || v[i] < Scalar(0) ||
          v[i] > Scalar(1)) {
        throw ValidationError("population component out of [0,1]");
      }
    }
    if (std::abs(static_cast<double>(total() - Scalar(1))) > static_cast<double>(tol)) {
      throw ValidationError("populations do not sum to 1");
    }
  }

  // Fully polarized m_s=0 ground state.
  static PopulationsT polarized_m0() { return PopulationsT(1, 0, 0, 0, 0, 0); }

  // Incoherent m_s=+-1 ground mixture (equal sym/asym).
  static PopulationsT mixed_ms1() {
    return PopulationsT(0, Scalar(0.5), Scalar(0.5), 0, 0, 0);
  }

  // Ground manifold with m_s=0 fraction p1 and the rest split equally.
  static PopulationsT ground_with_polarization(Scalar p1) {
    const Scalar q = (Scalar(1) - p1) / Scalar(2);
    return PopulationsT(p1, q, q, 0, 0, 0);
  }
};

using Populations = PopulationsT<double>;

}  // namespace nvcycle
