#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nvcycle/cycle.hpp"
#include "nvcycle/generator.hpp"
#include "nvcycle/populations.hpp"
#include "nvcycle/propagation.hpp"
#include "nvcycle/sequence.hpp"
#include "nvcycle/singlet.hpp"
#include "oracles.hpp"

using namespace nvcycle;
using namespace nvcycle::test;

TEST_CASE("rate parameter validation") {
  RateParameters p = nvj_parameters();
  CHECK_NOTHROW(p.validate());

  RateParameters bad = p;
  bad.k35_MHz = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  RateParameters eps_high = p;
  eps_high.epsilon = 0.1;
  CHECK_THROWS_AS(eps_high.validate(), ValidationError);
  CHECK_NOTHROW(eps_high.validate(true));

  RateParameters no_drain = p;
  no_drain.k51_MHz = 0.0;
  no_drain.k52_MHz = 0.0;
  CHECK_THROWS_AS(no_drain.validate(), ValidationError);

  const RateParameters rescaled = p.with_singlet_lifetime(250.0);
  CHECK(rescaled.total_rate_5_MHz() == doctest::Approx(1000.0 / 250.0).epsilon(1e-12));
  CHECK(rescaled.k51_MHz / rescaled.k52_MHz ==
        doctest::Approx(p.k51_MHz / p.k52_MHz).epsilon(1e-12));
}

TEST_CASE("populations accessors and validation") {
  Populations p(0.5, 0.2, 0.1, 0.1, 0.05, 0.05);
  CHECK_NOTHROW(p.validate());
  CHECK(p.p2() == doctest::Approx(0.3));
  CHECK(p.ground_polarization() == doctest::Approx(0.5 / 0.8));
  CHECK(p.excited_polarization() == doctest::Approx(0.1 / 0.15));

  const Populations ground_only = Populations::polarized_m0();
  CHECK_THROWS_AS(ground_only.excited_polarization(), NumericError);

  Populations bad(0.5, 0.2, 0.1, 0.1, 0.05, 0.2);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("build_generator: zero dynamics gives the zero matrix") {
  RateParameters none;
  const RateMatrix g = build_generator(none, 0.0);
  CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("build_generator: NV J p3 column sums to -1/T13") {
  const RateMatrix g = build_generator(nvj_parameters(), 0.0);
  const double col_sum = g.col(kIdxP3).sum();
  CHECK(col_sum == doctest::Approx(0.0).epsilon(0.0));
  // Diagonal entry equals the total depletion rate of |3>.
  CHECK(g(kIdxP3, kIdxP3) ==
        doctest::Approx(-1000.0 / kNvjT13).epsilon(1e-12));
}

TEST_CASE("build_generator: columns sum to zero for random parameters") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const RateParameters p = random_rates(rng);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    const RateMatrix g = build_generator(p, u(rng));
    for (int c = 0; c < kNumLevels; ++c) {
      CHECK(std::abs(g.col(c).sum()) <= 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("build_generator rejects negative pump") {
  CHECK_THROWS_AS(build_generator(nvj_parameters(), -1.0), ValidationError);
}

TEST_CASE("propagate: zero duration is the identity") {
  const RateMatrix g = build_generator(nvj_parameters(), 4.0);
  const Populations p0(0.4, 0.2, 0.2, 0.1, 0.05, 0.05);
  const Populations p1 = propagate(g, p0, 0.0);
  CHECK((p1.v - p0.v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagate: single decaying level follows exp(-kt)") {
  RateParameters p;
  p.k31_MHz = 80.0;
  const RateMatrix g = build_generator(p, 0.0);
  Populations start;
  start.p3() = 1.0;
  for (double t : {1.0, 5.0, 20.0}) {
    const Populations out = propagate(g, start, t);
    CHECK(out.p3() == doctest::Approx(std::exp(-80.0 * kInvNsPerMHz * t)).epsilon(1e-12));
    CHECK(out.m0() == doctest::Approx(1.0 - out.p3()).epsilon(1e-12));
  }
}

TEST_CASE("propagate matches RK4 on the NV J generator") {
  const RateMatrix g = build_generator(nvj_parameters(), 0.0);
  Populations start;
  start.p3() = 1.0;
  const Populations exact = propagate(g, start, kNvjT13);
  const Populations reference = rk4_propagate(g, start, kNvjT13, 1e-3);
  CHECK((exact.v - reference.v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("propagate: conservation, positivity and semigroup properties") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const RateParameters params = random_rates(rng);
    const RateMatrix g = build_generator(params, 15.0 * u(rng));
    Eigen::Matrix<double, kNumLevels, 1> v;
    for (int k = 0; k < kNumLevels; ++k) v[k] = u(rng);
    v /= v.sum();
    const Populations p0{v};
    const double t1 = 40.0 * u(rng);
    const double t2 = 40.0 * u(rng);

    const Populations a = propagate(g, p0, t1);
    CHECK(a.total() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.v.minCoeff() >= 0.0);  // clamped no lower than -1e-12 internally

    const Populations two_step = propagate(g, a, t2);
    const Populations one_step = propagate(g, p0, t1 + t2);
    CHECK((two_step.v - one_step.v).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("propagate rejects non-finite generators") {
  RateMatrix g = RateMatrix::Zero();
  g(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(propagate(g, Populations::polarized_m0(), 1.0), NumericError);
}

TEST_CASE("propagate_trace: boundary and semigroup consistency") {
  const RateMatrix g = build_generator(nvj_parameters(), 4.0);
  const Populations p0 = Populations::polarized_m0();

  const auto short_series = propagate_trace(g, p0, 0.3, 1.0);
  CHECK(short_series.size() == 1);

  const auto series = propagate_trace(g, p0, 50.0, 2.5);
  CHECK(series.size() == 21);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const Populations next = propagate(g, series[i], 2.5);
    CHECK((next.v - series[i + 1].v).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("propagate_trace: CW pump trace has peak, relaxation dip and plateau") {
  const RateParameters params = nvj_parameters();
  const RateMatrix g = build_generator(params, 4.0);
  const auto series = propagate_trace(g, Populations::polarized_m0(), 5000.0, 1.0);

  const double kr3 = params.radiative_rate_3_MHz();
  const double kr4 = params.radiative_rate_4_MHz();
  std::vector<double> emission;
  emission.reserve(series.size());
  for (const auto& s : series) emission.push_back(kr3 * s.p3() + kr4 * s.p4());

  const auto peak_it = std::max_element(emission.begin(), emission.end());
  const auto peak_idx = static_cast<std::size_t>(peak_it - emission.begin());
  CHECK(peak_idx > 0);
  CHECK(peak_idx < 150);  // initial peak within the first 150 ns

  const Populations ss = steady_state(g);
  const double plateau = kr3 * ss.p3() + kr4 * ss.p4();
  CHECK(*peak_it > 1.15 * plateau);                    // singlet-induced dip from the peak
  CHECK(emission.back() == doctest::Approx(plateau).epsilon(1e-3));
  CHECK(series.back().p5() == doctest::Approx(ss.p5()).epsilon(1e-3));
}

TEST_CASE("steady_state: zero pump is degenerate; mass relaxes to the ground manifold") {
  const RateParameters params = nvj_parameters();
  const RateMatrix dark = build_generator(params, 0.0);
  CHECK_THROWS_AS(steady_state(dark), DegenerateSteadyStateError);

  Populations start;
  start.p3() = 0.7;
  start.p5() = 0.3;
  const Populations relaxed = relax_to_ground(params, start);
  CHECK(relaxed.excited_population() + relaxed.p5() < 1e-10);
  CHECK(relaxed.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("steady_state agrees with long-time propagation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  for (int i = 0; i < 25; ++i) {
    const RateParameters params = random_rates(rng);
    const double pump = 20.0 * u(rng);
    const RateMatrix g = build_generator(params, pump);
    const Populations ss = steady_state(g);
    CHECK((g * ss.v).cwiseAbs().maxCoeff() <= 1e-10);

    const double slowest_ns =
        1000.0 / std::min({params.total_rate_5_MHz(), pump, params.total_rate_3_MHz(),
                           params.total_rate_4_MHz()});
    const Populations late = propagate(g, Populations::polarized_m0(), 100.0 * slowest_ns);
    CHECK((late.v - ss.v).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("steady_state in the weak-pump limit matches the cycle-map fixed point") {
  const RateParameters params = nvj_parameters();
  const CycleProbabilities cp = cycle_map(params);
  const double fixed_point = cp.p21 / (cp.p12 + cp.p21);
  CHECK(fixed_point == doctest::Approx(kNvjP21 / (kNvjP12 + kNvjP21)).epsilon(1e-9));

  const RateMatrix g = build_generator(params, 1e-5);
  const Populations ss = steady_state(g);
  CHECK(ss.ground_polarization() == doctest::Approx(fixed_point).epsilon(1e-4));
  CHECK(fixed_point == doctest::Approx(0.8015).epsilon(2e-3));
}

TEST_CASE("cycle_map: pure spin-conserving cycle cannot flip") {
  RateParameters p;
  p.k31_MHz = 80.0;
  p.k41_MHz = 0.5;
  p.k42_MHz = 70.0;
  p.k45_MHz = 50.0;
  p.k51_MHz = 3.0;
  p.k52_MHz = 3.0;
  p.epsilon = 0.0;
  const CycleProbabilities cp = cycle_map(p);
  CHECK(cp.p12 == 0.0);
  CHECK(cp.p21 > 0.0);
}

TEST_CASE("cycle_map reproduces the NV J flip probabilities") {
  const CycleProbabilities cp = cycle_map(nvj_parameters());
  CHECK(cp.p12 == doctest::Approx(kNvjP12).epsilon(1e-9));
  CHECK(cp.p21 == doctest::Approx(kNvjP21).epsilon(1e-9));
}

TEST_CASE("cycle_map rejects an excited level without decay channels") {
  RateParameters p;
  p.k31_MHz = 80.0;  // |4> has no decay
  CHECK_THROWS_AS(cycle_map(p), ValidationError);
}

TEST_CASE("cycle_map agrees with the excitation-relaxation propagation oracle") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 100; ++i) {
    const RateParameters params = random_closure_rates(rng);
    const CycleProbabilities cp = cycle_map(params);

    const Populations after_m0 =
        relax_to_ground(params, apply_ps_pulse(Populations::polarized_m0(), 1.0,
                                               params.epsilon));
    CHECK(after_m0.p2() == doctest::Approx(cp.p12).epsilon(1e-6));

    const Populations after_ms1 =
        relax_to_ground(params, apply_ps_pulse(Populations::mixed_ms1(), 1.0,
                                               params.epsilon));
    CHECK(after_ms1.m0() == doctest::Approx(cp.p21).epsilon(1e-6));
  }
}

TEST_CASE("derived_quantities: trivial and NV J values") {
  RateParameters simple;
  simple.k31_MHz = 1000.0 / 12.0;
  simple.k42_MHz = 50.0;
  const DerivedQuantities ds = derived_quantities(simple);
  CHECK(ds.T13_ns == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(ds.p35 == 0.0);

  const DerivedQuantities d = derived_quantities(nvj_parameters());
  CHECK(d.T13_ns == doctest::Approx(kNvjT13).epsilon(1e-12));
  CHECK(d.T14_ns == doctest::Approx(kNvjT14).epsilon(1e-12));
  CHECK(std::abs(d.p35 - 0.14) <= 0.02);
  CHECK(std::abs(d.p45 - 0.55) <= 0.01);

  RateParameters sym;
  sym.k31_MHz = 50.0;
  sym.k42_MHz = 50.0;
  sym.k51_MHz = 4.0;
  sym.k52_MHz = 4.0;
  CHECK(derived_quantities(sym).branching_r == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("singlet_lifetime: limits, frozen values and monotonicity") {
  const SingletTemperatureModel model{371.0, 16.6};
  CHECK(singlet_lifetime_ns(model, 0.0) == 371.0);
  CHECK(singlet_lifetime_ns(model, 300.0) ==
        doctest::Approx(kSingletTau300K).epsilon(1e-9));
  CHECK(singlet_lifetime_ns(model, 13.0) ==
        doctest::Approx(kSingletTau13K).epsilon(1e-9));

  double prev = singlet_lifetime_ns(model, 1.0);
  for (double t = 10.0; t <= 500.0; t += 10.0) {
    const double tau = singlet_lifetime_ns(model, t);
    CHECK(tau <= prev + 1e-12);
    prev = tau;
  }
  CHECK_THROWS_AS(singlet_lifetime_ns(model, -1.0), ValidationError);
  CHECK_THROWS_AS(singlet_lifetime_ns(SingletTemperatureModel{-1.0, 16.6}, 10.0),
                  ValidationError);
}

TEST_CASE("dark emission from any excited preparation is exactly bi-exponential") {
  const RateParameters params = nvj_parameters();
  const RateMatrix g = build_generator(params, 0.0);
  const DerivedQuantities d = derived_quantities(params);
  const double kr3 = params.radiative_rate_3_MHz();
  const double kr4 = params.radiative_rate_4_MHz();

  Populations start;
  start.p3() = 0.6;
  start.p4() = 0.4;
  const auto series = propagate_trace(g, start, 60.0, 0.25);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = 0.25 * static_cast<double>(i);
    const double expected = kr3 * start.p3() * std::exp(-t / d.T13_ns) +
                            kr4 * start.p4() * std::exp(-t / d.T14_ns);
    const double actual = kr3 * series[i].p3() + kr4 * series[i].p4();
    CHECK(actual == doctest::Approx(expected).epsilon(1e-8));
  }

  // Log-linear slope of a pure |3> preparation recovers T13.
  Populations pure3;
  pure3.p3() = 1.0;
  const auto s3 = propagate_trace(g, pure3, 30.0, 0.5);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < s3.size(); ++i) {
    const double t = 0.5 * static_cast<double>(i);
    const double y = std::log(kr3 * s3[i].p3());
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
  }
  const auto n = static_cast<double>(s3.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(-1.0 / slope == doctest::Approx(d.T13_ns).epsilon(1e-8));
}

TEST_CASE("expm propagation matches RK4 on random generators") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const RateParameters params = random_rates(rng);
    const RateMatrix g = build_generator(params, 20.0 * u(rng));
    Eigen::Matrix<double, kNumLevels, 1> v;
    for (int k = 0; k < kNumLevels; ++k) v[k] = u(rng);
    v /= v.sum();
    const Populations p0{v};
    const double t = 5.0 + 45.0 * u(rng);
    const Populations exact = propagate(g, p0, t);
    const Populations reference = rk4_propagate(g, p0, t, 1e-3);
    CHECK((exact.v - reference.v).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(exact.total() == doctest::Approx(1.0).epsilon(1e-9));
  }
}
