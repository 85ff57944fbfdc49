#include "nvcycle/extraction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

namespace {

constexpr double kResidualTol = 1e-11;
constexpr int kNewtonMaxIter = 80;

struct System {
  double K3, K4, p12, p21, eps;

  struct Eval {
    double f1, f2, r;
  };

  // Residuals at (k35, k45): f1 is the radiative-equality defect (scaled),
  // f2 the defect of the second flip probability after the singlet
  // branching r has been eliminated through the first.
  Eval eval(double k35, double k45) const {
    const double wc = 1.0 / (1.0 + eps);
    const double wf = eps / (1.0 + eps);
    const double kr3 = K3 - k35;
    const double kr4 = K4 - k45;
    const double k31 = kr3 * wc;
    const double k32 = kr3 * eps * wc;
    const double k42 = kr4 * wc;
    const double k41 = kr4 * eps * wc;
    const double p35 = k35 / K3;
    const double p45 = k45 / K4;
    const double a = wc * (k32 / K3 + p35) + wf * (k42 / K4 + p45);
    const double b = wc * p35 + wf * p45;
    const double r = (a - p12) / b;
    Eval e;
    e.r = r;
    e.f1 = (kr3 - kr4) / (K3 + K4);
    e.f2 = wc * (k41 / K4 + p45 * r) + wf * (k31 / K3 + p35 * r) - p21;
    return e;
  }

  double norm(double k35, double k45) const {
    const Eval e = eval(k35, k45);
    return std::max(std::abs(e.f1), std::abs(e.f2));
  }
};

bool newton_polish(const System& sys, double& k35, double& k45) {
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const System::Eval e = sys.eval(k35, k45);
    const double res = std::max(std::abs(e.f1), std::abs(e.f2));
    if (res <= kResidualTol) return true;
    const double h35 = 1e-7 * (1.0 + std::abs(k35));
    const double h45 = 1e-7 * (1.0 + std::abs(k45));
    const System::Eval ea = sys.eval(k35 + h35, k45);
    const System::Eval eb = sys.eval(k35 - h35, k45);
    const System::Eval ec = sys.eval(k35, k45 + h45);
    const System::Eval ed = sys.eval(k35, k45 - h45);
    Eigen::Matrix2d jac;
    jac << (ea.f1 - eb.f1) / (2 * h35), (ec.f1 - ed.f1) / (2 * h45),
        (ea.f2 - eb.f2) / (2 * h35), (ec.f2 - ed.f2) / (2 * h45);
    const Eigen::Vector2d f(e.f1, e.f2);
    const Eigen::Vector2d step = jac.fullPivLu().solve(-f);
    if (!step.allFinite()) return false;
    // Backtracking, keeping iterates strictly inside the box.
    double scale = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt, scale *= 0.5) {
      double n35 = k35 + scale * step[0];
      double n45 = k45 + scale * step[1];
      n35 = std::clamp(n35, 1e-9 * sys.K3, (1.0 - 1e-9) * sys.K3);
      n45 = std::clamp(n45, 1e-9 * sys.K4, (1.0 - 1e-9) * sys.K4);
      if (sys.norm(n35, n45) < res) {
        k35 = n35;
        k45 = n45;
        moved = true;
        break;
      }
    }
    if (!moved) return sys.norm(k35, k45) <= kResidualTol;
  }
  return sys.norm(k35, k45) <= kResidualTol;
}

// Closed-form start from the eps = 0 reduction: with no emission mixing,
// p12/p35 + p21/p45 = 1 along the radiative-equality line, which is a
// quadratic in k35.
bool epsilon_zero_start(const System& sys, double& k35, double& k45) {
  const double dK = sys.K4 - sys.K3;
  const double b = dK - sys.p12 * sys.K3 - sys.p21 * sys.K4;
  const double c = -sys.p12 * sys.K3 * dK;
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) return false;
  const double root = 0.5 * (-b + std::sqrt(disc));
  if (!(root > 0.0) || !(root < sys.K3)) return false;
  k35 = root;
  k45 = root + dK;
  return k45 > 0.0 && k45 < sys.K4;
}

}  // namespace

CycleProbabilities extract_flip_probabilities(double P_inf_ES, double c, double alpha,
                                              double epsilon) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ValidationError("alpha must be in (0, 1]");
  }
  if (!(epsilon >= 0.0) || epsilon > kEpsilonUpperBound) {
    throw ValidationError("epsilon must be in [0, 0.04]");
  }
  if (!(c > 0.0)) throw ValidationError("rate constant c must be > 0");
  if (!(P_inf_ES >= 0.0) || P_inf_ES > 1.0) {
    throw ValidationError("P_inf_ES must be in [0, 1]");
  }
  const double p1_inf = ((1.0 + epsilon) * P_inf_ES - epsilon) / (1.0 - epsilon);
  const double flip_sum = (1.0 - std::exp(-1.0 / c)) / alpha;
  CycleProbabilities out;
  out.p21 = p1_inf * flip_sum;
  out.p12 = flip_sum - out.p21;
  if (out.p12 < 0.0 || out.p12 > 1.0 || out.p21 < 0.0 || out.p21 > 1.0) {
    throw ExtractionError("flip probabilities outside [0,1]: inputs inconsistent",
                          flip_sum);
  }
  return out;
}

IscProbabilities IscSolution::probabilities() const {
  IscProbabilities out;
  const double K3 = k_r_MHz + k35_MHz;
  const double K4 = k_r_MHz + k45_MHz;
  out.p35 = k35_MHz / K3;
  out.p45 = k45_MHz / K4;
  out.branching_ratio = branching_r / (1.0 - branching_r);
  return out;
}

RateParameters IscSolution::to_rate_parameters(double singlet_lifetime_ns) const {
  if (!(singlet_lifetime_ns > 0.0)) {
    throw ValidationError("singlet lifetime must be > 0");
  }
  RateParameters p;
  p.epsilon = epsilon;
  const double wc = 1.0 / (1.0 + epsilon);
  p.k31_MHz = k_r_MHz * wc;
  p.k32_MHz = k_r_MHz * epsilon * wc;
  p.k42_MHz = k_r_MHz * wc;
  p.k41_MHz = k_r_MHz * epsilon * wc;
  p.k35_MHz = k35_MHz;
  p.k45_MHz = k45_MHz;
  const double total5 = kMHzPerInvNs / singlet_lifetime_ns;
  p.k51_MHz = branching_r * total5;
  p.k52_MHz = (1.0 - branching_r) * total5;
  p.validate(true);
  return p;
}

IscSolution solve_isc_system(double p12, double p21, double T13_ns, double T14_ns,
                             double epsilon) {
  if (!(T13_ns > 0.0) || !(T14_ns > 0.0)) {
    throw ValidationError("lifetimes must be > 0");
  }
  if (!(p12 > 0.0) || p12 >= 1.0 || !(p21 > 0.0) || p21 >= 1.0) {
    throw ValidationError("flip probabilities must lie in (0, 1)");
  }
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");

  System sys{kMHzPerInvNs / T13_ns, kMHzPerInvNs / T14_ns, p12, p21, epsilon};

  double best_res = std::numeric_limits<double>::infinity();
  double best_k35 = 0.0, best_k45 = 0.0;
  bool found = false;

  auto try_start = [&](double s35, double s45) {
    double k35 = s35, k45 = s45;
    const bool polished = newton_polish(sys, k35, k45);
    const System::Eval e = sys.eval(k35, k45);
    const double res = std::max(std::abs(e.f1), std::abs(e.f2));
    const bool physical = k35 > 0.0 && k35 < sys.K3 && k45 > 0.0 && k45 < sys.K4 &&
                          e.r > 0.0 && e.r < 1.0;
    if (polished && physical && res < best_res) {
      best_res = res;
      best_k35 = k35;
      best_k45 = k45;
      found = true;
    } else if (!found) {
      best_res = std::min(best_res, res);
    }
  };

  double s35, s45;
  if (epsilon_zero_start(sys, s35, s45)) try_start(s35, s45);
  if (!found || best_res > kResidualTol) {
    // Multi-start over the physical box.
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        if (found && best_res <= kResidualTol) break;
        try_start(sys.K3 * (i + 0.5) / 8.0, sys.K4 * (j + 0.5) / 8.0);
      }
    }
  }

  if (!found || best_res > kResidualTol * 10.0) {
    throw ExtractionError("model inconsistent with inputs: no root in the physical region",
                          best_res);
  }

  const System::Eval e = sys.eval(best_k35, best_k45);
  IscSolution sol;
  sol.k35_MHz = best_k35;
  sol.k45_MHz = best_k45;
  sol.k_r_MHz = sys.K3 - best_k35;
  sol.branching_r = e.r;
  sol.residual = best_res;
  sol.epsilon = epsilon;
  return sol;
}

IscProbabilities extract_isc_probabilities(double p12, double p21, double T13_ns,
                                           double T14_ns, double epsilon) {
  return solve_isc_system(p12, p21, T13_ns, T14_ns, epsilon).probabilities();
}

IscUncertainty propagate_extraction_uncertainty(const ExtractionInputs& inputs,
                                                const ExtractionSigmas& sigmas,
                                                int n_draws, std::uint64_t seed) {
  if (n_draws < 2) throw ValidationError("at least 2 draws are required");
  for (double s : {sigmas.p12, sigmas.p21, sigmas.T13_ns, sigmas.T14_ns, sigmas.alpha,
                   sigmas.epsilon}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ValidationError("uncertainties must be finite and >= 0");
    }
  }

  IscUncertainty out;
  out.nominal = extract_isc_probabilities(inputs.p12, inputs.p21, inputs.T13_ns,
                                          inputs.T14_ns, inputs.epsilon);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> p35s, p45s, ratios;
  p35s.reserve(static_cast<std::size_t>(n_draws));
  int feasible = 0;
  for (int d = 0; d < n_draws; ++d) {
    // Draw in fixed order to keep the stream stable.
    const double g_p12 = gauss(rng);
    const double g_p21 = gauss(rng);
    const double g_t13 = gauss(rng);
    const double g_t14 = gauss(rng);
    const double g_alpha = gauss(rng);
    const double g_eps = gauss(rng);

    const double alpha = std::clamp(inputs.alpha + sigmas.alpha * g_alpha, 0.05, 1.0);
    const double alpha_scale = inputs.alpha > 0.0 ? inputs.alpha / alpha : 1.0;
    const double p12 = (inputs.p12 + sigmas.p12 * g_p12) * alpha_scale;
    const double p21 = (inputs.p21 + sigmas.p21 * g_p21) * alpha_scale;
    const double t13 = inputs.T13_ns + sigmas.T13_ns * g_t13;
    const double t14 = inputs.T14_ns + sigmas.T14_ns * g_t14;
    const double eps =
        std::clamp(inputs.epsilon + sigmas.epsilon * g_eps, 0.0, kEpsilonUpperBound);
    try {
      const IscProbabilities p = extract_isc_probabilities(p12, p21, t13, t14, eps);
      p35s.push_back(p.p35);
      p45s.push_back(p.p45);
      ratios.push_back(p.branching_ratio);
      ++feasible;
    } catch (const std::exception&) {
      // infeasible draw
    }
  }

  out.feasible_fraction = static_cast<double>(feasible) / n_draws;
  if (out.feasible_fraction < 0.8) {
    out.warnings.push_back("more than 20% of Monte-Carlo draws were infeasible");
  }
  if (feasible < 2) {
    out.warnings.push_back("too few feasible draws to estimate a spread");
    return out;
  }

  auto stddev = [feasible](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(feasible);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(feasible - 1));
  };
  out.spread.p35 = stddev(p35s);
  out.spread.p45 = stddev(p45s);
  out.spread.branching_ratio = stddev(ratios);
  return out;
}

}  // namespace nvcycle
