#include "nvcycle/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle {

double FitResult::value(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p.value;
  }
  throw ValidationError("fit result has no parameter named " + name);
}

double FitResult::sigma(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p.sigma;
  }
  throw ValidationError("fit result has no parameter named " + name);
}

bool FitResult::has_warning(const std::string& substring) const {
  for (const auto& w : warnings) {
    if (w.find(substring) != std::string::npos) return true;
  }
  return false;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

// model(p) fills f (values) and J (df/dp).
using ModelEval = std::function<void(const VectorXd&, VectorXd&, MatrixXd&)>;

struct LmOutcome {
  VectorXd p;
  MatrixXd covariance;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

VectorXd poisson_weights(const VectorXd& f) {
  return f.cwiseMax(1.0).cwiseInverse();
}

// Damped Gauss-Newton. With poisson mode the weights 1/max(model,1) are
// refreshed each outer iteration and frozen while testing a step.
LmOutcome lm_solve(const ModelEval& model, const VectorXd& y, const VectorXd& p0,
                   bool poisson, const VectorXd& lower_bounds) {
  const auto n = y.size();
  const auto np = p0.size();
  LmOutcome out;
  out.p = p0;

  VectorXd f(n);
  MatrixXd J(n, np);
  double lambda = 1e-4;

  for (out.iterations = 1; out.iterations <= kMaxIterations; ++out.iterations) {
    model(out.p, f, J);
    const VectorXd w = poisson ? poisson_weights(f) : VectorXd::Ones(n);
    const VectorXd r = y - f;
    const double obj = r.dot(w.asDiagonal() * r);
    const VectorXd g = J.transpose() * (w.asDiagonal() * r);
    const MatrixXd h = J.transpose() * w.asDiagonal() * J;

    bool accepted = false;
    VectorXd step;
    for (int attempt = 0; attempt < 40; ++attempt) {
      MatrixXd damped = h;
      damped.diagonal() += lambda * h.diagonal().cwiseMax(1e-12);
      const VectorXd dp = damped.ldlt().solve(g);
      VectorXd cand = out.p + dp;
      cand = cand.cwiseMax(lower_bounds);
      VectorXd fc(n);
      MatrixXd Jc(n, np);
      model(cand, fc, Jc);
      const VectorXd rc = y - fc;
      const double cand_obj = rc.dot(w.asDiagonal() * rc);
      if (std::isfinite(cand_obj) && cand_obj < obj) {
        step = cand - out.p;
        out.p = cand;
        lambda = std::max(lambda * 0.25, 1e-13);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left: at a minimum
      break;
    }
    double rel_step = 0.0;
    for (Eigen::Index i = 0; i < np; ++i) {
      rel_step = std::max(rel_step,
                          std::abs(step[i]) / std::max(std::abs(out.p[i]), 1e-12));
    }
    if (rel_step < kStepTolerance) {
      out.converged = true;
      break;
    }
  }

  model(out.p, f, J);
  const VectorXd w = poisson ? poisson_weights(f) : VectorXd::Ones(n);
  const VectorXd r = y - f;
  out.objective = r.dot(w.asDiagonal() * r);
  MatrixXd h = J.transpose() * w.asDiagonal() * J;
  h.diagonal() += VectorXd::Constant(np, 1e-300);
  MatrixXd cov = h.inverse();
  if (!poisson && n > np) {
    cov *= out.objective / static_cast<double>(n - np);
  }
  out.covariance = cov;
  return out;
}

double safe_sigma(const MatrixXd& cov, int i) {
  const double v = cov(i, i);
  return std::isfinite(v) && v > 0.0 ? std::sqrt(v) : 0.0;
}

struct WindowedData {
  VectorXd t;  // relative to the window start
  VectorXd y;
  double t_start = 0.0;  // window start on the histogram axis
};

WindowedData histogram_fit_window(const TcspcHistogram& hist, double irf_sigma_ns) {
  hist.validate();
  const auto n = hist.size();
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (hist.counts[i] > hist.counts[peak]) peak = i;
  }
  const double t_start = hist.bin_center(peak) + 2.0 * irf_sigma_ns;

  // Pre-peak background estimate, used only for the data-quality gate.
  double bg = 0.0;
  std::size_t n_bg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (hist.bin_center(i) < hist.bin_center(peak) - 5.0 * irf_sigma_ns) {
      bg += hist.counts[i];
      ++n_bg;
    }
  }
  if (n_bg > 0) bg /= static_cast<double>(n_bg);

  std::vector<double> ts, ys;
  std::size_t above = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = hist.bin_center(i);
    if (c < t_start) continue;
    ts.push_back(c - t_start);
    ys.push_back(hist.counts[i]);
    if (hist.counts[i] > bg + 3.0 * std::sqrt(bg + 1.0)) ++above;
  }
  if (above < 20) {
    throw ValidationError("histogram has fewer than 20 bins above background");
  }
  WindowedData data;
  data.t = Eigen::Map<VectorXd>(ts.data(), static_cast<Eigen::Index>(ts.size()));
  data.y = Eigen::Map<VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  data.t_start = t_start;
  return data;
}

// Log-linear regression of log(y) over the index range [lo, hi).
double log_slope_tau(const VectorXd& t, const VectorXd& y, Eigen::Index lo,
                     Eigen::Index hi, double fallback) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Eigen::Index i = lo; i < hi; ++i) {
    if (y[i] <= 0.0) continue;
    const double ly = std::log(y[i]);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++m;
  }
  if (m < 3) return fallback;
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return fallback;
  const double slope = (m * sxy - sx * sy) / denom;
  if (slope >= -1e-9) return fallback;
  return -1.0 / slope;
}

// Weighted linear LS for amplitudes and background at fixed lifetimes.
// Iterates the Poisson weights a few times.
Eigen::Vector3d linear_amplitudes(const VectorXd& t, const VectorXd& y, double T1,
                                  double T2, MatrixXd* cov_out = nullptr) {
  const auto n = t.size();
  MatrixXd X(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = std::exp(-t[i] / T1);
    X(i, 1) = std::exp(-t[i] / T2);
    X(i, 2) = 1.0;
  }
  VectorXd w = y.cwiseMax(1.0).cwiseInverse();
  Eigen::Vector3d sol = Eigen::Vector3d::Zero();
  for (int pass = 0; pass < 3; ++pass) {
    const MatrixXd xtw = X.transpose() * w.asDiagonal();
    sol = (xtw * X).ldlt().solve(xtw * y);
    w = poisson_weights(X * sol);
  }
  if (cov_out) {
    *cov_out = (X.transpose() * w.asDiagonal() * X).inverse();
  }
  return sol;
}

FitResult assemble_biexp_result(double A1, double A2, double T1, double T2, double bg,
                                double sA1, double sA2, double sT1, double sT2,
                                double sbg, double t_start, double objective,
                                bool converged, int iterations) {
  // Label T13 as the longer lifetime.
  if (T1 < T2) {
    std::swap(T1, T2);
    std::swap(A1, A2);
    std::swap(sT1, sT2);
    std::swap(sA1, sA2);
  }
  // Extrapolate amplitudes from the window start back to t = 0.
  const double g1 = std::exp(t_start / T1);
  const double g2 = std::exp(t_start / T2);

  FitResult result;
  result.model = "biexponential";
  result.parameters = {{"A3", A1 * g1, sA1 * g1},
                       {"A4", A2 * g2, sA2 * g2},
                       {"T13_ns", T1, sT1},
                       {"T14_ns", T2, sT2},
                       {"background", bg, sbg}};
  result.residual_norm = std::sqrt(objective);
  result.converged = converged;
  result.iterations = iterations;
  if (T2 > 0.0 && T1 / T2 < 1.2) {
    result.warnings.push_back("indistinguishable components: T13/T14 < 1.2");
  }
  if (!converged) {
    result.warnings.push_back("fit did not converge; estimates are not authoritative");
  }
  return result;
}

}  // namespace

FitResult fit_biexponential(const TcspcHistogram& hist, const BiexpFitOptions& options) {
  const WindowedData data = histogram_fit_window(hist, options.irf_sigma_ns);
  const auto n = data.t.size();
  const double span = data.t[n - 1] - data.t[0];

  if (options.fixed_taus_ns) {
    double T1 = options.fixed_taus_ns->first;
    double T2 = options.fixed_taus_ns->second;
    if (!(T1 > 0.0) || !(T2 > 0.0)) {
      throw ValidationError("fixed lifetimes must be > 0");
    }
    MatrixXd cov;
    const Eigen::Vector3d sol = linear_amplitudes(data.t, data.y, T1, T2, &cov);
    VectorXd model(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      model[i] = sol[0] * std::exp(-data.t[i] / T1) +
                 sol[1] * std::exp(-data.t[i] / T2) + sol[2];
    }
    const VectorXd w = poisson_weights(model);
    const VectorXd r = data.y - model;
    const double obj = r.dot(w.asDiagonal() * r);
    return assemble_biexp_result(sol[0], sol[1], T1, T2, sol[2], safe_sigma(cov, 0),
                                 safe_sigma(cov, 1), 0.0, 0.0, safe_sigma(cov, 2),
                                 data.t_start, obj, true, 1);
  }

  // Free-lifetime fit over (A1, A2, ln T1, ln T2, bg).
  const auto eval = [&data](const VectorXd& p, VectorXd& f, MatrixXd& J) {
    const double A1 = p[0], A2 = p[1], T1 = std::exp(p[2]), T2 = std::exp(p[3]);
    const auto n = data.t.size();
    f.resize(n);
    J.resize(n, 5);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e1 = std::exp(-data.t[i] / T1);
      const double e2 = std::exp(-data.t[i] / T2);
      f[i] = A1 * e1 + A2 * e2 + p[4];
      J(i, 0) = e1;
      J(i, 1) = e2;
      J(i, 2) = A1 * e1 * data.t[i] / T1;  // d/d(ln T1)
      J(i, 3) = A2 * e2 * data.t[i] / T2;
      J(i, 4) = 1.0;
    }
  };

  const double tau_early = log_slope_tau(data.t, data.y, 0, n / 3, span / 6.0);
  const double tau_late = log_slope_tau(data.t, data.y, 2 * n / 3, n, span / 2.0);
  const double t_cap = 5.0 * span;

  struct Start {
    double T1, T2;
  };
  const Start starts[] = {{std::max(tau_late, 1.3 * tau_early), std::min(tau_early, tau_late)},
                          {1.6 * tau_early, 0.5 * tau_early},
                          {2.5 * tau_early, 0.8 * tau_early},
                          {1.1 * tau_early, 0.25 * tau_early}};

  VectorXd lower(5);
  lower << 0.0, 0.0, std::log(1e-3), std::log(1e-3), -std::numeric_limits<double>::infinity();

  std::optional<LmOutcome> best;
  bool best_degenerate = true;
  for (const Start& s : starts) {
    double T1 = std::clamp(s.T1, 1e-2, t_cap);
    double T2 = std::clamp(s.T2, 1e-2, t_cap);
    if (T1 / T2 < 1.25) T2 = T1 / 1.8;
    const Eigen::Vector3d amps = linear_amplitudes(data.t, data.y, T1, T2);
    VectorXd p0(5);
    p0 << std::max(amps[0], 1e-3), std::max(amps[1], 1e-3), std::log(T1), std::log(T2),
        amps[2];
    LmOutcome outcome = lm_solve(eval, data.y, p0, true, lower);
    const double o_T1 = std::exp(outcome.p[2]);
    const double o_T2 = std::exp(outcome.p[3]);
    const double longer = std::max(o_T1, o_T2);
    const double shorter = std::min(o_T1, o_T2);
    const bool degenerate = shorter < 2.0 * hist.bin_width_ns || longer > 1.5 * span ||
                            outcome.p[0] <= 0.0 || outcome.p[1] <= 0.0 ||
                            longer / shorter < 1.2;
    if (!best || (best_degenerate && !degenerate) ||
        (best_degenerate == degenerate && outcome.objective < best->objective)) {
      best = std::move(outcome);
      best_degenerate = degenerate;
    }
    if (!degenerate) break;
  }

  const LmOutcome& fit = *best;
  const double T1 = std::exp(fit.p[2]);
  const double T2 = std::exp(fit.p[3]);
  // Chain rule from ln T to T.
  return assemble_biexp_result(fit.p[0], fit.p[1], T1, T2, fit.p[4],
                               safe_sigma(fit.covariance, 0), safe_sigma(fit.covariance, 1),
                               T1 * safe_sigma(fit.covariance, 2),
                               T2 * safe_sigma(fit.covariance, 3),
                               safe_sigma(fit.covariance, 4), data.t_start, fit.objective,
                               fit.converged, fit.iterations);
}

FitResult fit_monoexponential(const TcspcHistogram& hist, double irf_sigma_ns) {
  const WindowedData data = histogram_fit_window(hist, irf_sigma_ns);
  const auto n = data.t.size();
  const double span = data.t[n - 1] - data.t[0];

  const auto eval = [&data](const VectorXd& p, VectorXd& f, MatrixXd& J) {
    const double A = p[0], T = std::exp(p[1]);
    const auto n = data.t.size();
    f.resize(n);
    J.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(-data.t[i] / T);
      f[i] = A * e + p[2];
      J(i, 0) = e;
      J(i, 1) = A * e * data.t[i] / T;
      J(i, 2) = 1.0;
    }
  };

  const double tau0 = log_slope_tau(data.t, data.y, 0, n, span / 3.0);
  VectorXd p0(3);
  p0 << std::max(data.y.maxCoeff(), 1.0), std::log(std::clamp(tau0, 1e-2, 5.0 * span)),
      std::max(data.y.minCoeff(), 0.0);
  VectorXd lower(3);
  lower << 0.0, std::log(1e-3), -std::numeric_limits<double>::infinity();

  const LmOutcome fit = lm_solve(eval, data.y, p0, true, lower);
  const double T = std::exp(fit.p[1]);
  const double g = std::exp(data.t_start / T);

  FitResult result;
  result.model = "monoexponential";
  result.parameters = {{"A", fit.p[0] * g, safe_sigma(fit.covariance, 0) * g},
                       {"T1_ns", T, T * safe_sigma(fit.covariance, 1)},
                       {"background", fit.p[2], safe_sigma(fit.covariance, 2)}};
  result.residual_norm = std::sqrt(fit.objective);
  result.converged = fit.converged;
  result.iterations = fit.iterations;
  if (!fit.converged) {
    result.warnings.push_back("fit did not converge; estimates are not authoritative");
  }
  return result;
}

double polarization_from_amplitudes(double A3, double A4) {
  if (!std::isfinite(A3) || !std::isfinite(A4) || A3 < 0.0 || A4 < 0.0) {
    throw ValidationError("amplitudes must be finite and >= 0");
  }
  if (A3 + A4 <= 0.0) {
    throw ValidationError("amplitudes must not both be zero");
  }
  return A3 / (A3 + A4);
}

FitResult fit_recovery(const std::vector<double>& delays_ns,
                       const std::vector<double>& counts) {
  if (delays_ns.size() != counts.size()) {
    throw ValidationError("delay and count lists differ in length");
  }
  if (delays_ns.size() < 5) {
    throw ValidationError("recovery fit needs at least 5 delay points");
  }
  // Sort by delay.
  std::vector<std::size_t> order(delays_ns.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return delays_ns[a] < delays_ns[b]; });
  const auto n = static_cast<Eigen::Index>(delays_ns.size());
  VectorXd d(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = delays_ns[order[static_cast<std::size_t>(i)]];
    y[i] = counts[order[static_cast<std::size_t>(i)]];
  }

  const auto eval = [&d](const VectorXd& p, VectorXd& f, MatrixXd& J) {
    const double off = p[0], amp = p[1], tau = std::exp(p[2]);
    const auto n = d.size();
    f.resize(n);
    J.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(-d[i] / tau);
      f[i] = off - amp * e;
      J(i, 0) = 1.0;
      J(i, 1) = -e;
      J(i, 2) = -amp * e * d[i] / tau;
    }
  };

  const double offset0 = y.tail(std::min<Eigen::Index>(2, n)).mean();
  double amp0 = offset0 - y[0];
  const double span = d[n - 1] - d[0];
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = offset0 - y[i];
  double tau0 = log_slope_tau(d, z, 0, n, span / 3.0);
  if (amp0 <= 0.0) {
    amp0 = 0.0;
    tau0 = span / 3.0;
  }
  VectorXd p0(3);
  p0 << offset0, amp0, std::log(std::clamp(tau0, 1e-3, 10.0 * span));
  VectorXd lower = VectorXd::Constant(3, -std::numeric_limits<double>::infinity());

  const LmOutcome fit = lm_solve(eval, y, p0, false, lower);
  const double tau = std::exp(fit.p[2]);

  FitResult result;
  result.model = "recovery";
  result.parameters = {{"tau_singlet_ns", tau, tau * safe_sigma(fit.covariance, 2)},
                       {"amplitude", fit.p[1], safe_sigma(fit.covariance, 1)},
                       {"offset", fit.p[0], safe_sigma(fit.covariance, 0)}};
  result.residual_norm = std::sqrt(fit.objective);
  result.converged = fit.converged;
  result.iterations = fit.iterations;

  // Flag non-monotonic data beyond the noise level.
  const double noise =
      n > 3 ? std::sqrt(fit.objective / static_cast<double>(n - 3)) : 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (y[i + 1] < y[i] - 4.0 * std::max(noise, 1e-12)) {
      result.warnings.push_back("non-monotonic recovery data beyond noise");
      break;
    }
  }
  if (tau > 0.5 * span) {
    result.warnings.push_back("delay span below 2x the fitted time constant");
  }
  if (!fit.converged) {
    result.warnings.push_back("fit did not converge; estimates are not authoritative");
  }
  return result;
}

FitResult fit_temperature_model(const std::vector<double>& temperatures_K,
                                const std::vector<double>& taus_ns) {
  if (temperatures_K.size() != taus_ns.size()) {
    throw ValidationError("temperature and tau lists differ in length");
  }
  if (temperatures_K.size() < 4) {
    throw ValidationError("temperature fit needs at least 4 points");
  }
  const auto n = static_cast<Eigen::Index>(temperatures_K.size());
  VectorXd T(n), y(n);
  double t_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(temperatures_K[static_cast<std::size_t>(i)] > 0.0)) {
      throw ValidationError("temperatures must be > 0");
    }
    T[i] = temperatures_K[static_cast<std::size_t>(i)];
    y[i] = taus_ns[static_cast<std::size_t>(i)];
    t_max = std::max(t_max, T[i]);
  }

  const auto eval = [&T](const VectorXd& p, VectorXd& f, MatrixXd& J) {
    const double tau0 = p[0], dE = std::exp(p[1]);
    const auto n = T.size();
    f.resize(n);
    J.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = std::exp(-dE / (kBoltzmannMeVPerK * T[i]));
      f[i] = tau0 * (1.0 - x);
      J(i, 0) = 1.0 - x;
      J(i, 1) = tau0 * x * dE / (kBoltzmannMeVPerK * T[i]);  // d/d(ln dE)
    }
  };

  // Deterministic init: scan dE, solve tau0 linearly.
  double best_dE = 10.0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 24; ++k) {
    const double dE = 1.0 * std::pow(200.0, k / 23.0);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = 1.0 - std::exp(-dE / (kBoltzmannMeVPerK * T[i]));
      num += m * y[i];
      den += m * m;
    }
    const double tau0 = den > 0.0 ? num / den : y.maxCoeff();
    double sse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = tau0 * (1.0 - std::exp(-dE / (kBoltzmannMeVPerK * T[i])));
      sse += (y[i] - m) * (y[i] - m);
    }
    if (sse < best_sse) {
      best_sse = sse;
      best_dE = dE;
    }
  }
  VectorXd p0(2);
  p0 << y.maxCoeff(), std::log(best_dE);
  VectorXd lower(2);
  lower << 0.0, std::log(1e-3);

  const LmOutcome fit = lm_solve(eval, y, p0, false, lower);
  const double dE = std::exp(fit.p[1]);

  if (std::exp(-dE / (kBoltzmannMeVPerK * t_max)) < 0.02) {
    throw ValidationError(
        "deltaE unidentifiable: all temperatures lie in the flat regime");
  }

  FitResult result;
  result.model = "singlet_temperature";
  result.parameters = {{"tau0_ns", fit.p[0], safe_sigma(fit.covariance, 0)},
                       {"deltaE_meV", dE, dE * safe_sigma(fit.covariance, 1)}};
  result.residual_norm = std::sqrt(fit.objective);
  result.converged = fit.converged;
  result.iterations = fit.iterations;
  if (!fit.converged) {
    result.warnings.push_back("fit did not converge; estimates are not authoritative");
  }
  return result;
}

FitResult fit_polarization_series(const std::vector<double>& pulse_index,
                                  const std::vector<double>& pes) {
  if (pulse_index.size() != pes.size()) {
    throw ValidationError("pulse index and P_ES lists differ in length");
  }
  if (pulse_index.size() < 4) {
    throw ValidationError("polarization series fit needs at least 4 pulses");
  }
  const auto n = static_cast<Eigen::Index>(pulse_index.size());
  VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = pulse_index[static_cast<std::size_t>(i)];
    y[i] = pes[static_cast<std::size_t>(i)];
  }

  const auto eval = [&x](const VectorXd& p, VectorXd& f, MatrixXd& J) {
    const double pinf = p[0], a = p[1], c = std::exp(p[2]);
    const auto n = x.size();
    f.resize(n);
    J.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = std::exp(-x[i] / c);
      f[i] = pinf + a * e;
      J(i, 0) = 1.0;
      J(i, 1) = e;
      J(i, 2) = a * e * x[i] / c;
    }
  };

  const double pinf0 = y[n - 1];
  const double a0 = y[0] - pinf0;
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = std::abs(y[i] - pinf0);
  const double span = x[n - 1] - x[0];
  const double c0 = log_slope_tau(x, z, 0, n, std::max(span / 3.0, 0.5));
  VectorXd p0(3);
  p0 << pinf0, a0, std::log(std::clamp(c0, 1e-2, 100.0 * std::max(span, 1.0)));
  VectorXd lower = VectorXd::Constant(3, -std::numeric_limits<double>::infinity());

  const LmOutcome fit = lm_solve(eval, y, p0, false, lower);
  const double c = std::exp(fit.p[2]);

  FitResult result;
  result.model = "polarization_series";
  result.parameters = {{"P_inf", fit.p[0], safe_sigma(fit.covariance, 0)},
                       {"a", fit.p[1], safe_sigma(fit.covariance, 1)},
                       {"c", c, c * safe_sigma(fit.covariance, 2)}};
  result.residual_norm = std::sqrt(fit.objective);
  result.converged = fit.converged;
  result.iterations = fit.iterations;
  if (c > 10.0 * x.maxCoeff()) {
    result.warnings.push_back("rate unidentifiable: c exceeds 10x the pulse range");
  }
  if (!fit.converged) {
    result.warnings.push_back("fit did not converge; estimates are not authoritative");
  }
  return result;
}

}  // namespace nvcycle
