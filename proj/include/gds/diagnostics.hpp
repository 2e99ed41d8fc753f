#pragma once

// Residuals, comparisons and convergence measurements.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/direct_solver.hpp"
#include "gds/dispersion.hpp"
#include "gds/errors.hpp"
#include "gds/fft.hpp"
#include "gds/gds_builder.hpp"

namespace gds {

struct ResidualReport
{
  std::string name;
  std::vector<double> residuals;
  std::vector<std::string> labels;  ///< optional, one per residual
  double max = 0.0;
  double l2 = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

inline ResidualReport make_report(std::string name, std::vector<double> residuals, double tolerance,
                                  std::vector<std::string> labels = {})
{
  ResidualReport r;
  r.name = std::move(name);
  r.residuals = std::move(residuals);
  r.labels = std::move(labels);
  r.tolerance = tolerance;
  double ss = 0.0;
  for (double x : r.residuals) {
    r.max = std::max(r.max, x);
    ss += x * x;
  }
  r.l2 = std::sqrt(ss);
  r.pass = r.max <= tolerance;
  return r;
}

inline nlohmann::json to_json(const ResidualReport& r)
{
  nlohmann::json j;
  j["name"] = r.name;
  j["max"] = r.max;
  j["l2"] = r.l2;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["count"] = r.residuals.size();
  j["residuals"] = r.residuals;
  if (!r.labels.empty())
    j["labels"] = r.labels;
  return j;
}

/// One aligned line: name, max, l2, tolerance, PASS/FAIL.
inline std::string to_text(const ResidualReport& r)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-36s max=%-12.4e l2=%-12.4e tol=%-10.3e %s", r.name.c_str(),
                r.max, r.l2, r.tolerance, r.pass ? "PASS" : "FAIL");
  return buf;
}

// ---------------------------------------------------------------------------
// continuity equation  rho_t + T_x = 0

/// |lambda rho^ + i xi k(xi) rho^| per active sample.  Zero up to roundoff
/// since lambda = -i xi k.
inline ResidualReport spectral_continuity_residual(const SpectralDensity& rho,
                                                   const DispersionTable& table,
                                                   double tolerance = 1e-12)
{
  std::vector<double> res;
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i) {
    if (rho.rho_hat[i] == cplx{})
      continue;
    const auto& p = detail::required_point(table, rho.grid, i);
    const cplx r = p.lambda * rho.rho_hat[i] + cplx(0.0, p.xi) * p.k() * rho.rho_hat[i];
    res.push_back(std::abs(r));
  }
  return make_report("spectral continuity", std::move(res), tolerance);
}

/// Central difference in time of rho plus spectral d/dx of T at the middle
/// snapshot, pointwise in x.
inline ResidualReport continuity_residual(const FieldSnapshot& before, const FieldSnapshot& at,
                                          const FieldSnapshot& after, double tolerance)
{
  const std::size_t n = at.x.size();
  if (before.x.size() != n || after.x.size() != n || before.period != at.period
      || after.period != at.period)
    throw GridMismatchError("continuity_residual: snapshots on different x grids");
  const double dt = at.time - before.time;
  if (!(dt > 0.0) || std::abs((after.time - at.time) - dt) > 1e-12 * std::max(1.0, dt))
    throw GridMismatchError("continuity_residual: snapshots must be equally spaced in time");

  const int modes = static_cast<int>(n / 2) - 1;
  Dft dft(n);
  std::vector<cplx> t_values(at.flux.begin(), at.flux.end());
  auto coeffs = analyze_centered(dft, t_values, modes);
  const double dxi = 2.0 * std::numbers::pi / at.period;
  for (int m = -modes; m <= modes; ++m)
    coeffs[static_cast<std::size_t>(m + modes)] *= cplx(0.0, m * dxi);
  const auto dtdx = synthesize_centered(dft, coeffs);

  std::vector<double> res(n);
  for (std::size_t j = 0; j < n; ++j)
    res[j] = std::abs((after.rho[j] - before.rho[j]) / (2.0 * dt) + dtdx[j].real());
  return make_report("continuity (physical)", std::move(res), tolerance);
}

/// Least-squares slope of log(err) against log(h).
inline double convergence_slope(std::span<const double> h, std::span<const double> err)
{
  if (h.size() != err.size() || h.size() < 2)
    throw ConfigError("convergence_slope: need at least two (h, err) pairs");
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// GDS versus direct integration

struct CompareConfig
{
  Method method = Method::exact_dense;
  double rk4_dt = 0.0;         ///< 0: 0.01 / (1 + xi_max v_max)
  double lambda_shift = 0.0;   ///< added to lambda on the GDS side (sensitivity probe)
  double tolerance = 1e-6;
};

/// For every active frequency, lift rho^_0 to the GDS kinetic state, integrate
/// it directly and compare the resulting density with the GDS prediction
/// rho^(0) exp(lambda t), where rho^(0) = <f^_0, 1>_phi is the density of the
/// lifted state.  Residuals are |difference| / |rho^(0)| for every (t, xi).
inline ResidualReport compare_gds_direct(const SpectralDensity& rho0, std::span<const double> times,
                                         const DispersionTable& table,
                                         const VelocityGrid& velocities,
                                         const CompareConfig& cfg = {})
{
  const auto f0 = lift_to_kinetic(rho0, table, velocities);
  double max_abs_xi = 0.0;
  for (std::size_t i = 0; i < rho0.rho_hat.size(); ++i)
    if (rho0.rho_hat[i] != cplx{})
      max_abs_xi = std::max(max_abs_xi, std::abs(rho0.grid.xi(i)));
  const double rk4_dt =
      cfg.rk4_dt > 0.0 ? cfg.rk4_dt : 0.01 / (1.0 + max_abs_xi * velocities.max_speed());

  std::vector<double> res;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < rho0.rho_hat.size(); ++i) {
    if (rho0.rho_hat[i] == cplx{})
      continue;
    const auto& p = detail::required_point(table, rho0.grid, i);
    const ModeOperator op(p.xi, velocities);
    const auto row = f0.row(i);
    const cplx start = mean_phi(row, velocities);
    for (double t : times) {
      std::vector<cplx> f;
      if (cfg.method == Method::exact_dense) {
        f = propagate_exact(row, op, t);
      } else {
        auto traj = evolve_mode(row, op, t, rk4_dt, Method::rk4, 1 << 30);
        f = traj.states.back();
      }
      const cplx direct = mean_phi(std::span<const cplx>(f), velocities);
      const cplx predicted = start * std::exp((p.lambda + cfg.lambda_shift) * t);
      res.push_back(std::abs(direct - predicted) / std::abs(start));
      std::ostringstream lab;
      lab.precision(17);
      lab << "t=" << t << " xi=" << p.xi;
      labels.push_back(lab.str());
    }
  }
  return make_report("gds vs direct (" + method_name(cfg.method) + ")", std::move(res),
                     cfg.tolerance, std::move(labels));
}

/// max over recorded times of |rho^_rk4(t) - rho^_exact(t)| for each dt.
inline std::vector<double> rk4_errors(std::span<const cplx> f0, const ModeOperator& op,
                                      double t_final, std::span<const double> dts)
{
  std::vector<double> errs;
  for (double dt : dts) {
    const auto traj = evolve_mode(f0, op, t_final, dt, Method::rk4);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const auto exact = propagate_exact(f0, op, traj.times[k]);
      double d = 0.0;
      for (std::size_t j = 0; j < exact.size(); ++j)
        d = std::max(d, std::abs(exact[j] - traj.states[k][j]));
      worst = std::max(worst, d);
    }
    errs.push_back(worst);
  }
  return errs;
}

/// Physical-space continuity residual of the GDS built from rho0 around
/// time t, for each probe step dt.
inline std::vector<double> continuity_errors(const SpectralDensity& rho0, const DispersionTable& table,
                                             const VelocityGrid& velocities, double t,
                                             std::size_t x_points, std::span<const double> dts)
{
  std::vector<double> errs;
  const double period = rho0.grid.period();
  auto snap = [&](double time) {
    return to_physical(lift_to_kinetic(evolve_density(rho0, time, table), table, velocities),
                       x_points, period);
  };
  const auto mid = snap(t);
  for (double dt : dts) {
    const auto r = continuity_residual(snap(t - dt), mid, snap(t + dt), 0.0);
    errs.push_back(r.max);
  }
  return errs;
}

}  // namespace gds
