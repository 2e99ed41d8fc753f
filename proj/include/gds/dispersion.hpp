#pragma once

// Dispersion relation of the grossly determined solution class.
//
// For a spatial frequency xi the GDS ansatz f^(t,xi,v) = K_v(xi) rho^(t,xi)
// closes only when c = C(xi) solves
//
//     xi = Xi(c) = int c phi(v) / (c^2 + v^2) dv,
//
// Xi being odd and strictly decreasing on each half-line with range
// (0, sqrt(pi)) for c > 0.  From c follow
//
//     b      = xi c                      in (0, 1)
//     lambda = b - 1 = -i xi k(xi)       decay rate, in (-1, 0)
//     a      = (b - 1)/xi,  k(xi) = a i  flux coefficient, T^ = k rho^
//     K_v    = 1 / (b + i xi v)          transfer function.
//
// Xi is evaluated through the closed form Xi(c) = sqrt(pi) erfcx(c); the
// adaptive-quadrature evaluation is kept as an independent reference.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "gds/adaptive_quadrature.hpp"
#include "gds/errors.hpp"
#include "gds/special.hpp"
#include "gds/velocity_grid.hpp"

namespace gds {

inline constexpr double kSqrtPi = 1.0 / std::numbers::inv_sqrtpi;

struct DispersionOptions
{
  double xi_min = 1e-6;         ///< below this |xi| a point is flagged as edge
  double edge_eps = 1e-6;       ///< above sqrt(pi) - edge_eps likewise
  double residual_tol = 1e-11;  ///< |Xi(C(xi)) - xi| required of the inversion
  double edge_widening = 100.0; ///< tolerance multiplier for edge points

  bool operator==(const DispersionOptions&) const = default;
};

struct DispersionPoint
{
  double xi = 0.0;
  double c = 0.0;
  double b = 0.0;
  double a = 0.0;
  double lambda = 0.0;
  bool edge = false;  ///< outside [xi_min, sqrt(pi) - edge_eps]: reduced precision

  /// k(xi) = a i
  cplx k() const { return {0.0, a}; }

  bool operator==(const DispersionPoint&) const = default;
};

/// Xi(c) for c != 0; odd in c.
inline double xi_of_c(double c)
{
  if (c == 0.0 || !std::isfinite(c))
    throw ConfigError("xi_of_c: c must be finite and nonzero");
  const double v = kSqrtPi * erfcx(std::abs(c));
  return c > 0.0 ? v : -v;
}

/// Xi(c) by adaptive quadrature of c phi(v)/(c^2+v^2).  Reference path only.
inline double xi_of_c_quadrature(double c)
{
  if (c == 0.0 || !std::isfinite(c))
    throw ConfigError("xi_of_c_quadrature: c must be finite and nonzero");
  const double ac = std::abs(c);
  std::vector<double> breaks;
  for (double s : {ac, 10.0 * ac, 0.1 * ac, 1.0})
    if (s < kGaussianCutoff) {
      breaks.push_back(s);
      breaks.push_back(-s);
    }
  const double v = phi_weighted_integral(
      [ac](double u) { return ac / (ac * ac + u * u); }, breaks,
      AdaptiveOptions{.abs_tol = 1e-16, .rel_tol = 1e-15, .max_depth = 60});
  return c > 0.0 ? v : -v;
}

/// int v^2 phi(v)/(c^2 + v^2) dv = 1 - |c| Xi(|c|), the quantity 1 - b.
/// For large |c| the difference is summed from its asymptotic series
/// 1/(2c^2) - 3/(4c^4) + 15/(8c^6) - ... to avoid cancellation.
inline double decay_moment(double c)
{
  const double ac = std::abs(c);
  if (ac < 8.0)
    return 1.0 - ac * kSqrtPi * erfcx(ac);
  const double inv = 1.0 / (2.0 * ac * ac);
  double term = inv;
  double sum = 0.0;
  for (int k = 1; k < 60; ++k) {
    sum += term;
    const double next = -term * (2.0 * k + 1.0) * inv;
    if (std::abs(next) < 1e-18 * std::abs(sum) || std::abs(next) > std::abs(term))
      break;
    term = next;
  }
  return sum;
}

inline bool in_open_band(double xi)
{
  return std::isfinite(xi) && xi != 0.0 && std::abs(xi) < kSqrtPi;
}

inline bool is_edge(double xi, const DispersionOptions& opt)
{
  const double ax = std::abs(xi);
  return ax < opt.xi_min || ax > kSqrtPi - opt.edge_eps;
}

/// C(xi) = Xi^{-1}(xi) on (-sqrt(pi), 0) U (0, sqrt(pi)).
///
/// Bracketed root finding (TOMS 748) on the monotone map Xi.  The bracket
/// comes from the bounds sqrt(pi) - 2c <= Xi(c) <= 1/c for c > 0, i.e.
/// c in [(sqrt(pi) - xi)/2, 1/xi].
inline double c_of_xi(double xi, const DispersionOptions& opt = {})
{
  if (!in_open_band(xi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "c_of_xi: xi = " << xi << " outside the support band (-sqrt(pi),0)U(0,sqrt(pi))";
    throw OutOfSupportError(msg.str());
  }
  const double target = std::abs(xi);
  auto f = [target](double c) { return kSqrtPi * erfcx(c) - target; };

  double lo = 0.5 * (kSqrtPi - target);
  double hi = 1.0 / target;
  double root = 0.0;
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) {
    root = lo;
  } else if (fhi == 0.0) {
    root = hi;
  } else {
    // Bracket bounds hold analytically; rounding can only matter at the ends.
    if (flo < 0.0)
      lo *= 0.5;
    if (fhi > 0.0)
      hi *= 2.0;
    boost::uintmax_t max_iter = 300;
    auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2),
        max_iter);
    root = std::abs(f(r_lo)) <= std::abs(f(r_hi)) ? r_lo : r_hi;
  }

  const double tol = is_edge(xi, opt) ? opt.residual_tol * opt.edge_widening : opt.residual_tol;
  const double residual = std::abs(f(root));
  if (!(residual <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "c_of_xi: inversion residual " << residual << " exceeds " << tol << " at xi = " << xi;
    throw Error(msg.str());
  }
  return xi > 0.0 ? root : -root;
}

/// Full dispersion data at one frequency.
inline DispersionPoint dispersion_point(double xi, const DispersionOptions& opt = {})
{
  DispersionPoint p;
  p.xi = xi;
  p.c = c_of_xi(xi, opt);
  p.lambda = -decay_moment(p.c);
  p.b = 1.0 + p.lambda;
  p.a = p.lambda / xi;
  p.edge = is_edge(xi, opt);
  return p;
}

/// K_v(xi) = 1/(b + i xi v) at every velocity node.
inline std::vector<cplx> transfer_function(const DispersionPoint& p, const VelocityGrid& grid)
{
  return grid.sample([&p](double v) { return 1.0 / cplx(p.b, p.xi * v); });
}

/// |sum_j w_j K_{v_j}(xi) - 1|: how well the velocity grid reproduces the
/// normalization of the transfer function at this frequency.
inline double transfer_normalization_error(const DispersionPoint& p, const VelocityGrid& grid)
{
  const auto k = transfer_function(p, grid);
  return std::abs(mean_phi(std::span<const cplx>(k), grid) - 1.0);
}

/// Largest xi in (0, sqrt(pi)) such that the transfer normalization error
/// stays below `tol` on all of (0, xi].  Near the band edge c -> 0 and
/// K_v develops poles at v = +-ic that a fixed Gauss-Hermite rule cannot
/// resolve; beyond this limit the discrete mode dynamics no longer carry the
/// continuous GDS eigenpair to the requested accuracy.
inline double quadrature_resolved_xi(const VelocityGrid& grid, double tol,
                                     const DispersionOptions& opt = {})
{
  auto err = [&](double xi) { return transfer_normalization_error(dispersion_point(xi, opt), grid); };
  const double top = kSqrtPi - opt.edge_eps;
  const double step = 1e-3;
  double good = 0.0;
  double xi = step;
  for (; xi < top; xi += step) {
    if (err(xi) > tol)
      break;
    good = xi;
  }
  if (xi >= top)
    return top;
  double bad = xi;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (good + bad);
    if (err(mid) > tol)
      bad = mid;
    else
      good = mid;
  }
  return good;
}

/// Dispersion data tabulated on a set of frequencies, sorted by xi.
class DispersionTable
{
 public:
  DispersionTable() = default;

  DispersionTable(std::vector<DispersionPoint> points, DispersionOptions options)
      : points_(std::move(points))
      , options_(options)
  {
    std::sort(points_.begin(), points_.end(),
              [](const DispersionPoint& l, const DispersionPoint& r) { return l.xi < r.xi; });
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (!(points_[i].xi > points_[i - 1].xi))
        throw ConfigError("DispersionTable: duplicate frequency in table");
  }

  static DispersionTable build(std::span<const double> xis, const DispersionOptions& opt = {})
  {
    std::vector<DispersionPoint> pts;
    pts.reserve(xis.size());
    for (double xi : xis)
      pts.push_back(dispersion_point(xi, opt));
    return DispersionTable(std::move(pts), opt);
  }

  const std::vector<DispersionPoint>& points() const { return points_; }
  const DispersionOptions& options() const { return options_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const DispersionPoint* find(double xi) const
  {
    auto it = std::lower_bound(points_.begin(), points_.end(), xi,
                               [](const DispersionPoint& p, double x) { return p.xi < x; });
    const double tol = 1e-12 * std::max(1.0, std::abs(xi));
    for (auto cand : {it, it == points_.begin() ? it : it - 1})
      if (cand != points_.end() && std::abs(cand->xi - xi) <= tol)
        return &*cand;
    return nullptr;
  }

  /// Point at xi; throws when the table does not cover it.
  const DispersionPoint& at(double xi) const
  {
    if (const auto* p = find(xi))
      return *p;
    std::ostringstream msg;
    msg.precision(17);
    msg << "DispersionTable: no dispersion data for xi = " << xi;
    throw OutOfSupportError(msg.str());
  }

  bool operator==(const DispersionTable&) const = default;

 private:
  std::vector<DispersionPoint> points_;
  DispersionOptions options_;
};

}  // namespace gds
