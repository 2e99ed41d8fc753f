#pragma once

// Grossly determined solutions on a periodic x-domain.
//
// A band-limited initial density rho^_0 evolves as rho^(t,xi) =
// rho^_0(xi) exp(lambda(xi) t), and the kinetic state is slaved to it,
// f^(t,xi,v) = K_v(xi) rho^(t,xi).  The whole-line Fourier transform is
// replaced by Fourier series on [0, L) with L = 2 pi / dxi:
//
//     rho(t,x) = sum_m rho^_m(t) exp(i xi_m x).
//
// Physical space is reached by inverse FFT; the convolution form
// f = int K_v(y) rho(x - y) dy is available through kernel_kv.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "gds/dispersion.hpp"
#include "gds/errors.hpp"
#include "gds/fft.hpp"
#include "gds/spectral_grid.hpp"
#include "gds/velocity_grid.hpp"

namespace gds {

/// rho^(t, xi) sampled on a SpectralGrid.
struct SpectralDensity
{
  SpectralGrid grid;
  std::vector<cplx> rho_hat;
  double time = 0.0;

  cplx at_mode(int m) const { return rho_hat[grid.index(m)]; }

  /// max_m |rho^(-xi_m) - conj rho^(xi_m)|
  double hermitian_defect() const
  {
    double worst = 0.0;
    for (int m = 1; m <= grid.modes; ++m)
      worst = std::max(worst, std::abs(at_mode(-m) - std::conj(at_mode(m))));
    return worst + std::abs(at_mode(0).imag());
  }
};

/// f^(t, xi, v): rows are grid frequencies, columns velocity nodes.
struct KineticStateSpectral
{
  SpectralGrid grid;
  VelocityGrid velocities;
  std::vector<cplx> f_hat;  // row-major, grid.size() x velocities.size()
  double time = 0.0;

  std::span<const cplx> row(std::size_t idx) const
  {
    return {f_hat.data() + idx * velocities.size(), velocities.size()};
  }
  std::span<cplx> row(std::size_t idx)
  {
    return {f_hat.data() + idx * velocities.size(), velocities.size()};
  }

  /// <f^(xi, .), 1>_phi for every row.
  SpectralDensity density() const
  {
    SpectralDensity out{grid, std::vector<cplx>(grid.size()), time};
    for (std::size_t i = 0; i < grid.size(); ++i)
      out.rho_hat[i] = mean_phi(row(i), velocities);
    return out;
  }

  /// T^(xi) = <v f^(xi, .), 1>_phi for every row.
  std::vector<cplx> flux() const
  {
    std::vector<cplx> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[i] = moment(row(i), 1, velocities);
    return out;
  }
};

/// Physical-space fields on x_j = j L / n, j = 0..n-1.
struct FieldSnapshot
{
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> flux;
  double time = 0.0;
  double period = 0.0;
  double max_imag = 0.0;  ///< largest imaginary residue discarded by the inverse transform
  std::size_t n_velocity = 0;
  std::vector<double> f;  ///< optional, row-major x.size() x n_velocity

  double dx() const { return period / static_cast<double>(x.size()); }
};

// ---------------------------------------------------------------------------
// initial data

/// Physical Gaussian bump of width sigma at x = center; its spectrum is
/// amplitude * exp(-sigma^2 xi^2 / 2) * exp(-i xi center).
struct GaussianBump
{
  double sigma = 4.0;
  double center = 0.0;
  double amplitude = 1.0;
};

/// amplitude * sin^2(pi |xi| / xi_max): smooth, vanishing at 0 and at the cut.
struct HannBand
{
  double amplitude = 1.0;
};

/// A single Hermitian pair rho^(+-xi0) = amplitude; xi0 must lie on the grid.
struct SingleMode
{
  double xi0 = 0.5;
  double amplitude = 1.0;
};

using Profile = std::variant<GaussianBump, HannBand, SingleMode>;

inline std::string profile_name(const Profile& p)
{
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GaussianBump>)
          return "gaussian-bump";
        else if constexpr (std::is_same_v<T, HannBand>)
          return "hann-band";
        else
          return "single-mode";
      },
      p);
}

/// Admissible initial density: Hermitian, zero at xi = 0 and hard-truncated
/// to |xi| <= xi_max < sqrt(pi).  `grid` may extend beyond xi_max; those
/// samples are exactly zero.
inline SpectralDensity make_band_limited_density(const Profile& profile, double xi_max,
                                                 const SpectralGrid& grid)
{
  grid.validate();
  if (!(xi_max > 0.0) || !(xi_max < kSqrtPi))
    throw ConfigError("make_band_limited_density: xi_max must lie in (0, sqrt(pi))");

  SpectralDensity out{grid, std::vector<cplx>(grid.size()), 0.0};
  const double cut = xi_max * (1.0 + 1e-14);
  auto inside = [&](double xi) { return xi != 0.0 && std::abs(xi) <= cut; };

  if (const auto* sm = std::get_if<SingleMode>(&profile)) {
    const double m0 = std::round(sm->xi0 / grid.dxi());
    if (!(std::abs(m0 * grid.dxi() - sm->xi0) <= 1e-9 * grid.dxi()) || m0 < 1 || m0 > grid.modes
        || !inside(grid.xi(grid.index(static_cast<int>(m0)))))
      throw ConfigError("make_band_limited_density: single-mode xi0 is not a positive grid "
                        "frequency inside the band");
    out.rho_hat[grid.index(static_cast<int>(m0))] = sm->amplitude;
    out.rho_hat[grid.index(-static_cast<int>(m0))] = sm->amplitude;
    return out;
  }

  for (int m = 1; m <= grid.modes; ++m) {
    const double xi = grid.xi(grid.index(m));
    if (!inside(xi))
      continue;
    cplx value;
    if (const auto* g = std::get_if<GaussianBump>(&profile)) {
      value = g->amplitude * std::exp(-0.5 * g->sigma * g->sigma * xi * xi)
              * std::polar(1.0, -xi * g->center);
    } else {
      const auto& h = std::get<HannBand>(profile);
      const double s = std::sin(std::numbers::pi * xi / xi_max);
      value = h.amplitude * s * s;
    }
    out.rho_hat[grid.index(m)] = value;
    out.rho_hat[grid.index(-m)] = std::conj(value);
  }
  return out;
}

inline SpectralDensity make_band_limited_density(const Profile& profile, double xi_max, int modes)
{
  return make_band_limited_density(profile, xi_max, SpectralGrid{xi_max, modes});
}

/// Dispersion table covering every nonzero frequency of `grid` with
/// |xi| <= band (band defaults to the whole grid).
inline DispersionTable table_for_grid(const SpectralGrid& grid, const DispersionOptions& opt = {},
                                      std::optional<double> band = std::nullopt)
{
  std::vector<double> xis;
  for (double xi : grid.nonzero_xis())
    if (std::abs(xi) <= band.value_or(grid.extent) * (1.0 + 1e-14) && in_open_band(xi))
      xis.push_back(xi);
  return DispersionTable::build(xis, opt);
}

namespace detail {

inline std::string sample_name(const SpectralGrid& grid, std::size_t idx)
{
  std::ostringstream s;
  s.precision(17);
  s << "sample m = " << grid.mode(idx) << " (xi = " << grid.xi(idx) << ")";
  return s.str();
}

inline const DispersionPoint& required_point(const DispersionTable& table, const SpectralGrid& grid,
                                             std::size_t idx)
{
  const double xi = grid.xi(idx);
  if (grid.mode(idx) == 0)
    throw OutOfSupportError("nonzero spectral content at xi = 0 is outside the GDS band ("
                            + sample_name(grid, idx) + ")");
  if (const auto* p = table.find(xi))
    return *p;
  throw OutOfSupportError("missing dispersion coverage for " + sample_name(grid, idx));
}

}  // namespace detail

/// rho^(t, xi) = rho^_0(xi) exp(lambda(xi) t) on every sample with nonzero
/// content.  Negative t is accepted and amplifies by exp(|lambda| t).
inline SpectralDensity evolve_density(const SpectralDensity& rho, double t,
                                      const DispersionTable& table)
{
  SpectralDensity out = rho;
  out.time = rho.time + t;
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i) {
    if (rho.rho_hat[i] == cplx{})
      continue;
    const auto& p = detail::required_point(table, rho.grid, i);
    out.rho_hat[i] = rho.rho_hat[i] * std::exp(p.lambda * t);
  }
  return out;
}

/// f^(xi, v) = K_v(xi) rho^(xi).
inline KineticStateSpectral lift_to_kinetic(const SpectralDensity& rho,
                                            const DispersionTable& table,
                                            const VelocityGrid& velocities)
{
  KineticStateSpectral out{rho.grid, velocities,
                           std::vector<cplx>(rho.grid.size() * velocities.size()), rho.time};
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i) {
    if (rho.rho_hat[i] == cplx{})
      continue;
    const auto& p = detail::required_point(table, rho.grid, i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < velocities.size(); ++j)
      dst[j] = rho.rho_hat[i] / cplx(p.b, p.xi * velocities.node(j));
  }
  return out;
}

namespace detail {

inline void check_physical_grid(const SpectralGrid& grid, std::size_t x_points, double period)
{
  if (x_points == 0 || (x_points & (x_points - 1)) != 0)
    throw ConfigError("to_physical: x_points must be a power of two");
  if (x_points < 2 * (static_cast<std::size_t>(grid.modes) + 1))
    throw ConfigError("to_physical: x_points must be at least 2 (modes + 1) to avoid aliasing");
  if (!(std::abs(period - grid.period()) <= 1e-12 * grid.period())) {
    std::ostringstream s;
    s.precision(17);
    s << "to_physical: period " << period << " does not match 2 pi / dxi = " << grid.period();
    throw GridMismatchError(s.str());
  }
}

inline std::vector<double> real_part(std::span<const cplx> z, double& max_imag)
{
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = z[i].real();
    max_imag = std::max(max_imag, std::abs(z[i].imag()));
  }
  return out;
}

inline FieldSnapshot empty_snapshot(std::size_t x_points, double period, double time)
{
  FieldSnapshot s;
  s.period = period;
  s.time = time;
  s.x.resize(x_points);
  for (std::size_t j = 0; j < x_points; ++j)
    s.x[j] = period * static_cast<double>(j) / static_cast<double>(x_points);
  return s;
}

}  // namespace detail

/// rho(t,x), T(t,x) and optionally f(t,x,v) from a kinetic state.
inline FieldSnapshot to_physical(const KineticStateSpectral& state, std::size_t x_points,
                                 double period, bool with_distribution = false)
{
  detail::check_physical_grid(state.grid, x_points, period);
  FieldSnapshot snap = detail::empty_snapshot(x_points, period, state.time);
  Dft dft(x_points);
  const auto rho = state.density();
  const auto flux = state.flux();
  snap.rho = detail::real_part(synthesize_centered(dft, rho.rho_hat), snap.max_imag);
  snap.flux = detail::real_part(synthesize_centered(dft, flux), snap.max_imag);
  if (with_distribution) {
    const std::size_t nv = state.velocities.size();
    snap.n_velocity = nv;
    snap.f.resize(x_points * nv);
    std::vector<cplx> column(state.grid.size());
    for (std::size_t j = 0; j < nv; ++j) {
      for (std::size_t i = 0; i < state.grid.size(); ++i)
        column[i] = state.row(i)[j];
      const auto values = synthesize_centered(dft, column);
      for (std::size_t k = 0; k < x_points; ++k) {
        snap.f[k * nv + j] = values[k].real();
        snap.max_imag = std::max(snap.max_imag, std::abs(values[k].imag()));
      }
    }
  }
  return snap;
}

/// rho(t,x) and the GDS closure flux T^ = k(xi) rho^ from a density alone.
inline FieldSnapshot to_physical(const SpectralDensity& rho, const DispersionTable& table,
                                 std::size_t x_points, double period)
{
  detail::check_physical_grid(rho.grid, x_points, period);
  FieldSnapshot snap = detail::empty_snapshot(x_points, period, rho.time);
  std::vector<cplx> flux(rho.rho_hat.size());
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i)
    if (rho.rho_hat[i] != cplx{})
      flux[i] = detail::required_point(table, rho.grid, i).k() * rho.rho_hat[i];
  Dft dft(x_points);
  snap.rho = detail::real_part(synthesize_centered(dft, rho.rho_hat), snap.max_imag);
  snap.flux = detail::real_part(synthesize_centered(dft, flux), snap.max_imag);
  return snap;
}

struct KernelSamples
{
  std::vector<double> values;
  double max_imag = 0.0;
};

/// Convolution kernel K_v(y) = (dxi / 2 pi) sum_{xi_m in band} K_v(xi_m) exp(i xi_m y),
/// normalized so that f(x, v) = int_0^L K_v(y) rho(x - y) dy for densities
/// supported on the table's frequencies.  Evaluated by direct summation.
inline KernelSamples kernel_kv(double v, std::span<const double> y, const DispersionTable& table,
                               const SpectralGrid& grid)
{
  if (y.size() >= 3) {
    const double h = y[1] - y[0];
    for (std::size_t i = 2; i < y.size(); ++i)
      if (std::abs((y[i] - y[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
        throw ConfigError("kernel_kv: y grid must be uniform");
  }
  std::vector<std::pair<double, cplx>> spectrum;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.mode(i) == 0)
      continue;
    if (const auto* p = table.find(grid.xi(i)))
      spectrum.emplace_back(p->xi, 1.0 / cplx(p->b, p->xi * v));
  }
  KernelSamples out;
  out.values.resize(y.size());
  const double scale = grid.dxi() / (2.0 * std::numbers::pi);
  for (std::size_t k = 0; k < y.size(); ++k) {
    cplx sum{};
    for (const auto& [xi, kh] : spectrum)
      sum += kh * std::polar(1.0, xi * y[k]);
    sum *= scale;
    out.values[k] = sum.real();
    out.max_imag = std::max(out.max_imag, std::abs(sum.imag()));
  }
  return out;
}

enum class ResidualMode
{
  analytic,           ///< d/dt f^ = lambda f^
  finite_difference,  ///< d/dt f^ from a central difference of rebuilt GDS states
};

/// max over rows of || d/dt f^ + i xi v f^ + f^ - <f^, 1>_phi ||_phi.
///
/// Rows at xi = 0 must vanish for a GDS; their norm is reported as residual.
inline double pide_residual(const KineticStateSpectral& state, const DispersionTable& table,
                            ResidualMode mode = ResidualMode::analytic, double dt_probe = 1e-4)
{
  const auto& vg = state.velocities;
  const std::size_t nv = vg.size();
  std::vector<cplx> r(nv);
  double worst = 0.0;
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    const auto f = state.row(i);
    if (std::all_of(f.begin(), f.end(), [](cplx z) { return z == cplx{}; }))
      continue;
    if (state.grid.mode(i) == 0) {
      worst = std::max(worst, norm_phi(f, vg));
      continue;
    }
    const auto& p = detail::required_point(table, state.grid, i);
    const cplx rho = mean_phi(f, vg);
    for (std::size_t j = 0; j < nv; ++j) {
      cplx dfdt;
      if (mode == ResidualMode::analytic) {
        dfdt = p.lambda * f[j];
      } else {
        const cplx kv = 1.0 / cplx(p.b, p.xi * vg.node(j));
        const cplx fp = kv * rho * std::exp(p.lambda * dt_probe);
        const cplx fm = kv * rho * std::exp(-p.lambda * dt_probe);
        dfdt = (fp - fm) / (2.0 * dt_probe);
      }
      r[j] = dfdt + cplx(1.0, p.xi * vg.node(j)) * f[j] - rho;
    }
    worst = std::max(worst, norm_phi(std::span<const cplx>(r), vg));
  }
  return worst;
}

/// sqrt(L sum_m |rho^_m|^2), equal to the L2 norm of rho over one period.
inline double spectral_l2(const SpectralDensity& rho)
{
  double s = 0.0;
  for (const auto& z : rho.rho_hat)
    s += std::norm(z);
  return std::sqrt(rho.grid.period() * s);
}

/// sqrt(sum_j rho_j^2 dx)
inline double physical_l2(const FieldSnapshot& snap)
{
  double s = 0.0;
  for (double r : snap.rho)
    s += r * r;
  return std::sqrt(s * snap.dx());
}

/// sum_j rho_j dx
inline double total_mass(const FieldSnapshot& snap)
{
  double s = 0.0;
  for (double r : snap.rho)
    s += r;
  return s * snap.dx();
}

/// Largest decay rate over samples with nonzero content (closest to 0).
inline double max_active_lambda(const SpectralDensity& rho, const DispersionTable& table)
{
  double best = -1.0;
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i)
    if (rho.rho_hat[i] != cplx{})
      best = std::max(best, detail::required_point(table, rho.grid, i).lambda);
  return best;
}

}  // namespace gds
