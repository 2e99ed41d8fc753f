#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gds/gds_builder.hpp"

using namespace gds;

namespace {

constexpr double kBand = 0.69;  // inside the N = 64 quadrature-resolved band

struct Setup
{
  VelocityGrid vg = build_grid(64);
  SpectralGrid grid{kBand, 32};
  DispersionTable table = table_for_grid(grid);
  std::size_t x_points = 128;
};

const Setup& setup()
{
  static const Setup s;
  return s;
}

SpectralDensity single(double xi0, double amp = 1.0)
{
  return make_band_limited_density(SingleMode{xi0, amp}, kBand, setup().grid);
}

}  // namespace

TEST(Builder, SingleModeSupport)
{
  const SpectralGrid g{1.5, 30};
  const auto rho = make_band_limited_density(SingleMode{1.0, 1.0}, 1.5, g);
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i) {
    const bool at_pm1 = std::abs(std::abs(g.xi(i)) - 1.0) < 1e-12;
    EXPECT_EQ(rho.rho_hat[i] != cplx{}, at_pm1) << "xi=" << g.xi(i);
  }
  EXPECT_THROW(make_band_limited_density(SingleMode{1.01, 1.0}, 1.5, g), ConfigError);
}

TEST(Builder, HardTruncation)
{
  const SpectralGrid wide{1.7, 170};
  const auto rho = make_band_limited_density(GaussianBump{1.0, 0.0, 1.0}, 1.5, wide);
  double outside = 0.0;
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i)
    if (std::abs(wide.xi(i)) > 1.5 + 1e-12)
      outside = std::max(outside, std::abs(rho.rho_hat[i]));
  EXPECT_EQ(outside, 0.0);
  EXPECT_NE(rho.at_mode(150), cplx{});
  EXPECT_EQ(rho.at_mode(0), cplx{});
  EXPECT_THROW(make_band_limited_density(GaussianBump{}, kSqrtPi, wide), ConfigError);
  EXPECT_THROW(make_band_limited_density(GaussianBump{}, 2.0, 10), ConfigError);
}

TEST(Builder, ProfilesAreHermitianAndReal)
{
  const auto& s = setup();
  for (const Profile& p : {Profile{GaussianBump{4.0, 30.0, 2.0}}, Profile{HannBand{1.0}},
                           Profile{SingleMode{s.grid.dxi() * 5, 0.7}}}) {
    const auto rho = make_band_limited_density(p, kBand, s.grid);
    EXPECT_EQ(rho.hermitian_defect(), 0.0) << profile_name(p);
    const auto snap = to_physical(rho, s.table, s.x_points, s.grid.period());
    EXPECT_LT(snap.max_imag, 1e-12) << profile_name(p);
  }
}

TEST(Builder, EvolveDensity)
{
  const auto& s = setup();
  const auto rho0 = make_band_limited_density(GaussianBump{}, kBand, s.grid);
  const auto same = evolve_density(rho0, 0.0, s.table);
  EXPECT_EQ(same.rho_hat, rho0.rho_hat);

  const double xi0 = 4 * s.grid.dxi();
  const auto one = single(xi0, 2.0);
  const double lam = s.table.at(xi0).lambda;
  double prev = 2.0;
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const auto r = evolve_density(one, t, s.table);
    const double mag = std::abs(r.rho_hat[s.grid.index(4)]);
    EXPECT_NEAR(mag, 2.0 * std::exp(lam * t), 1e-14);
    EXPECT_LT(mag, prev);
    prev = mag;
    EXPECT_EQ(r.hermitian_defect(), 0.0);
  }
}

TEST(Builder, DiffusionLimitDecay)
{
  const SpectralGrid g{0.5, 10};  // contains xi = 0.05
  const auto table = table_for_grid(g);
  const auto rho = make_band_limited_density(SingleMode{0.05, 1.0}, 0.5, g);
  const auto r = evolve_density(rho, 1.0, table);
  const double ratio = std::abs(r.at_mode(1) / rho.at_mode(1));
  EXPECT_NEAR(ratio / std::exp(-0.05 * 0.05 / 2.0), 1.0, 2e-3);
}

TEST(Builder, MissingCoverageNamesSample)
{
  const auto& s = setup();
  const auto rho = make_band_limited_density(GaussianBump{}, kBand, s.grid);
  const auto partial = table_for_grid(s.grid, {}, 0.3);
  try {
    evolve_density(rho, 1.0, partial);
    FAIL() << "expected OutOfSupportError";
  } catch (const OutOfSupportError& e) {
    EXPECT_NE(std::string(e.what()).find("sample m = -32"), std::string::npos) << e.what();
  }
  auto dc = rho;
  dc.rho_hat[s.grid.index(0)] = 1.0;
  EXPECT_THROW(evolve_density(dc, 1.0, s.table), OutOfSupportError);
}

TEST(Builder, LiftConsistency)
{
  const auto& s = setup();
  for (int m : {1, 9, 32}) {
    const double xi0 = s.grid.xi(s.grid.index(m));
    const auto state = lift_to_kinetic(single(xi0, 1.3), s.table, s.vg);
    const auto row = state.row(s.grid.index(m));
    EXPECT_LT(std::abs(mean_phi(row, s.vg) - 1.3), 1e-8);
    EXPECT_LT(std::abs(moment(row, 1, s.vg) - s.table.at(xi0).k() * 1.3), 1e-8);
  }
  SpectralDensity zero{s.grid, std::vector<cplx>(s.grid.size()), 0.0};
  for (const auto& z : lift_to_kinetic(zero, s.table, s.vg).f_hat)
    EXPECT_EQ(z, cplx{});
}

TEST(Builder, SingleModePhysicalFields)
{
  const auto& s = setup();
  const int m = 8;
  const double xi0 = s.grid.xi(s.grid.index(m));
  const auto state = lift_to_kinetic(single(xi0, 1.0), s.table, s.vg);
  const auto snap = to_physical(state, s.x_points, s.grid.period());
  const double a = s.table.at(xi0).a;
  double tmax = 0.0;
  for (std::size_t j = 0; j < snap.x.size(); ++j) {
    EXPECT_NEAR(snap.rho[j], 2.0 * std::cos(xi0 * snap.x[j]), 1e-8);
    // T^ = k rho^ with k = i a: T = -2 a sin(xi0 x)
    EXPECT_NEAR(snap.flux[j], -2.0 * a * std::sin(xi0 * snap.x[j]), 1e-8);
    tmax = std::max(tmax, std::abs(snap.flux[j]));
  }
  EXPECT_NEAR(tmax / 2.0, std::abs(a), 1e-3 * std::abs(a));
}

TEST(Builder, MassParsevalAndEnvelope)
{
  const auto& s = setup();
  const auto rho0 = make_band_limited_density(GaussianBump{3.0, 10.0, 1.0}, kBand, s.grid);
  const double lmax = max_active_lambda(rho0, s.table);
  const double l0 = spectral_l2(rho0);
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const auto r = evolve_density(rho0, t, s.table);
    const auto snap = to_physical(lift_to_kinetic(r, s.table, s.vg), s.x_points, s.grid.period());
    EXPECT_LT(std::abs(total_mass(snap)), 1e-10);
    EXPECT_NEAR(physical_l2(snap) / spectral_l2(r), 1.0, 1e-9);
    EXPECT_LE(spectral_l2(r), l0 * std::exp(lmax * t) * (1 + 1e-12));
  }
}

TEST(Builder, SemigroupAndLinearity)
{
  const auto& s = setup();
  const auto rho0 = make_band_limited_density(HannBand{1.0}, kBand, s.grid);
  const auto a = evolve_density(evolve_density(rho0, 1.2, s.table), 0.8, s.table);
  const auto b = evolve_density(rho0, 2.0, s.table);
  for (std::size_t i = 0; i < a.rho_hat.size(); ++i)
    EXPECT_LT(std::abs(a.rho_hat[i] - b.rho_hat[i]), 1e-12);

  const auto one = single(3 * s.grid.dxi(), 1.0);
  const auto two = single(7 * s.grid.dxi(), 0.5);
  auto sum = one;
  for (std::size_t i = 0; i < sum.rho_hat.size(); ++i)
    sum.rho_hat[i] += two.rho_hat[i];
  const auto fs = lift_to_kinetic(evolve_density(sum, 1.0, s.table), s.table, s.vg);
  const auto f1 = lift_to_kinetic(evolve_density(one, 1.0, s.table), s.table, s.vg);
  const auto f2 = lift_to_kinetic(evolve_density(two, 1.0, s.table), s.table, s.vg);
  for (std::size_t i = 0; i < fs.f_hat.size(); ++i)
    EXPECT_EQ(fs.f_hat[i], f1.f_hat[i] + f2.f_hat[i]);
}

TEST(Builder, PhysicalGridChecks)
{
  const auto& s = setup();
  const auto state = lift_to_kinetic(single(s.grid.dxi(), 1.0), s.table, s.vg);
  EXPECT_THROW(to_physical(state, 100, s.grid.period()), ConfigError);
  EXPECT_THROW(to_physical(state, 32, s.grid.period()), ConfigError);
  EXPECT_THROW(to_physical(state, 128, s.grid.period() * 1.01), GridMismatchError);
}

TEST(Builder, KernelProperties)
{
  const auto& s = setup();
  const double period = s.grid.period();
  std::vector<double> y(s.x_points);
  for (std::size_t j = 0; j < y.size(); ++j)
    y[j] = period * j / y.size();

  const auto k0 = kernel_kv(0.0, y, s.table, s.grid);
  EXPECT_LT(k0.max_imag, 1e-10);
  for (std::size_t j = 1; j < y.size(); ++j)
    EXPECT_NEAR(k0.values[j], k0.values[y.size() - j], 1e-10);  // even: K(y) = K(L - y)

  // convolution with the kernel reproduces the lifted distribution
  const auto rho0 = make_band_limited_density(GaussianBump{5.0, 40.0, 1.0}, kBand, s.grid);
  const auto rho_x = to_physical(rho0, s.table, s.x_points, period).rho;
  const auto snap = to_physical(lift_to_kinetic(rho0, s.table, s.vg), s.x_points, period, true);
  const double dx = period / y.size();
  double worst = 0.0, scale = 0.0;
  for (std::size_t jv : {0ul, 20ul, 40ul, 63ul}) {
    const double v = s.vg.node(jv);
    const auto kv = kernel_kv(v, y, s.table, s.grid);
    EXPECT_LT(kv.max_imag, 1e-10);
    for (std::size_t ix = 0; ix < y.size(); ix += 7) {
      double conv = 0.0;
      for (std::size_t iy = 0; iy < y.size(); ++iy)
        conv += kv.values[iy] * rho_x[(ix + y.size() - iy) % y.size()] * dx;
      const double ref = snap.f[ix * s.vg.size() + jv];
      worst = std::max(worst, std::abs(conv - ref));
      scale = std::max(scale, std::abs(ref));
    }
  }
  EXPECT_LT(worst, 1e-7 * std::max(1.0, scale));
  std::vector<double> bad = {0.0, 1.0, 3.0};
  EXPECT_THROW(kernel_kv(0.0, bad, s.table, s.grid), ConfigError);
}

TEST(Builder, PideResidual)
{
  const auto& s = setup();
  const auto rho0 = make_band_limited_density(GaussianBump{}, kBand, s.grid);
  const auto state = lift_to_kinetic(evolve_density(rho0, 1.0, s.table), s.table, s.vg);
  EXPECT_LT(pide_residual(state, s.table), 1e-10);
  EXPECT_LT(pide_residual(state, s.table, ResidualMode::finite_difference), 1e-8);

  SpectralDensity zero{s.grid, std::vector<cplx>(s.grid.size()), 0.0};
  EXPECT_EQ(pide_residual(lift_to_kinetic(zero, s.table, s.vg), s.table), 0.0);

  // a velocity perturbation orthogonal to constants is seen at its own size
  auto noisy = state;
  const double eps = 1e-4;
  const std::size_t idx = s.grid.index(5);
  const auto row = noisy.row(idx);
  std::vector<cplx> u(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    u[j] = eps * s.vg.node(j);
    noisy.f_hat[idx * s.vg.size() + j] += u[j];
  }
  const double r = pide_residual(noisy, s.table);
  EXPECT_GT(r, 0.1 * eps);
  EXPECT_LT(r, 10.0 * eps);
}
