#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gds/direct_solver.hpp"
#include "gds/dispersion.hpp"

using namespace gds;

// Reference values from 50-digit evaluation of sqrt(pi) exp(c^2) erfc(c).
TEST(Dispersion, XiOfCReferenceValues)
{
  const std::array<std::pair<double, double>, 7> ref = {{{1e-6, 1.7724518509072885},
                                                         {1e-4, 1.7722538686287213},
                                                         {0.2, 1.4339497635072885},
                                                         {1.0, 0.75787215614131211},
                                                         {2.0, 0.45267704998117458},
                                                         {5.0, 0.19621886146307758},
                                                         {1e4, 9.9999999500000007e-5}}};
  for (auto [c, xi] : ref) {
    EXPECT_NEAR(xi_of_c(c) / xi, 1.0, 1e-13) << "c=" << c;
    EXPECT_NEAR(xi_of_c(-c) / xi, -1.0, 1e-13);
  }
  EXPECT_THROW(xi_of_c(0.0), ConfigError);
}

TEST(Dispersion, ClosedFormMatchesQuadratureOracle)
{
  for (int i = 0; i <= 80; ++i) {
    const double c = std::pow(10.0, -4.0 + 8.0 * i / 80.0);
    const double q = xi_of_c_quadrature(c);
    EXPECT_NEAR(xi_of_c(c) / q, 1.0, 1e-10) << "c=" << c;
  }
}

TEST(Dispersion, LimitsAndRange)
{
  EXPECT_NEAR(xi_of_c(1e-6), kSqrtPi, 1e-5);
  EXPECT_LT(xi_of_c(1e4), 2e-4);
  double prev = kSqrtPi;
  for (int i = 0; i < 1000; ++i) {
    const double c = std::pow(10.0, -4.0 + 8.0 * i / 999.0);
    const double xi = xi_of_c(c);
    EXPECT_GT(xi, 0.0);
    EXPECT_LT(xi, kSqrtPi);
    EXPECT_LT(xi, prev);
    prev = xi;
  }
}

TEST(Dispersion, OddSymmetryRandom)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double c = std::pow(10.0, u(rng));
    EXPECT_EQ(xi_of_c(-c), -xi_of_c(c));
  }
}

TEST(Dispersion, Inversion)
{
  for (double c : {0.1, 0.5, 1.0, 2.0, 5.0})
    EXPECT_NEAR(c_of_xi(xi_of_c(c)), c, 1e-9 * c);
  EXPECT_GT(c_of_xi(0.01), 50.0);
  EXPECT_NEAR(c_of_xi(0.01), 99.995, 1e-3);
  // Plotted point (1, 0.753057): the accurate inverse is 1.0100, about 1% off
  // the plotted c, within the drawing accuracy of the reference curve.
  const double c = c_of_xi(0.753057);
  EXPECT_NEAR(c, 1.0099996265, 1e-8);
  EXPECT_NEAR(c, 1.0, 2e-2);
  EXPECT_NEAR(c_of_xi(-0.753057), -c, 1e-15);

  double prev = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const double xi = 1e-6 + (kSqrtPi - 2e-6) * i / 999.0;
    const double ci = c_of_xi(xi);
    EXPECT_LT(std::abs(xi_of_c(ci) - xi), 1e-11) << "xi=" << xi;
    EXPECT_LT(ci, prev);
    prev = ci;
  }
}

TEST(Dispersion, OutOfSupport)
{
  EXPECT_THROW(c_of_xi(0.0), OutOfSupportError);
  EXPECT_THROW(c_of_xi(kSqrtPi), OutOfSupportError);
  EXPECT_THROW(c_of_xi(-2.0), OutOfSupportError);
  EXPECT_THROW(dispersion_point(1.8), OutOfSupportError);
  DispersionOptions opt;
  EXPECT_TRUE(is_edge(5e-7, opt));
  EXPECT_TRUE(is_edge(kSqrtPi - 5e-7, opt));
  EXPECT_FALSE(is_edge(0.5, opt));
  EXPECT_TRUE(dispersion_point(kSqrtPi - 5e-7).edge);
}

TEST(Dispersion, PointInvariants)
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1e-3, kSqrtPi - 1e-3);
  for (int i = 0; i < 200; ++i) {
    const double xi = u(rng);
    const auto p = dispersion_point(xi);
    const auto q = dispersion_point(-xi);
    EXPECT_GT(p.b, 0.0);
    EXPECT_LT(p.b, 1.0);
    EXPECT_NEAR(p.lambda, p.b - 1.0, 1e-15);
    EXPECT_NEAR(p.b, xi * p.c, 1e-12);
    EXPECT_NEAR(p.a, p.lambda / xi, 1e-15);
    EXPECT_NEAR(p.lambda, q.lambda, 1e-15);
    EXPECT_NEAR(p.a, -q.a, 1e-15);
  }
}

TEST(Dispersion, DiffusionLimit)
{
  // large-c series: 1 - c Xi(c) = 1/(2c^2) - 3/(4c^4) + 15/(8c^6) - ...
  for (double c : {8.0, 20.0, 100.0}) {
    const double series = 0.5 / (c * c) - 0.75 / std::pow(c, 4) + 1.875 / std::pow(c, 6)
                          - 6.5625 / std::pow(c, 8);
    EXPECT_NEAR(decay_moment(c) / series, 1.0, 2e-5 * 64.0 / (c * c)) << "c=" << c;
    EXPECT_NEAR(decay_moment(c), 1.0 - c * xi_of_c_quadrature(c), 1e-12);
  }
  for (double xi : {0.01, 0.02, 0.05}) {
    const auto p = dispersion_point(xi);
    EXPECT_LT(std::abs(p.lambda / (xi * xi) + 0.5), 2e-3) << "xi=" << xi;
  }
  const auto p = dispersion_point(0.05);
  EXPECT_NEAR(p.c, 19.975031095053434, 1e-9);
  EXPECT_NEAR(p.lambda, -0.0012484452473282506, 1e-15);
}

TEST(Dispersion, OuterEdge)
{
  EXPECT_LT(dispersion_point(kSqrtPi - 1e-4).lambda, -0.98);
  EXPECT_NEAR(dispersion_point(kSqrtPi - 1e-4).lambda, -0.99991, 1e-5);
}

TEST(Dispersion, TransferFunctionIdentities)
{
  const auto g = build_grid(64);
  const double limit = quadrature_resolved_xi(g, 1e-10);
  EXPECT_NEAR(limit, 0.694764, 1e-5);
  for (int i = 1; i <= 200; ++i) {
    const auto p = dispersion_point(limit * i / 200.0);
    const auto k = transfer_function(p, g);
    cplx m0{}, m1{};
    for (std::size_t j = 0; j < g.size(); ++j) {
      m0 += g.weight(j) * k[j];
      m1 += g.weight(j) * g.node(j) * k[j];
    }
    EXPECT_LT(std::abs(m0 - 1.0), 1e-8);
    EXPECT_LT(std::abs(m1 - p.k()), 1e-8);
    EXPECT_LE(transfer_normalization_error(p, g), 1e-10 * (1 + 1e-6));
  }
  // K -> 1 on bounded velocity sets as xi -> 0
  const auto k = transfer_function(dispersion_point(0.01), g);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.node(j)) <= 5.0) {
      EXPECT_LT(std::abs(k[j] - 1.0), 0.05);
    }
}

TEST(Dispersion, ResolutionGrowsWithVelocityOrder)
{
  const double l64 = quadrature_resolved_xi(build_grid(64), 1e-10);
  const double l128 = quadrature_resolved_xi(build_grid(128), 1e-10);
  EXPECT_GT(l128, l64);
}

TEST(Dispersion, EigenpairIdentity)
{
  const auto g = build_grid(64);
  for (double xi : {0.05, 0.2, 0.4, 0.6, 0.69}) {
    const auto p = dispersion_point(xi);
    const auto k = transfer_function(p, g);
    const ModeOperator op(xi, g);
    const auto ak = op.apply(k);
    std::vector<cplx> r(k.size());
    for (std::size_t j = 0; j < k.size(); ++j)
      r[j] = ak[j] - p.lambda * k[j];
    EXPECT_LT(norm_phi(std::span<const cplx>(r), g), 1e-8);
    EXPECT_NEAR(gds_eigenpair(op).lambda.real(), p.lambda, 1e-8);
  }
}

TEST(DispersionTable, LookupAndOrdering)
{
  const std::vector<double> xis = {0.3, -0.1, 0.1, -0.3};
  const auto t = DispersionTable::build(xis);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.points().front().xi, -0.3);
  EXPECT_NE(t.find(0.1), nullptr);
  EXPECT_EQ(t.find(0.2), nullptr);
  EXPECT_THROW(t.at(0.2), OutOfSupportError);
  EXPECT_EQ(t.at(-0.3).c, -t.at(0.3).c);
  const std::vector<double> dup = {0.1, 0.1};
  EXPECT_ANY_THROW(DispersionTable::build(dup));
}
