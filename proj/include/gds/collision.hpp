#pragma once

// Linear relaxation collision operator  C(f) = -f + <f, 1>_phi  on a
// velocity grid, plus executable checks of its structural properties:
// mass conservation, kernel = constants, self-adjointness, negative
// semi-definiteness and the operator-norm bound ||C|| <= 2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gds/velocity_grid.hpp"

namespace gds {

namespace detail {

template <class T>
std::vector<T> collide(std::span<const T> f, const VelocityGrid& grid)
{
  require_length(f.size(), grid, "apply_collision");
  T mean{};
  for (std::size_t j = 0; j < f.size(); ++j)
    mean += grid.weight(j) * f[j];
  std::vector<T> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = mean - f[j];
  return out;
}

}  // namespace detail

/// g_j = -f_j + sum_k w_k f_k
inline std::vector<cplx> apply_collision(std::span<const cplx> f, const VelocityGrid& grid)
{
  return detail::collide(f, grid);
}

inline std::vector<double> apply_collision(std::span<const double> f, const VelocityGrid& grid)
{
  return detail::collide(f, grid);
}

/// |<C f, 1>_phi|
inline double check_mass_conservation(std::span<const cplx> f, const VelocityGrid& grid)
{
  const auto cf = apply_collision(f, grid);
  return std::abs(mean_phi(std::span<const cplx>(cf), grid));
}

/// |<C f, g>_phi - <f, C g>_phi| for real-valued f, g.
inline double check_self_adjoint(std::span<const double> f, std::span<const double> g,
                                 const VelocityGrid& grid)
{
  const auto cf = apply_collision(f, grid);
  const auto cg = apply_collision(g, grid);
  return std::abs(inner_product_phi(cf, g, grid) - inner_product_phi(f, cg, grid));
}

/// <f, C f>_phi for real-valued f; never positive beyond roundoff.
inline double check_negative_semidefinite(std::span<const double> f, const VelocityGrid& grid)
{
  const auto cf = apply_collision(f, grid);
  return inner_product_phi(f, cf, grid);
}

/// True when max_j f_j - min_j f_j <= spread.
inline bool is_constant(std::span<const double> f, double spread = 1e-10)
{
  if (f.empty())
    return true;
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  return *hi - *lo <= spread;
}

/// ||C f||_phi / ||f||_phi   (0 for f = 0)
inline double collision_norm_ratio(std::span<const cplx> f, const VelocityGrid& grid)
{
  const double nf = norm_phi(f, grid);
  if (nf == 0.0)
    return 0.0;
  const auto cf = apply_collision(f, grid);
  return norm_phi(std::span<const cplx>(cf), grid) / nf;
}

/// Maximum of ||C f|| / ||f|| over `samples` random complex f with
/// independent standard-normal real and imaginary parts.
inline double operator_norm_bound_check(int samples, const VelocityGrid& grid,
                                        std::uint64_t seed = 1)
{
  if (samples < 1)
    throw ConfigError("operator_norm_bound_check: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cplx> f(grid.size());
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (auto& x : f)
      x = {normal(rng), normal(rng)};
    worst = std::max(worst, collision_norm_ratio(f, grid));
  }
  return worst;
}

/// Dense matrix of C acting on nodal values: -I + 1 w^T.
inline Eigen::MatrixXd collision_matrix(const VelocityGrid& grid)
{
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd m = -Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      m(i, k) += grid.weight(static_cast<std::size_t>(k));
  return m;
}

/// Eigenvalues of C, ascending.  C is similar to the symmetric matrix
/// W^{1/2} C W^{-1/2} = -I + s s^T with s_j = sqrt(w_j), which is what gets
/// diagonalized.
inline Eigen::VectorXd collision_spectrum(const VelocityGrid& grid)
{
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd s(n);
  for (Eigen::Index j = 0; j < n; ++j)
    s[j] = std::sqrt(grid.weight(static_cast<std::size_t>(j)));
  const Eigen::MatrixXd sym = -Eigen::MatrixXd::Identity(n, n) + s * s.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace gds
