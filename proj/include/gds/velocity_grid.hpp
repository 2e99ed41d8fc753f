#pragma once

// Discrete velocity space.  Gauss-Hermite nodes for the weight exp(-v^2)
// with weights divided by sqrt(pi), so that
//
//     sum_j w_j g(v_j)  ~  int g(v) phi(v) dv,   phi(v) = exp(-v^2)/sqrt(pi),
//
// exactly for polynomials g of degree <= 2N-1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gds/errors.hpp"

namespace gds {

using cplx = std::complex<double>;

class VelocityGrid
{
 public:
  VelocityGrid(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes))
      , weights_(std::move(weights))
  {
    if (nodes_.size() != weights_.size() || nodes_.empty())
      throw ConfigError("VelocityGrid: nodes and weights must be non-empty and of equal length");
  }

  std::size_t order() const { return nodes_.size(); }
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double node(std::size_t j) const { return nodes_[j]; }
  double weight(std::size_t j) const { return weights_[j]; }
  double max_speed() const { return nodes_.back(); }

  /// sum_j w_j g(v_j)
  template <class F>
  auto integrate(F&& g) const
  {
    using R = decltype(g(0.0));
    R sum{};
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      sum += weights_[j] * g(nodes_[j]);
    return sum;
  }

  /// Sample g on the nodes.
  template <class F>
  auto sample(F&& g) const
  {
    using R = decltype(g(0.0));
    std::vector<R> out(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      out[j] = g(nodes_[j]);
    return out;
  }

  bool operator==(const VelocityGrid&) const = default;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline constexpr int kDefaultVelocityOrder = 64;

/// Gauss-Hermite rule of the given order, normalized to the measure phi(v)dv.
///
/// Nodes are seeded with the eigenvalues of the Jacobi matrix (Golub-Welsch),
/// then polished by Newton iteration on the orthonormal Hermite recurrence,
/// which also yields the weights.  Positive nodes are mirrored so the grid is
/// exactly antisymmetric.  Orders whose smallest weights underflow are
/// rejected.
inline VelocityGrid build_grid(int order)
{
  if (order < 2)
    throw ConfigError("build_grid: order must be >= 2, got " + std::to_string(order));

  const int n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k)
    sub[k - 1] = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (jacobi.info() != Eigen::Success)
    throw ConfigError("build_grid: Jacobi eigenvalue solve failed for order " + std::to_string(n));
  const Eigen::VectorXd& seeds = jacobi.eigenvalues();  // ascending

  const double pim4 = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  std::vector<double> nodes(n), weights(n);
  for (int i = n / 2; i < n; ++i) {
    double z = (2 * i + 1 == n) ? 0.0 : seeds[i];
    double pp = 0.0;
    for (int it = 0; it < 20; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      if (!std::isfinite(step))
        break;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z)))
        break;
    }
    if (2 * i + 1 == n)
      z = 0.0;
    nodes[i] = z;
    nodes[n - 1 - i] = -z;
    weights[i] = weights[n - 1 - i] = 2.0 / (pp * pp) * std::numbers::inv_sqrtpi;
  }

  for (int j = 0; j < n; ++j)
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j]) || !std::isfinite(nodes[j]))
      throw ConfigError("build_grid: order " + std::to_string(n)
                        + " loses positivity of the quadrature weights");
  for (int j = 1; j < n; ++j)
    if (!(nodes[j] > nodes[j - 1]))
      throw ConfigError("build_grid: nodes not strictly increasing at order " + std::to_string(n));
  return VelocityGrid(std::move(nodes), std::move(weights));
}

namespace detail {

inline void require_length(std::size_t got, const VelocityGrid& grid, const char* what)
{
  if (got != grid.size())
    throw GridMismatchError(std::string(what) + ": array length " + std::to_string(got)
                            + " does not match velocity grid order " + std::to_string(grid.size()));
}

template <class T>
T inner_product(std::span<const T> f, std::span<const T> g, const VelocityGrid& grid)
{
  require_length(f.size(), grid, "inner_product_phi");
  require_length(g.size(), grid, "inner_product_phi");
  T sum{};
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * f[j] * g[j];
  return sum;
}

}  // namespace detail

/// <f, g>_phi = sum_j w_j f_j g_j.  Bilinear: complex inputs are multiplied
/// without conjugation, matching the Fourier-mode algebra.  Use norm_phi for
/// the Hermitian norm.
inline double inner_product_phi(std::span<const double> f, std::span<const double> g,
                                const VelocityGrid& grid)
{
  return detail::inner_product(f, g, grid);
}

inline cplx inner_product_phi(std::span<const cplx> f, std::span<const cplx> g,
                              const VelocityGrid& grid)
{
  return detail::inner_product(f, g, grid);
}

/// <f, 1>_phi
inline cplx mean_phi(std::span<const cplx> f, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "mean_phi");
  cplx sum{};
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * f[j];
  return sum;
}

inline double mean_phi(std::span<const double> f, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "mean_phi");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * f[j];
  return sum;
}

/// sqrt(sum_j w_j |f_j|^2)
inline double norm_phi(std::span<const cplx> f, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "norm_phi");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * std::norm(f[j]);
  return std::sqrt(sum);
}

inline double norm_phi(std::span<const double> f, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "norm_phi");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * f[j] * f[j];
  return std::sqrt(sum);
}

/// sum_j w_j v_j^k f_j
inline cplx moment(std::span<const cplx> f, int k, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "moment");
  cplx sum{};
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * std::pow(grid.node(j), k) * f[j];
  return sum;
}

inline double moment(std::span<const double> f, int k, const VelocityGrid& grid)
{
  detail::require_length(f.size(), grid, "moment");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    sum += grid.weight(j) * std::pow(grid.node(j), k) * f[j];
  return sum;
}

}  // namespace gds
