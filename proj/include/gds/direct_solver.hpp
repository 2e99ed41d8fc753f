#pragma once

// Direct integration of the kinetic equation, one Fourier mode at a time.
//
// Fourier transforming  f_t + v f_x = -f + int phi f dv  in x gives, per
// frequency xi, the linear ODE  f^_t = A_xi f^  with
//
//     (A_xi f)_j = -(1 + i xi v_j) f_j + sum_k w_k f_k.
//
// Nothing here uses the dispersion relation: the dense operator is
// exponentiated (or stepped with RK4) as is, which makes this the
// independent check of the GDS construction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gds/errors.hpp"
#include "gds/velocity_grid.hpp"

namespace gds {

enum class Method
{
  rk4,
  exact_dense,
};

inline std::string method_name(Method m)
{
  return m == Method::rk4 ? "rk4" : "exact";
}

class ModeOperator
{
 public:
  ModeOperator(double xi, VelocityGrid grid)
      : xi_(xi)
      , grid_(std::move(grid))
  {
  }

  double xi() const { return xi_; }
  const VelocityGrid& grid() const { return grid_; }

  std::vector<cplx> apply(std::span<const cplx> f) const
  {
    const cplx mean = mean_phi(f, grid_);
    std::vector<cplx> out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j)
      out[j] = mean - cplx(1.0, xi_ * grid_.node(j)) * f[j];
    return out;
  }

  /// Diagonal -(1 + i xi v_j) plus the rank-one averaging part 1 w^T.
  Eigen::MatrixXcd dense() const
  {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k)
        a(i, k) = grid_.weight(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i)
      a(i, i) -= cplx(1.0, xi_ * grid_.node(static_cast<std::size_t>(i)));
    return a;
  }

  /// max_j |1 + i xi v_j|
  double stiffness() const
  {
    const double vmax = grid_.max_speed();
    return std::hypot(1.0, xi_ * vmax);
  }

  /// RK4 step-size limit 2.8 / max_j |1 + i xi v_j|.
  double rk4_max_dt() const { return 2.8 / stiffness(); }

 private:
  double xi_;
  VelocityGrid grid_;
};

namespace detail {

inline Eigen::VectorXcd to_eigen(std::span<const cplx> f)
{
  Eigen::VectorXcd out(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j)
    out[static_cast<Eigen::Index>(j)] = f[j];
  return out;
}

inline std::vector<cplx> from_eigen(const Eigen::VectorXcd& f)
{
  return {f.data(), f.data() + f.size()};
}

inline std::vector<cplx> rk4_step(std::span<const cplx> f, const ModeOperator& op, double dt)
{
  const std::size_t n = f.size();
  std::vector<cplx> tmp(n);
  const auto k1 = op.apply(f);
  for (std::size_t j = 0; j < n; ++j)
    tmp[j] = f[j] + 0.5 * dt * k1[j];
  const auto k2 = op.apply(tmp);
  for (std::size_t j = 0; j < n; ++j)
    tmp[j] = f[j] + 0.5 * dt * k2[j];
  const auto k3 = op.apply(tmp);
  for (std::size_t j = 0; j < n; ++j)
    tmp[j] = f[j] + dt * k3[j];
  const auto k4 = op.apply(tmp);
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = f[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return out;
}

inline void check_rk4_dt(const ModeOperator& op, double dt)
{
  if (dt > op.rk4_max_dt() * (1.0 + 1e-12)) {
    std::ostringstream s;
    s << "rk4: dt = " << dt << " exceeds the stability limit " << op.rk4_max_dt()
      << " at xi = " << op.xi();
    throw StabilityError(s.str());
  }
}

}  // namespace detail

/// exp(A_xi t) f0.
inline std::vector<cplx> propagate_exact(std::span<const cplx> f0, const ModeOperator& op, double t)
{
  detail::require_length(f0.size(), op.grid(), "propagate_exact");
  if (t == 0.0)
    return {f0.begin(), f0.end()};
  const Eigen::MatrixXcd prop = (op.dense() * t).exp();
  return detail::from_eigen(prop * detail::to_eigen(f0));
}

/// Advance one step of length dt.
inline std::vector<cplx> step(std::span<const cplx> f, const ModeOperator& op, double dt,
                              Method method)
{
  detail::require_length(f.size(), op.grid(), "step");
  if (!(dt > 0.0))
    throw ConfigError("step: dt must be positive");
  if (method == Method::rk4) {
    detail::check_rk4_dt(op, dt);
    return detail::rk4_step(f, op, dt);
  }
  return propagate_exact(f, op, dt);
}

struct Trajectory
{
  double xi = 0.0;
  std::vector<double> times;
  std::vector<std::vector<cplx>> states;
  std::vector<cplx> densities;  ///< <f^(t), 1>_phi at each recorded time
};

/// Integrate from 0 to t_final in steps of dt (the last one shortened to land
/// on t_final), recording every `stride`-th step plus the initial and final
/// states.
inline Trajectory evolve_mode(std::span<const cplx> f0, const ModeOperator& op, double t_final,
                              double dt, Method method, int stride = 1)
{
  detail::require_length(f0.size(), op.grid(), "evolve_mode");
  if (!(dt > 0.0) || !(t_final >= 0.0) || stride < 1)
    throw ConfigError("evolve_mode: need dt > 0, t_final >= 0, stride >= 1");
  if (method == Method::rk4)
    detail::check_rk4_dt(op, dt);

  Trajectory traj;
  traj.xi = op.xi();
  std::vector<cplx> f(f0.begin(), f0.end());
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.densities.push_back(mean_phi(std::span<const cplx>(f), op.grid()));
    traj.states.push_back(f);
  };
  record(0.0);

  const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  Eigen::MatrixXcd prop;
  if (method == Method::exact_dense && n_steps > 0)
    prop = (op.dense() * dt).exp();

  for (long s = 1; s <= n_steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * dt;
    const double h = (s == n_steps) ? t_final - t_prev : dt;
    if (method == Method::rk4) {
      f = detail::rk4_step(f, op, h);
    } else if (std::abs(h - dt) <= 1e-12 * dt) {
      f = detail::from_eigen(prop * detail::to_eigen(f));
    } else {
      f = propagate_exact(f, op, h);
    }
    if (s % stride == 0 || s == n_steps)
      record(s == n_steps ? t_final : static_cast<double>(s) * dt);
  }
  return traj;
}

struct ModeEigenpair
{
  cplx lambda;
  std::vector<cplx> vector;
  double density_weight = 0.0;  ///< |<u, 1>_phi| / ||u||_phi
};

/// Eigenpair of the dense A_xi whose eigenvalue lies in (-1, 0) with the
/// largest real part; this is the discrete counterpart of the GDS mode.
inline ModeEigenpair gds_eigenpair(const ModeOperator& op)
{
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.dense(), true);
  if (solver.info() != Eigen::Success)
    throw Error("gds_eigenpair: eigen decomposition failed");
  const auto& ev = solver.eigenvalues();
  Eigen::Index best = -1;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const cplx z = ev[i];
    if (z.real() <= -1.0 || z.real() >= 0.0 || std::abs(z.imag()) > 1e-6)
      continue;
    if (best < 0 || z.real() > ev[best].real())
      best = i;
  }
  if (best < 0) {
    std::ostringstream s;
    s << "gds_eigenpair: no real eigenvalue in (-1, 0) at xi = " << op.xi();
    throw Error(s.str());
  }
  ModeEigenpair out;
  out.lambda = ev[best];
  out.vector = detail::from_eigen(solver.eigenvectors().col(best));
  const double nrm = norm_phi(std::span<const cplx>(out.vector), op.grid());
  out.density_weight = std::abs(mean_phi(std::span<const cplx>(out.vector), op.grid())) / nrm;
  return out;
}

/// d(t) = ||f^(t) - rho^(t) K||_phi / ||f^(t)||_phi along the exact
/// evolution from f0, with rho^(t) = <f^(t), 1>_phi and K the GDS profile
/// (transfer function) at this frequency.
inline std::vector<double> relaxation_distance(std::span<const cplx> f0, const ModeOperator& op,
                                               std::span<const cplx> gds_profile,
                                               std::span<const double> times)
{
  detail::require_length(gds_profile.size(), op.grid(), "relaxation_distance");
  std::vector<double> out;
  out.reserve(times.size());
  std::vector<cplx> diff(f0.size());
  for (double t : times) {
    const auto f = propagate_exact(f0, op, t);
    const double nf = norm_phi(std::span<const cplx>(f), op.grid());
    if (nf == 0.0)
      throw Error("relaxation_distance: state has zero norm");
    const cplx rho = mean_phi(std::span<const cplx>(f), op.grid());
    for (std::size_t j = 0; j < f.size(); ++j)
      diff[j] = f[j] - rho * gds_profile[j];
    out.push_back(norm_phi(std::span<const cplx>(diff), op.grid()) / nf);
  }
  return out;
}

/// Same distance evaluated on the states already stored in a trajectory.
inline std::vector<double> relaxation_distance(const Trajectory& traj, const VelocityGrid& grid,
                                               std::span<const cplx> gds_profile)
{
  detail::require_length(gds_profile.size(), grid, "relaxation_distance");
  std::vector<double> out;
  out.reserve(traj.states.size());
  std::vector<cplx> diff(gds_profile.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& f = traj.states[k];
    const double nf = norm_phi(std::span<const cplx>(f), grid);
    if (nf == 0.0)
      throw Error("relaxation_distance: state has zero norm");
    for (std::size_t j = 0; j < f.size(); ++j)
      diff[j] = f[j] - traj.densities[k] * gds_profile[j];
    out.push_back(norm_phi(std::span<const cplx>(diff), grid) / nf);
  }
  return out;
}

}  // namespace gds
