#pragma once

// The five operator-facing commands.  Each takes a RunConfig, writes its
// artifacts under cfg.out_dir and returns a process exit code:
//   0  every check passed
//   1  at least one tolerance check failed
// Configuration problems are reported by throwing ConfigError (exit code 2
// in the command-line tool).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/collision.hpp"
#include "gds/config.hpp"
#include "gds/diagnostics.hpp"
#include "gds/direct_solver.hpp"
#include "gds/dispersion.hpp"
#include "gds/gds_builder.hpp"
#include "gds/io.hpp"

namespace gds {

namespace detail {

inline std::filesystem::path prepare_out(const RunConfig& cfg)
{
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
  return dir;
}

inline std::ofstream open_out(const std::filesystem::path& p)
{
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw ConfigError("cannot write '" + p.string() + "'");
  return os;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j)
{
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

inline nlohmann::json json_envelope(const RunConfig& cfg, const ResolvedRun& run, const std::string& format,
                                    const std::string& quantity)
{
  nlohmann::json j;
  j["format"] = format;
  j["artifact_version"] = std::string(kVersion);
  j["config_hash"] = run.hash;
  j["quantity"] = quantity;
  auto c = to_json(cfg);
  c.erase("out");
  j["config"] = c;
  j["resolved"] = {{"xi_max", fmt17(run.xi_max)},
                   {"resolved_limit", fmt17(run.resolved_limit)},
                   {"modes", run.grid.modes},
                   {"dxi", fmt17(run.grid.dxi())},
                   {"period", fmt17(run.period)},
                   {"x_points", run.x_points},
                   {"n_velocity", run.velocities.size()}};
  return j;
}

inline std::string time_tag(std::size_t k)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%02zu", k);
  return buf;
}

/// Collects reports, prints them and decides the exit code.
struct ReportSet
{
  std::vector<ResidualReport> reports;
  bool fail_fast = false;

  /// Returns false when fail_fast asks the caller to stop.
  bool add(ResidualReport r)
  {
    reports.push_back(std::move(r));
    return !(fail_fast && !reports.back().pass);
  }
  bool pass() const
  {
    return std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  }
  nlohmann::json json() const
  {
    auto a = nlohmann::json::array();
    for (const auto& r : reports)
      a.push_back(to_json(r));
    return a;
  }
  std::string text() const
  {
    std::string s;
    for (const auto& r : reports)
      s += to_text(r) + '\n';
    s += pass() ? "overall PASS\n" : "overall FAIL\n";
    return s;
  }
  void write(const std::filesystem::path& dir, const std::string& stem, nlohmann::json envelope,
             const std::string& hash) const
  {
    envelope["reports"] = json();
    envelope["pass"] = pass();
    write_json(dir / (stem + ".json"), envelope);
    {
      auto os = open_out(dir / (stem + ".txt"));
      os << "# gds-kinetics " << kVersion << "\n# config-hash " << hash << '\n' << text();
    }
    auto os = open_out(dir / (stem + ".csv"));
    write_header(os, {hash, "per-check residuals", {}}, "check,index,label,residual,tolerance,pass");
    for (const auto& r : reports)
      for (std::size_t i = 0; i < r.residuals.size(); ++i)
        os << '"' << r.name << "\"," << i << ",\"" << (i < r.labels.size() ? r.labels[i] : "") << "\","
           << fmt17(r.residuals[i]) << ',' << fmt17(r.tolerance) << ',' << (r.pass ? 1 : 0) << '\n';
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------

/// Dispersion table over every nonzero frequency of the configured grid.
inline int cmd_dispersion(const RunConfig& cfg, std::ostream& log = std::cout)
{
  const auto run = resolve(cfg);
  const auto dir = detail::prepare_out(cfg);
  const auto table = table_for_grid(run.grid);

  std::vector<double> band_res, odd_res, trip_res;
  for (const auto& p : table.points()) {
    band_res.push_back((p.lambda > -1.0 && p.lambda < 0.0) ? 0.0 : 1.0);
    trip_res.push_back(std::abs(xi_of_c(p.c) - p.xi));
    if (p.xi > 0.0) {
      const auto* q = table.find(-p.xi);
      odd_res.push_back(q ? std::abs(q->c + p.c) : 1.0);
    }
  }
  detail::ReportSet rs{{}, cfg.fail_fast};
  (void)(rs.add(make_report("lambda in (-1, 0)", band_res, 0.0)) &&
      rs.add(make_report("odd symmetry of c", odd_res, 0.0)) &&
      rs.add(make_report("roundtrip |Xi(C(xi)) - xi|", trip_res, cfg.tol.roundtrip)));

  {
    auto os = detail::open_out(dir / "dispersion.csv");
    write_table_csv(os, table, {run.hash, {}, {}});
  }
  auto meta = table_to_json(table, run.hash, run.velocities.size());
  auto env = detail::json_envelope(cfg, run, "gds-dispersion-run", "dispersion relation over the configured band");
  env["table"] = std::move(meta);
  env["reports"] = rs.json();
  env["pass"] = rs.pass();
  detail::write_json(dir / "dispersion.json", env);

  log << rs.text();
  return rs.pass() ? 0 : 1;
}

/// Generalized diffusion state at every configured time: spectral density,
/// physical density and flux, and the full distribution f(t, x, v).
inline int cmd_build_gds(const RunConfig& cfg, std::ostream& log = std::cout)
{
  const auto run = resolve(cfg);
  const auto dir = detail::prepare_out(cfg);
  const auto rho0 = make_band_limited_density(cfg.profile, run.xi_max, run.grid);
  const auto table = table_for_grid(run.grid);

  detail::ReportSet rs{{}, cfg.fail_fast};
  std::vector<double> realness, mass, pide, hermit;
  std::vector<std::string> labels;
  nlohmann::json snaps = nlohmann::json::array();
  bool go = rs.add(spectral_continuity_residual(rho0, table, cfg.tol.spectral_continuity));

  for (std::size_t k = 0; go && k < cfg.times.size(); ++k) {
    const double t = cfg.times[k];
    const auto rho = evolve_density(rho0, t, table);
    const auto state = lift_to_kinetic(rho, table, run.velocities);
    const auto snap = to_physical(state, run.x_points, run.period, true);
    const std::string tag = detail::time_tag(k);

    {
      auto os = detail::open_out(dir / ("spectrum_" + tag + ".csv"));
      write_spectrum_csv(os, rho, {run.hash, {}, {}});
    }
    {
      auto os = detail::open_out(dir / ("fields_" + tag + ".csv"));
      write_fields_csv(os, snap, {run.hash, {}, {}});
    }
    {
      auto os = detail::open_out(dir / ("kinetic_" + tag + ".csv"));
      write_kinetic_csv(os, snap, run.velocities, {run.hash, {}, {}});
    }
    detail::write_json(dir / ("kinetic_" + tag + ".json"),
                       kinetic_meta_json(snap, run.velocities, run.hash, "kinetic_" + tag + ".csv"));

    realness.push_back(snap.max_imag);
    mass.push_back(std::abs(total_mass(snap)));
    pide.push_back(pide_residual(state, table));
    hermit.push_back(rho.hermitian_defect());
    labels.push_back("t=" + fmt17(t));
    snaps.push_back({{"tag", tag},
                     {"time", fmt17(t)},
                     {"spectral_l2", fmt17(spectral_l2(rho))},
                     {"physical_l2", fmt17(physical_l2(snap))},
                     {"mass", fmt17(total_mass(snap))},
                     {"max_imag", fmt17(snap.max_imag)}});
  }
  if (go)
    go = rs.add(make_report("realness (max imaginary residue)", realness, cfg.tol.realness, labels));
  if (go)
    go = rs.add(make_report("hermitian symmetry", hermit, 0.0, labels));
  if (go)
    go = rs.add(make_report("mass |sum rho dx|", mass, cfg.tol.mass, labels));
  if (go)
    rs.add(make_report("kinetic equation residual", pide, cfg.tol.pide, labels));

  auto env = detail::json_envelope(cfg, run, "gds-build-summary", "generalized diffusion solution at requested times");
  env["snapshots"] = snaps;
  env["max_active_lambda"] = fmt17(max_active_lambda(rho0, table));
  rs.write(dir, "gds_summary", env, run.hash);
  log << rs.text();
  return rs.pass() ? 0 : 1;
}

/// Direct integration of each positive active frequency, recording rho^(t)
/// and the relative distance d(t) to the GDS ray.
inline int cmd_solve_direct(const RunConfig& cfg, std::ostream& log = std::cout)
{
  const auto run = resolve(cfg);
  const auto dir = detail::prepare_out(cfg);
  const auto rho0 = make_band_limited_density(cfg.profile, run.xi_max, run.grid);
  const auto table = table_for_grid(run.grid);
  const auto lifted = lift_to_kinetic(rho0, table, run.velocities);
  const double t_final = *std::max_element(cfg.times.begin(), cfg.times.end());
  if (!(t_final > 0.0))
    throw ConfigError("solve-direct: need a positive time");
  const double dt_out = cfg.dt > 0.0 ? cfg.dt : t_final / 100.0;

  const auto tdir = dir / "trajectories";
  std::filesystem::create_directories(tdir);
  nlohmann::json modes = nlohmann::json::array();
  std::vector<double> final_d;
  for (int m = 1; m <= run.grid.modes; ++m) {
    const std::size_t idx = run.grid.index(m);
    if (rho0.rho_hat[idx] == cplx{})
      continue;
    const auto& p = detail::required_point(table, run.grid, idx);
    const ModeOperator op(p.xi, run.velocities);
    const auto gds_row = lifted.row(idx);
    std::vector<cplx> f0(gds_row.begin(), gds_row.end());
    if (cfg.initial_state == "flat") {
      std::fill(f0.begin(), f0.end(), rho0.rho_hat[idx]);
    } else if (cfg.initial_state == "perturbed") {
      for (std::size_t j = 0; j < f0.size(); ++j)
        f0[j] += cfg.perturbation * rho0.rho_hat[idx] * run.velocities.node(j);
    }
    int stride = 1;
    double h = dt_out;
    if (cfg.method == Method::rk4) {
      stride = static_cast<int>(std::ceil(dt_out / (0.5 * op.rk4_max_dt())));
      h = dt_out / stride;
    }
    const auto traj = evolve_mode(f0, op, t_final, h, cfg.method, stride);
    const auto profile = transfer_function(p, run.velocities);
    const auto d = relaxation_distance(traj, run.velocities, profile);

    char name[32];
    std::snprintf(name, sizeof name, "mode_%04d.csv", m);
    {
      auto os = detail::open_out(tdir / name);
      write_trajectory_csv(os, traj, d, {run.hash, {}, {"initial state " + cfg.initial_state}});
    }
    final_d.push_back(d.back());
    modes.push_back({{"m", m},
                     {"xi", fmt17(p.xi)},
                     {"lambda", fmt17(p.lambda)},
                     {"file", std::string("trajectories/") + name},
                     {"d_initial", fmt17(d.front())},
                     {"d_final", fmt17(d.back())}});
  }
  auto env = detail::json_envelope(cfg, run, "gds-direct-summary", "direct mode integration trajectories");
  env["method"] = method_name(cfg.method);
  env["output_dt"] = fmt17(dt_out);
  env["modes"] = modes;
  detail::write_json(dir / "direct_summary.json", env);
  log << "integrated " << modes.size() << " modes to t=" << t_final << " (" << method_name(cfg.method)
      << ")\n";
  return 0;
}

/// GDS prediction against direct integration, plus the spectral continuity
/// residual.  Nonzero exit status if anything exceeds its tolerance.
inline int cmd_compare(const RunConfig& cfg, std::ostream& log = std::cout)
{
  const auto run = resolve(cfg);
  const auto dir = detail::prepare_out(cfg);
  const auto rho0 = make_band_limited_density(cfg.profile, run.xi_max, run.grid);
  const auto table = table_for_grid(run.grid);

  detail::ReportSet rs{{}, cfg.fail_fast};
  CompareConfig cc;
  cc.method = cfg.method;
  cc.lambda_shift = cfg.lambda_shift;
  cc.tolerance = cfg.tol.compare;
  (void)(rs.add(spectral_continuity_residual(rho0, table, cfg.tol.spectral_continuity)) &&
      rs.add(compare_gds_direct(rho0, cfg.times, table, run.velocities, cc)));

  auto env = detail::json_envelope(cfg, run, "gds-compare-report", "GDS prediction versus direct integration");
  rs.write(dir, "report", env, run.hash);
  log << rs.text();
  return rs.pass() ? 0 : 1;
}

/// Collision-operator and quadrature property suite.
inline int cmd_properties(const RunConfig& cfg, std::ostream& log = std::cout)
{
  const auto run = resolve(cfg);
  const auto dir = detail::prepare_out(cfg);
  const auto& vg = run.velocities;
  const auto& tol = cfg.tol;
  const std::size_t n = vg.size();

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<double> mass, adj, semidef, constant_gap;
  std::vector<cplx> fc(n);
  std::vector<double> f(n), g(n);
  for (int s = 0; s < cfg.samples; ++s) {
    for (auto& x : fc)
      x = {normal(rng), normal(rng)};
    for (std::size_t j = 0; j < n; ++j) {
      f[j] = normal(rng);
      g[j] = normal(rng);
    }
    mass.push_back(check_mass_conservation(fc, vg));
    adj.push_back(check_self_adjoint(f, g, vg));
    semidef.push_back(std::max(0.0, check_negative_semidefinite(f, vg)));
    // a non-constant input must give a strictly negative quadratic form
    constant_gap.push_back(check_negative_semidefinite(f, vg) < -1e-12 ? 0.0 : 1.0);
  }
  const std::vector<double> ones(n, 1.0);
  const double const_form = std::abs(check_negative_semidefinite(ones, vg));

  const auto spec = collision_spectrum(vg);
  std::vector<double> spec_res(n);
  for (std::size_t j = 0; j < n; ++j)
    spec_res[j] = std::abs(spec[static_cast<Eigen::Index>(j)] - (j + 1 == n ? 0.0 : -1.0));

  std::vector<double> moments;
  std::vector<std::string> mlab;
  double expected = 1.0;
  for (int k = 0; k <= 8; k += 2) {
    if (k > 0)
      expected *= (k - 1) / 2.0;
    moments.push_back(std::abs(moment(std::span<const double>(ones), k, vg) - expected));
    mlab.push_back("k=" + std::to_string(k));
  }

  std::vector<double> transfer;
  const auto table = table_for_grid(run.grid);
  for (const auto& p : table.points())
    transfer.push_back(transfer_normalization_error(p, vg));

  detail::ReportSet rs{{}, cfg.fail_fast};
  (void)(rs.add(make_report("collision mass conservation", mass, tol.collision)) &&
      rs.add(make_report("collision self-adjointness", adj, tol.collision)) &&
      rs.add(make_report("collision <f,Cf> <= 0", semidef, tol.collision)) &&
      rs.add(make_report("<f,Cf> = 0 only for constants", constant_gap, 0.0)) &&
      rs.add(make_report("<1,C1> = 0", {const_form}, tol.collision)) &&
      rs.add(make_report("collision norm ratio", {operator_norm_bound_check(cfg.samples, vg, cfg.seed)},
                         tol.norm_bound)) &&
      rs.add(make_report("collision spectrum {0, -1}", spec_res, tol.spectrum)) &&
      rs.add(make_report("gaussian moments", moments, 1e-12, mlab)) &&
      rs.add(make_report("transfer normalization", transfer, tol.transfer)));

  auto env = detail::json_envelope(cfg, run, "gds-properties-report", "collision operator and quadrature properties");
  std::vector<std::string> nodes, weights;
  for (std::size_t j = 0; j < n; ++j) {
    nodes.push_back(fmt17(vg.node(j)));
    weights.push_back(fmt17(vg.weight(j)));
  }
  env["velocity_nodes"] = nodes;
  env["velocity_weights"] = weights;
  rs.write(dir, "properties", env, run.hash);
  log << rs.text();
  return rs.pass() ? 0 : 1;
}

}  // namespace gds
