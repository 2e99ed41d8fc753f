#pragma once

// Run configuration shared by the command-line tool and the test suites.
// Precedence: built-in defaults < JSON config document < command-line flags.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/direct_solver.hpp"
#include "gds/dispersion.hpp"
#include "gds/errors.hpp"
#include "gds/gds_builder.hpp"
#include "gds/io.hpp"
#include "gds/velocity_grid.hpp"

namespace gds {

/// Every pass/fail threshold used by the commands, in one place.
struct Tolerances
{
  double roundtrip = 1e-11;            ///< |Xi(C(xi)) - xi|
  double transfer = 1e-8;              ///< transfer-function identities
  double band_resolution = 1e-10;      ///< defines the quadrature-resolved band
  double compare = 1e-6;               ///< GDS vs direct relative density error
  double spectral_continuity = 1e-12;  ///< |lambda rho^ + i xi k rho^|
  double pide = 1e-8;                  ///< kinetic-equation residual of GDS states
  double realness = 1e-10;             ///< imaginary residue after inverse transforms
  double mass = 1e-10;                 ///< |sum rho dx| for DC-free data
  double collision = 1e-12;            ///< collision-operator identities
  double spectrum = 1e-10;             ///< collision eigenvalues
  double norm_bound = 2.0 + 1e-9;      ///< ||C f|| / ||f||

  bool operator==(const Tolerances&) const = default;
};

inline constexpr double kDefaultBandFraction = 0.95;

struct RunConfig
{
  int n_velocity = kDefaultVelocityOrder;
  std::optional<double> xi_max;  ///< unset: min(0.95 sqrt(pi), quadrature-resolved limit)
  int modes = 128;
  std::optional<double> period;  ///< must equal 2 pi modes / xi_max when given
  Profile profile = GaussianBump{};
  std::vector<double> times = {0.5, 1.0, 2.0, 5.0};
  Method method = Method::exact_dense;
  Tolerances tol;
  std::string out_dir = "gds-out";
  std::uint64_t seed = 1;
  bool fail_fast = false;
  double lambda_shift = 0.0;          ///< corrupts lambda on the GDS side of compare
  std::string initial_state = "gds";  ///< solve-direct: gds | flat | perturbed
  double perturbation = 0.1;
  std::size_t x_points = 0;  ///< 0: smallest power of two >= 2 (modes + 1)
  double dt = 0.0;           ///< solve-direct output/step size; 0: automatic
  int samples = 1000;        ///< random draws for the property suite
};

inline Method parse_method(const std::string& s)
{
  if (s == "rk4")
    return Method::rk4;
  if (s == "exact" || s == "exact-dense")
    return Method::exact_dense;
  throw ConfigError("unknown method '" + s + "' (expected rk4 | exact)");
}

inline nlohmann::json profile_to_json(const Profile& p)
{
  nlohmann::json j;
  j["name"] = profile_name(p);
  if (const auto* g = std::get_if<GaussianBump>(&p)) {
    j["sigma"] = g->sigma;
    j["center"] = g->center;
    j["amplitude"] = g->amplitude;
  } else if (const auto* h = std::get_if<HannBand>(&p)) {
    j["amplitude"] = h->amplitude;
  } else {
    const auto& s = std::get<SingleMode>(p);
    j["xi0"] = s.xi0;
    j["amplitude"] = s.amplitude;
  }
  return j;
}

inline Profile profile_from_json(const nlohmann::json& j)
{
  const std::string name = j.value("name", "gaussian-bump");
  if (name == "gaussian-bump") {
    GaussianBump g;
    g.sigma = j.value("sigma", g.sigma);
    g.center = j.value("center", g.center);
    g.amplitude = j.value("amplitude", g.amplitude);
    if (!(g.sigma > 0.0))
      throw ConfigError("profile: gaussian-bump sigma must be positive");
    return g;
  }
  if (name == "hann-band")
    return HannBand{j.value("amplitude", 1.0)};
  if (name == "single-mode")
    return SingleMode{j.value("xi0", 0.5), j.value("amplitude", 1.0)};
  throw ConfigError("profile: unknown name '" + name + "'");
}

inline nlohmann::json tolerances_to_json(const Tolerances& t)
{
  return {{"roundtrip", t.roundtrip},
          {"transfer", t.transfer},
          {"band_resolution", t.band_resolution},
          {"compare", t.compare},
          {"spectral_continuity", t.spectral_continuity},
          {"pide", t.pide},
          {"realness", t.realness},
          {"mass", t.mass},
          {"collision", t.collision},
          {"spectrum", t.spectrum},
          {"norm_bound", t.norm_bound}};
}

inline Tolerances tolerances_from_json(const nlohmann::json& j, Tolerances t = {})
{
  t.roundtrip = j.value("roundtrip", t.roundtrip);
  t.transfer = j.value("transfer", t.transfer);
  t.band_resolution = j.value("band_resolution", t.band_resolution);
  t.compare = j.value("compare", t.compare);
  t.spectral_continuity = j.value("spectral_continuity", t.spectral_continuity);
  t.pide = j.value("pide", t.pide);
  t.realness = j.value("realness", t.realness);
  t.mass = j.value("mass", t.mass);
  t.collision = j.value("collision", t.collision);
  t.spectrum = j.value("spectrum", t.spectrum);
  t.norm_bound = j.value("norm_bound", t.norm_bound);
  return t;
}

/// Canonical JSON form (nlohmann::json objects keep keys sorted).
inline nlohmann::json to_json(const RunConfig& c)
{
  nlohmann::json j;
  j["n_velocity"] = c.n_velocity;
  j["xi_max"] = c.xi_max ? nlohmann::json(*c.xi_max) : nlohmann::json("auto");
  j["modes"] = c.modes;
  j["period"] = c.period ? nlohmann::json(*c.period) : nlohmann::json(nullptr);
  j["profile"] = profile_to_json(c.profile);
  j["times"] = c.times;
  j["method"] = method_name(c.method);
  j["tolerances"] = tolerances_to_json(c.tol);
  j["out"] = c.out_dir;
  j["seed"] = c.seed;
  j["fail_fast"] = c.fail_fast;
  j["lambda_shift"] = c.lambda_shift;
  j["initial_state"] = c.initial_state;
  j["perturbation"] = c.perturbation;
  j["x_points"] = c.x_points;
  j["dt"] = c.dt;
  j["samples"] = c.samples;
  return j;
}

/// Overlay the fields present in `j` onto `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig c = {})
{
  try {
    c.n_velocity = j.value("n_velocity", c.n_velocity);
    if (j.contains("xi_max")) {
      const auto& v = j.at("xi_max");
      if (v.is_string() && v.get<std::string>() == "auto")
        c.xi_max.reset();
      else
        c.xi_max = v.get<double>();
    }
    c.modes = j.value("modes", c.modes);
    if (j.contains("period")) {
      if (j.at("period").is_null())
        c.period.reset();
      else
        c.period = j.at("period").get<double>();
    }
    if (j.contains("profile"))
      c.profile = profile_from_json(j.at("profile"));
    if (j.contains("times"))
      c.times = j.at("times").get<std::vector<double>>();
    if (j.contains("method"))
      c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("tolerances"))
      c.tol = tolerances_from_json(j.at("tolerances"), c.tol);
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.fail_fast = j.value("fail_fast", c.fail_fast);
    c.lambda_shift = j.value("lambda_shift", c.lambda_shift);
    c.initial_state = j.value("initial_state", c.initial_state);
    c.perturbation = j.value("perturbation", c.perturbation);
    c.x_points = j.value("x_points", c.x_points);
    c.dt = j.value("dt", c.dt);
    c.samples = j.value("samples", c.samples);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {})
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

/// Hash of the fields that influence numerical output (not out_dir or fail_fast).
inline std::string config_hash(const RunConfig& c)
{
  auto j = to_json(c);
  j.erase("out");
  j.erase("fail_fast");
  return hex64(fnv1a64(j.dump()));
}

inline void validate(const RunConfig& c)
{
  if (c.n_velocity < 2)
    throw ConfigError("config: n_velocity must be >= 2");
  if (c.modes < 1)
    throw ConfigError("config: empty band (modes must be >= 1)");
  if (c.xi_max && !(*c.xi_max > 0.0 && *c.xi_max < kSqrtPi))
    throw ConfigError("config: xi_max must lie in (0, sqrt(pi)); an empty or unsupported band was given");
  if (c.times.empty())
    throw ConfigError("config: empty time list");
  for (double t : c.times)
    if (!std::isfinite(t))
      throw ConfigError("config: non-finite time");
  if (c.x_points != 0 && (c.x_points & (c.x_points - 1)) != 0)
    throw ConfigError("config: x_points must be a power of two");
  if (c.initial_state != "gds" && c.initial_state != "flat" && c.initial_state != "perturbed")
    throw ConfigError("config: initial_state must be gds | flat | perturbed");
  if (c.dt < 0.0)
    throw ConfigError("config: dt must be >= 0");
  if (c.samples < 1)
    throw ConfigError("config: samples must be >= 1");
}

/// Everything a command needs, derived once from a validated RunConfig.
struct ResolvedRun
{
  VelocityGrid velocities;
  double xi_max = 0.0;
  double resolved_limit = 0.0;  ///< quadrature-resolved band edge for this velocity grid
  SpectralGrid grid;
  double period = 0.0;
  std::size_t x_points = 0;
  std::string hash;
};

inline double auto_xi_max(const VelocityGrid& vg, const Tolerances& tol)
{
  return std::min(kDefaultBandFraction * kSqrtPi, quadrature_resolved_xi(vg, tol.band_resolution));
}

inline ResolvedRun resolve(const RunConfig& c)
{
  validate(c);
  ResolvedRun r{build_grid(c.n_velocity), 0.0, 0.0, {}, 0.0, 0, config_hash(c)};
  r.resolved_limit = quadrature_resolved_xi(r.velocities, c.tol.band_resolution);
  r.xi_max = c.xi_max.value_or(std::min(kDefaultBandFraction * kSqrtPi, r.resolved_limit));
  r.grid = SpectralGrid{r.xi_max, c.modes};
  r.period = r.grid.period();
  if (c.period && !(std::abs(*c.period - r.period) <= 1e-12 * r.period))
    throw ConfigError("config: period " + fmt17(*c.period) + " inconsistent with 2 pi modes / xi_max = "
                      + fmt17(r.period));
  r.x_points = c.x_points;
  if (r.x_points == 0) {
    r.x_points = 1;
    while (r.x_points < 2 * (static_cast<std::size_t>(c.modes) + 1))
      r.x_points <<= 1;
  }
  return r;
}

}  // namespace gds
