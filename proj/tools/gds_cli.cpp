// Command-line front end.  Flags override fields of the --config document,
// which in turn override the built-in defaults.
//
// Exit codes: 0 pass, 1 tolerance failure, 2 configuration error,
// 3 unexpected internal error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gds/commands.hpp"

namespace {

std::vector<double> parse_times(const std::string& s)
{
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(gds::parse_double(item));
    } catch (const gds::Error&) {
      throw gds::ConfigError("--times: cannot parse '" + item + "'");
    }
  }
  if (out.empty())
    throw gds::ConfigError("--times: empty list");
  return out;
}

struct Flags
{
  std::string config;
  std::optional<std::string> out;
  std::optional<int> n_velocity;
  std::optional<double> xi_max;
  std::optional<int> modes;
  std::optional<std::string> times;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  bool fail_fast = false;
  std::optional<double> lambda_shift;
  std::optional<std::string> initial_state;
  std::optional<std::size_t> x_points;
  std::optional<double> dt;
};

gds::RunConfig assemble(const Flags& f)
{
  gds::RunConfig c;
  if (!f.config.empty())
    c = gds::load_config(f.config, c);
  if (f.out)
    c.out_dir = *f.out;
  if (f.n_velocity)
    c.n_velocity = *f.n_velocity;
  if (f.xi_max)
    c.xi_max = *f.xi_max;
  if (f.modes)
    c.modes = *f.modes;
  if (f.times)
    c.times = parse_times(*f.times);
  if (f.method)
    c.method = gds::parse_method(*f.method);
  if (f.seed)
    c.seed = *f.seed;
  if (f.fail_fast)
    c.fail_fast = true;
  if (f.lambda_shift)
    c.lambda_shift = *f.lambda_shift;
  if (f.initial_state)
    c.initial_state = *f.initial_state;
  if (f.x_points)
    c.x_points = *f.x_points;
  if (f.dt)
    c.dt = *f.dt;
  return c;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Generalized diffusion solutions of a linear BGK-type kinetic equation"};
  app.require_subcommand(1);
  Flags flags;

  app.add_option("--config", flags.config, "JSON configuration document");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--n-velocity", flags.n_velocity, "Gauss-Hermite order N");
  app.add_option("--xi-max", flags.xi_max, "band limit, must lie in (0, sqrt(pi))");
  app.add_option("--modes", flags.modes, "number of positive frequencies");
  app.add_option("--times", flags.times, "comma-separated output times");
  app.add_option("--method", flags.method, "direct integrator: rk4 | exact");
  app.add_option("--seed", flags.seed, "seed for the random property draws");
  app.add_flag("--fail-fast", flags.fail_fast, "stop at the first failing check");
  app.add_option("--lambda-shift", flags.lambda_shift,
                 "add this to lambda on the GDS side of compare (sensitivity probe)");
  app.add_option("--initial-state", flags.initial_state, "solve-direct start: gds | flat | perturbed");
  app.add_option("--x-points", flags.x_points, "physical grid size (power of two)");
  app.add_option("--dt", flags.dt, "solve-direct output interval");

  auto* dispersion = app.add_subcommand("dispersion", "tabulate the dispersion relation");
  auto* build = app.add_subcommand("build-gds", "evaluate the generalized diffusion solution");
  auto* direct = app.add_subcommand("solve-direct", "integrate each mode of the kinetic equation directly");
  auto* compare = app.add_subcommand("compare", "GDS prediction against direct integration");
  auto* properties = app.add_subcommand("properties", "collision operator and quadrature properties");
  for (auto* sub : {dispersion, build, direct, compare, properties})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto cfg = assemble(flags);
    if (*dispersion)
      return gds::cmd_dispersion(cfg);
    if (*build)
      return gds::cmd_build_gds(cfg);
    if (*direct)
      return gds::cmd_solve_direct(cfg);
    if (*compare)
      return gds::cmd_compare(cfg);
    return gds::cmd_properties(cfg);
  } catch (const gds::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const gds::OutOfSupportError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const gds::GridMismatchError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
