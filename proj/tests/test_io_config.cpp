#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gds/config.hpp"
#include "gds/io.hpp"

using namespace gds;

TEST(Io, Fmt17RoundTrips)
{
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567})
    EXPECT_EQ(parse_double(fmt17(x)), x);
  EXPECT_THROW(parse_double("1.0x"), Error);
}

TEST(Io, TableCsvRoundTripIsBitExact)
{
  const auto table = table_for_grid(SpectralGrid{1.2, 40});
  std::stringstream ss;
  write_table_csv(ss, table, {"abc", {}, {}});
  const auto back = read_table_csv(ss);
  ASSERT_EQ(back.size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    EXPECT_EQ(back.points()[i].xi, table.points()[i].xi);
    EXPECT_EQ(back.points()[i].c, table.points()[i].c);
    EXPECT_EQ(back.points()[i].b, table.points()[i].b);
    EXPECT_EQ(back.points()[i].lambda, table.points()[i].lambda);
  }
}

TEST(Io, TableJsonRoundTripIsBitExact)
{
  const auto table = table_for_grid(SpectralGrid{0.9, 25});
  const auto j = table_to_json(table, "h", 64);
  const auto back = table_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(back == table);
  auto bad = j;
  bad["schema_version"] = 99;
  EXPECT_THROW(table_from_json(bad), Error);
}

TEST(Io, HeaderCarriesVersionAndHash)
{
  const SpectralGrid g{0.5, 4};
  const auto rho = make_band_limited_density(HannBand{}, 0.5, g);
  std::stringstream ss;
  write_spectrum_csv(ss, rho, {"0123456789abcdef", {}, {}});
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "# gds-kinetics " + std::string(kVersion));
  std::getline(ss, line);
  EXPECT_EQ(line, "# config-hash 0123456789abcdef");
  ss.seekg(0);
  const auto back = read_spectrum_csv(ss);
  EXPECT_EQ(back, rho.rho_hat);
}

TEST(Config, HashIsDeterministicAndSensitive)
{
  RunConfig a;
  RunConfig b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.out_dir = "elsewhere";
  b.fail_fast = true;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, JsonOverlayAndRoundTrip)
{
  RunConfig c;
  c.modes = 40;
  c.xi_max = 0.5;
  c.profile = SingleMode{0.25, 2.0};
  c.times = {1.0, 3.0};
  c.method = Method::rk4;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));

  const auto partial = config_from_json(nlohmann::json{{"modes", 7}}, c);
  EXPECT_EQ(partial.modes, 7);
  EXPECT_EQ(partial.times, c.times);

  EXPECT_THROW(config_from_json(nlohmann::json{{"modes", "many"}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"method", "euler"}}), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, Validation)
{
  RunConfig c;
  c.modes = 0;
  EXPECT_THROW(resolve(c), ConfigError);
  c = {};
  c.xi_max = kSqrtPi;
  EXPECT_THROW(resolve(c), ConfigError);
  c = {};
  c.n_velocity = 1;
  EXPECT_THROW(resolve(c), ConfigError);
  c = {};
  c.x_points = 100;
  EXPECT_THROW(resolve(c), ConfigError);
  c = {};
  c.xi_max = 0.5;
  c.period = 1.0;
  EXPECT_THROW(resolve(c), ConfigError);
}

TEST(Config, DefaultResolution)
{
  const auto r = resolve(RunConfig{});
  EXPECT_NEAR(r.xi_max, 0.694764, 1e-5);
  EXPECT_LT(r.xi_max, 0.95 * kSqrtPi);
  EXPECT_EQ(r.x_points, 512u);
  EXPECT_NEAR(r.period, 2 * std::numbers::pi * 128 / r.xi_max, 1e-9);
  RunConfig explicit_band;
  explicit_band.xi_max = 1.2;
  EXPECT_EQ(resolve(explicit_band).xi_max, 1.2);
}
