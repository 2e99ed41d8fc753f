#pragma once

// Plain-text serialization.  Numbers are written with 17 significant digits,
// which round-trips every double exactly.  CSV files start with '#' comment
// lines (version, config hash, quantity) followed by one column-name row.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gds/direct_solver.hpp"
#include "gds/dispersion.hpp"
#include "gds/errors.hpp"
#include "gds/gds_builder.hpp"

namespace gds {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr int kTableSchemaVersion = 1;

inline std::string fmt17(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(std::string_view s)
{
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0')
    throw Error("parse_double: cannot parse '" + tmp + "'");
  return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct FileHeader
{
  std::string config_hash = "none";
  std::string quantity;
  std::vector<std::string> notes;
};

inline void write_header(std::ostream& os, const FileHeader& h, std::string_view columns)
{
  os << "# gds-kinetics " << kVersion << '\n';
  os << "# config-hash " << h.config_hash << '\n';
  if (!h.quantity.empty())
    os << "# quantity: " << h.quantity << '\n';
  for (const auto& n : h.notes)
    os << "# " << n << '\n';
  os << columns << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  return out;
}

/// Data rows of a CSV produced by write_header (comments and the column row skipped).
inline std::vector<std::vector<std::string>> read_rows(std::istream& is, std::string_view columns)
{
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool seen_columns = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!seen_columns) {
      if (line != columns)
        throw Error("read_csv: expected columns '" + std::string(columns) + "', got '" + line + "'");
      seen_columns = true;
      continue;
    }
    rows.push_back(split_csv(line));
  }
  if (!seen_columns)
    throw Error("read_csv: missing column row '" + std::string(columns) + "'");
  return rows;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// dispersion table

inline constexpr std::string_view kTableColumns = "xi,c,b,lambda";

inline void write_table_csv(std::ostream& os, const DispersionTable& table, FileHeader h = {})
{
  if (h.quantity.empty())
    h.quantity = "dispersion relation xi = Xi(c); b = xi c; lambda = b - 1 (decay rate)";
  write_header(os, h, kTableColumns);
  for (const auto& p : table.points())
    os << fmt17(p.xi) << ',' << fmt17(p.c) << ',' << fmt17(p.b) << ',' << fmt17(p.lambda) << '\n';
}

inline DispersionTable read_table_csv(std::istream& is, const DispersionOptions& opt = {})
{
  std::vector<DispersionPoint> pts;
  for (const auto& row : detail::read_rows(is, kTableColumns)) {
    if (row.size() != 4)
      throw Error("read_table_csv: expected 4 columns");
    DispersionPoint p;
    p.xi = parse_double(row[0]);
    p.c = parse_double(row[1]);
    p.b = parse_double(row[2]);
    p.lambda = parse_double(row[3]);
    p.a = p.lambda / p.xi;
    p.edge = is_edge(p.xi, opt);
    pts.push_back(p);
  }
  return DispersionTable(std::move(pts), opt);
}

inline nlohmann::json table_to_json(const DispersionTable& table, const std::string& config_hash = "none",
                                    std::size_t velocity_order = 0)
{
  nlohmann::json j;
  j["format"] = "gds-dispersion-table";
  j["schema_version"] = kTableSchemaVersion;
  j["artifact_version"] = std::string(kVersion);
  j["config_hash"] = config_hash;
  const auto& o = table.options();
  j["tolerances"] = {{"xi_min", fmt17(o.xi_min)},
                     {"edge_eps", fmt17(o.edge_eps)},
                     {"residual_tol", fmt17(o.residual_tol)},
                     {"edge_widening", fmt17(o.edge_widening)}};
  j["velocity_order"] = velocity_order;
  auto& rows = j["points"] = nlohmann::json::array();
  for (const auto& p : table.points())
    rows.push_back({{"xi", fmt17(p.xi)},
                    {"c", fmt17(p.c)},
                    {"b", fmt17(p.b)},
                    {"a", fmt17(p.a)},
                    {"lambda", fmt17(p.lambda)},
                    {"edge", p.edge}});
  return j;
}

inline DispersionTable table_from_json(const nlohmann::json& j)
{
  if (j.value("format", "") != "gds-dispersion-table")
    throw Error("table_from_json: not a dispersion table document");
  if (j.value("schema_version", 0) != kTableSchemaVersion)
    throw Error("table_from_json: unsupported schema version");
  auto num = [](const nlohmann::json& v) { return parse_double(v.get<std::string>()); };
  DispersionOptions o;
  const auto& t = j.at("tolerances");
  o.xi_min = num(t.at("xi_min"));
  o.edge_eps = num(t.at("edge_eps"));
  o.residual_tol = num(t.at("residual_tol"));
  o.edge_widening = num(t.at("edge_widening"));
  std::vector<DispersionPoint> pts;
  for (const auto& r : j.at("points")) {
    DispersionPoint p;
    p.xi = num(r.at("xi"));
    p.c = num(r.at("c"));
    p.b = num(r.at("b"));
    p.a = num(r.at("a"));
    p.lambda = num(r.at("lambda"));
    p.edge = r.at("edge").get<bool>();
    pts.push_back(p);
  }
  return DispersionTable(std::move(pts), o);
}

// ---------------------------------------------------------------------------
// spectral, physical and trajectory data

inline constexpr std::string_view kSpectrumColumns = "xi,re_rho_hat,im_rho_hat";

inline void write_spectrum_csv(std::ostream& os, const SpectralDensity& rho, FileHeader h = {})
{
  if (h.quantity.empty())
    h.quantity = "spectral density rho^(t,xi)";
  h.notes.push_back("time " + fmt17(rho.time));
  write_header(os, h, kSpectrumColumns);
  for (std::size_t i = 0; i < rho.rho_hat.size(); ++i)
    os << fmt17(rho.grid.xi(i)) << ',' << fmt17(rho.rho_hat[i].real()) << ','
       << fmt17(rho.rho_hat[i].imag()) << '\n';
}

inline std::vector<cplx> read_spectrum_csv(std::istream& is)
{
  std::vector<cplx> out;
  for (const auto& row : detail::read_rows(is, kSpectrumColumns)) {
    if (row.size() != 3)
      throw Error("read_spectrum_csv: expected 3 columns");
    out.emplace_back(parse_double(row[1]), parse_double(row[2]));
  }
  return out;
}

inline constexpr std::string_view kFieldColumns = "x,rho,T";

inline void write_fields_csv(std::ostream& os, const FieldSnapshot& s, FileHeader h = {})
{
  if (h.quantity.empty())
    h.quantity = "density rho(t,x) and mass flux T(t,x) = int phi v f dv";
  h.notes.push_back("time " + fmt17(s.time));
  h.notes.push_back("period " + fmt17(s.period));
  write_header(os, h, kFieldColumns);
  for (std::size_t j = 0; j < s.x.size(); ++j)
    os << fmt17(s.x[j]) << ',' << fmt17(s.rho[j]) << ',' << fmt17(s.flux[j]) << '\n';
}

inline constexpr std::string_view kKineticColumns = "x_index,v_index,x,v,f";

/// Full distribution f(t, x, v): one row per (x, v) pair, x-major, v-minor.
/// The companion JSON (kinetic_meta_json) records grid sizes and nodes.
inline void write_kinetic_csv(std::ostream& os, const FieldSnapshot& s, const VelocityGrid& vg,
                              FileHeader h = {})
{
  if (s.f.size() != s.x.size() * vg.size())
    throw Error("write_kinetic_csv: snapshot carries no distribution on this velocity grid");
  if (h.quantity.empty())
    h.quantity = "distribution f(t,x,v), x-major then v";
  h.notes.push_back("time " + fmt17(s.time));
  write_header(os, h, kKineticColumns);
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t j = 0; j < vg.size(); ++j)
      os << i << ',' << j << ',' << fmt17(s.x[i]) << ',' << fmt17(vg.node(j)) << ','
         << fmt17(s.f[i * vg.size() + j]) << '\n';
}

inline nlohmann::json kinetic_meta_json(const FieldSnapshot& s, const VelocityGrid& vg,
                                        const std::string& config_hash, const std::string& csv_name)
{
  nlohmann::json j;
  j["format"] = "gds-kinetic-snapshot";
  j["schema_version"] = 1;
  j["artifact_version"] = std::string(kVersion);
  j["config_hash"] = config_hash;
  j["csv"] = csv_name;
  j["column_order"] = std::string(kKineticColumns);
  j["row_order"] = "x-major, v-minor";
  j["time"] = fmt17(s.time);
  j["period"] = fmt17(s.period);
  j["x_points"] = s.x.size();
  j["velocity_order"] = vg.size();
  std::vector<std::string> nodes, weights;
  for (std::size_t k = 0; k < vg.size(); ++k) {
    nodes.push_back(fmt17(vg.node(k)));
    weights.push_back(fmt17(vg.weight(k)));
  }
  j["velocity_nodes"] = nodes;
  j["velocity_weights"] = weights;
  return j;
}

inline constexpr std::string_view kTrajectoryColumns = "t,re_rho_hat,im_rho_hat,d";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 std::span<const double> distance, FileHeader h = {})
{
  if (distance.size() != traj.times.size())
    throw Error("write_trajectory_csv: distance length mismatch");
  if (h.quantity.empty())
    h.quantity = "direct mode integration: rho^(t) and relative distance d(t) to the GDS ray";
  h.notes.push_back("xi " + fmt17(traj.xi));
  write_header(os, h, kTrajectoryColumns);
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    os << fmt17(traj.times[k]) << ',' << fmt17(traj.densities[k].real()) << ','
       << fmt17(traj.densities[k].imag()) << ',' << fmt17(distance[k]) << '\n';
}

}  // namespace gds
