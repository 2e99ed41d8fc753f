#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "gds/errors.hpp"

namespace gds {

/// Uniform frequency grid xi_m = m * dxi, m = -modes..modes, with
/// dxi = extent / modes.  It is the Fourier dual of a periodic x-domain of
/// length period() = 2 pi / dxi.  Samples are stored at index m + modes.
struct SpectralGrid
{
  double extent = 1.0;
  int modes = 1;

  double dxi() const { return extent / modes; }
  std::size_t size() const { return 2 * static_cast<std::size_t>(modes) + 1; }
  int mode(std::size_t idx) const { return static_cast<int>(idx) - modes; }
  std::size_t index(int m) const { return static_cast<std::size_t>(m + modes); }
  double xi(std::size_t idx) const { return mode(idx) * dxi(); }
  double period() const { return 2.0 * std::numbers::pi / dxi(); }

  std::vector<double> xis() const
  {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = xi(i);
    return out;
  }

  /// All nonzero grid frequencies, ascending.
  std::vector<double> nonzero_xis() const
  {
    std::vector<double> out;
    out.reserve(size() - 1);
    for (std::size_t i = 0; i < size(); ++i)
      if (mode(i) != 0)
        out.push_back(xi(i));
    return out;
  }

  void validate() const
  {
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw ConfigError("SpectralGrid: extent must be positive and finite");
    if (modes < 1)
      throw ConfigError("SpectralGrid: need at least one mode, got " + std::to_string(modes));
  }

  bool operator==(const SpectralGrid&) const = default;
};

}  // namespace gds
