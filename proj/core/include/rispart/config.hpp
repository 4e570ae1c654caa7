// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

#include "rispart/channel.hpp"

namespace rispart {

/// Thrown for malformed or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

/// System parameters of one simulated deployment. Powers are held in watts;
/// dBm inputs are converted once while parsing.
struct SimulationConfig {
  std::size_t mt = 32;
  std::size_t mr = 32;
  std::size_t nx = 30;
  std::size_t ny = 90;
  std::size_t l1 = 5;
  std::size_t l2 = 7;
  std::size_t l3 = 4;
  double spacing_wavelengths = 0.5;  // d / lambda
  double carrier_hz = 28e9;
  double bandwidth_hz = 251.1886e6;
  double d1 = 100.0;
  double d2 = 60.0;
  double d3 = 150.0;
  double pl_exponent = 2.4;
  double power_w = 1.0;          // 30 dBm
  double noise_power_w = 1e-12;  // -90 dBm
  std::size_t realizations = 1;
  std::uint64_t seed = 1;

  void validate() const;
  /// Non-fatal resolution checks (L1+L3 << Mt etc.); one message per line, empty if none.
  std::string resolution_warnings() const;

  double wavelength() const;
  double spacing_m() const { return spacing_wavelengths * wavelength(); }
  ArrayGeometry tx_geometry() const;
  ArrayGeometry rx_geometry() const;
  RisGeometry ris_geometry() const;
  PathLoss path_losses() const;
};

/// Flat sectioned key=value document: section.key -> raw string value.
using ConfigDocument = std::map<std::string, std::string>;

/// Parses an INI-style text ([section], key = value, ';' or '#' comments).
ConfigDocument read_config_document(std::istream& in);
ConfigDocument read_config_file(const std::string& path);

/// Builds a SimulationConfig from the [system], [link] and [run] sections.
/// Unknown keys in those sections are rejected.
SimulationConfig simulation_config_from(const ConfigDocument& doc);

/// Parses "30 dBm", "1e-3 W" or a bare number (taken as dBm).
double parse_power_w(const std::string& text);

/// Writes every field back in the same key=value layout.
void write_simulation_config(std::ostream& out, const SimulationConfig& cfg);

}  // namespace rispart
