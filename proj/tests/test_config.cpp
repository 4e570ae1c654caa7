// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <sstream>

#include "rispart/config.hpp"

using namespace rispart;
using Catch::Approx;

namespace {

SimulationConfig parse(const std::string& text) {
  std::istringstream in(text);
  return simulation_config_from(read_config_document(in));
}

}  // namespace

TEST_CASE("default deployment") {
  const SimulationConfig c;
  CHECK(c.mt == 32);
  CHECK(c.mr == 32);
  CHECK(c.nx * c.ny == 2700);
  CHECK(c.carrier_hz == 28e9);
  CHECK(watts_to_dbm(c.power_w) == Approx(30.0));
  CHECK(watts_to_dbm(c.noise_power_w) == Approx(-90.0));
  CHECK(c.pl_exponent == 2.4);
  CHECK(c.spacing_wavelengths == 0.5);
}

TEST_CASE("INI parsing with units and comments") {
  const auto c = parse(R"(
; default deployment
[system]
M = 16          ; both arrays
N = 30x30
L1 = 4
L2 = 6
L3 = 3
d = 0.5 lambda
f = 28 GHz
B = 251.1886 MHz

[link]
d1 = 100 m
d2 = 0.06 km
d3 = 150
pl_exponent = 2.4
P = 20 dBm
sigma2 = -90   # bare numbers are dBm

[run]
realizations = 10
seed = 1234
)");
  CHECK(c.mt == 16);
  CHECK(c.mr == 16);
  CHECK(c.nx == 30);
  CHECK(c.ny == 30);
  CHECK(c.l1 == 4);
  CHECK(c.l3 == 3);
  CHECK(c.carrier_hz == Approx(28e9));
  CHECK(c.bandwidth_hz == Approx(251.1886e6));
  CHECK(c.d2 == Approx(60.0));
  CHECK(c.power_w == Approx(0.1));
  CHECK(c.noise_power_w == Approx(1e-12));
  CHECK(c.realizations == 10);
  CHECK(c.seed == 1234);
}

TEST_CASE("power units") {
  CHECK(parse_power_w("30 dBm") == Approx(1.0));
  CHECK(parse_power_w("30") == Approx(1.0));
  CHECK(parse_power_w("2 W") == Approx(2.0));
  CHECK(parse_power_w("5 mW") == Approx(5e-3));
  CHECK(parse_power_w("0 dBW") == Approx(1.0));
  CHECK(parse_power_w("60.1030 dBm") == Approx(1024.0).epsilon(1e-4));
  CHECK_THROWS_AS(parse_power_w("3 furlongs"), ConfigError);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("[system]\nMt = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[system]\nMtx = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[system]\nN = 30x90\nNx = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[system]\nN = 2700\n"), ConfigError);
  CHECK_THROWS_AS(parse("[link]\nP = -inf W\n"), ConfigError);
  CHECK_THROWS_AS(parse("[link]\nd1 = 3 parsecs\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nrealizations = 0\n"), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/rispart.ini"), ConfigError);
}

TEST_CASE("resolution warnings are advisory") {
  SimulationConfig c;
  CHECK(c.resolution_warnings().empty());
  c.mt = 8;
  const auto w = c.resolution_warnings();
  CHECK(w.find("Mt") != std::string::npos);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("write then read round-trips exactly") {
  SimulationConfig c;
  c.mt = 64;
  c.nx = 60;
  c.ny = 180;
  c.power_w = dbm_to_watts(60.1030) / (64.0 * 64.0);
  c.seed = 987654321;
  std::ostringstream out;
  write_simulation_config(out, c);
  const auto back = parse(out.str());
  CHECK(back.mt == c.mt);
  CHECK(back.ny == c.ny);
  CHECK(back.power_w == c.power_w);
  CHECK(back.noise_power_w == c.noise_power_w);
  CHECK(back.carrier_hz == c.carrier_hz);
  CHECK(back.seed == c.seed);
}
