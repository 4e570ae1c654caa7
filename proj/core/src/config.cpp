// SPDX-License-Identifier: Apache-2.0

#include "rispart/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rispart {
namespace {

constexpr double kSpeedOfLight = 299792458.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Drops a trailing "; ..." or " # ..." comment that follows a value.
std::string strip_inline_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == ';' || s[i] == '#') && (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1]))))
      return trim(s.substr(0, i));
  }
  return trim(s);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Splits "28 GHz" into (28, "ghz"). The unit part may be empty.
std::pair<double, std::string> split_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return {value, lower(trim(t.substr(used)))};
}

double parse_real(const std::string& key, const std::string& text) {
  auto [v, unit] = split_number(key, text);
  if (!unit.empty()) throw ConfigError("config: '" + key + "' has unexpected unit '" + unit + "'");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(std::stoull(t));
}

double parse_frequency(const std::string& key, const std::string& text) {
  auto [v, unit] = split_number(key, text);
  if (unit.empty() || unit == "hz") return v;
  if (unit == "khz") return v * 1e3;
  if (unit == "mhz") return v * 1e6;
  if (unit == "ghz") return v * 1e9;
  throw ConfigError("config: '" + key + "' has unknown frequency unit '" + unit + "'");
}

double parse_length(const std::string& key, const std::string& text) {
  auto [v, unit] = split_number(key, text);
  if (unit.empty() || unit == "m") return v;
  if (unit == "km") return v * 1e3;
  throw ConfigError("config: '" + key + "' has unknown length unit '" + unit + "'");
}

// Element spacing in wavelengths: "0.5", "0.5 lambda".
double parse_spacing(const std::string& key, const std::string& text) {
  auto [v, unit] = split_number(key, text);
  if (unit.empty() || unit == "lambda" || unit == "wavelength" || unit == "wavelengths") return v;
  throw ConfigError("config: '" + key + "' must be given in wavelengths");
}

// "30x90" or "2700"; a bare count must be accompanied by Nx or Ny.
std::pair<std::size_t, std::size_t> parse_ris_shape(const std::string& text) {
  const std::string t = lower(trim(text));
  const auto x = t.find('x');
  if (x == std::string::npos) throw ConfigError("config: 'N' must be written as NxxNy, e.g. 30x90");
  return {parse_count("N", t.substr(0, x)), parse_count("N", t.substr(x + 1))};
}

void collect(const boost::property_tree::ptree& tree, const std::string& prefix, ConfigDocument& out) {
  for (const auto& [name, child] : tree) {
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (child.empty())
      out[key] = strip_inline_comment(child.data());
    else
      collect(child, key, out);
  }
}

}  // namespace

void SimulationConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  need(mt >= 1 && mr >= 1, "Mt and Mr must be >= 1");
  need(nx >= 1 && ny >= 1, "Nx and Ny must be >= 1");
  need(l1 >= 1 && l2 >= 1, "L1 and L2 must be >= 1");
  need(spacing_wavelengths > 0.0, "d must be positive");
  need(carrier_hz > 0.0, "f must be positive");
  need(bandwidth_hz > 0.0, "B must be positive");
  need(d1 > 0.0 && d2 > 0.0 && d3 > 0.0, "distances must be positive");
  need(pl_exponent > 0.0, "pl_exponent must be positive");
  need(power_w > 0.0, "P must be positive");
  need(noise_power_w > 0.0, "sigma2 must be positive");
  need(realizations >= 1, "realizations must be >= 1");
}

std::string SimulationConfig::resolution_warnings() const {
  std::ostringstream os;
  // "Much smaller" is read as at most half.
  auto check = [&](std::size_t lhs, std::size_t rhs, const char* text) {
    if (2 * lhs > rhs) os << "warning: " << text << " (" << lhs << " vs " << rhs << ")\n";
  };
  check(l1 + l3, mt, "L1+L3 is not much smaller than Mt");
  check(l2 + l3, mr, "L2+L3 is not much smaller than Mr");
  check(l1, nx * ny, "L1 is not much smaller than N");
  check(l2, nx * ny, "L2 is not much smaller than N");
  return os.str();
}

double SimulationConfig::wavelength() const { return kSpeedOfLight / carrier_hz; }

ArrayGeometry SimulationConfig::tx_geometry() const { return {mt, spacing_m(), wavelength()}; }
ArrayGeometry SimulationConfig::rx_geometry() const { return {mr, spacing_m(), wavelength()}; }
RisGeometry SimulationConfig::ris_geometry() const { return {nx, ny, spacing_m(), wavelength()}; }

PathLoss SimulationConfig::path_losses() const { return path_loss(wavelength(), d1, d2, d3, pl_exponent); }

ConfigDocument read_config_document(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ConfigDocument doc;
  collect(tree, "", doc);
  return doc;
}

ConfigDocument read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return read_config_document(in);
}

double parse_power_w(const std::string& text) {
  auto [v, unit] = split_number("power", text);
  if (unit.empty() || unit == "dbm") return dbm_to_watts(v);
  if (unit == "w") return v;
  if (unit == "mw") return v * 1e-3;
  if (unit == "dbw") return std::pow(10.0, v / 10.0);
  throw ConfigError("config: unknown power unit '" + unit + "'");
}

SimulationConfig simulation_config_from(const ConfigDocument& doc) {
  SimulationConfig cfg;
  bool have_shape = false;
  bool have_nx = false;
  bool have_ny = false;
  for (const auto& [key, value] : doc) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? std::string{} : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section == "system") {
      if (name == "Mt") cfg.mt = parse_count(key, value);
      else if (name == "Mr") cfg.mr = parse_count(key, value);
      else if (name == "M") cfg.mt = cfg.mr = parse_count(key, value);
      else if (name == "N") {
        std::tie(cfg.nx, cfg.ny) = parse_ris_shape(value);
        have_shape = true;
      } else if (name == "Nx") {
        cfg.nx = parse_count(key, value);
        have_nx = true;
      } else if (name == "Ny") {
        cfg.ny = parse_count(key, value);
        have_ny = true;
      } else if (name == "L1") cfg.l1 = parse_count(key, value);
      else if (name == "L2") cfg.l2 = parse_count(key, value);
      else if (name == "L3") cfg.l3 = parse_count(key, value);
      else if (name == "d") cfg.spacing_wavelengths = parse_spacing(key, value);
      else if (name == "f") cfg.carrier_hz = parse_frequency(key, value);
      else if (name == "B") cfg.bandwidth_hz = parse_frequency(key, value);
      else throw ConfigError("config: unknown key '" + key + "'");
    } else if (section == "link") {
      if (name == "d1") cfg.d1 = parse_length(key, value);
      else if (name == "d2") cfg.d2 = parse_length(key, value);
      else if (name == "d3") cfg.d3 = parse_length(key, value);
      else if (name == "pl_exponent") cfg.pl_exponent = parse_real(key, value);
      else if (name == "P") cfg.power_w = parse_power_w(value);
      else if (name == "sigma2") cfg.noise_power_w = parse_power_w(value);
      else throw ConfigError("config: unknown key '" + key + "'");
    } else if (section == "run") {
      if (name == "realizations") cfg.realizations = parse_count(key, value);
      else if (name == "seed") cfg.seed = parse_count(key, value);
      else throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (have_shape && (have_nx || have_ny)) throw ConfigError("config: give either N or Nx/Ny, not both");
  cfg.validate();
  return cfg;
}

void write_simulation_config(std::ostream& out, const SimulationConfig& cfg) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "[system]\n"
      << "Mt = " << cfg.mt << "\n"
      << "Mr = " << cfg.mr << "\n"
      << "Nx = " << cfg.nx << "\n"
      << "Ny = " << cfg.ny << "\n"
      << "L1 = " << cfg.l1 << "\n"
      << "L2 = " << cfg.l2 << "\n"
      << "L3 = " << cfg.l3 << "\n"
      << "d = " << cfg.spacing_wavelengths << " lambda\n"
      << "f = " << cfg.carrier_hz << " Hz\n"
      << "B = " << cfg.bandwidth_hz << " Hz\n"
      << "\n[link]\n"
      << "d1 = " << cfg.d1 << "\n"
      << "d2 = " << cfg.d2 << "\n"
      << "d3 = " << cfg.d3 << "\n"
      << "pl_exponent = " << cfg.pl_exponent << "\n"
      << "P = " << cfg.power_w << " W\n"
      << "sigma2 = " << cfg.noise_power_w << " W\n"
      << "\n[run]\n"
      << "realizations = " << cfg.realizations << "\n"
      << "seed = " << cfg.seed << "\n";
  out.flags(flags);
  out.precision(prec);
}

}  // namespace rispart
