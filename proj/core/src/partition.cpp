// SPDX-License-Identifier: Apache-2.0

#include "rispart/partition.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rispart {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

cd unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Index of the sub-surface owning each column.
std::vector<std::size_t> column_owner(const PartitionPlan& plan, std::size_t ny) {
  std::vector<std::size_t> owner;
  owner.reserve(ny);
  for (std::size_t s = 0; s < plan.column_counts.size(); ++s)
    owner.insert(owner.end(), plan.column_counts[s], s);
  return owner;
}

template <typename T>
void write_list(std::ostream& out, const char* key, const std::vector<T>& values) {
  out << key << " =";
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? ", " : " ") << values[i];
  out << "\n";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t\r");
    if (b != std::string::npos) parts.push_back(cur.substr(b, e - b + 1));
  }
  return parts;
}

std::size_t integer_power_root(std::size_t n, double alpha, const char* axis) {
  const double r = std::pow(static_cast<double>(n), alpha);
  const double rr = std::round(r);
  if (std::abs(r - rr) > 1e-9 * std::max(1.0, r) || rr < 1.0 || n % static_cast<std::size_t>(rr) != 0)
    throw std::invalid_argument(std::string("TilePlan: ") + axis + "^alpha is not an integer divisor");
  return static_cast<std::size_t>(rr);
}

}  // namespace

PhaseGradient gradient_for(const Direction& arrival, const Direction& departure) {
  PhaseGradient g;
  g.gx = departure.cos_x() - arrival.cos_x();
  g.gy = departure.cos_y() - arrival.cos_y();
  return g;
}

GradientTable feasible_gradients(const PathSet& tx_ris, const PathSet& ris_rx) {
  require(tx_ris.hop == Hop::TxRis && ris_rx.hop == Hop::RisRx, "feasible_gradients: wrong hop kinds");
  require(tx_ris.size() >= 1 && ris_rx.size() >= 1, "feasible_gradients: empty path set");
  GradientTable table;
  table.l1 = tx_ris.size();
  table.l2 = ris_rx.size();
  table.entries.reserve(table.l1 * table.l2);
  for (std::size_t u = 0; u < table.l1; ++u) {
    for (std::size_t v = 0; v < table.l2; ++v) {
      PhaseGradient g = gradient_for(tx_ris.ris_arrival.at(u), ris_rx.ris_departure.at(v));
      g.u = u;
      g.v = v;
      table.entries.push_back(g);
    }
  }
  for (std::size_t a = 0; a < table.entries.size(); ++a)
    for (std::size_t b = a + 1; b < table.entries.size(); ++b)
      if (std::abs(table.entries[a].gx - table.entries[b].gx) < 1e-12 &&
          std::abs(table.entries[a].gy - table.entries[b].gy) < 1e-12)
        table.duplicates.emplace_back(a, b);
  return table;
}

PairingMatrix::PairingMatrix(std::size_t l1, std::size_t l2) : l1_(l1), l2_(l2), entries_(l1 * l2, 0) {}

PairingMatrix::PairingMatrix(std::size_t l1, std::size_t l2, std::vector<int> entries)
    : l1_(l1), l2_(l2), entries_(std::move(entries)) {
  check();
}

void PairingMatrix::check() const {
  require(entries_.size() == l1_ * l2_, "PairingMatrix: entry count does not match L1 x L2");
  for (int e : entries_) require(e == 0 || e == 1, "PairingMatrix: entries must be 0 or 1");
  for (std::size_t u = 0; u < l1_; ++u) {
    int row = 0;
    for (std::size_t v = 0; v < l2_; ++v) row += entries_[u * l2_ + v];
    require(row <= 1, "PairingMatrix: a Tx-RIS path is paired more than once");
  }
  for (std::size_t v = 0; v < l2_; ++v) {
    int col = 0;
    for (std::size_t u = 0; u < l1_; ++u) col += entries_[u * l2_ + v];
    require(col <= 1, "PairingMatrix: a RIS-Rx path is paired more than once");
  }
}

PairingMatrix PairingMatrix::identity_prefix(std::size_t l1, std::size_t l2) {
  PairingMatrix b(l1, l2);
  for (std::size_t k = 0; k < std::min(l1, l2); ++k) b.entries_[k * l2 + k] = 1;
  return b;
}

PairingMatrix PairingMatrix::from_pairs(std::size_t l1, std::size_t l2,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  PairingMatrix b(l1, l2);
  for (auto [u, v] : pairs) {
    require(u < l1 && v < l2, "PairingMatrix: pair index out of range");
    b.entries_[u * l2 + v] += 1;
  }
  b.check();
  return b;
}

std::size_t PairingMatrix::ones() const {
  return static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), 1));
}

std::vector<std::pair<std::size_t, std::size_t>> PairingMatrix::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t u = 0; u < l1_; ++u)
    for (std::size_t v = 0; v < l2_; ++v)
      if (entries_[u * l2_ + v]) out.emplace_back(u, v);
  return out;
}

void PartitionPlan::validate(std::size_t ny) const {
  const std::size_t s = t.size();
  require(s >= 1, "PartitionPlan: no sub-surfaces");
  require(gradients.size() == s && psi.size() == s, "PartitionPlan: field lengths differ");
  double sum = 0.0;
  for (double x : t) {
    require(x >= 0.0 && x <= 1.0 + 1e-12, "PartitionPlan: t_s outside [0, 1]");
    sum += x;
  }
  require(std::abs(sum - 1.0) < 1e-9, "PartitionPlan: partition ratios do not sum to 1");
  for (double p : psi) require(p >= 0.0 && p < kTwoPi, "PartitionPlan: psi_s outside [0, 2 pi)");
  if (realized()) {
    require(column_counts.size() == s, "PartitionPlan: column count length differs");
    require(std::accumulate(column_counts.begin(), column_counts.end(), std::size_t{0}) == ny,
            "PartitionPlan: column counts do not sum to Ny");
  }
}

std::vector<std::size_t> PartitionPlan::prefix_columns() const {
  std::vector<std::size_t> out(column_counts.size() + 1, 0);
  std::partial_sum(column_counts.begin(), column_counts.end(), out.begin() + 1);
  return out;
}

std::vector<double> PartitionPlan::realized_t() const {
  const double ny = static_cast<double>(std::accumulate(column_counts.begin(), column_counts.end(), std::size_t{0}));
  std::vector<double> out;
  for (std::size_t c : column_counts) out.push_back(static_cast<double>(c) / ny);
  return out;
}

PairingMatrix PartitionPlan::pairing(std::size_t l1, std::size_t l2) const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& g : gradients) pairs.emplace_back(g.u, g.v);
  return PairingMatrix::from_pairs(l1, l2, pairs);
}

void write_plan(std::ostream& out, const PartitionPlan& plan) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "S = " << plan.size() << "\n";
  write_list(out, "t", plan.t);
  write_list(out, "columns", plan.column_counts);
  std::vector<std::string> pairs;
  std::vector<std::string> grads;
  for (const auto& g : plan.gradients) {
    pairs.push_back(std::to_string(g.u) + ":" + std::to_string(g.v));
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << g.gx << ":" << g.gy;
    grads.push_back(os.str());
  }
  write_list(out, "pairs", pairs);
  write_list(out, "gradients", grads);
  write_list(out, "psi", plan.psi);
  out.flags(flags);
  out.precision(prec);
}

PartitionPlan read_plan(std::istream& in) {
  PartitionPlan plan;
  std::size_t declared = 0;
  bool have_s = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    require(eq != std::string::npos, "read_plan: malformed line '" + line + "'");
    auto keys = split(line.substr(0, eq), ' ');
    require(keys.size() == 1, "read_plan: malformed key in '" + line + "'");
    const std::string key = keys[0];
    const auto items = split(line.substr(eq + 1), ',');
    if (key == "S") {
      require(items.size() == 1, "read_plan: S must be a single integer");
      declared = std::stoull(items[0]);
      have_s = true;
    } else if (key == "t") {
      for (const auto& x : items) plan.t.push_back(std::stod(x));
    } else if (key == "columns") {
      for (const auto& x : items) plan.column_counts.push_back(std::stoull(x));
    } else if (key == "pairs" || key == "gradients") {
      if (plan.gradients.size() < items.size()) plan.gradients.resize(items.size());
      for (std::size_t i = 0; i < items.size(); ++i) {
        const auto colon = items[i].find(':');
        require(colon != std::string::npos, "read_plan: expected a:b in '" + items[i] + "'");
        if (key == "pairs") {
          plan.gradients[i].u = std::stoull(items[i].substr(0, colon));
          plan.gradients[i].v = std::stoull(items[i].substr(colon + 1));
        } else {
          plan.gradients[i].gx = std::stod(items[i].substr(0, colon));
          plan.gradients[i].gy = std::stod(items[i].substr(colon + 1));
        }
      }
    } else if (key == "psi") {
      for (const auto& x : items) plan.psi.push_back(std::stod(x));
    } else {
      throw std::invalid_argument("read_plan: unknown key '" + key + "'");
    }
  }
  require(have_s && declared == plan.size(), "read_plan: S does not match the record");
  return plan;
}

std::string serialize_plan(const PartitionPlan& plan) {
  std::ostringstream os;
  write_plan(os, plan);
  return os.str();
}

PartitionPlan parse_plan(const std::string& text) {
  std::istringstream is(text);
  return read_plan(is);
}

double dirichlet_ratio(std::size_t k, double x) {
  require(k >= 1, "dirichlet_ratio: K must be >= 1");
  const double m = std::round(x / std::numbers::pi);
  const double eps = x - m * std::numbers::pi;
  // sin(K(m pi + e)) / sin(m pi + e) = (-1)^{m(K-1)} sin(K e) / sin(e).
  const long long mk = static_cast<long long>(m) * static_cast<long long>(k - 1);
  const double sign = (mk % 2 == 0) ? 1.0 : -1.0;
  const double kd = static_cast<double>(k);
  if (std::abs(eps) < 1e-9) return sign;
  return sign * std::sin(kd * eps) / (kd * std::sin(eps));
}

std::vector<cd> build_theta(const PartitionPlan& plan, const RisGeometry& ris) {
  ris.validate();
  require(plan.realized(), "build_theta: plan has no column counts");
  plan.validate(ris.ny);
  const double k = ris.wavenumber_spacing();
  const auto owner = column_owner(plan, ris.ny);
  std::vector<cd> theta(ris.size());
  for (std::size_t ix = 0; ix < ris.nx; ++ix) {
    for (std::size_t iy = 0; iy < ris.ny; ++iy) {
      const std::size_t s = owner[iy];
      const auto& g = plan.gradients[s];
      const double phase = plan.psi[s] + k * (static_cast<double>(ix) * g.gx + static_cast<double>(iy) * g.gy);
      theta[ris.flat_index(ix, iy)] = unit_phasor(phase);
    }
  }
  return theta;
}

cd gain_direct_sum(std::span<const cd> theta, const RisGeometry& ris, const PhaseGradient& zeta) {
  ris.validate();
  require(theta.size() == ris.size(), "gain_direct_sum: theta length does not match RIS size");
  const double k = ris.wavenumber_spacing();
  cd acc{0.0, 0.0};
  for (std::size_t ix = 0; ix < ris.nx; ++ix) {
    for (std::size_t iy = 0; iy < ris.ny; ++iy) {
      const double phase = -k * (static_cast<double>(ix) * zeta.gx + static_cast<double>(iy) * zeta.gy);
      acc += theta[ris.flat_index(ix, iy)] * unit_phasor(phase);
    }
  }
  return acc / static_cast<double>(ris.size());
}

cd gain_closed_form(const PartitionPlan& plan, const RisGeometry& ris, const PhaseGradient& zeta) {
  ris.validate();
  require(plan.realized(), "gain_closed_form: plan has no column counts");
  plan.validate(ris.ny);
  const double k = ris.wavenumber_spacing();
  const auto prefix = plan.prefix_columns();
  const double nx = static_cast<double>(ris.nx);
  cd acc{0.0, 0.0};
  for (std::size_t s = 0; s < plan.size(); ++s) {
    const std::size_t cols = plan.column_counts[s];
    if (cols == 0) continue;
    const double eta_x = plan.gradients[s].gx - zeta.gx;
    const double eta_y = plan.gradients[s].gy - zeta.gy;
    const double ts = static_cast<double>(cols) / static_cast<double>(ris.ny);
    const double psi_tilde = plan.psi[s] + 0.5 * k * (nx - 1.0) * eta_x +
                             0.5 * k * (static_cast<double>(prefix[s + 1] + prefix[s]) - 1.0) * eta_y;
    acc += unit_phasor(psi_tilde) * ts * dirichlet_ratio(ris.nx, 0.5 * k * eta_x) *
           dirichlet_ratio(cols, 0.5 * k * eta_y);
  }
  return acc;
}

cd gain_asymptotic(const PartitionPlan& plan, std::size_t u, std::size_t v) {
  require(plan.t.size() == plan.gradients.size() && plan.psi.size() == plan.t.size(),
          "gain_asymptotic: plan field lengths differ");
  cd acc{0.0, 0.0};
  for (std::size_t s = 0; s < plan.size(); ++s)
    if (plan.gradients[s].u == u && plan.gradients[s].v == v) acc += unit_phasor(plan.psi[s]) * plan.t[s];
  return acc;
}

RoundedPartition round_partition(std::span<const double> t, std::size_t ny) {
  require(!t.empty(), "round_partition: empty t");
  double total = 0.0;
  for (double x : t) {
    require(x >= 0.0, "round_partition: negative ratio");
    total += x;
  }
  require(std::abs(total - 1.0) < 1e-9, "round_partition: ratios do not sum to 1");
  require(ny >= 1, "round_partition: Ny must be >= 1");

  RoundedPartition out;
  out.counts.assign(t.size(), 0);
  std::vector<bool> active(t.size());
  for (std::size_t s = 0; s < t.size(); ++s) active[s] = t[s] > 0.0;

  for (;;) {
    double mass = 0.0;
    for (std::size_t s = 0; s < t.size(); ++s)
      if (active[s]) mass += t[s];
    std::fill(out.counts.begin(), out.counts.end(), std::size_t{0});
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (!active[s]) continue;
      const double quota = t[s] / mass * static_cast<double>(ny);
      const double fl = std::floor(quota + 1e-12);
      out.counts[s] = static_cast<std::size_t>(fl);
      assigned += out.counts[s];
      remainders.emplace_back(quota - fl, s);
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (std::abs(a.first - b.first) > 1e-12) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < ny; ++i, ++assigned) out.counts[remainders.at(i).second] += 1;

    bool dropped_any = false;
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (active[s] && out.counts[s] == 0) {
        active[s] = false;
        out.dropped.push_back(s);
        dropped_any = true;
      }
    }
    if (!dropped_any) break;
    out.reapportioned = true;
  }
  std::sort(out.dropped.begin(), out.dropped.end());
  return out;
}

std::vector<double> TilePlan::mu() const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t s : owner) out.at(s) += 1.0;
  for (double& x : out) x /= static_cast<double>(tile_count());
  return out;
}

void TilePlan::validate(const RisGeometry& ris) const {
  require(alpha > 0.0 && alpha < 1.0, "TilePlan: alpha must lie in (0, 1)");
  require(tiles_x * tile_nx == ris.nx && tiles_y * tile_ny == ris.ny, "TilePlan: tile grid does not cover the RIS");
  require(owner.size() == tile_count(), "TilePlan: tile assignment incomplete");
  require(psi.size() == size(), "TilePlan: psi length differs from gradient count");
  for (std::size_t s : owner) require(s < size(), "TilePlan: tile assigned to unknown sub-surface");
}

double TilePlan::tile_phase(std::size_t mx, std::size_t my, double k) const {
  const std::size_t s = owner.at(mx * tiles_y + my);
  const auto& g = gradients[s];
  return psi[s] + k * (static_cast<double>(mx * tile_nx) * g.gx + static_cast<double>(my * tile_ny) * g.gy);
}

TilePlan make_tile_plan(const RisGeometry& ris, double alpha, std::vector<std::size_t> owner,
                        std::vector<PhaseGradient> gradients, std::vector<double> psi) {
  ris.validate();
  require(alpha > 0.0 && alpha < 1.0, "TilePlan: alpha must lie in (0, 1)");
  TilePlan tp;
  tp.alpha = alpha;
  tp.tiles_x = integer_power_root(ris.nx, alpha, "Nx");
  tp.tiles_y = integer_power_root(ris.ny, alpha, "Ny");
  tp.tile_nx = ris.nx / tp.tiles_x;
  tp.tile_ny = ris.ny / tp.tiles_y;
  tp.owner = std::move(owner);
  tp.gradients = std::move(gradients);
  tp.psi = std::move(psi);
  tp.validate(ris);
  return tp;
}

TilePlan tile_plan_from_mu(const RisGeometry& ris, double alpha, std::span<const double> mu,
                           std::vector<PhaseGradient> gradients, std::vector<double> psi) {
  require(mu.size() == gradients.size(), "tile_plan_from_mu: mu and gradients differ in length");
  const std::size_t tx = integer_power_root(ris.nx, alpha, "Nx");
  const std::size_t ty = integer_power_root(ris.ny, alpha, "Ny");
  const double total = static_cast<double>(tx * ty);
  std::vector<std::size_t> owner(tx * ty);
  std::size_t col = 0;
  double sum = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    sum += mu[s];
    const double tiles = mu[s] * total;
    const double r = std::round(tiles);
    require(std::abs(tiles - r) < 1e-9, "tile_plan_from_mu: mu_s * N^alpha is not an integer");
    const auto n = static_cast<std::size_t>(r);
    require(n % tx == 0, "tile_plan_from_mu: stripe needs a whole number of tile columns");
    for (std::size_t c = 0; c < n / tx; ++c, ++col)
      for (std::size_t mx = 0; mx < tx; ++mx) owner.at(mx * ty + col) = s;
  }
  require(std::abs(sum - 1.0) < 1e-9 && col == ty, "tile_plan_from_mu: mu does not sum to 1");
  return make_tile_plan(ris, alpha, std::move(owner), std::move(gradients), std::move(psi));
}

TilePlan tile_plan_from_partition(const PartitionPlan& plan, const RisGeometry& ris, double alpha) {
  require(plan.realized(), "tile_plan_from_partition: plan has no column counts");
  plan.validate(ris.ny);
  const std::size_t tx = integer_power_root(ris.nx, alpha, "Nx");
  const std::size_t ty = integer_power_root(ris.ny, alpha, "Ny");
  const std::size_t tile_ny = ris.ny / ty;
  std::vector<double> mu;
  for (std::size_t c : plan.column_counts) {
    require(c % tile_ny == 0, "tile_plan_from_partition: column block not aligned to tile width");
    mu.push_back(static_cast<double>(c / tile_ny * tx) / static_cast<double>(tx * ty));
  }
  return tile_plan_from_mu(ris, alpha, mu, plan.gradients, plan.psi);
}

std::vector<cd> build_theta(const TilePlan& tiles, const RisGeometry& ris) {
  tiles.validate(ris);
  const double k = ris.wavenumber_spacing();
  std::vector<cd> theta(ris.size());
  for (std::size_t mx = 0; mx < tiles.tiles_x; ++mx) {
    for (std::size_t my = 0; my < tiles.tiles_y; ++my) {
      const auto& g = tiles.gradients[tiles.owner[mx * tiles.tiles_y + my]];
      const double base = tiles.tile_phase(mx, my, k);
      for (std::size_t lx = 0; lx < tiles.tile_nx; ++lx)
        for (std::size_t ly = 0; ly < tiles.tile_ny; ++ly)
          theta[ris.flat_index(mx * tiles.tile_nx + lx, my * tiles.tile_ny + ly)] =
              unit_phasor(base + k * (static_cast<double>(lx) * g.gx + static_cast<double>(ly) * g.gy));
    }
  }
  return theta;
}

cd tile_plan_gain(const TilePlan& tiles, const RisGeometry& ris, const PhaseGradient& zeta) {
  tiles.validate(ris);
  const double k = ris.wavenumber_spacing();
  const double ex = static_cast<double>(tiles.tile_nx);
  const double ey = static_cast<double>(tiles.tile_ny);
  cd acc{0.0, 0.0};
  for (std::size_t mx = 0; mx < tiles.tiles_x; ++mx) {
    for (std::size_t my = 0; my < tiles.tiles_y; ++my) {
      const auto& g = tiles.gradients[tiles.owner[mx * tiles.tiles_y + my]];
      const double eta_x = g.gx - zeta.gx;
      const double eta_y = g.gy - zeta.gy;
      // The tile origin contributes -k (mx Ex zeta_x + my Ey zeta_y) on top of the tile phase.
      const double origin = -k * (static_cast<double>(mx) * ex * zeta.gx + static_cast<double>(my) * ey * zeta.gy);
      const double psi_tilde = tiles.tile_phase(mx, my, k) + origin + 0.5 * k * (ex - 1.0) * eta_x +
                               0.5 * k * (ey - 1.0) * eta_y;
      acc += unit_phasor(psi_tilde) * dirichlet_ratio(tiles.tile_nx, 0.5 * k * eta_x) *
             dirichlet_ratio(tiles.tile_ny, 0.5 * k * eta_y);
    }
  }
  return acc / static_cast<double>(tiles.tile_count());
}

cd tile_plan_gain_asymptotic(const TilePlan& tiles, std::size_t u, std::size_t v) {
  const auto mu = tiles.mu();
  cd acc{0.0, 0.0};
  for (std::size_t s = 0; s < tiles.size(); ++s)
    if (tiles.gradients[s].u == u && tiles.gradients[s].v == v) acc += unit_phasor(tiles.psi[s]) * mu[s];
  return acc;
}

}  // namespace rispart
