// SPDX-License-Identifier: Apache-2.0

#include "rispart/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "rispart/experiment.hpp"
#include "rispart/fig3.hpp"
#include "rispart/finite.hpp"
#include "rispart/oracle.hpp"
#include "rispart/partition.hpp"
#include "rispart/solver.hpp"

namespace rispart {
namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

CheckResult finish(std::string name, bool passed, std::string detail, const Stopwatch& sw) {
  return {std::move(name), passed, std::move(detail), sw.seconds()};
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

double log_uniform(Rng& rng, double lo_exp, double hi_exp) {
  return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * rng.uniform());
}

RisGeometry unit_ris(std::size_t nx, std::size_t ny) { return RisGeometry{nx, ny, 0.5, 1.0}; }

Direction random_direction(Rng& rng) {
  return Direction{0.5 * kPi * rng.uniform_open_closed(), 2.0 * kPi * rng.uniform_open_closed()};
}

/// Random composition of ny into s parts (zeros allowed).
std::vector<std::size_t> random_counts(Rng& rng, std::size_t ny, std::size_t s, std::size_t unit = 1) {
  const std::size_t blocks = ny / unit;
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i + 1 < s; ++i) cuts.push_back(pick(rng, 0, blocks));
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> counts;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    counts.push_back((c - prev) * unit);
    prev = c;
  }
  counts.push_back((blocks - prev) * unit);
  return counts;
}

PartitionPlan random_plan(Rng& rng, std::size_t ny, std::size_t s, std::size_t unit = 1) {
  PartitionPlan plan;
  plan.column_counts = random_counts(rng, ny, s, unit);
  for (std::size_t i = 0; i < s; ++i) {
    plan.t.push_back(static_cast<double>(plan.column_counts[i]) / static_cast<double>(ny));
    plan.gradients.push_back(PhaseGradient{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0, i, i});
    plan.psi.push_back(2.0 * kPi * rng.uniform());
  }
  // Re-normalize t to sum to exactly 1 in floating point.
  double sum = std::accumulate(plan.t.begin(), plan.t.end(), 0.0);
  for (double& t : plan.t) t /= sum;
  return plan;
}

double median(std::vector<double> x) {
  if (x.empty()) return std::nan("");
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double p32_objective(std::span<const double> m, std::span<const double> t) {
  double c = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) c += std::log2(1.0 + m[s] * t[s] * t[s]);
  return c;
}

/// Small-system configuration for the finite checks.
SimulationConfig small_config(std::size_t m, std::size_t nx, std::size_t ny, std::size_t l1, std::size_t l2,
                              std::size_t l3) {
  SimulationConfig cfg;
  cfg.mt = cfg.mr = m;
  cfg.nx = nx;
  cfg.ny = ny;
  cfg.l1 = l1;
  cfg.l2 = l2;
  cfg.l3 = l3;
  return cfg;
}

struct SolvedCase {
  SimulationConfig cfg;
  ChannelRealization realization;
  PairingMatrix pairing{1, 1};
  AsymptoticProblem problem;
  Solution solution;
};

SolvedCase solved_case(const SimulationConfig& cfg, std::uint64_t seed, double pl_cascaded_override = -1.0) {
  SolvedCase c;
  c.cfg = cfg;
  c.realization = draw_realization(cfg, seed);
  if (pl_cascaded_override >= 0.0) c.realization.pl_cascaded = pl_cascaded_override;
  c.pairing = optimal_pairing(cfg.l1, cfg.l2);
  c.problem = coefficients(c.realization, c.pairing, cfg.power_w);
  c.solution = solve(c.problem);
  return c;
}

FiniteEvaluation adapt(const SolvedCase& c, std::uint64_t seed) {
  Rng rng = Rng(seed).split(3);
  return adapt_solution(c.solution, c.problem, c.realization, c.pairing, c.cfg.ris_geometry(), c.cfg.tx_geometry(),
                        rng);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

AsymptoticProblem random_problem(Rng& rng, std::size_t max_cascaded, std::size_t max_direct, double decades) {
  const std::size_t s = pick(rng, 1, max_cascaded);
  const std::size_t l3 = pick(rng, 0, max_direct);
  std::vector<double> m_r, m_d;
  for (std::size_t i = 0; i < s; ++i) m_r.push_back(log_uniform(rng, 0.0, decades));
  for (std::size_t i = 0; i < l3; ++i) m_d.push_back(log_uniform(rng, 0.0, decades));
  return make_problem(std::move(m_r), std::move(m_d), 1.0);
}

// ---------------------------------------------------------------- gains

CheckResult check_response_norms(std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  double worst_norm = 0.0;
  bool periodic = true;
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = pick(rng, 1, 256);
    const double phi = 8.0 * rng.uniform() - 4.0;
    const auto e = steering_vector(phi, m);
    worst_norm = std::max(worst_norm, std::abs(e.norm() - 1.0));
    periodic = periodic && (steering_vector(phi + 2.0, m) - e).cwiseAbs().maxCoeff() < 1e-12;
    const auto b = ris_response(random_direction(rng), unit_ris(pick(rng, 1, 32), pick(rng, 1, 32)));
    worst_norm = std::max(worst_norm, std::abs(b.norm() - 1.0));
  }
  return finish("unit-norm and period-2 responses", worst_norm < 1e-12 && periodic,
                format("max |norm - 1| = %.3g", worst_norm), sw);
}

CheckResult check_orthogonality_bound(std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t violations = 0, tested = 0;
  for (std::size_t m : {16u, 64u, 256u}) {
    const ArrayGeometry g{m, 0.5, 1.0};
    for (int i = 0; i < 200; ++i) {
      const double a = 2.0 * kPi * rng.uniform(), b = 2.0 * kPi * rng.uniform();
      const double denom = std::abs(std::sin(kPi * 0.5 * (std::sin(a) - std::sin(b))));
      if (denom < 1e-6) continue;
      ++tested;
      const double ip = std::abs(ula_response(a, g).dot(ula_response(b, g)));
      if (ip > 1.0 / (static_cast<double>(m) * denom) + 1e-12) ++violations;
    }
  }
  return finish("ULA inner-product bound", violations == 0,
                format("%zu violations over %zu pairs", violations, tested), sw);
}

CheckResult check_channel_rank(std::uint64_t seed) {
  Stopwatch sw;
  bool ok = true;
  std::size_t worst_rank = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng = Rng(seed).split(i);
    const std::size_t l = pick(rng, 1, 4);
    const ArrayGeometry tx{12, 0.5, 1.0}, rx{10, 0.5, 1.0};
    const auto ris = unit_ris(4, 5);
    Rng a = rng.split(0), b = rng.split(0);
    const auto p1 = sample_paths(a, l, Hop::TxRx);
    const auto p2 = sample_paths(b, l, Hop::TxRx);
    const auto h = synth_tx_rx(p1, tx, rx);
    ok = ok && h == synth_tx_rx(p2, tx, rx) && p1.gains == p2.gains;
    Rng c = rng.split(1);
    const auto h1 = synth_tx_ris(sample_paths(c, l, Hop::TxRis), tx, ris);
    for (const Eigen::MatrixXcd& mat : {h, h1}) {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mat);
      const auto sv = svd.singularValues();
      std::size_t rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > 1e-9 * sv[0]) ++rank;
      worst_rank = std::max(worst_rank, rank > l ? rank - l : 0);
      ok = ok && rank <= l;
    }
  }
  return finish("channel rank <= L and seeded determinism", ok,
                format("max rank excess %zu", worst_rank), sw);
}

CheckResult check_gain_identity(std::size_t plans, double tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < plans; ++i) {
    const auto ris = unit_ris(pick(rng, 1, 16), pick(rng, 1, 16));
    const auto plan = random_plan(rng, ris.ny, pick(rng, 1, 4));
    const auto theta = build_theta(plan, ris);
    std::vector<PhaseGradient> probes = plan.gradients;
    for (int k = 0; k < 3; ++k) probes.push_back({4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0, 0, 0});
    for (const auto& z : probes)
      worst = std::max(worst, std::abs(gain_direct_sum(theta, ris, z) - gain_closed_form(plan, ris, z)));
  }
  return finish("direct-sum gain equals closed form", worst <= tolerance,
                format("%zu plans, max |diff| = %.3g (tol %.1g)", plans, worst, tolerance), sw);
}

CheckResult check_gain_magnitude(std::size_t plans, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < plans; ++i) {
    const auto ris = unit_ris(pick(rng, 1, 40), pick(rng, 1, 40));
    const auto plan = random_plan(rng, ris.ny, pick(rng, 1, 5));
    for (int k = 0; k < 5; ++k) {
      const PhaseGradient z{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0, 0, 0};
      worst = std::max(worst, std::abs(gain_closed_form(plan, ris, z)));
    }
    for (const auto& g : plan.gradients) worst = std::max(worst, std::abs(gain_closed_form(plan, ris, g)));
  }
  return finish("gain magnitude <= 1", worst <= 1.0 + 1e-12, format("max |d| = %.15g", worst), sw);
}

CheckResult check_gain_convergence(std::size_t plans, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  double worst_small = 0.0, worst_large = 0.0;
  for (std::size_t i = 0; i < plans; ++i) {
    const std::size_t s = pick(rng, 2, 4);
    PartitionPlan small;
    // Positive composition of 90 columns.
    std::vector<std::size_t> cuts;
    while (cuts.size() + 1 < s) {
      const std::size_t c = pick(rng, 1, 89);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(90);
    std::size_t prev = 0;
    for (std::size_t c : cuts) {
      small.column_counts.push_back(c - prev);
      prev = c;
    }
    for (std::size_t k = 0; k < s; ++k) {
      small.t.push_back(static_cast<double>(small.column_counts[k]) / 90.0);
      auto g = gradient_for(random_direction(rng), random_direction(rng));
      g.u = k;
      g.v = k;
      small.gradients.push_back(g);
      small.psi.push_back(2.0 * kPi * rng.uniform());
    }
    PartitionPlan large = small;
    for (auto& c : large.column_counts) c *= 2;
    double gap_small = 0.0, gap_large = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      const auto asym = gain_asymptotic(small, k, k);
      gap_small = std::max(gap_small, std::abs(gain_closed_form(small, unit_ris(30, 90), small.gradients[k]) - asym));
      gap_large = std::max(gap_large, std::abs(gain_closed_form(large, unit_ris(60, 180), large.gradients[k]) - asym));
    }
    worst_small = std::max(worst_small, gap_small);
    worst_large = std::max(worst_large, gap_large);
    if (!(gap_large < gap_small)) ++failures;
  }
  return finish("closed-form gain approaches its limit as N grows", failures == 0,
                format("%zu/%zu plans not shrinking; worst gap 30x90 %.3g, 60x180 %.3g", failures, plans, worst_small,
                       worst_large),
                sw);
}

CheckResult check_asymptotic_gain_permutation(std::size_t plans, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < plans; ++i) {
    const std::size_t s = pick(rng, 2, 5);
    const auto plan = random_plan(rng, 60, s);
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    PartitionPlan permuted;
    for (std::size_t k : order) {
      permuted.t.push_back(plan.t[k]);
      permuted.column_counts.push_back(plan.column_counts[k]);
      permuted.gradients.push_back(plan.gradients[k]);
      permuted.psi.push_back(plan.psi[k]);
    }
    for (std::size_t k = 0; k < s; ++k)
      worst = std::max(worst, std::abs(gain_asymptotic(plan, k, k) - gain_asymptotic(permuted, k, k)));
  }
  return finish("asymptotic gain ignores sub-surface order", worst == 0.0, format("max |diff| = %.3g", worst), sw);
}

CheckResult check_tile_equivalence(std::size_t cases, double tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t side = i % 2 ? 16 : 9;  // N^0.5 tiles per side: 4 or 3
    const auto ris = unit_ris(side, side);
    const std::size_t tile = side == 16 ? 4 : 3;
    const auto plan = random_plan(rng, ris.ny, pick(rng, 1, 3), tile);
    const auto tiles = tile_plan_from_partition(plan, ris, 0.5);
    std::vector<PhaseGradient> probes = plan.gradients;
    for (int k = 0; k < 3; ++k) probes.push_back({4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0, 0, 0});
    for (const auto& z : probes)
      worst = std::max(worst, std::abs(tile_plan_gain(tiles, ris, z) - gain_closed_form(plan, ris, z)));
  }
  return finish("tiled plan reproduces horizontal-partition gain", worst <= tolerance,
                format("%zu cases, max |diff| = %.3g (tol %.1g)", cases, worst, tolerance), sw);
}

// ---------------------------------------------------------------- propositions

CheckResult check_grid_vs_oracle(std::size_t instances, double max_relative_shortfall, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  double worst_short = 0.0, worst_excess = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = random_problem(rng, 3, 2);
    const auto grid = grid_search(problem);
    const auto oracle = brute_force_p3(problem);
    const double bound = resolution_bound(problem, grid.allocation, GridSpec{});
    const double shortfall = (oracle.rate - grid.rate) / oracle.rate;
    const double excess = grid.rate - oracle.rate - bound;
    worst_short = std::max(worst_short, shortfall);
    worst_excess = std::max(worst_excess, excess);
    if (shortfall > max_relative_shortfall || excess > 1e-12) ++failures;
  }
  return finish("grid search vs lattice oracle", failures == 0,
                format("%zu/%zu failures; worst shortfall %.3g (tol %.1g), worst excess over bound %.3g", failures,
                       instances, worst_short, max_relative_shortfall, worst_excess),
                sw);
}

CheckResult check_p32_pruning(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  constexpr std::size_t kRes = 120;
  std::size_t failures = 0;
  double worst = -1e300;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t s = pick(rng, 1, 3);
    std::vector<double> m;
    for (std::size_t k = 0; k < s; ++k) m.push_back(log_uniform(rng, -1.0, 3.0));
    std::sort(m.begin(), m.end(), std::greater<>());
    const auto res = solve_p32(m);
    double best = -1.0;
    std::vector<double> t(s);
    // Barycentric lattice over the simplex.
    for (std::size_t a = 0; a <= kRes; ++a) {
      if (s == 1 && a != kRes) continue;
      for (std::size_t b = 0; b + a <= kRes; ++b) {
        if (s == 2 && a + b != kRes) continue;
        if (s == 1 && b != 0) continue;
        t[0] = static_cast<double>(a) / kRes;
        if (s >= 2) t[1] = static_cast<double>(b) / kRes;
        if (s == 3) t[2] = static_cast<double>(kRes - a - b) / kRes;
        best = std::max(best, p32_objective(m, t));
      }
    }
    worst = std::max(worst, best - res.rate);
    if (best > res.rate + 1e-9) ++failures;
  }
  return finish("pattern candidates dominate the t-simplex lattice", failures == 0,
                format("%zu/%zu failures; max(lattice - candidate) = %.3g", failures, instances, worst), sw);
}

CheckResult check_two_path_exclusions(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t mp = 0, pp = 0, mm = 0, failures = 0;
  auto g1 = [](double m, double t) { return 2.0 * m * t / (1.0 + m * t * t); };
  auto g2 = [](double m, double t) { return 2.0 * m * (1.0 - m * t * t) / ((1.0 + m * t * t) * (1.0 + m * t * t)); };
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<double> m{log_uniform(rng, -0.5, 2.5), log_uniform(rng, -0.5, 2.5)};
    std::sort(m.begin(), m.end(), std::greater<>());
    const double corner = p32_objective(m, std::vector<double>{1.0, 0.0});
    for (const Pattern& pattern : {Pattern{Label::Minus, Label::Plus}, Pattern{Label::Plus, Label::Plus},
                                   Pattern{Label::Minus, Label::Minus}}) {
      for (double w : pattern_solutions(m, pattern)) {
        const auto t = pattern_partition(m, pattern, w);
        if (t[0] <= 1e-9 || t[1] <= 1e-9) continue;
        if (pattern[0] == Label::Minus && pattern[1] == Label::Plus) {
          ++mp;
          if (p32_objective(m, t) > corner + 1e-12 * std::abs(corner)) ++failures;
          continue;
        }
        // Curvature along the simplex direction (1, -1).
        const double curv = g2(m[0], t[0]) + g2(m[1], t[1]);
        const double slope_gap = std::abs(g1(m[0], t[0]) - g1(m[1], t[1]));
        if (std::abs(curv) < 1e-9 || slope_gap > 1e-6 * std::max(1.0, g1(m[0], t[0]))) continue;
        if (pattern[0] == Label::Plus) {
          ++pp;
          if (curv >= 0.0) ++failures;
        } else {
          ++mm;
          if (curv <= 0.0) ++failures;
        }
      }
    }
  }
  return finish("two-path pattern exclusions", failures == 0 && mp > 0 && pp > 0,
                format("%zu failures; exercised (-,+) %zu, (+,+) %zu, (-,-) %zu", failures, mp, pp, mm), sw);
}

CheckResult check_sorted_pairing(std::size_t instances, double relative_tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  double worst = 0.0;
  auto sorted_gains = [&](std::size_t n) {
    std::vector<cd> g;
    for (std::size_t i = 0; i < n; ++i) g.push_back(rng.complex_normal());
    std::stable_sort(g.begin(), g.end(), [](cd a, cd b) { return std::abs(a) > std::abs(b); });
    return g;
  };
  const ProblemSolver solver = [](const AsymptoticProblem& p) { return solve(p).rate; };
  for (std::size_t i = 0; i < instances; ++i) {
    const auto alpha = sorted_gains(3);
    const auto beta = sorted_gains(3);
    const auto gamma = sorted_gains(pick(rng, 0, 2));
    CoefficientScale scale;
    scale.pl_cascaded = 9.0 * log_uniform(rng, 0.0, 3.0);
    scale.pl_direct = std::max<double>(1.0, static_cast<double>(gamma.size())) * log_uniform(rng, 0.0, 2.5);
    const auto table = enumerate_pairings(alpha, beta, gamma, scale, 1.0, solver);
    const auto sorted = std::find_if(table.begin(), table.end(), [](const PairingRate& r) { return r.sorted; });
    const double best = table.front().rate;
    const double deficit = (best - sorted->rate) / best;
    worst = std::max(worst, deficit);
    if (deficit > relative_tolerance) ++failures;
  }
  return finish("sorted pairing is never beaten", failures == 0,
                format("%zu/%zu beaten; worst relative deficit %.3g (tol %.1g)", failures, instances, worst,
                       relative_tolerance),
                sw);
}

CheckResult check_exchange_inequality(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0, tested = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    double mi = log_uniform(rng, 0.0, 3.0), mj = log_uniform(rng, 0.0, 3.0);
    if (mi < mj) std::swap(mi, mj);
    if (mi - mj < 1e-6 * mi) continue;
    const double pi = rng.uniform(), pj = rng.uniform(), ti = rng.uniform(), tj = rng.uniform();
    double xi = pi * ti * ti, xj = pj * tj * tj;
    if (xi > xj) std::swap(xi, xj);
    if (xj - xi < 1e-6 * xj) continue;
    ++tested;
    const double before = std::log2(1.0 + mi * xi) + std::log2(1.0 + mj * xj);
    const double after = std::log2(1.0 + mi * xj) + std::log2(1.0 + mj * xi);
    if (!(after > before)) ++failures;
  }
  return finish("exchange inequality", failures == 0 && tested > 0,
                format("%zu/%zu failures", failures, tested), sw);
}

CheckResult check_rate_monotone(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = random_problem(rng, 5, 4);
    const auto sol = solve(problem, SolveConfig{SolverKind::Grid, {}, {}});
    const Allocation& a = sol.allocation;
    const double base = rate_unchecked(problem.m_r, problem.m_d, a);
    auto m_r = problem.m_r;
    auto m_d = problem.m_d;
    const std::size_t k = pick(rng, 0, m_r.size() + m_d.size() - 1);
    (k < m_r.size() ? m_r[k] : m_d[k - m_r.size()]) *= 1.0 + rng.uniform();
    if (rate_unchecked(m_r, m_d, a) < base) ++failures;
    // Joint permutation of (m, p, t) triples.
    std::vector<std::size_t> order(problem.cascaded());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng.engine());
    std::vector<double> pm;
    Allocation pa;
    pa.p_d = a.p_d;
    for (std::size_t s : order) {
      pm.push_back(problem.m_r[s]);
      pa.p_r.push_back(a.p_r[s]);
      pa.t.push_back(a.t[s]);
    }
    if (std::abs(rate_unchecked(pm, problem.m_d, pa) - base) > 1e-12 * std::max(1.0, base)) ++failures;
  }
  return finish("rate monotone in coefficients and permutation invariant", failures == 0,
                format("%zu failures over %zu instances", failures, instances), sw);
}

// ---------------------------------------------------------------- lemmas

CheckResult check_lemmas(std::size_t instances, double lemma1_tolerance, double order_tolerance,
                         double pattern_tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t f1 = 0, f2 = 0, f3 = 0;
  double w1 = 0.0, w2 = 0.0, w3 = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = random_problem(rng, 5, 4, 4.0);
    const auto sol = solve(problem);
    const auto& a = sol.allocation;
    const double p_r_total = std::accumulate(a.p_r.begin(), a.p_r.end(), 0.0);
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (std::size_t s : sol.active_r) e1 = std::max(e1, std::abs(a.t[s] - a.p_r[s] / p_r_total));
    for (std::size_t s = 1; s < problem.cascaded(); ++s)
      e2 = std::max({e2, a.t[s] - a.t[s - 1], a.p_r[s] - a.p_r[s - 1]});
    for (std::size_t s : sol.active_r) {
      const double mt = problem.m_r[s] * a.p_r[s];
      const double root = std::sqrt(std::max(0.0, 1.0 / (sol.w * sol.w) - 1.0 / mt));
      e3 = std::max(e3, std::min(std::abs(a.t[s] - (1.0 / sol.w + root)), std::abs(a.t[s] - (1.0 / sol.w - root))));
    }
    w1 = std::max(w1, e1);
    w2 = std::max(w2, e2);
    w3 = std::max(w3, e3);
    if (!(e1 < lemma1_tolerance)) ++f1;
    if (!(e2 <= order_tolerance)) ++f2;
    if (!(e3 < pattern_tolerance)) ++f3;
  }
  return finish("solution structure (linear t-p relation, ordering, pattern form)", f1 + f2 + f3 == 0,
                format("%zu instances; failures %zu/%zu/%zu; worst %.3g / %.3g / %.3g", instances, f1, f2, f3, w1, w2,
                       w3),
                sw);
}

// ---------------------------------------------------------------- solvers

CheckResult check_water_filling(std::size_t instances, double budget_tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  double worst_budget = 0.0, worst_slack = 0.0;
  const auto ref = water_filling(std::vector<double>{4.0, 1.0}, 1.0);
  const bool example_ok = std::abs(ref.p[0] - 0.875) < 1e-12 && std::abs(ref.p[1] - 0.125) < 1e-12 &&
                          std::abs(ref.v - 8.0 / 9.0) < 1e-12;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<double> m(pick(rng, 1, 8));
    for (double& x : m) x = log_uniform(rng, -2.0, 3.0);
    const double budget = log_uniform(rng, -2.0, 2.0);
    const auto wf = water_filling(m, budget);
    const double sum = std::accumulate(wf.p.begin(), wf.p.end(), 0.0);
    const double budget_err = std::abs(sum - budget) / budget;
    const double level = 1.0 / wf.v;
    double slack = 0.0;
    bool ok = budget_err <= budget_tolerance;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (wf.p[k] > 0.0) {
        slack = std::max(slack, std::abs(wf.p[k] - (level - 1.0 / m[k])) / level);
      } else {
        ok = ok && wf.p[k] == 0.0 && level - 1.0 / m[k] <= 1e-12 * level;
      }
    }
    ok = ok && slack <= 1e-12;
    worst_budget = std::max(worst_budget, budget_err);
    worst_slack = std::max(worst_slack, slack);
    if (!ok) ++failures;
  }
  return finish("water-filling budget and slackness", failures == 0 && example_ok,
                format("m=[4,1]: (%.15g, %.15g) v=%.15g; %zu/%zu failures; worst budget %.3g (tol %.1g), slack %.3g",
                       ref.p[0], ref.p[1], ref.v, failures, instances, worst_budget, budget_tolerance, worst_slack),
                sw);
}

CheckResult check_solver_agreement(std::size_t instances, double relative_tolerance, double min_fraction,
                                   double residual_tolerance, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t warm_ok = 0, cold_ok = 0, residual_fail = 0;
  double worst_residual = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = random_problem(rng, 5, 4, 4.0);
    const auto grid = solve(problem, SolveConfig{SolverKind::Grid, {}, {}});
    const std::size_t k = grid.active_r.size(), j = grid.active_d.size();
    bool warm_close = false;
    if (k + j > 0) {
      const auto warm = lm_solve(problem, k, j, grid.allocation, std::make_pair(grid.v, grid.w));
      warm_close = std::abs(warm.solution.rate - grid.rate) <= relative_tolerance * grid.rate;
      if (warm.converged) {
        worst_residual = std::max(worst_residual, warm.residual_norm);
        if (!(warm.residual_norm < residual_tolerance)) ++residual_fail;
      }
    }
    const auto cold = lm_cold(problem);
    if (cold.lm_converged) {
      worst_residual = std::max(worst_residual, cold.residual_norm);
      if (!(cold.residual_norm < residual_tolerance)) ++residual_fail;
    }
    if (warm_close) ++warm_ok;
    if (std::abs(cold.rate - grid.rate) <= relative_tolerance * grid.rate) ++cold_ok;
  }
  const double n = static_cast<double>(instances);
  const bool ok = warm_ok >= min_fraction * n && cold_ok >= min_fraction * n && residual_fail == 0;
  return finish("LM agrees with grid search", ok,
                format("warm %zu/%zu, cold %zu/%zu within %.3g; residual failures %zu, worst %.3g (tol %.1g)", warm_ok,
                       instances, cold_ok, instances, relative_tolerance, residual_fail, worst_residual,
                       residual_tolerance),
                sw);
}

CheckResult check_budget_exactness(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto problem = random_problem(rng, 5, 4);
    const GridSearchConfig gc;
    const auto grid = grid_search(problem, gc);
    auto total = [](const Allocation& a) {
      return std::accumulate(a.p_r.begin(), a.p_r.end(), 0.0) + std::accumulate(a.p_d.begin(), a.p_d.end(), 0.0);
    };
    if (std::abs(total(grid.allocation) - problem.power) > gc.accuracy * problem.power) ++failures;
    if (!grid.active_r.empty() || !grid.active_d.empty()) {
      const auto lm = lm_solve(problem, grid.active_r.size(), grid.active_d.size(), grid.allocation);
      if (lm.converged && std::abs(total(lm.solution.allocation) - problem.power) > 1e-10 * problem.power) ++failures;
    }
    const auto a = solve(problem);
    const auto b = solve(problem);
    if (a.rate != b.rate || a.allocation.p_r != b.allocation.p_r || a.allocation.t != b.allocation.t) ++failures;
  }
  return finish("budget exactness and determinism", failures == 0,
                format("%zu failures over %zu instances", failures, instances), sw);
}

CheckResult check_fig3_thresholds(double existence_db, double optimality_db, double tolerance_db) {
  Stopwatch sw;
  const std::vector<double> m{93.0, 74.0, 54.0, 15.0};
  const auto report = fig3_regions(m, -10.0, 15.0, 0.25);
  const double e = report.existence_threshold_db.value_or(std::nan(""));
  const double o = report.optimality_threshold_db.value_or(std::nan(""));
  const bool ok = std::abs(e - existence_db) <= tolerance_db && std::abs(o - optimality_db) <= tolerance_db;
  return finish("four-path pattern thresholds", ok,
                format("all-plus exists from %.4f dB, optimal from %.4f dB (expected %.2f / %.2f +- %.2f)", e, o,
                       existence_db, optimality_db, tolerance_db),
                sw);
}

// ---------------------------------------------------------------- finite

CheckResult check_factorized_rate(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto cfg = small_config(8 + 4 * (i % 3), 8, 12, 3, 3, 2);
    const auto c = solved_case(cfg, derive_seed(seed, i));
    const auto e = adapt(c, derive_seed(seed, i));
    const auto theta = build_theta(e.plan, cfg.ris_geometry());
    const double direct = logdet_rate(effective_channel(c.realization, theta), e.q, c.realization.noise_power);
    worst = std::max(worst, std::abs(direct - e.rate) / std::max(1.0, direct));
  }
  return finish("factorized rate equals full log-det", worst < 1e-9, format("max relative diff %.3g", worst), sw);
}

CheckResult check_refine_monotone(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto cfg = small_config(8, 8, 16, 3, 4, 2);
    const auto c = solved_case(cfg, derive_seed(seed, i));
    auto e = adapt(c, derive_seed(seed, i));
    for (int sweep = 0; sweep < 3; ++sweep) {
      const auto next = refine_common_phases(e, 1, 32);
      if (next.rate < e.rate - 1e-12 * std::max(1.0, e.rate)) ++failures;
      e = next;
    }
  }
  return finish("psi refinement never lowers the rate", failures == 0,
                format("%zu decreasing sweeps over %zu instances", failures, instances), sw);
}

CheckResult check_refine_vs_exhaustive(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  constexpr std::size_t kGrid = 32;
  std::size_t failures = 0, tested = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto cfg = small_config(8, 8, 8, 2, 2, 1);
    const auto c = solved_case(cfg, derive_seed(seed, i));
    const auto e = adapt(c, derive_seed(seed, i));
    if (e.plan.size() == 0 || e.plan.size() > 2) continue;
    ++tested;
    const auto best = exhaustive_psi(e, kGrid);
    const auto refined = refine_common_phases(e, 4, kGrid);
    // Coordinate ascent on the same grid may stop at a coordinate-wise optimum;
    // never above the exhaustive optimum.
    const double excess = refined.rate - best.rate;
    worst = std::max(worst, (best.rate - refined.rate) / best.rate);
    if (excess > 1e-9 * std::max(1.0, best.rate)) ++failures;
    if (refined.rate < e.rate - 1e-12) ++failures;
  }
  return finish("coordinate ascent bounded by exhaustive psi grid", failures == 0 && tested > 0,
                format("%zu failures over %zu cases; worst shortfall to grid optimum %.3g", failures, tested, worst),
                sw);
}

CheckResult check_eigenmode_vs_isotropic(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t m = 16;
    const std::size_t k = pick(rng, 1, 4);
    std::vector<std::size_t> bins(m);
    std::iota(bins.begin(), bins.end(), std::size_t{0});
    std::shuffle(bins.begin(), bins.end(), rng.engine());
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    std::vector<double> gains;
    for (std::size_t q = 0; q < k; ++q) {
      // DFT angles make the steering columns exactly orthonormal.
      const auto at = steering_vector(2.0 * static_cast<double>(bins[q]) / m, m);
      const auto ar = steering_vector(2.0 * static_cast<double>(bins[m - 1 - q]) / m, m);
      const cd g = rng.complex_normal();
      h += g * ar * at.adjoint();
      a.col(static_cast<Eigen::Index>(q)) = at;
      gains.push_back(std::norm(g));
    }
    const double sigma2 = log_uniform(rng, -2.0, 1.0);
    const double power = 1.0;
    std::vector<double> snr;
    for (double g : gains) snr.push_back(g / sigma2);
    const auto wf = water_filling(snr, power);
    const double eig = logdet_rate(h, eigenmode_covariance(a, wf.p), sigma2);
    const Eigen::MatrixXcd iso =
        (power / static_cast<double>(m)) * Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    if (eig < logdet_rate(h, iso, sigma2) - 1e-12) ++failures;
  }
  return finish("eigenmode covariance beats isotropic on orthonormal bases", failures == 0,
                format("%zu/%zu failures", failures, instances), sw);
}

CheckResult check_rounding_feasibility(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    std::vector<double> t(pick(rng, 1, 6));
    for (double& x : t) x = rng.uniform() < 0.2 ? 0.0 : log_uniform(rng, -3.0, 0.0);
    if (std::all_of(t.begin(), t.end(), [](double x) { return x == 0.0; })) t[0] = 1.0;
    const double sum = std::accumulate(t.begin(), t.end(), 0.0);
    for (double& x : t) x /= sum;
    const std::size_t ny = pick(rng, 1, 200);
    const auto r = round_partition(t, ny);
    bool ok = std::accumulate(r.counts.begin(), r.counts.end(), std::size_t{0}) == ny;
    for (std::size_t s = 0; s < t.size(); ++s) {
      const bool dropped = std::find(r.dropped.begin(), r.dropped.end(), s) != r.dropped.end();
      if (t[s] == 0.0 || dropped) ok = ok && r.counts[s] == 0;
      else ok = ok && r.counts[s] > 0;
    }
    if (!ok) ++failures;
  }
  return finish("rounded columns sum to Ny and are positive", failures == 0,
                format("%zu/%zu failures", failures, instances), sw);
}

CheckResult check_direct_only(std::size_t instances, std::uint64_t seed) {
  Stopwatch sw;
  double worst = 0.0;
  std::size_t tested = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const auto cfg = small_config(8, 8, 8, 2, 3, 3);
    const auto c = solved_case(cfg, derive_seed(seed, i), 1e-40);
    const double p_r = std::accumulate(c.solution.allocation.p_r.begin(), c.solution.allocation.p_r.end(), 0.0);
    if (p_r != 0.0) continue;
    ++tested;
    const auto e = adapt(c, derive_seed(seed, i));
    const Eigen::MatrixXcd h = std::sqrt(c.realization.pl_direct) * c.realization.h3;
    const double direct = logdet_rate(h, e.q, c.realization.noise_power);
    worst = std::max(worst, std::abs(direct - e.rate) / std::max(1.0, direct));
  }
  return finish("direct-only allocation ignores the RIS", tested > 0 && worst < 1e-9,
                format("%zu cases, max relative diff %.3g", tested, worst), sw);
}

ConvergenceLadder finite_convergence_ladder(std::size_t seeds, std::size_t jobs, std::uint64_t seed) {
  struct Rung {
    std::size_t m, nx, ny;
  };
  ConvergenceLadder out;
  for (const Rung& r : {Rung{16, 30, 30}, Rung{32, 30, 90}, Rung{64, 60, 180}}) {
    ExperimentSpec spec;
    spec.config.mt = spec.config.mr = r.m;
    spec.config.nx = r.nx;
    spec.config.ny = r.ny;
    spec.config.realizations = seeds;
    spec.config.seed = seed;
    spec.solvers = {SolverKind::Both};
    spec.jobs = std::max<std::size_t>(1, jobs);
    const auto result = run_experiment(spec);
    std::vector<double> gaps;
    for (const auto& row : result.rows)
      if (row.status == "ok" && row.rate_asymptotic > 0.0)
        gaps.push_back(std::abs(row.rate_finite - row.rate_asymptotic) / row.rate_asymptotic);
    out.median_gap.push_back(median(gaps));
  }
  out.decreasing = true;
  for (std::size_t i = 1; i < out.median_gap.size(); ++i)
    out.decreasing = out.decreasing && out.median_gap[i] < out.median_gap[i - 1];
  return out;
}

CheckResult check_finite_convergence(std::size_t seeds, double max_final_gap, std::size_t jobs, std::uint64_t seed) {
  Stopwatch sw;
  const auto ladder = finite_convergence_ladder(seeds, jobs, seed);
  const bool ok = ladder.decreasing && ladder.median_gap.back() < max_final_gap;
  return finish("finite rate approaches the asymptotic rate", ok,
                format("median gaps %.4f, %.4f, %.4f over %zu seeds (decreasing: %s; final limit %.3g)",
                       ladder.median_gap[0], ladder.median_gap[1], ladder.median_gap[2], seeds,
                       ladder.decreasing ? "yes" : "no", max_final_gap),
                sw);
}

// ---------------------------------------------------------------- suites

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"lemmas", "propositions", "gains", "solvers", "finite", "all"};
  return names;
}

bool is_verify_suite(const std::string& name) {
  const auto& n = verify_suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
  if (!is_verify_suite(suite)) throw std::invalid_argument("unknown verify suite '" + suite + "'");
  VerifyReport report;
  report.suite = suite;
  auto& c = report.checks;
  const bool all = suite == "all";
  if (all || suite == "gains") {
    c.push_back(check_response_norms(seed));
    c.push_back(check_orthogonality_bound(seed));
    c.push_back(check_channel_rank(seed));
    c.push_back(check_gain_identity(50, 1e-10, seed));
    c.push_back(check_gain_magnitude(100, seed));
    c.push_back(check_gain_convergence(50, seed));
    c.push_back(check_asymptotic_gain_permutation(50, seed));
    c.push_back(check_tile_equivalence(20, 1e-10, seed));
  }
  if (all || suite == "propositions") {
    c.push_back(check_grid_vs_oracle(100, 1e-3, seed));
    c.push_back(check_p32_pruning(200, seed));
    c.push_back(check_two_path_exclusions(500, seed));
    c.push_back(check_sorted_pairing(200, 1e-6, seed));
    c.push_back(check_exchange_inequality(1000, seed));
    c.push_back(check_rate_monotone(100, seed));
  }
  if (all || suite == "lemmas") c.push_back(check_lemmas(200, 1e-6, 1e-9, 1e-6, seed));
  if (all || suite == "solvers") {
    c.push_back(check_water_filling(1000, 1e-12, seed));
    c.push_back(check_solver_agreement(200, 5e-3, 0.95, 1e-10, seed));
    c.push_back(check_budget_exactness(100, seed));
    c.push_back(check_fig3_thresholds(4.71, 6.43, 0.1));
  }
  if (all || suite == "finite") {
    c.push_back(check_factorized_rate(10, seed));
    c.push_back(check_refine_monotone(10, seed));
    c.push_back(check_refine_vs_exhaustive(10, seed));
    c.push_back(check_eigenmode_vs_isotropic(100, seed));
    c.push_back(check_rounding_feasibility(1000, seed));
    c.push_back(check_direct_only(10, seed));
    CheckResult trend = check_finite_convergence(50, 1.0, std::thread::hardware_concurrency(), seed);
    trend.name = "finite-to-asymptotic gap decreases with scale";
    c.push_back(std::move(trend));
  }
  return report;
}

}  // namespace rispart
