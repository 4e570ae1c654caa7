// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "rispart/asymptotic.hpp"
#include "rispart/config.hpp"
#include "rispart/experiment.hpp"
#include "rispart/finite.hpp"
#include "rispart/solver.hpp"

using namespace rispart;
using Catch::Approx;

TEST_CASE("eigenmode covariance") {
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(4, 2);
  const std::vector<double> zero{0.0, 0.0};
  CHECK(eigenmode_covariance(a, zero).norm() == 0.0);

  const std::vector<double> p{1.0, 2.0};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eigenmode_covariance(a, p));
  const auto ev = es.eigenvalues();
  CHECK(ev(3) == Approx(2.0));
  CHECK(ev(2) == Approx(1.0));
  CHECK(std::abs(ev(0)) < 1e-15);

  Rng rng(12);
  ArrayGeometry tx{32, 0.5, 1.0};
  Eigen::MatrixXcd basis(32, 3);
  for (int k = 0; k < 3; ++k) basis.col(k) = ula_response(2 * std::numbers::pi * rng.uniform(), tx);
  const std::vector<double> q{0.5, 1.0, 1.5};
  CHECK(eigenmode_covariance(basis, q).trace().real() == Approx(3.0).epsilon(0.02));
}

TEST_CASE("log-det rate") {
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(3, 3);
  CHECK(logdet_rate(Eigen::MatrixXcd::Zero(2, 3), q, 1.0) == 0.0);

  Eigen::VectorXcd h(2), g(3);
  h << cd(0.6, 0), cd(0, 0.8);
  g << cd(1, 0), cd(0, 0), cd(0, 0);
  const Eigen::MatrixXcd hg = h * g.adjoint();
  const double power = 5.0;
  const Eigen::MatrixXcd qq = power * g * g.adjoint();
  CHECK(logdet_rate(hg, qq, 0.5) == Approx(std::log2(1.0 + power / 0.5)));

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(3, 3);
  bad(0, 0) = -1.0;
  CHECK_THROWS(logdet_rate(hg, bad, 1.0));
}

namespace {

struct Prepared {
  SimulationConfig cfg;
  ChannelRealization channel;
  AsymptoticProblem problem;
  PairingMatrix pairing{1, 1};
  Solution solution;
};

Prepared prepare(std::size_t l1, std::size_t l2, std::size_t l3, std::uint64_t seed) {
  Prepared p;
  p.cfg.mt = 16;
  p.cfg.mr = 16;
  p.cfg.nx = 10;
  p.cfg.ny = 30;
  p.cfg.l1 = l1;
  p.cfg.l2 = l2;
  p.cfg.l3 = l3;
  p.channel = draw_realization(p.cfg, seed);
  p.pairing = optimal_pairing(l1, l2);
  p.problem = coefficients(p.channel, p.pairing, p.cfg.power_w);
  p.solution = solve(p.problem);
  return p;
}

}  // namespace

TEST_CASE("adapt and refine") {
  auto p = prepare(3, 3, 2, 44);
  Rng rng(1);
  const auto ev = adapt_solution(p.solution, p.problem, p.channel, p.pairing, p.cfg.ris_geometry(), p.cfg.tx_geometry(), rng);
  CHECK(ev.rate > 0.0);
  CHECK(ev.asymptotic_rate == Approx(p.solution.rate));
  CHECK(rate_for_psi(ev, ev.plan.psi) == Approx(ev.rate).epsilon(1e-12));

  const auto refined = refine_common_phases(ev);
  CHECK(refined.rate >= ev.rate - 1e-12);

  // Same realization, same seed: identical evaluation.
  Rng rng2(1);
  const auto again = adapt_solution(p.solution, p.problem, p.channel, p.pairing, p.cfg.ris_geometry(), p.cfg.tx_geometry(), rng2);
  CHECK(again.rate == ev.rate);
}

TEST_CASE("single pair without direct channel is phase invariant") {
  auto p = prepare(1, 1, 1, 7);
  p.channel.pl_direct = 0.0;
  p.problem = coefficients(p.channel, p.pairing, p.cfg.power_w);
  p.problem.m_d.assign(p.problem.m_d.size(), 0.0);
  p.solution = solve(p.problem);
  Rng rng(2);
  const auto ev = adapt_solution(p.solution, p.problem, p.channel, p.pairing, p.cfg.ris_geometry(), p.cfg.tx_geometry(), rng);
  REQUIRE(ev.plan.size() == 1);
  for (double psi : {0.0, 1.0, 2.5, 5.0}) {
    const std::vector<double> v{psi};
    CHECK(rate_for_psi(ev, v) == Approx(ev.rate).epsilon(1e-9));
  }
  CHECK(refine_common_phases(ev).rate == Approx(ev.rate).epsilon(1e-9));
}
