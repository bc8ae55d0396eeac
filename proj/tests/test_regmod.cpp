#include <doctest.h>

#include <cmath>
#include <random>

#include "rdpg/certify.hpp"
#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/metrics.hpp"
#include "rdpg/regmod.hpp"
#include "test_util.hpp"

using namespace rdpg;

namespace {

RegModSolution solve(const Graph& g, double c) {
  RegModOptions opts;
  opts.c = c;
  return solve_regmod(g, opts);
}

SymMatrixd filled(int n, double diag, double off) {
  SymMatrixd m = SymMatrixd::constant(n, off);
  m.set_diagonal(diag);
  return m;
}

}  // namespace

TEST_CASE("regmod objective and gradient fixtures") {
  CHECK(regmod_objective(filled(3, 0.5, 0.5), Graph::complete(3), 1.0) ==
        doctest::Approx(6 * std::log(0.5) - 1.5));
  CHECK(regmod_objective(SymMatrixd::constant(3, 1.0 / 3), Graph::empty(3), 1.0) ==
        doctest::Approx(6 * std::log(2.0 / 3) - 1));
  const Graph edge(2, {{0, 1}});
  CHECK(regmod_objective(filled(2, 0.5, 0.5), edge, 3.0) == doctest::Approx(2 * std::log(0.5) - 3.0));

  CHECK(regmod_gradient(filled(2, 0.5, 0.5), edge, 3.0)(0, 1) == doctest::Approx(2.0));
  CHECK(regmod_gradient(filled(2, 0.5, 0.5), Graph::empty(2), 3.0)(0, 1) == doctest::Approx(-2.0));
  CHECK(regmod_gradient(filled(2, 0.5, 0.5), edge, 3.0)(1, 1) == -3.0);
}

TEST_CASE("regmod gradient matches central differences") {
  std::mt19937_64 rng(17);
  const int n = 9;
  std::uniform_real_distribution<double> u(1.0 / n, 1.0 - 1.0 / n);
  const Graph g = testutil::random_graph(n, 0.4, rng);
  const double c = 2.5;
  SymMatrixd p = SymMatrixd::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p.set(i, j, u(rng));
  const SymMatrixd grad = regmod_gradient(p, g, c);
  const auto f = [&](const SymMatrixd& m) { return regmod_objective(m, g, c); };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double fd = testutil::central_difference(f, p, i, j, 1e-6) / 2.0;
      CHECK(fd == doctest::Approx(grad(i, j)).epsilon(1e-5).scale(1.0));
      CHECK(std::abs(grad(i, j)) <= n);
    }
  }
  // Diagonal direction: d/dP_ii = -C.
  SymMatrixd up = p, down = p;
  up.set(0, 0, p(0, 0) + 1e-6);
  down.set(0, 0, p(0, 0) - 1e-6);
  CHECK((f(up) - f(down)) / 2e-6 == doctest::Approx(-c).epsilon(1e-5));
}

TEST_CASE("regmod fixtures") {
  SUBCASE("single edge: the box is the point 1/2") {
    for (double c : {0.5, 3.0, 20.0}) {
      const RegModSolution s = solve(Graph(2, {{0, 1}}), c);
      CHECK(s.converged);
      CHECK(s.primal.p(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
      CHECK(s.primal.p(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
      CHECK(s.primal.p(1, 1) == doctest::Approx(0.5).epsilon(1e-6));
      CHECK(s.primal.objective == doctest::Approx(2 * std::log(0.5) - c).epsilon(1e-6));
    }
  }
  SUBCASE("empty graph on three nodes") {
    for (double c : {1.0, 4.0}) {
      const RegModSolution s = solve(Graph::empty(3), c);
      CHECK(s.converged);
      CHECK((s.primal.p.dense() - Eigen::MatrixXd::Constant(3, 3, 1.0 / 3)).cwiseAbs().maxCoeff() <= 1e-6);
      CHECK(s.primal.objective == doctest::Approx(6 * std::log(2.0 / 3) - c).epsilon(1e-6));
      const LambdaStats st = lambda_stats(s.primal.p.values(), Graph::empty(3));
      CHECK(st.z == 6);
    }
  }
}

TEST_CASE("one iteration never lowers the objective") {
  std::mt19937_64 rng(2);
  const Graph g = testutil::random_graph(12, 0.3, rng);
  const int n = g.n();
  const double c = 3.0;
  const double density = 2.0 * g.m() / (n * (n - 1.0));
  SymMatrixd start = SymMatrixd::constant(n, density);
  start.set_diagonal(1.0);
  const SymMatrixd p0 = dykstra(start, ConstraintSet<double>::offdiag_box(1.0 / n, 1.0 - 1.0 / n), 1e-12, 50000);
  RegModOptions opts;
  opts.c = c;
  opts.max_iter = 1;
  const RegModSolution one = solve_regmod(g, opts);
  CHECK(one.primal.objective >= regmod_objective(p0, g, c) - 1e-9);
  CHECK_FALSE(one.converged);
}

TEST_CASE("regmod solutions are feasible, stationary and obey the rederived trace bound") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const Graph g = testutil::random_graph(14 + 2 * trial, 0.3, rng);
    const double c = 1.5 + 2.5 * trial;
    const RegModSolution s = solve(g, c);
    CHECK(s.converged);
    CHECK(s.box_residual <= 1e-8);
    CHECK(min_eigenvalue(s.primal.p.values()) >= -1e-6);
    CHECK(s.kkt.stationarity <= 1e-4);
    CHECK(s.kkt.q_diag_error <= 1e-4 * c);
    CHECK(s.kkt.q_min_eigenvalue >= -1e-4 * c);
    CHECK(s.kkt.box_sign_violation <= 1e-4);
    const LambdaStats st = lambda_stats(s.primal.p.values(), g);
    const CertReport rep = check_regmod_trace(s.primal.p.values(), g, c, st);
    const CertCheck* bound = rep.find("regmod_trace_rederived");
    REQUIRE(bound != nullptr);
    CHECK(bound->pass);
    CHECK(rep.pass());
  }
}

TEST_CASE("the maximizer beats any feasible point") {
  // A feasible RDPG P (inside the box, PSD) can never do better than P*.
  Eigen::MatrixXd x(20, 2);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.3, 0.6);
  for (int i = 0; i < 20; ++i) x(i, 0) = u(rng), x(i, 1) = u(rng);
  const ProbMatrix p = prob_from_latent(x);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Graph g = sample_rdpg(p, seed);
    for (double c : {2.0, 8.0}) {
      const RegModSolution s = solve(g, c);
      CHECK(s.primal.objective >= regmod_objective(p.values(), g, c) - 1e-7);
      // L_A(P) - L_A(P*) <= C (tr P - tr P*)
      const double lhs = bernoulli_loglik(p.values(), g) - bernoulli_loglik(s.primal.p.values(), g);
      CHECK(lhs <= c * (p.trace() - s.primal.p.trace()) + 1e-7);
    }
  }
}

TEST_CASE("regmod input validation") {
  RegModOptions opts;
  CHECK_THROWS_AS(solve_regmod(Graph::empty(1), opts), InputError);
  opts.c = -1;
  CHECK_THROWS_AS(solve_regmod(Graph::empty(3), opts), InputError);
}
