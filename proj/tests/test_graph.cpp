#include <doctest.h>

#include "rdpg/errors.hpp"
#include "rdpg/graph.hpp"

using namespace rdpg;

TEST_CASE("graph construction merges orientations and counts degrees") {
  const Graph g(4, {{0, 1}, {1, 0}, {2, 1}, {3, 2}});
  CHECK(g.n() == 4);
  CHECK(g.m() == 3);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 3));
  CHECK(g.degrees() == std::vector<int>{1, 2, 2, 1});
  CHECK(g.max_degree() == 2);
  CHECK(g.min_degree() == 1);
  const Eigen::MatrixXd a = g.adjacency();
  CHECK(a == a.transpose());
  CHECK(a.diagonal().isZero());
  CHECK(a.sum() == doctest::Approx(6.0));
}

TEST_CASE("graph rejects self-loops and out-of-range nodes") {
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), InputError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InputError);
  CHECK_THROWS_AS(Graph(3, {{-1, 2}}), InputError);
  CHECK_THROWS_AS(Graph::disjoint_edges(5), InputError);
}

TEST_CASE("named graphs") {
  CHECK(Graph::complete(5).m() == 10);
  CHECK(Graph::empty(5).m() == 0);
  const Graph d = Graph::disjoint_edges(6);
  CHECK(d.m() == 3);
  CHECK(d.has_edge(4, 5));
  CHECK(Graph::from_adjacency(d.adjacency()) == d);
}

TEST_CASE("from_adjacency validates its input") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 1) = 1;
  CHECK_THROWS_AS(Graph::from_adjacency(a), InputError);  // asymmetric
  a(1, 0) = 1;
  a(2, 2) = 1;
  CHECK_THROWS_AS(Graph::from_adjacency(a), InputError);  // self-loop
  a(2, 2) = 0;
  a(0, 2) = a(2, 0) = 0.5;
  CHECK_THROWS_AS(Graph::from_adjacency(a), InputError);  // not 0/1
}

TEST_CASE("ProbMatrix checks off-diagonal entries with slack") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(3, 3, 0.5);
  p(0, 0) = 7.0;  // the diagonal is not a probability
  CHECK_NOTHROW(ProbMatrix(SymMatrixd::from_dense(p)));
  p(0, 1) = p(1, 0) = 1.0 + 1e-9;
  CHECK_NOTHROW(ProbMatrix(SymMatrixd::from_dense(p)));
  p(0, 1) = p(1, 0) = -1e-3;
  try {
    ProbMatrix bad(SymMatrixd::from_dense(p));
    FAIL("expected ModelViolation");
  } catch (const ModelViolation& e) {
    REQUIRE(e.offending_pairs.size() == 1);
    CHECK(e.offending_pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  }
}

TEST_CASE("ProbMatrix PSD flag") {
  CHECK(ProbMatrix(SymMatrixd::constant(4, 0.3)).is_psd());
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, 2, 0.9);
  p.diagonal().setConstant(0.1);
  CHECK_FALSE(ProbMatrix(SymMatrixd::from_dense(p)).is_psd());
}
