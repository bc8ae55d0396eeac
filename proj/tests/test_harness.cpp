#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "rdpg/errors.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/harness.hpp"

using namespace rdpg;

namespace {

SweepRecord row(double c, int rep, std::optional<double> dist_p, std::optional<double> sqdist_a = {}) {
  SweepRecord r;
  r.c = c;
  r.replicate = rep;
  r.dist_p = dist_p;
  r.sqdist_a = sqdist_a;
  r.status = "ok";
  return r;
}

SweepConfig quiet(std::vector<double> grid) {
  SweepConfig cfg;
  cfg.c_grid = std::move(grid);
  cfg.record_timing = false;
  return cfg;
}

}  // namespace

TEST_CASE("C grid parsing") {
  CHECK(parse_c_grid("2:25:1").size() == 24);
  CHECK(parse_c_grid("2:25:1").back() == 25.0);
  const auto g = parse_c_grid("10:150:10");
  CHECK(g.size() == 15);
  CHECK(g.front() == 10.0);
  CHECK(g.back() == doctest::Approx(150.0));
  CHECK(parse_c_grid("0.5:1:0.25") == std::vector<double>{0.5, 0.75, 1.0});
  CHECK(parse_c_grid("3:3:1") == std::vector<double>{3.0});
  for (const char* bad : {"1:2", "a:2:1", "2:1:1", "1:2:0", "0:2:1", "1:2:-1", "1::1", "1:2:1:1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_c_grid(bad), InputError);
  }
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg = quiet({1, 2, 2});
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.c_grid = {2, 1};
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.c_grid = {};
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.c_grid = {1, 2};
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg.replicates = 1;
  CHECK_NOTHROW(cfg.validate());

  SweepInput none;
  CHECK_THROWS_AS(run_sweep(none, cfg), InputError);
  SweepInput labelled{std::nullopt, Graph::empty(4), {0, 1}};
  CHECK_THROWS_AS(run_sweep(labelled, cfg), InputError);
}

TEST_CASE("empty graph and zero P sweep") {
  SweepInput in;
  in.p = ProbMatrix(SymMatrixd(6));
  SweepConfig cfg = quiet({0.5, 2.0, 8.0});
  cfg.replicates = 2;
  const auto rows = run_sweep(in, cfg);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.d_star == 0);
    CHECK(*r.dist_p == doctest::Approx(0.0).scale(1.0));
    CHECK(*r.dist_a == doctest::Approx(0.0).scale(1.0));
    CHECK(*r.trace == doctest::Approx(0.0).scale(1.0));
    CHECK(r.status == "ok");
    CHECK(r.cert_pass);
    CHECK_FALSE(r.dunn.has_value());
  }
}

TEST_CASE("two-clique sweep keeps rank n/2 and leaves true-P columns empty") {
  SweepInput in;
  in.graph = Graph::disjoint_edges(10);
  in.labels = {0, 0, 1, 1, 2, 2, 3, 3, 4, 4};
  SweepConfig cfg = quiet({5, 10, 20});
  cfg.replicates = 4;  // a fixed graph runs once
  const auto rows = run_sweep(in, cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CAPTURE(r.c);
    CHECK(r.d_star == 5);
    CHECK(*r.trace == doctest::Approx(10.0 / r.c).epsilon(1e-6));
    CHECK_FALSE(r.dist_p.has_value());
    CHECK_FALSE(r.sqdist_p.has_value());
    CHECK(r.dunn.has_value());
    CHECK(r.cert_pass);
  }
  CHECK_THROWS_AS(select_c(rows, SelectCriterion::TrueSpectral), InputError);
  CHECK_NOTHROW(select_c(rows, SelectCriterion::EmpiricalSquared));
}

TEST_CASE("SBM sweep rank decreases with C") {
  SweepInput in;
  in.p = gen_sbm(default_sbm());
  SweepConfig cfg = quiet({2, 8, 20});
  cfg.replicates = 2;
  cfg.compute_dunn = false;
  const auto agg = aggregate(run_sweep(in, cfg));
  REQUIRE(agg.size() == 3);
  for (std::size_t k = 1; k < agg.size(); ++k) CHECK(agg[k].d_star->mean <= agg[k - 1].d_star->mean);
  CHECK(agg.front().d_star->mean > agg.back().d_star->mean);
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  SbmConfig sbm;
  sbm.sizes = {6, 6};
  sbm.block_probs = (Eigen::Matrix2d() << 0.6, 0.1, 0.1, 0.5).finished();
  SweepInput in;
  in.p = gen_sbm(sbm);
  in.labels = block_labels(sbm.sizes);
  SweepConfig cfg = quiet({2, 4, 8});
  cfg.replicates = 5;
  cfg.base_seed = 99;
  SweepConfig base = cfg;
  const std::string one = records_to_csv(run_sweep(in, cfg));
  CHECK(one == records_to_csv(run_sweep(in, cfg)));
  cfg.jobs = 3;
  CHECK(one == records_to_csv(run_sweep(in, cfg)));
  cfg.warm_start = false;
  const auto cold = run_sweep(in, cfg);
  REQUIRE(cold.size() == 15);
  const auto warm = run_sweep(in, base);
  for (std::size_t k = 0; k < warm.size(); ++k) CHECK(cold[k].d_star == warm[k].d_star);
  // Replicate r draws its graph from base_seed ^ r alone.
  cfg.base_seed = 98;
  CHECK(one != records_to_csv(run_sweep(in, cfg)));
}

TEST_CASE("solve failures become failed rows") {
  SweepInput in;
  in.graph = Graph::disjoint_edges(8);
  SweepConfig cfg = quiet({5, 10});
  cfg.solver.dykstra_tol = 1e-15;
  cfg.solver.dykstra_max_iter = 1;
  const auto rows = run_sweep(in, cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.status.rfind("failed: ", 0) == 0);
    CHECK_FALSE(r.d_star.has_value());
    CHECK_FALSE(r.cert_pass);
  }
}

TEST_CASE("aggregate bands against hand values") {
  std::vector<SweepRecord> recs = {row(1, 0, 1.0), row(1, 1, 2.0), row(1, 2, 4.0), row(2, 0, 3.0),
                                   row(2, 1, std::nullopt), row(3, 0, 5.0), row(3, 1, 5.0)};
  const auto agg = aggregate(recs);
  REQUIRE(agg.size() == 3);
  CHECK(agg[0].rows == 3);
  CHECK(agg[0].dist_p->mean == doctest::Approx(7.0 / 3));
  CHECK(agg[0].dist_p->sd == doctest::Approx(std::sqrt(7.0 / 3)));
  CHECK(agg[0].dist_p->count == 3);
  CHECK(agg[1].rows == 2);
  CHECK(agg[1].dist_p->count == 1);
  CHECK(agg[1].dist_p->sd == 0.0);  // a single value collapses the band
  CHECK(agg[2].dist_p->sd == 0.0);  // constant metric
  CHECK_FALSE(agg[0].dunn.has_value());

  const std::string csv = aggregate_to_csv(agg);
  CHECK(csv.rfind("c,rows,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("C selection") {
  std::vector<SweepRecord> v;
  const double curve[] = {5, 3, 1, 2, 4};
  for (int k = 0; k < 5; ++k) v.push_back(row(k + 1.0, 0, curve[k], 10 - curve[k]));
  CHECK(select_c(v, SelectCriterion::TrueSpectral) == 3.0);
  CHECK(select_c(v, SelectCriterion::EmpiricalSquared) == 1.0);

  std::vector<SweepRecord> flat;
  for (int k = 0; k < 4; ++k) flat.push_back(row(2.0 * k + 2, 0, 1.5));
  CHECK(select_c(flat, SelectCriterion::TrueSpectral) == 2.0);

  CHECK(parse_criterion("true_spectral") == SelectCriterion::TrueSpectral);
  CHECK(parse_criterion("empirical_squared") == SelectCriterion::EmpiricalSquared);
  CHECK_THROWS_AS(parse_criterion("best"), InputError);
}

TEST_CASE("CSV and JSON export round-trips") {
  SweepRecord full = row(2.5, 3, 0.125, 7.0);
  full.d_star = 4;
  full.dist_a = 1.0 / 3;
  full.sqdist_p = std::numeric_limits<double>::infinity();
  full.duality_gap = -1e-17;
  full.dunn = 0.7;
  full.trace = 12.0;
  full.seconds = 0.25;
  full.cert_pass = true;
  SweepRecord failed;
  failed.c = 3.0;
  failed.status = "failed: projection \"diag\", did not converge";
  const std::vector<SweepRecord> recs = {full, failed};

  const std::string csv = records_to_csv(recs);
  CHECK(records_from_csv(csv) == recs);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(sweep_columns().size()));
  CHECK(sweep_columns().size() == 13);

  const std::string json = records_to_json(recs);
  CHECK(records_from_json(json) == recs);
  const auto parsed = nlohmann::ordered_json::parse(json);
  CHECK(parsed.is_array());
  CHECK(parsed[1]["d_star"].is_null());
  std::vector<std::string> keys;
  for (auto it = parsed[0].begin(); it != parsed[0].end(); ++it) keys.push_back(it.key());
  CHECK(keys == sweep_columns());

  const std::string header_only = records_to_csv({});
  CHECK(header_only == header + "\n");
  CHECK(records_from_csv(header_only).empty());
  CHECK(records_from_json("[]").empty());
  CHECK_THROWS_AS(records_from_csv("c,replicate\n1,2\n"), ParseError);
}

TEST_CASE("sweep file naming") {
  CHECK(sweep_filename("patch", 300, 7) == "patch_300_7.csv");
  CHECK(sweep_filename("sbm", 50, 0, "json") == "sbm_50_0.json");
}
