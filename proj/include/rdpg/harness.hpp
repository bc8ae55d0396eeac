#pragma once

// Regularization sweeps over a grid of C values and replicate graphs,
// aggregation into mean / SD bands, C selection and CSV / JSON export.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdpg/dual_solver.hpp"
#include "rdpg/graph.hpp"

namespace rdpg {

struct SweepConfig {
  std::vector<double> c_grid;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  double tau = 1e-3;
  /// Embedding dimension for the Dunn index.
  int embed_dim = 3;
  bool compute_dunn = true;
  bool certify = true;
  /// Worker threads; each replicate is one unit of work.
  int jobs = 1;
  /// Solver settings; the c field is overridden per grid point.
  SolverOptions solver;
  /// Start each solve from the previous grid point's dual (same replicate).
  bool warm_start = true;
  /// When false the seconds column is written as 0, making output
  /// byte-identical across runs.
  bool record_timing = true;

  void validate() const;
};

/// Grid a:b:step, inclusive of b up to rounding. Throws InputError on
/// malformed text, step <= 0 or b < a.
std::vector<double> parse_c_grid(const std::string& text);

/// Either a known probability matrix (replicate r samples its graph with
/// seed base_seed ^ r) or a fixed graph (one replicate).
struct SweepInput {
  std::optional<ProbMatrix> p;
  std::optional<Graph> graph;
  std::vector<int> labels;
};

/// One row per (C, replicate). Unknown or failed quantities are empty.
struct SweepRecord {
  double c = 0.0;
  int replicate = 0;
  std::optional<int> d_star;
  std::optional<double> dist_p;     // ||P - P*||_2
  std::optional<double> dist_a;     // ||A - P*||_2
  std::optional<double> sqdist_a;   // ||A^2 - P*^2||_2
  std::optional<double> sqdist_p;   // ||P^2 - P*^2||_2
  std::optional<double> duality_gap;
  std::optional<double> dunn;
  std::optional<double> trace;
  double seconds = 0.0;
  bool cert_pass = false;
  /// "ok", "unconverged" or "failed: <message>".
  std::string status;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// CSV / JSON column names in field order.
const std::vector<std::string>& sweep_columns();

std::vector<SweepRecord> run_sweep(const SweepInput& input, const SweepConfig& config);

struct Band {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (0 for a single value)
  int count = 0;
};

struct AggregateRow {
  double c = 0.0;
  int rows = 0;
  std::optional<Band> d_star, dist_p, dist_a, sqdist_a, sqdist_p, duality_gap, dunn, trace,
      seconds;
};

/// Per-C bands over rows with a value; rows are grouped by exact C.
std::vector<AggregateRow> aggregate(const std::vector<SweepRecord>& records);

enum class SelectCriterion { TrueSpectral, TrueSquared, EmpiricalSpectral, EmpiricalSquared };
SelectCriterion parse_criterion(const std::string& name);

/// argmin over C of the mean curve; ties go to the smaller C. Throws
/// InputError when the criterion's metric is missing (e.g. P unknown).
double select_c(const std::vector<SweepRecord>& records, SelectCriterion criterion);

std::string records_to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(const std::string& text);
std::string records_to_json(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_json(const std::string& text);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

/// "<experiment>_<n>_<seed>.csv".
std::string sweep_filename(const std::string& experiment, int n, std::uint64_t seed,
                           const std::string& extension = "csv");

}  // namespace rdpg
