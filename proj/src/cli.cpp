#include "rdpg/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <sstream>

#include "rdpg/certify.hpp"
#include "rdpg/dual_solver.hpp"
#include "rdpg/embedding.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/harness.hpp"
#include "rdpg/io.hpp"
#include "rdpg/metrics.hpp"
#include "rdpg/recovery.hpp"
#include "rdpg/regmod.hpp"

namespace rdpg {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  double tau = 1e-3;
  double tol = 1e-7;
  int max_iter = 20000;
  int jobs = 1;
  bool strict = false;
};

// Thrown for failures that map to the numerical exit code under --strict.
struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("'" + item + "' is not a number");
    }
  }
  return out;
}

std::string ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  return dir;
}

std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void write_labels(const std::vector<int>& labels, const std::string& path) {
  std::string text;
  for (int l : labels) text += std::to_string(l) + "\n";
  write_text(path, text);
}

std::vector<int> read_labels(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      labels.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw ParseError("label is not an integer", lineno);
    }
  }
  return labels;
}

std::string embedding_csv(const Embedding& e, const std::vector<int>* labels) {
  std::string text;
  for (int c = 0; c < e.k; ++c) text += (c ? ",x" : "x") + std::to_string(c + 1);
  if (labels) text += ",label";
  text += "\n";
  for (Eigen::Index i = 0; i < e.x.rows(); ++i) {
    for (int c = 0; c < e.k; ++c) text += (c ? "," : "") + num(e.x(i, c));
    if (labels) text += "," + std::to_string((*labels)[static_cast<std::size_t>(i)]);
    text += "\n";
  }
  return text;
}

FileFormat matrix_format(const Common& common, const std::string& path) {
  if (!common.format.empty()) return parse_format(common.format);
  return format_from_path(path) == FileFormat::Json ? FileFormat::Json : FileFormat::Csv;
}

struct SolveOutcome {
  DualSolution dual;
  PrimalSolution primal;
  CertReport report;
  double gap = 0.0;
};

SolveOutcome solve_and_certify(const Graph& g, double c, const Common& common) {
  SolverOptions opts;
  opts.c = c;
  opts.tol = common.tol;
  opts.max_iter = common.max_iter;
  SolveOutcome o;
  o.dual = solve_dual(g, opts);
  o.primal = recover_primal(o.dual, g, common.tau);
  o.gap = duality_gap(o.primal, o.dual, g);
  CertifyOptions copt;
  copt.tau = common.tau;
  o.report = certify_solution(o.primal.p.values(), o.dual.q, g, c, copt);
  return o;
}

std::string summary_line(const SolveOutcome& o) {
  return "C=" + num(o.dual.c) + " d*=" + std::to_string(o.primal.d_star) + " gap=" + num(o.gap) +
         " obj=" + num(o.primal.objective) + " iters=" + std::to_string(o.dual.iterations) +
         " converged=" + (o.dual.converged ? "1" : "0") +
         " cert=" + (o.report.pass() ? "pass" : "fail");
}

void strict_check(const Common& common, bool converged, bool cert_pass) {
  if (!common.strict) return;
  if (!converged) throw StrictFailure("solver did not converge");
  if (!cert_pass) throw StrictFailure("certificate failed");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MAP inference for random dot product graphs", "rdpg"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub, bool solver_flags) {
    sub->add_option("--out", common.out, "Output file or directory");
    sub->add_option("--format", common.format, "Output format: edges, csv or json");
    sub->add_option("--seed", common.seed, "Random seed");
    if (solver_flags) {
      sub->add_option("--tau", common.tau, "Rank threshold")->check(CLI::PositiveNumber);
      sub->add_option("--tol", common.tol, "Solver tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--max-iter", common.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber);
      sub->add_flag("--strict", common.strict, "Exit 2 on non-convergence or failed certificate");
    }
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a probability matrix");
  std::string model = "sbm";
  int gen_n = 50;
  std::string sizes_text, block_text, latent_out, labels_out;
  gen->add_option("--model", model, "sbm, caps or balls")
      ->check(CLI::IsMember({"sbm", "caps", "balls"}));
  gen->add_option("--n", gen_n, "Node count (caps, balls)")->check(CLI::PositiveNumber);
  gen->add_option("--sizes", sizes_text, "SBM block sizes, comma separated");
  gen->add_option("--block", block_text, "SBM block matrix, row-major, comma separated");
  gen->add_option("--latent-out", latent_out, "Write latent positions (CSV)");
  gen->add_option("--labels-out", labels_out, "Write component labels");
  add_common(gen, false);

  // sample
  auto* sample = app.add_subcommand("sample", "Sample a graph from P");
  std::string p_path;
  sample->add_option("--p", p_path, "Probability matrix")->required();
  add_common(sample, false);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve the regularized problem and certify it");
  std::string graph_path;
  double c = 1.0;
  bool project_psd_flag = false;
  solve->add_option("--graph", graph_path, "Graph file")->required();
  solve->add_option("--c", c, "Regularization strength")->required()->check(CLI::PositiveNumber);
  solve->add_flag("--project-psd", project_psd_flag, "Project the written P onto the PSD cone");
  add_common(solve, true);

  // solve-mod
  auto* solve_mod = app.add_subcommand("solve-mod", "Solve the box-constrained variant");
  solve_mod->add_option("--graph", graph_path, "Graph file")->required();
  solve_mod->add_option("--c", c, "Regularization strength")->required()->check(CLI::PositiveNumber);
  add_common(solve_mod, true);

  // ase / embed
  auto* ase_cmd = app.add_subcommand("ase", "Adjacency spectral embedding");
  int dim = 2;
  ase_cmd->add_option("--graph", graph_path, "Graph file")->required();
  ase_cmd->add_option("--d", dim, "Embedding dimension")->check(CLI::PositiveNumber);
  add_common(ase_cmd, false);
  auto* embed = app.add_subcommand("embed", "Spectral embedding of a probability matrix");
  embed->add_option("--p", p_path, "Probability matrix")->required();
  embed->add_option("--k", dim, "Embedding dimension")->check(CLI::PositiveNumber);
  add_common(embed, false);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Regularization sweep over a C grid");
  std::string grid_text = "2:25:1", labels_path, experiment = "sweep";
  int replicates = 1;
  bool no_timing = false;
  auto* sweep_p = sweep->add_option("--p", p_path, "Probability matrix (replicates are sampled)");
  auto* sweep_g = sweep->add_option("--graph", graph_path, "Fixed graph");
  sweep_p->excludes(sweep_g);
  sweep->add_option("--c-grid", grid_text, "C grid a:b:step");
  sweep->add_option("--replicates", replicates, "Replicates")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--labels", labels_path, "Cluster labels (one per line) for the Dunn index");
  sweep->add_option("--experiment", experiment, "Experiment name used in the output file name");
  sweep->add_flag("--no-timing", no_timing, "Write 0 in the seconds column");
  add_common(sweep, true);

  // certify
  auto* certify = app.add_subcommand("certify", "Certify a (P, Q) pair");
  std::string q_path;
  certify->add_option("--p", p_path, "Primal matrix")->required();
  certify->add_option("--q", q_path, "Dual matrix")->required();
  certify->add_option("--graph", graph_path, "Graph file")->required();
  certify->add_option("--c", c, "Regularization strength")->required()->check(CLI::PositiveNumber);
  add_common(certify, true);

  // karate
  auto* karate_cmd = app.add_subcommand("karate", "Karate club: solve and embed in 2-D");
  double karate_c = 80.0;
  karate_cmd->add_option("--c", karate_c, "Regularization strength");
  add_common(karate_cmd, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      LatentConfig cfg;
      cfg.seed = common.seed;
      if (model == "sbm") {
        SbmConfig sbm = default_sbm();
        if (!sizes_text.empty()) {
          sbm.sizes.clear();
          for (double s : parse_list(sizes_text)) sbm.sizes.push_back(static_cast<int>(s));
        }
        if (!block_text.empty()) {
          const auto vals = parse_list(block_text);
          const auto k = static_cast<Eigen::Index>(sbm.sizes.size());
          if (static_cast<Eigen::Index>(vals.size()) != k * k) {
            throw InputError("--block needs k*k values for k blocks");
          }
          sbm.block_probs.resize(k, k);
          for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j) sbm.block_probs(i, j) = vals[static_cast<std::size_t>(i * k + j)];
        }
        cfg.model = sbm;
      } else if (model == "caps") {
        cfg.model = default_caps(gen_n);
      } else {
        cfg.model = default_balls(gen_n);
      }
      const auto m = generate(cfg);
      const std::string text = matrix_format(common, common.out) == FileFormat::Json
                                   ? format_matrix_json(m.p.dense())
                                   : format_matrix_csv(m.p.dense());
      if (common.out.empty()) {
        out << text;
      } else {
        write_text(common.out, text);
      }
      if (!latent_out.empty() && m.latent) write_text(latent_out, format_matrix_csv(*m.latent));
      if (!labels_out.empty()) write_labels(m.labels, labels_out);
      err << "n=" << m.p.n() << " rank=" << numerical_rank(m.p.values(), 1e-9) << "\n";
      return kExitOk;
    }

    if (sample->parsed()) {
      const ProbMatrix p(read_matrix(p_path));
      const Graph g = sample_rdpg(p, common.seed);
      const FileFormat f = !common.format.empty() ? parse_format(common.format)
                           : common.out.empty()   ? FileFormat::EdgeList
                                                  : format_from_path(common.out);
      if (common.out.empty()) {
        out << (f == FileFormat::Json ? format_graph_json(g) : format_edge_list(g));
      } else {
        write_graph(g, common.out, f);
      }
      err << "n=" << g.n() << " m=" << g.m() << "\n";
      return kExitOk;
    }

    if (solve->parsed()) {
      const Graph g = read_graph(graph_path);
      const auto o = solve_and_certify(g, c, common);
      out << summary_line(o) << "\n";
      if (!common.out.empty()) {
        const std::string dir = ensure_dir(common.out);
        SymMatrixd p = o.primal.p.values();
        if (project_psd_flag) p = project_psd(p);
        write_matrix(p.dense(), join(dir, "P.csv"));
        write_matrix(o.dual.q.dense(), join(dir, "Q.csv"));
        write_text(join(dir, "certificate.json"), o.report.to_json());
      }
      strict_check(common, o.dual.converged, o.report.pass());
      return kExitOk;
    }

    if (solve_mod->parsed()) {
      const Graph g = read_graph(graph_path);
      RegModOptions opts;
      opts.c = c;
      opts.tol = common.tol;
      opts.max_iter = common.max_iter;
      opts.tau = common.tau;
      const auto sol = solve_regmod(g, opts);
      const auto stats = lambda_stats(sol.primal.p.values(), g);
      const auto report = check_regmod_trace(sol.primal.p.values(), g, c, stats);
      out << "C=" << num(c) << " d*=" << sol.primal.d_star << " obj=" << num(sol.primal.objective)
          << " trace=" << num(sol.primal.p.trace()) << " Z=" << stats.z
          << " kkt=" << num(sol.kkt.stationarity) << " iters=" << sol.iterations
          << " converged=" << (sol.converged ? 1 : 0) << " cert=" << (report.pass() ? "pass" : "fail")
          << "\n";
      if (!common.out.empty()) {
        const std::string dir = ensure_dir(common.out);
        write_matrix(sol.primal.p.dense(), join(dir, "P.csv"));
        write_text(join(dir, "certificate.json"), report.to_json());
      }
      strict_check(common, sol.converged, report.pass());
      return kExitOk;
    }

    if (ase_cmd->parsed() || embed->parsed()) {
      Embedding e;
      if (ase_cmd->parsed()) {
        e = ase(read_graph(graph_path), dim);
      } else {
        e = embed_from_p(ProbMatrix(read_matrix(p_path)), dim);
      }
      const std::string text = embedding_csv(e, nullptr);
      if (common.out.empty()) {
        out << text;
      } else {
        write_text(common.out, text);
      }
      return kExitOk;
    }

    if (sweep->parsed()) {
      if (p_path.empty() && graph_path.empty()) throw InputError("sweep needs --p or --graph");
      SweepInput input;
      if (!p_path.empty()) {
        input.p = ProbMatrix(read_matrix(p_path));
      } else {
        input.graph = read_graph(graph_path);
      }
      if (!labels_path.empty()) input.labels = read_labels(labels_path);
      SweepConfig cfg;
      cfg.c_grid = parse_c_grid(grid_text);
      cfg.replicates = replicates;
      cfg.base_seed = common.seed;
      cfg.tau = common.tau;
      cfg.jobs = common.jobs;
      cfg.solver.tol = common.tol;
      cfg.solver.max_iter = common.max_iter;
      cfg.record_timing = !no_timing;
      const auto rows = run_sweep(input, cfg);
      const int n = input.p ? input.p->n() : input.graph->n();
      const bool json = common.format == "json";
      const std::string text = json ? records_to_json(rows) : records_to_csv(rows);
      if (common.out.empty()) {
        out << text;
      } else {
        const std::string dir = ensure_dir(common.out);
        write_text(join(dir, sweep_filename(experiment, n, common.seed, json ? "json" : "csv")), text);
        write_text(join(dir, sweep_filename(experiment + "_aggregate", n, common.seed)),
                   aggregate_to_csv(aggregate(rows)));
      }
      int failed = 0, unconverged = 0, cert_fail = 0;
      for (const auto& r : rows) {
        if (r.status.rfind("failed", 0) == 0) ++failed;
        else if (r.status != "ok") ++unconverged;
        if (!r.cert_pass) ++cert_fail;
      }
      err << "rows=" << rows.size() << " failed=" << failed << " unconverged=" << unconverged
          << " cert_fail=" << cert_fail
          << " best_c_empirical=" << num(select_c(rows, SelectCriterion::EmpiricalSquared));
      if (input.p) err << " best_c_true=" << num(select_c(rows, SelectCriterion::TrueSpectral));
      err << "\n";
      if (common.strict && (failed || unconverged || cert_fail)) throw StrictFailure("sweep had failures");
      return kExitOk;
    }

    if (certify->parsed()) {
      const Graph g = read_graph(graph_path);
      const SymMatrixd p = read_matrix(p_path);
      const SymMatrixd q = read_matrix(q_path);
      CertifyOptions copt;
      copt.tau = common.tau;
      const auto report = certify_solution(p, q, g, c, copt);
      if (common.out.empty()) {
        out << report.to_json();
      } else {
        write_text(common.out, report.to_json());
      }
      err << "pass=" << (report.pass() ? 1 : 0) << " failures=" << report.failures() << "\n";
      strict_check(common, true, report.pass());
      return kExitOk;
    }

    if (karate_cmd->parsed()) {
      if (!(karate_c > 0)) throw InputError("--c must be positive");
      const Graph g = karate();
      const auto labels = karate_factions();
      // Small graph: solve tighter by default so the recovered P certifies PSD.
      Common tight = common;
      if (karate_cmd->count("--tol") == 0) tight.tol = 1e-9;
      const auto o = solve_and_certify(g, karate_c, tight);
      const auto e = embed_from_p(o.primal.p, 2);
      out << summary_line(o) << " dunn=" << num(dunn_index(e.x, labels)) << "\n";
      if (!common.out.empty()) {
        const std::string dir = ensure_dir(common.out);
        write_text(join(dir, "karate_embedding.csv"), embedding_csv(e, &labels));
        write_matrix(o.primal.p.dense(), join(dir, "P.csv"));
        write_text(join(dir, "certificate.json"), o.report.to_json());
      }
      strict_check(common, o.dual.converged, o.report.pass());
      return kExitOk;
    }
  } catch (const StrictFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rdpg
