#include "rdpg/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "rdpg/certify.hpp"
#include "rdpg/embedding.hpp"
#include "rdpg/generators.hpp"
#include "rdpg/metrics.hpp"
#include "rdpg/recovery.hpp"

namespace rdpg {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }
std::string fmt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

double parse_real(const std::string& s, int line) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) throw ParseError("bad number '" + s + "'", line);
  return v;
}

std::optional<double> parse_opt_real(const std::string& s, int line) {
  if (s.empty()) return std::nullopt;
  return parse_real(s, line);
}

std::optional<int> parse_opt_int(const std::string& s, int line) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

// CSV field quoting for the free-text status column.
std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char ch = line[k];
    if (quoted) {
      if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quote", lineno);
  out.push_back(std::move(cur));
  return out;
}

nlohmann::ordered_json real_json(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? real_json(*v) : nlohmann::ordered_json();
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("bad number '" + s + "'", 1);
  }
  return j.get<double>();
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return real_from_json(j);
}

void fill_row(SweepRecord& rec, const Graph& g, const SymMatrixd& a, const SweepInput& input,
              const SweepConfig& cfg, const DualSolution& dual, const PrimalSolution& primal) {
  const SymMatrixd& p = primal.p.values();
  rec.d_star = primal.d_star;
  rec.dist_a = spectral_distance(a, p);
  rec.sqdist_a = squared_spectral_distance(a, p);
  if (input.p) {
    rec.dist_p = spectral_distance(input.p->values(), p);
    rec.sqdist_p = squared_spectral_distance(input.p->values(), p);
  }
  rec.duality_gap = duality_gap(primal, dual, g);
  rec.trace = p.trace();
  const int n = g.n();
  if (cfg.compute_dunn && static_cast<int>(input.labels.size()) == n) {
    const auto emb = embed_from_p(primal.p, std::min(cfg.embed_dim, n));
    rec.dunn = dunn_index(emb.x, input.labels);
  }
  if (cfg.certify) {
    CertifyOptions copt;
    copt.tau = cfg.tau;
    rec.cert_pass = certify_solution(p, dual.q, g, dual.c, copt).pass();
  }
  rec.status = dual.converged ? "ok" : "unconverged";
}

std::vector<SweepRecord> run_replicate(const SweepInput& input, const SweepConfig& cfg, int r) {
  const Graph g = input.p ? sample_rdpg(*input.p, cfg.base_seed ^ static_cast<std::uint64_t>(r))
                          : *input.graph;
  const SymMatrixd a = SymMatrixd::symmetrize(g.adjacency());
  std::vector<SweepRecord> rows;
  std::optional<SymMatrixd> warm;
  double prev_c = 0.0;
  for (double c : cfg.c_grid) {
    SweepRecord rec;
    rec.c = c;
    rec.replicate = r;
    try {
      SolverOptions opts = cfg.solver;
      opts.c = c;
      if (warm) *warm *= c / prev_c;
      const auto t0 = std::chrono::steady_clock::now();
      const DualSolution dual = solve_dual(g, opts, cfg.warm_start ? warm : std::nullopt);
      const PrimalSolution primal = recover_primal(dual, g, cfg.tau);
      const auto t1 = std::chrono::steady_clock::now();
      if (cfg.record_timing) rec.seconds = std::chrono::duration<double>(t1 - t0).count();
      fill_row(rec, g, a, input, cfg, dual, primal);
      warm = dual.q;
      prev_c = c;
    } catch (const std::exception& e) {
      rec = SweepRecord{};
      rec.c = c;
      rec.replicate = r;
      rec.status = std::string("failed: ") + e.what();
      warm.reset();
    }
    rows.push_back(std::move(rec));
  }
  return rows;
}

}  // namespace

void SweepConfig::validate() const {
  if (c_grid.empty()) throw InputError("C grid is empty");
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    if (!(c_grid[k] > 0)) throw InputError("C grid values must be positive");
    if (k > 0 && !(c_grid[k] > c_grid[k - 1])) throw InputError("C grid must be strictly increasing");
  }
  if (replicates < 1) throw InputError("replicates must be >= 1");
  if (jobs < 1) throw InputError("jobs must be >= 1");
  if (!(tau > 0)) throw InputError("tau must be positive");
  if (embed_dim < 1) throw InputError("embedding dimension must be >= 1");
  solver.validate();
}

std::vector<double> parse_c_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw InputError("C grid must look like a:b:step");
  double v[3];
  for (int k = 0; k < 3; ++k) {
    const auto& s = parts[static_cast<std::size_t>(k)];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v[k]);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw InputError("C grid field '" + s + "' is not a number");
    }
  }
  const double a = v[0], b = v[1], step = v[2];
  if (!(a > 0) || !(step > 0) || b < a) throw InputError("C grid needs 0 < a <= b and step > 0");
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 100000) throw InputError("C grid is too long");
  for (long k = 0; k < count; ++k) grid.push_back(a + static_cast<double>(k) * step);
  return grid;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> kColumns = {
      "c",     "replicate", "d_star", "dist_p",  "dist_a",    "sqdist_a", "sqdist_p",
      "duality_gap", "dunn", "trace", "seconds", "cert_pass", "status"};
  return kColumns;
}

std::vector<SweepRecord> run_sweep(const SweepInput& input, const SweepConfig& config) {
  config.validate();
  if (!input.p && !input.graph) throw InputError("sweep needs a probability matrix or a graph");
  const int n = input.p ? input.p->n() : input.graph->n();
  if (!input.labels.empty() && static_cast<int>(input.labels.size()) != n) {
    throw InputError("label count differs from the node count");
  }
  const int units = input.p ? config.replicates : 1;

  std::vector<std::vector<SweepRecord>> results(static_cast<std::size_t>(units));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < units; r = next++) {
      results[static_cast<std::size_t>(r)] = run_replicate(input, config, r);
    }
  };
  const int width = std::min(config.jobs, units);
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < width; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<SweepRecord> rows;
  for (auto& chunk : results) rows.insert(rows.end(), chunk.begin(), chunk.end());
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return a.c != b.c ? a.c < b.c : a.replicate < b.replicate;
  });
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRecord>& records) {
  struct Acc {
    std::vector<double> d_star, dist_p, dist_a, sqdist_a, sqdist_p, gap, dunn, trace, seconds;
    int rows = 0;
  };
  std::map<double, Acc> by_c;
  auto push = [](std::vector<double>& v, const auto& x) {
    if (x) v.push_back(static_cast<double>(*x));
  };
  for (const auto& r : records) {
    auto& acc = by_c[r.c];
    ++acc.rows;
    push(acc.d_star, r.d_star);
    push(acc.dist_p, r.dist_p);
    push(acc.dist_a, r.dist_a);
    push(acc.sqdist_a, r.sqdist_a);
    push(acc.sqdist_p, r.sqdist_p);
    push(acc.gap, r.duality_gap);
    push(acc.dunn, r.dunn);
    push(acc.trace, r.trace);
    if (r.status.rfind("failed", 0) != 0) acc.seconds.push_back(r.seconds);
  }
  auto band = [](const std::vector<double>& v) -> std::optional<Band> {
    if (v.empty()) return std::nullopt;
    Band b;
    b.count = static_cast<int>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    b.mean = sum / b.count;
    if (b.count > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - b.mean) * (x - b.mean);
      b.sd = std::sqrt(ss / (b.count - 1));
    }
    return b;
  };
  std::vector<AggregateRow> out;
  for (const auto& [c, acc] : by_c) {
    AggregateRow row;
    row.c = c;
    row.rows = acc.rows;
    row.d_star = band(acc.d_star);
    row.dist_p = band(acc.dist_p);
    row.dist_a = band(acc.dist_a);
    row.sqdist_a = band(acc.sqdist_a);
    row.sqdist_p = band(acc.sqdist_p);
    row.duality_gap = band(acc.gap);
    row.dunn = band(acc.dunn);
    row.trace = band(acc.trace);
    row.seconds = band(acc.seconds);
    out.push_back(row);
  }
  return out;
}

SelectCriterion parse_criterion(const std::string& name) {
  if (name == "true_spectral") return SelectCriterion::TrueSpectral;
  if (name == "true_squared") return SelectCriterion::TrueSquared;
  if (name == "empirical_spectral") return SelectCriterion::EmpiricalSpectral;
  if (name == "empirical_squared") return SelectCriterion::EmpiricalSquared;
  throw InputError("unknown selection criterion '" + name + "'");
}

double select_c(const std::vector<SweepRecord>& records, SelectCriterion criterion) {
  const auto rows = aggregate(records);
  std::optional<double> best_c;
  double best = 0.0;
  for (const auto& row : rows) {
    const std::optional<Band>* band = nullptr;
    switch (criterion) {
      case SelectCriterion::TrueSpectral: band = &row.dist_p; break;
      case SelectCriterion::TrueSquared: band = &row.sqdist_p; break;
      case SelectCriterion::EmpiricalSpectral: band = &row.dist_a; break;
      case SelectCriterion::EmpiricalSquared: band = &row.sqdist_a; break;
    }
    if (!*band) continue;
    // Rows are in increasing C, so strict improvement keeps the smaller C on ties.
    if (!best_c || (*band)->mean < best) {
      best_c = row.c;
      best = (*band)->mean;
    }
  }
  if (!best_c) throw InputError("no records carry the metric this criterion needs");
  return *best_c;
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
  std::string out;
  const auto& cols = sweep_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
  out += '\n';
  for (const auto& r : records) {
    out += fmt(r.c) + ',' + std::to_string(r.replicate) + ',' + fmt(r.d_star) + ',' +
           fmt(r.dist_p) + ',' + fmt(r.dist_a) + ',' + fmt(r.sqdist_a) + ',' + fmt(r.sqdist_p) +
           ',' + fmt(r.duality_gap) + ',' + fmt(r.dunn) + ',' + fmt(r.trace) + ',' +
           fmt(r.seconds) + ',' + (r.cert_pass ? "1" : "0") + ',' + quote(r.status) + '\n';
  }
  return out;
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++lineno;
  const auto header = split_csv_line(line, lineno);
  if (header != sweep_columns()) throw ParseError("unexpected header", lineno);
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line, lineno);
    if (f.size() != sweep_columns().size()) throw ParseError("wrong field count", lineno);
    SweepRecord r;
    r.c = parse_real(f[0], lineno);
    r.replicate = parse_opt_int(f[1], lineno).value_or(0);
    r.d_star = parse_opt_int(f[2], lineno);
    r.dist_p = parse_opt_real(f[3], lineno);
    r.dist_a = parse_opt_real(f[4], lineno);
    r.sqdist_a = parse_opt_real(f[5], lineno);
    r.sqdist_p = parse_opt_real(f[6], lineno);
    r.duality_gap = parse_opt_real(f[7], lineno);
    r.dunn = parse_opt_real(f[8], lineno);
    r.trace = parse_opt_real(f[9], lineno);
    r.seconds = parse_real(f[10], lineno);
    r.cert_pass = f[11] == "1";
    r.status = f[12];
    out.push_back(std::move(r));
  }
  return out;
}

std::string records_to_json(const std::vector<SweepRecord>& records) {
  nlohmann::ordered_json ordered = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["c"] = real_json(r.c);
    o["replicate"] = r.replicate;
    o["d_star"] = r.d_star ? nlohmann::ordered_json(*r.d_star) : nlohmann::ordered_json();
    o["dist_p"] = opt_json(r.dist_p);
    o["dist_a"] = opt_json(r.dist_a);
    o["sqdist_a"] = opt_json(r.sqdist_a);
    o["sqdist_p"] = opt_json(r.sqdist_p);
    o["duality_gap"] = opt_json(r.duality_gap);
    o["dunn"] = opt_json(r.dunn);
    o["trace"] = opt_json(r.trace);
    o["seconds"] = real_json(r.seconds);
    o["cert_pass"] = r.cert_pass;
    o["status"] = r.status;
    ordered.push_back(std::move(o));
  }
  return ordered.dump(1) + "\n";
}

std::vector<SweepRecord> records_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 1);
  }
  if (!arr.is_array()) throw ParseError("expected an array of records", 1);
  std::vector<SweepRecord> out;
  try {
    for (const auto& o : arr) {
      SweepRecord r;
      r.c = real_from_json(o.at("c"));
      r.replicate = o.at("replicate").get<int>();
      if (!o.at("d_star").is_null()) r.d_star = o.at("d_star").get<int>();
      r.dist_p = opt_from_json(o.at("dist_p"));
      r.dist_a = opt_from_json(o.at("dist_a"));
      r.sqdist_a = opt_from_json(o.at("sqdist_a"));
      r.sqdist_p = opt_from_json(o.at("sqdist_p"));
      r.duality_gap = opt_from_json(o.at("duality_gap"));
      r.dunn = opt_from_json(o.at("dunn"));
      r.trace = opt_from_json(o.at("trace"));
      r.seconds = real_from_json(o.at("seconds"));
      r.cert_pass = o.at("cert_pass").get<bool>();
      r.status = o.at("status").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), 1);
  }
  return out;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "c,rows";
  const char* names[] = {"d_star", "dist_p", "dist_a", "sqdist_a", "sqdist_p",
                         "duality_gap", "dunn", "trace", "seconds"};
  for (const char* name : names) out += std::string(",") + name + "_mean," + name + "_sd";
  out += '\n';
  for (const auto& r : rows) {
    out += fmt(r.c) + ',' + std::to_string(r.rows);
    for (const auto* b : {&r.d_star, &r.dist_p, &r.dist_a, &r.sqdist_a, &r.sqdist_p,
                          &r.duality_gap, &r.dunn, &r.trace, &r.seconds}) {
      out += ',' + (*b ? fmt((*b)->mean) : std::string()) + ',' +
             (*b ? fmt((*b)->sd) : std::string());
    }
    out += '\n';
  }
  return out;
}

std::string sweep_filename(const std::string& experiment, int n, std::uint64_t seed,
                           const std::string& extension) {
  return experiment + "_" + std::to_string(n) + "_" + std::to_string(seed) + "." + extension;
}

}  // namespace rdpg
