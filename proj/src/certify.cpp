#include "rdpg/certify.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace rdpg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxLocations = 5;

// Tracks the tightest item of an itemized inequality and where it fails.
class Worst {
 public:
  Worst(std::string name, std::string statement, double tol)
      : name_(std::move(name)), statement_(std::move(statement)), tol_(tol) {}

  void add(double lhs, double rhs, const std::string& where) {
    ++count_;
    const double slack = rhs - lhs;
    if (slack < -tol_ && failing_ < kMaxLocations) {
      failures_ += (failures_.empty() ? "" : " ") + where;
      ++failing_;
    }
    if (!seen_ || slack < slack_) {
      seen_ = true;
      slack_ = slack;
      lhs_ = lhs;
      rhs_ = rhs;
      tightest_ = where;
    }
  }

  CertCheck finish(const std::string& empty_reason = "no items") const {
    if (!seen_) return not_applicable(name_, statement_, empty_reason);
    CertCheck c = make_check(name_, statement_, lhs_, rhs_, tol_);
    c.where = c.pass ? tightest_ : failures_;
    return c;
  }

 private:
  std::string name_;
  std::string statement_;
  double tol_;
  bool seen_ = false;
  double slack_ = 0.0;
  double lhs_ = 0.0;
  double rhs_ = 0.0;
  std::string tightest_;
  std::string failures_;
  int failing_ = 0;
  long count_ = 0;
};

std::string node(int i) { return "i=" + std::to_string(i); }
std::string pair(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

void require_sizes(const SymMatrixd& p, const SymMatrixd& q, const Graph& g) {
  if (p.n() != g.n() || q.n() != g.n()) throw InputError("P, Q and the graph differ in size");
}

}  // namespace

bool CertReport::pass() const {
  for (const auto& c : checks)
    if (!c.informational && !c.pass) return false;
  return true;
}

int CertReport::failures() const {
  int k = 0;
  for (const auto& c : checks)
    if (!c.informational && !c.pass) ++k;
  return k;
}

void CertReport::append(const CertReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

const CertCheck* CertReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string CertReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass();
  j["failures"] = failures();
  auto& arr = j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["statement"] = c.statement;
    e["applicable"] = c.applicable;
    e["informational"] = c.informational;
    e["pass"] = c.pass;
    // Infinite bounds serialize as null.
    e["lhs"] = std::isfinite(c.lhs) ? nlohmann::json(c.lhs) : nlohmann::json();
    e["rhs"] = std::isfinite(c.rhs) ? nlohmann::json(c.rhs) : nlohmann::json();
    e["slack"] = std::isfinite(c.slack) ? nlohmann::json(c.slack) : nlohmann::json();
    e["tol"] = c.tol;
    e["where"] = c.where;
    arr.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

CertCheck make_check(std::string name, std::string statement, double lhs, double rhs, double tol,
                     std::string where) {
  CertCheck c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tol = tol;
  c.slack = rhs - lhs;
  if (std::isinf(lhs) && std::isinf(rhs) && lhs == rhs) c.slack = 0.0;
  c.pass = c.slack >= -tol;
  c.where = std::move(where);
  return c;
}

CertCheck not_applicable(std::string name, std::string statement, std::string reason) {
  CertCheck c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.applicable = false;
  c.pass = true;
  c.where = std::move(reason);
  return c;
}

CertReport check_entry_bounds(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c,
                              double tol) {
  require_sizes(p, q, g);
  if (!(c > 0)) throw InputError("C must be positive");
  const int n = g.n();
  const auto& deg = g.degrees();
  const int dmax = g.max_degree();
  auto d = [&](int i) { return static_cast<double>(deg[static_cast<std::size_t>(i)]); };

  CertReport rep;

  Worst diag_upper("diag_upper", "P_ii <= d_i / C", tol);
  for (int i = 0; i < n; ++i) diag_upper.add(p(i, i), d(i) / c, node(i));
  rep.checks.push_back(diag_upper.finish());

  Worst offdiag_upper("offdiag_upper", "P_ij <= sqrt(d_i d_j) / C", tol);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) offdiag_upper.add(p(i, j), std::sqrt(d(i) * d(j)) / c, pair(i, j));
  rep.checks.push_back(offdiag_upper.finish());

  Worst dual_edge("dual_edge_upper", "edges: Q_ij <= min(d_i, d_j) - 1", tol);
  for (auto [i, j] : g.edges()) dual_edge.add(q(i, j), std::min(d(i), d(j)) - 1.0, pair(i, j));
  rep.checks.push_back(dual_edge.finish("graph has no edges"));

  const std::string diag_lower_stmt = "P_ii >= 1 / (C min_{j~i} d_j)";
  const std::string diag_lower_global_stmt = "P_ii >= 1 / (C min_j d_j)";
  if (c >= 1.0) {
    Worst edge_lower("edge_lower", "edges: P_ij >= 1/C", tol);
    for (auto [i, j] : g.edges()) edge_lower.add(1.0 / c, p(i, j), pair(i, j));
    rep.checks.push_back(edge_lower.finish("graph has no edges"));

    Worst nonedge_upper("nonedge_upper", "nonedges: P_ij <= 1 - 1/C", tol);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!g.has_edge(i, j)) nonedge_upper.add(p(i, j), 1.0 - 1.0 / c, pair(i, j));
    rep.checks.push_back(nonedge_upper.finish("graph is complete"));

    Worst diag_lower("diag_lower", diag_lower_stmt, tol);
    for (int i = 0; i < n; ++i) {
      if (deg[static_cast<std::size_t>(i)] == 0) continue;
      int min_nb = n;
      for (int j = 0; j < n; ++j)
        if (g.has_edge(i, j)) min_nb = std::min(min_nb, deg[static_cast<std::size_t>(j)]);
      diag_lower.add(1.0 / (c * min_nb), p(i, i), node(i));
    }
    rep.checks.push_back(diag_lower.finish("graph has no edges"));

    if (g.min_degree() > 0) {
      Worst global("diag_lower_global", diag_lower_global_stmt, tol);
      for (int i = 0; i < n; ++i) global.add(1.0 / (c * g.min_degree()), p(i, i), node(i));
      auto chk = global.finish();
      chk.informational = true;
      rep.checks.push_back(chk);
    } else {
      rep.checks.push_back(not_applicable("diag_lower_global", diag_lower_global_stmt,
                                          "graph has an isolated node"));
    }
  } else {
    for (const auto& [name, stmt] :
         {std::pair<std::string, std::string>{"edge_lower", "edges: P_ij >= 1/C"},
          {"nonedge_upper", "nonedges: P_ij <= 1 - 1/C"},
          {"diag_lower", diag_lower_stmt},
          {"diag_lower_global", diag_lower_global_stmt}}) {
      rep.checks.push_back(not_applicable(name, stmt, "requires C >= 1"));
    }
  }

  const std::string q_nonedge_stmt = "nonedges: Q_ij <= C / (C - sqrt(d_i d_j))";
  const std::string diag_large_c_stmt =
      "P_ii >= d_i/C - sum_{j!~i} sqrt(d_i d_j) / (C (C - sqrt(d_i d_j)))";
  if (c >= dmax) {
    Worst q_nonedge("dual_nonedge_upper", q_nonedge_stmt, tol);
    Worst diag_large_c("diag_lower_large_c", diag_large_c_stmt, tol);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      bool ok = true;
      for (int j = 0; j < n; ++j) {
        if (j == i || g.has_edge(i, j)) continue;
        const double s = std::sqrt(d(i) * d(j));
        if (c <= s) {
          ok = false;
          continue;
        }
        sum += s / (c * (c - s));
        if (j > i) q_nonedge.add(q(i, j), c / (c - s), pair(i, j));
      }
      if (ok) diag_large_c.add(d(i) / c - sum, p(i, i), node(i));
    }
    rep.checks.push_back(q_nonedge.finish("graph is complete"));
    rep.checks.push_back(diag_large_c.finish("C equals sqrt(d_i d_j) on every row"));
  } else {
    rep.checks.push_back(not_applicable("dual_nonedge_upper", q_nonedge_stmt, "requires C >= max d"));
    rep.checks.push_back(not_applicable("diag_lower_large_c", diag_large_c_stmt, "requires C >= max d"));
  }
  return rep;
}

CertReport check_trace_bounds(const SymMatrixd& p, const Graph& g, double c, double tol) {
  if (p.n() != g.n()) throw InputError("P and the graph differ in size");
  if (!(c > 0)) throw InputError("C must be positive");
  const double tr = p.trace();
  const double m2 = 2.0 * static_cast<double>(g.m());
  const double n = g.n();
  CertReport rep;
  rep.checks.push_back(make_check("trace_nonneg", "0 <= tr P", 0.0, tr, tol));
  rep.checks.push_back(make_check("trace_upper", "tr P <= 2m / C", tr, m2 / c, tol));
  const std::string stmt = "tr P >= 2m/C - n^3 / (C (C - n))";
  if (c > n) {
    rep.checks.push_back(make_check("trace_lower", stmt, m2 / c - n * n * n / (c * (c - n)), tr, tol));
  } else {
    rep.checks.push_back(not_applicable("trace_lower", stmt, "requires C > n"));
  }
  return rep;
}

CertReport check_kkt(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c,
                     const DualCertificate& cert, double tol) {
  require_sizes(p, q, g);
  const int n = g.n();
  CertReport rep;

  const double pq = (p.dense() * q.dense()).norm();
  rep.checks.push_back(make_check("complementary_slackness", "||PQ||_F <= tol (1 + ||P||_F ||Q||_F)",
                                  pq, tol * (1.0 + p.frobenius() * q.frobenius()), 0.0));

  Worst stat("stationarity", "|r P + s + t log P|, |u (1-P) + v + w log(1-P)| <= tol", tol);
  Worst branch("branch_relation",
               "edges P = -1/Q (Q <= -1) or 1; nonedges P = 1 - 1/Q (Q >= 1) or 0", tol);
  int outside = 0;
  std::string outside_where;
  for (const auto& pm : cert.pairs) {
    if (!pm.degenerate) {
      stat.add(std::max(std::abs(pm.residual_lambda), std::abs(pm.residual_nu)), 0.0,
               pair(pm.i, pm.j));
    }
    double expected = 0.0;
    if (pm.edge) {
      expected = pm.q <= -1.0 ? -1.0 / pm.q : 1.0;
    } else {
      expected = pm.q >= 1.0 ? 1.0 - 1.0 / pm.q : 0.0;
    }
    branch.add(std::abs(pm.p - expected), 0.0, pair(pm.i, pm.j));
    if (!(pm.lambda_in_dual_cone && pm.nu_in_dual_cone && pm.primal_in_cone)) {
      if (outside < kMaxLocations) outside_where += (outside ? " " : "") + pair(pm.i, pm.j);
      ++outside;
    }
  }
  rep.checks.push_back(stat.finish("no off-diagonal pairs"));
  rep.checks.push_back(branch.finish("no off-diagonal pairs"));
  rep.checks.push_back(make_check("cone_membership", "pairs outside the exponential cones = 0",
                                  static_cast<double>(outside), 0.0, 0.0, outside_where));

  double diag_err = 0.0;
  for (int i = 0; i < n; ++i) diag_err = std::max(diag_err, std::abs(q(i, i) - c));
  rep.checks.push_back(make_check("dual_diagonal", "max |Q_ii - C| <= tol", diag_err, 0.0, tol));
  const double q_min = min_eigenvalue(q);
  rep.checks.push_back(make_check("dual_psd", "-min eig Q <= 1e-6 C", -q_min, 1e-6 * c, 0.0));
  const double p_min = min_eigenvalue(p);
  // P is recovered entrywise from Q, so its PSD defect tracks the dual accuracy.
  rep.checks.push_back(make_check("primal_psd", "-min eig P <= tol max(1, ||P||_2)", -p_min,
                                  tol * std::max(1.0, spectral_norm(p)), 0.0));
  return rep;
}

Sandwich sandwich(const Graph& g, double c) {
  if (!(c > 0)) throw InputError("C must be positive");
  Sandwich s;
  const double m = static_cast<double>(g.m());
  if (c >= 1.0) {
    s.lower_applicable = true;
    s.lower = -2.0 * m * std::log(c) - 2.0 * m;
  }
  if (c > g.max_degree()) {
    s.upper_applicable = true;
    double sum = 0.0;
    for (int d : g.degrees())
      if (d > 0) sum += d * std::log(c / d);
    s.upper = -2.0 * m - sum;
  }
  return s;
}

CertReport check_sandwich(double objective, const Graph& g, double c, double tol) {
  const auto s = sandwich(g, c);
  CertReport rep;
  const double scaled = tol * (1.0 + std::abs(objective));
  if (s.lower_applicable) {
    rep.checks.push_back(make_check("sandwich_lower", "-2m log C - 2m <= objective", s.lower,
                                    objective, scaled));
  } else {
    rep.checks.push_back(not_applicable("sandwich_lower", "-2m log C - 2m <= objective",
                                        "requires C >= 1"));
  }
  const std::string stmt = "objective <= -2m - sum_i d_i log(C / d_i)";
  if (s.upper_applicable) {
    rep.checks.push_back(make_check("sandwich_upper", stmt, objective, s.upper, scaled));
  } else {
    rep.checks.push_back(not_applicable("sandwich_upper", stmt, "requires C > max d"));
  }
  return rep;
}

double eta_for_coverage(int n, double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0)) throw InputError("coverage must lie in (0,1)");
  // eta^2 = L (8 n (n-1) + 4 eta) with L = log(4 / (1 - coverage)).
  const double l = std::log(4.0 / (1.0 - coverage));
  const double b = 4.0 * l;
  const double k = 8.0 * n * (n - 1.0) * l;
  return 0.5 * (b + std::sqrt(b * b + 4.0 * k));
}

LikelihoodEnvelope likelihood_envelope(const SymMatrixd& p_true, const SymMatrixd& p_star,
                                       const Graph& g, double c, double eta) {
  const int n = g.n();
  LikelihoodEnvelope env;
  env.difference = bernoulli_loglik(p_true, g) - bernoulli_loglik(p_star, g);
  const double h = entropy(p_true);
  const double m2 = 2.0 * static_cast<double>(g.m());
  double dlogd = 0.0;
  for (int d : g.degrees())
    if (d > 0) dlogd += d * std::log(static_cast<double>(d));
  env.lower = -eta - h + m2 * std::log(c) - dlogd;
  env.upper = eta - h + m2 * std::log(c) + m2;
  env.applicable = c > g.max_degree();
  env.lower_ok = env.difference >= env.lower;
  env.upper_ok = env.difference <= env.upper;
  env.probability = 1.0 - 4.0 * std::exp(-eta * eta / (8.0 * n * (n - 1.0) + 4.0 * eta));
  return env;
}

CertReport check_likelihood_theorem(const SymMatrixd& p_true, const SymMatrixd& p_star,
                                    const Graph& g, double c, double eta, double tol) {
  if (p_true.n() != g.n() || p_star.n() != g.n()) throw InputError("sizes differ");
  const auto env = likelihood_envelope(p_true, p_star, g, c, eta);
  const double rhs = c * (p_true.trace() - p_star.trace());
  CertReport rep;
  rep.checks.push_back(make_check("likelihood_deterministic",
                                  "L_A(P) - L_A(P*) <= C (tr P - tr P*)", env.difference, rhs,
                                  tol * (1.0 + std::abs(env.difference))));
  const std::string lo = "L_A(P) - L_A(P*) >= -eta - H[P] + 2m log C - sum d_i log d_i";
  const std::string hi = "L_A(P) - L_A(P*) <= eta - H[P] + 2m log C + 2m";
  if (env.applicable) {
    auto a = make_check("likelihood_envelope_lower", lo, env.lower, env.difference, 0.0);
    auto b = make_check("likelihood_envelope_upper", hi, env.difference, env.upper, 0.0);
    a.informational = b.informational = true;
    std::ostringstream note;
    note << "stated probability " << env.probability;
    a.where = b.where = note.str();
    rep.checks.push_back(a);
    rep.checks.push_back(b);
  } else {
    rep.checks.push_back(not_applicable("likelihood_envelope_lower", lo, "requires C > max d"));
    rep.checks.push_back(not_applicable("likelihood_envelope_upper", hi, "requires C > max d"));
  }
  return rep;
}

CertReport check_regmod_trace(const SymMatrixd& p_star, const Graph& g, double c,
                              const LambdaStats& stats, double tol) {
  if (p_star.n() != g.n()) throw InputError("sizes differ");
  const double n = g.n();
  const double tr = p_star.trace();
  const double m2c = 2.0 * static_cast<double>(g.m()) / c;
  const double lo_all = static_cast<double>(stats.all_lo()) / n;
  CertReport rep;
  const double rederived = m2c + lo_all - static_cast<double>(stats.edges_lo) / c -
                           (n - 1.0) / c * static_cast<double>(stats.nonedges_hi) -
                           static_cast<double>(stats.nonedges_mid) / (c * (n - 1.0));
  rep.checks.push_back(make_check("regmod_trace_rederived",
                                  "tr P* <= 2m/C + #L(1/n)/n - #L1(1/n)/C - (n-1)/C #L0(1-1/n) - "
                                  "#L0((1/n,1-1/n))/(C(n-1))",
                                  tr, rederived, tol));
  auto simple = make_check("regmod_trace", "tr P* <= 2m/C + Z/n", tr,
                           m2c + static_cast<double>(stats.z) / n, tol);
  simple.informational = true;
  rep.checks.push_back(simple);
  const double full = m2c + lo_all - static_cast<double>(stats.edges_lo) -
                      (n - 1.0) / c * static_cast<double>(stats.nonedges_hi) -
                      static_cast<double>(stats.nonedges_mid) / (n - 1.0);
  auto chk = make_check("regmod_trace_full",
                        "tr P* <= 2m/C + #L(1/n)/n - #L1(1/n) - (n-1)/C #L0(1-1/n) - "
                        "#L0((1/n,1-1/n))/(n-1)",
                        tr, full, tol);
  chk.informational = true;
  rep.checks.push_back(chk);
  return rep;
}

CertReport check_rank_relation(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c,
                               double tau) {
  require_sizes(p, q, g);
  const int n = g.n();
  const int rp = numerical_rank(p, tau);
  const int rq = numerical_rank(q, tau * std::max(1.0, c));
  CertReport rep;
  const std::string ranks = "rank P=" + std::to_string(rp) + " rank Q=" + std::to_string(rq);
  rep.checks.push_back(make_check("rank_sum", "rank P + rank Q <= n + 2",
                                  static_cast<double>(rp + rq), n + 2.0, 0.0, ranks));
  const std::string stmt = "rank Q >= n/2 - 1";
  if (c > g.max_degree()) {
    rep.checks.push_back(make_check("dual_rank_floor", stmt, n / 2.0 - 1.0, static_cast<double>(rq),
                                    0.0, ranks));
  } else {
    rep.checks.push_back(not_applicable("dual_rank_floor", stmt, "requires C > max d"));
  }
  return rep;
}

CertReport certify_solution(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c,
                            const CertifyOptions& options) {
  require_sizes(p, q, g);
  CertReport rep = check_entry_bounds(p, q, g, c, options.bound_tol);
  rep.append(check_trace_bounds(p, g, c, options.bound_tol));
  const auto cert = assemble_certificate(p, q, g, c);
  rep.append(check_kkt(p, q, g, c, cert, options.kkt_tol));

  // Primal value of P and dual value of Q; infinite when P leaves the domain.
  double objective = -kInf;
  try {
    objective = regularized_objective(p, g, c);
  } catch (const DomainError&) {
  }
  const double dual = dual_objective(q, g);
  const double gap = dual - objective;
  rep.checks.push_back(make_check("duality_gap", "|f(Q) - objective(P)| <= tol (1 + |objective|)",
                                  std::abs(gap), options.gap_tol * (1.0 + std::abs(objective)),
                                  0.0));
  rep.append(check_sandwich(objective, g, c, options.bound_tol));
  rep.append(check_rank_relation(p, q, g, c, options.tau));
  return rep;
}

}  // namespace rdpg
