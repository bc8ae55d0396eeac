#include "rdpg/recovery.hpp"

#include <cmath>
#include <limits>

#include "rdpg/metrics.hpp"

namespace rdpg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * b where a zero factor wins over an infinite one.
double guarded_product(double a, double b) { return a == 0.0 ? 0.0 : a * b; }

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

}  // namespace

OffdiagRecovery recover_offdiag(const SymMatrixd& q, const Graph& g) {
  if (q.n() != g.n()) throw InputError("dual matrix and graph sizes differ");
  const int n = g.n();
  OffdiagRecovery out{SymMatrixd(n), 0.0};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double qij = q(i, j);
      double v = 0.0;
      if (g.has_edge(i, j)) {
        v = qij > -1.0 ? 1.0 : -1.0 / qij;
      } else {
        v = qij < 1.0 ? 0.0 : 1.0 - 1.0 / qij;
      }
      const double clamped = std::clamp(v, 0.0, 1.0);
      out.clamp_mass += 2.0 * std::abs(v - clamped);
      out.p.set(i, j, clamped);
    }
  }
  return out;
}

DiagRecovery recover_diag(const SymMatrixd& q, const Graph& g, double c,
                          const SymMatrixd& offdiag_p) {
  if (!(c > 0)) throw InputError("C must be positive");
  if (q.n() != g.n() || offdiag_p.n() != g.n()) throw InputError("sizes differ");
  const int n = g.n();
  DiagRecovery out;
  out.diag = Eigen::VectorXd::Zero(n);
  out.min_raw = kInf;
  for (int i = 0; i < n; ++i) {
    if (g.degree(i) == 0) continue;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (g.has_edge(i, j)) {
        sum += std::max(-1.0, q(i, j));
      } else {
        const double pij = offdiag_p(i, j);
        sum += pij < 1.0 ? pij / (1.0 - pij) : kInf;
      }
    }
    const double raw = -sum / c;
    out.min_raw = std::min(out.min_raw, raw);
    if (raw < 0.0) {
      out.clamp_mass += -raw;
      if (raw < -1e-6) out.warning = true;
    }
    out.diag(i) = std::max(0.0, raw);
  }
  if (out.min_raw == kInf) out.min_raw = 0.0;
  return out;
}

PrimalSolution recover_primal(const DualSolution& dual, const Graph& g, double tau) {
  auto off = recover_offdiag(dual.q, g);
  const auto diag = recover_diag(dual.q, g, dual.c, off.p);
  off.p.set_diagonal(diag.diag);

  PrimalSolution out;
  out.c = dual.c;
  out.tau = tau;
  out.clamp_mass = off.clamp_mass + diag.clamp_mass;
  out.diag_warning = diag.warning;
  out.objective = regularized_objective(off.p, g, dual.c);
  out.d_star = numerical_rank(off.p, tau);
  out.psd_residual = std::max(0.0, -min_eigenvalue(off.p));
  out.comp_slack_residual = (off.p.dense() * dual.q.dense()).norm();
  out.p = ProbMatrix(std::move(off.p));
  return out;
}

bool in_exp_cone(double x, double y, double z, double tol) {
  if (std::isnan(x) || std::isnan(y) || std::isnan(z)) return false;
  if (y > tol) return x >= y * std::exp(z / y) - tol * std::max(1.0, std::abs(x));
  if (y >= -tol) return x >= -tol && z <= tol;
  return false;
}

bool in_exp_dual_cone(double u, double v, double w, double tol) {
  if (std::isnan(u) || std::isnan(v) || std::isnan(w)) return false;
  if (w < -tol) return u > 0.0 && u >= -w * std::exp(v / w - 1.0) - tol * std::max(1.0, std::abs(u));
  if (w <= tol) return u >= -tol && v >= -tol;
  return false;
}

DualCertificate assemble_certificate(const SymMatrixd& p, const SymMatrixd& q, const Graph& g,
                                     double c) {
  if (p.n() != g.n() || q.n() != g.n()) throw InputError("certificate inputs differ in size");
  if (!(c > 0)) throw InputError("C must be positive");
  const int n = g.n();
  DualCertificate cert;
  cert.min_branch_proximity = kInf;
  cert.pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(0, n - 1)) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      PairMultipliers pm;
      pm.i = i;
      pm.j = j;
      pm.edge = g.has_edge(i, j);
      pm.q = q(i, j);
      pm.p = p(i, j);
      pm.alpha = safe_log(pm.p);
      pm.beta = safe_log(1.0 - pm.p);
      if (pm.edge) {
        pm.t = -1.0;
        pm.w = 0.0;
        if (pm.q <= -1.0) {
          pm.u = 0.0;
          pm.r = -pm.q;
        } else {
          pm.u = pm.q + 1.0;
          pm.r = 1.0;
        }
        if (pm.r > 0.0) {
          pm.s = -1.0 - std::log(pm.r);
        } else {
          pm.degenerate = true;
        }
        pm.v = 0.0;
        pm.branch_proximity = std::abs(pm.q + 1.0);
      } else {
        pm.t = 0.0;
        pm.w = -1.0;
        if (pm.q < 1.0) {
          pm.u = 1.0;
          pm.r = 1.0 - pm.q;
        } else {
          pm.u = pm.q;
          pm.r = 0.0;
        }
        if (pm.u > 0.0) {
          pm.v = -1.0 - std::log(pm.u);
        } else {
          pm.degenerate = true;
        }
        pm.s = 0.0;
        pm.branch_proximity = std::abs(pm.q - 1.0);
      }
      pm.residual_lambda = pm.r * pm.p + pm.s + guarded_product(pm.t, pm.alpha);
      pm.residual_nu = pm.u * (1.0 - pm.p) + pm.v + guarded_product(pm.w, pm.beta);
      pm.lambda_in_dual_cone = in_exp_dual_cone(pm.r, pm.s, pm.t);
      pm.nu_in_dual_cone = in_exp_dual_cone(pm.u, pm.v, pm.w);
      // P = 0 (or 1 - P = 0) sits on the boundary ray; the log is -inf there.
      pm.primal_in_cone = in_exp_cone(pm.p, 1.0, pm.alpha) && in_exp_cone(1.0 - pm.p, 1.0, pm.beta);

      if (!pm.degenerate) {
        cert.max_stationarity = std::max(
            {cert.max_stationarity, std::abs(pm.residual_lambda), std::abs(pm.residual_nu)});
      } else {
        ++cert.degenerate_pairs;
      }
      cert.max_multiplier_mismatch =
          std::max(cert.max_multiplier_mismatch, std::abs(pm.u - pm.r - pm.q));
      cert.all_in_cone = cert.all_in_cone && pm.lambda_in_dual_cone && pm.nu_in_dual_cone &&
                         pm.primal_in_cone;
      cert.min_branch_proximity = std::min(cert.min_branch_proximity, pm.branch_proximity);
      cert.pairs.push_back(pm);
    }
  }
  if (cert.pairs.empty()) cert.min_branch_proximity = 0.0;
  return cert;
}

double duality_gap(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c) {
  return dual_objective(q, g) - regularized_objective(p, g, c);
}

double duality_gap(const PrimalSolution& primal, const DualSolution& dual, const Graph& g) {
  return duality_gap(primal.p.values(), dual.q, g, dual.c);
}

}  // namespace rdpg
