#include "rdpg/dual_solver.hpp"

#include <algorithm>
#include <cmath>

namespace rdpg {

namespace {

double edge_term(double q) { return q >= -1.0 ? q : -1.0 - std::log(-q); }
double nonedge_term(double q) { return q <= 1.0 ? 0.0 : q - std::log(q) - 1.0; }
double edge_slope(double q) { return q >= -1.0 ? 1.0 : -1.0 / q; }
double nonedge_slope(double q) { return q <= 1.0 ? 0.0 : 1.0 - 1.0 / q; }

void check_dims(const SymMatrixd& q, const Graph& g) {
  if (q.n() != g.n()) throw InputError("dual matrix and graph sizes differ");
}

}  // namespace

void SolverOptions::validate() const {
  if (!(c > 0)) throw InputError("C must be positive");
  if (!(tol > 0)) throw InputError("tol must be positive");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
  if (dykstra_max_iter < 1) throw InputError("dykstra_max_iter must be >= 1");
}

double SolverOptions::effective_dykstra_tol() const {
  return dykstra_tol > 0 ? dykstra_tol : std::min(1e-9, tol / 10.0);
}

double dual_objective(const SymMatrixd& q, const Graph& g) {
  check_dims(q, g);
  const auto& mask = g.adjacency_mask();
  const auto& d = q.dense();
  double total = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < d.rows(); ++i) {
      total += mask(i, j) ? edge_term(d(i, j)) : nonedge_term(d(i, j));
    }
  }
  return 2.0 * total;
}

SymMatrixd dual_gradient(const SymMatrixd& q, const Graph& g) {
  check_dims(q, g);
  const auto& mask = g.adjacency_mask();
  const auto& d = q.dense();
  SymMatrixd out(q.n());
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < d.rows(); ++i) {
      out.set(i, j, mask(i, j) ? edge_slope(d(i, j)) : nonedge_slope(d(i, j)));
    }
  }
  return out;
}

DualSolution solve_dual(const Graph& g, const SolverOptions& options,
                        const std::optional<SymMatrixd>& warm_start) {
  options.validate();
  const int n = g.n();
  const double c = options.c;
  if (warm_start && warm_start->n() != n) throw InputError("warm start and graph sizes differ");

  DykstraProjector<double> proj(ConstraintSet<double>::fixed_diagonal(c),
                                {options.effective_dykstra_tol(), options.dykstra_max_iter});
  DualSolution out;
  out.c = c;

  auto project = [&](const SymMatrixd& m) {
    auto r = proj.project(m);
    out.projection_iterations += r.iterations;
    if (!r.converged) {
      // A stalled warm start is retried cold before giving up.
      proj.reset();
      r = proj.project(m);
      out.projection_iterations += r.iterations;
      if (!r.converged) {
        throw NumericalError("solve_dual: projection did not converge", r.psd_residual,
                             r.set_residual);
      }
    }
    out.proj_residual = r.psd_residual;
    return std::move(r.x);
  };

  SymMatrixd q = SymMatrixd::identity(n) * c;
  if (warm_start) q = project(*warm_start);
  double fq = dual_objective(q, g);

  SymMatrixd y = q;
  double t = 1.0;

  for (int k = 1; k <= options.max_iter; ++k) {
    SymMatrixd q_new = project(y - dual_gradient(y, g));
    double f_new = dual_objective(q_new, g);

    if (f_new > fq && options.restart) {
      // Momentum restart: plain projected step from the current iterate.
      // With exact projections this step cannot increase f (L = 1); any
      // residual increase is projection error and is accepted.
      y = q;
      t = 1.0;
      q_new = project(q - dual_gradient(q, g));
      f_new = dual_objective(q_new, g);
    }

    const double gm = (y - q_new).frobenius();
    out.grad_map_norm = gm / std::max(1.0, q_new.frobenius());
    out.iterations = k;

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = q_new + (q_new - q) * ((t - 1.0) / t_new);
    t = t_new;
    q = std::move(q_new);
    fq = f_new;

    if (out.grad_map_norm <= options.tol) {
      out.converged = true;
      break;
    }
  }

  out.q = std::move(q);
  out.objective = fq;
  return out;
}

bool maxcut_mode_check(const DualSolution& sol, const Graph& g) {
  for (auto [i, j] : g.edges()) {
    if (sol.q(i, j) < -1.0 - 1e-6) return false;
  }
  return true;
}

}  // namespace rdpg
