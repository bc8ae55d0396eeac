#include "rdpg/regmod.hpp"

#include <cmath>

#include "rdpg/metrics.hpp"

namespace rdpg {

namespace {

struct Box {
  double lo;
  double hi;
};

Box box_for(int n) { return {1.0 / n, 1.0 - 1.0 / n}; }

double box_distance(const SymMatrixd& p, Box box) {
  double worst = 0.0;
  for (int i = 0; i < p.n(); ++i)
    for (int j = i + 1; j < p.n(); ++j)
      worst = std::max({worst, box.lo - p(i, j), p(i, j) - box.hi});
  return worst;
}

}  // namespace

void RegModOptions::validate() const {
  if (!(c > 0)) throw InputError("C must be positive");
  if (!(tol > 0)) throw InputError("tol must be positive");
  if (!(dykstra_tol > 0)) throw InputError("dykstra_tol must be positive");
  if (max_iter < 1 || dykstra_max_iter < 1) throw InputError("iteration caps must be >= 1");
  if (!(tau > 0)) throw InputError("tau must be positive");
}

double regmod_objective(const SymMatrixd& p, const Graph& g, double c) {
  return regularized_objective(p, g, c);
}

SymMatrixd regmod_gradient(const SymMatrixd& p, const Graph& g, double c) {
  if (p.n() != g.n()) throw InputError("matrix and graph sizes differ");
  const int n = g.n();
  SymMatrixd out(n);
  for (int i = 0; i < n; ++i) {
    out.set(i, i, -c);
    for (int j = i + 1; j < n; ++j) {
      const double v = p(i, j);
      out.set(i, j, g.has_edge(i, j) ? 1.0 / v : -1.0 / (1.0 - v));
    }
  }
  return out;
}

RegModKkt regmod_kkt(const SymMatrixd& p, const Graph& g, double c, double step) {
  const int n = g.n();
  if (n < 2) throw InputError("the box problem needs n >= 2");
  const Box box = box_for(n);
  const double s = step > 0 ? step : 1.0 / (2.0 * n);
  const SymMatrixd grad = regmod_gradient(p, g, c);
  DykstraProjector<double> proj(ConstraintSet<double>::offdiag_box(box.lo, box.hi),
                                {1e-12, 50000});
  const auto r = proj.project(p + grad * s);

  RegModKkt out;
  out.q = proj.psd_correction() * (-1.0 / s);
  out.box_multiplier = proj.set_correction() * (1.0 / s);
  out.stationarity = (p - r.x).frobenius() / s;
  out.comp_slack = (p.dense() * out.q.dense()).norm();
  out.q_diag_error = (out.q.diagonal().array() - c).abs().maxCoeff();
  out.q_min_eigenvalue = min_eigenvalue(out.q);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // Upper-bound multipliers push up (>= 0), lower-bound ones push down.
      const double m = out.box_multiplier(i, j);
      if (m > 0 && p(i, j) < box.hi - 1e-9) out.box_sign_violation = std::max(out.box_sign_violation, m);
      if (m < 0 && p(i, j) > box.lo + 1e-9) out.box_sign_violation = std::max(out.box_sign_violation, -m);
    }
  }
  return out;
}

RegModSolution solve_regmod(const Graph& g, const RegModOptions& options) {
  options.validate();
  const int n = g.n();
  if (n < 2) throw InputError("the box problem needs n >= 2");
  const Box box = box_for(n);
  const double c = options.c;

  DykstraProjector<double> proj(ConstraintSet<double>::offdiag_box(box.lo, box.hi),
                                {options.dykstra_tol, options.dykstra_max_iter});
  double last_scale = 0.0;  // step of the last projected input, 0 if none
  RegModSolution out;
  auto project = [&](const SymMatrixd& m, double scale) {
    if (last_scale > 0 && scale > 0) proj.scale_corrections(scale / last_scale);
    last_scale = scale;
    auto r = proj.project(m);
    // An unconverged projection still lies in the box; its PSD defect shows
    // up in the final KKT residuals.
    if (!r.converged) {
      ++out.inexact_projections;
      out.max_projection_residual = std::max(out.max_projection_residual, r.psd_residual);
    }
    return std::move(r.x);
  };
  auto objective = [&](const SymMatrixd& p) { return regularized_objective(p, g, c); };

  const double density =
      2.0 * static_cast<double>(g.m()) / (static_cast<double>(n) * (n - 1));
  SymMatrixd start = SymMatrixd::constant(n, std::clamp(density, box.lo, box.hi));
  start.set_diagonal(1.0);
  SymMatrixd x = project(start, 0.0);
  double fx = objective(x);

  const double min_step = 1.0 / (2.0 * n * static_cast<double>(n));
  double step = min_step;
  SymMatrixd y = x;
  double t = 1.0;

  // Projected ascent step from `from` with backtracking on the quadratic
  // model; the step may double each call and never drops below the
  // worst-case curvature bound.
  struct Step {
    SymMatrixd x;
    double f;
    double grad_norm;
  };
  // The model test uses the curvature -<grad(cand) - grad, d> <= |d|^2 / step
  // rather than objective differences, which cancel badly near the optimum.
  auto ascent_step = [&](const SymMatrixd& from) {
    const SymMatrixd grad = regmod_gradient(from, g, c);
    double trial = step * 2.0;
    for (;;) {
      SymMatrixd cand = project(from + grad * trial, trial);
      const SymMatrixd d = cand - from;
      const double dd = d.frobenius() * d.frobenius();
      const double curvature =
          -((regmod_gradient(cand, g, c) - grad).dense().array() * d.dense().array()).sum();
      if (curvature * trial <= dd || trial <= min_step) {
        step = trial;
        const double f_cand = objective(cand);
        return Step{std::move(cand), f_cand, grad.frobenius()};
      }
      trial = std::max(min_step, trial / 2.0);
    }
  };

  for (int k = 1; k <= options.max_iter; ++k) {
    Step st = ascent_step(y);
    if (st.f < fx) {
      // Momentum restart: plain step from the current iterate, accepted as is.
      y = x;
      t = 1.0;
      st = ascent_step(x);
    }
    out.grad_map_norm = (st.x - y).frobenius() / (step * std::max(1.0, st.grad_norm));
    out.iterations = k;
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const SymMatrixd y_next = st.x + (st.x - x) * ((t - 1.0) / t_new);
    // Extrapolation may leave the box, where the logs are undefined.
    y = project_offdiag_box(y_next, box.lo, box.hi);
    t = t_new;
    x = std::move(st.x);
    fx = st.f;
    if (out.grad_map_norm <= options.tol) {
      out.converged = true;
      break;
    }
  }

  out.step = step;
  out.box_residual = box_distance(x, box);
  out.kkt = regmod_kkt(x, g, c, step);
  PrimalSolution& p = out.primal;
  p.c = c;
  p.tau = options.tau;
  p.objective = fx;
  p.d_star = numerical_rank(x, options.tau);
  p.psd_residual = std::max(0.0, -min_eigenvalue(x));
  p.comp_slack_residual = out.kkt.comp_slack;
  p.p = ProbMatrix(std::move(x));
  return out;
}

}  // namespace rdpg
