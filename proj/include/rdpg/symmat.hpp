#pragma once

// Dense symmetric matrix kernel: eigendecomposition, norms and the
// projections used by both solvers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rdpg/errors.hpp"

namespace rdpg {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Symmetric n x n matrix. Writes go through set(), which updates both
/// triangles, so the stored matrix is symmetric bit for bit.
template <typename Scalar>
class SymMatrix {
 public:
  using Index = Eigen::Index;
  using Matrix = DenseMatrix<Scalar>;

  SymMatrix() = default;
  explicit SymMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

  static SymMatrix zero(Index n) { return SymMatrix(n); }
  static SymMatrix identity(Index n) {
    SymMatrix s(n);
    s.m_.setIdentity();
    return s;
  }
  static SymMatrix constant(Index n, Scalar v) {
    SymMatrix s(n);
    s.m_.setConstant(v);
    return s;
  }

  /// Checked construction: rejects non-square, empty, non-finite or
  /// asymmetric input (|a_ij - a_ji| > sym_tol * max(1, |a_ij|)). Accepted
  /// input is symmetrized by averaging.
  template <typename Derived>
  static SymMatrix from_dense(const Eigen::MatrixBase<Derived>& a, Scalar sym_tol = Scalar(0)) {
    if (a.rows() != a.cols()) throw InputError("matrix is not square");
    if (a.rows() < 1) throw InputError("matrix is empty");
    if (!a.allFinite()) throw InputError("matrix has non-finite entries");
    for (Index j = 0; j < a.cols(); ++j) {
      for (Index i = j + 1; i < a.rows(); ++i) {
        const Scalar diff = std::abs(a(i, j) - a(j, i));
        if (diff > sym_tol * std::max(Scalar(1), std::abs(a(i, j)))) {
          throw InputError("matrix is not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
        }
      }
    }
    SymMatrix s;
    s.m_ = (a + a.transpose()) * Scalar(0.5);
    return s;
  }

  /// Symmetrizes without checking. For internal results that are symmetric
  /// up to rounding (e.g. V diag(w) V^T).
  template <typename Derived>
  static SymMatrix symmetrize(const Eigen::MatrixBase<Derived>& a) {
    SymMatrix s;
    s.m_ = (a + a.transpose()) * Scalar(0.5);
    return s;
  }

  Index n() const { return m_.rows(); }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }
  void set(Index i, Index j, Scalar v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& dense() const { return m_; }
  auto diagonal() const { return m_.diagonal(); }
  Scalar trace() const { return m_.trace(); }
  Scalar frobenius() const { return m_.norm(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(Scalar s) {
    m_ *= s;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, Scalar s) { return a *= s; }
  friend SymMatrix operator*(Scalar s, SymMatrix a) { return a *= s; }

  /// Sets every diagonal entry to v.
  void set_diagonal(Scalar v) { m_.diagonal().setConstant(v); }
  template <typename Derived>
  void set_diagonal(const Eigen::MatrixBase<Derived>& v) {
    m_.diagonal() = v;
  }

 private:
  Matrix m_;
};

using SymMatrixd = SymMatrix<double>;

template <typename Scalar>
struct EigenDecomposition {
  DenseVector<Scalar> values;   // ascending
  DenseMatrix<Scalar> vectors;  // columns, same order as values
};

/// Symmetric eigendecomposition, eigenvalues ascending.
template <typename Scalar>
EigenDecomposition<Scalar> eigh(const SymMatrix<Scalar>& m) {
  if (!m.dense().allFinite()) throw InputError("eigh: non-finite entries");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(m.dense(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    const DenseMatrix<Scalar> r = m.dense() - solver.eigenvectors() *
                                                  solver.eigenvalues().asDiagonal() *
                                                  solver.eigenvectors().transpose();
    throw NumericalError("eigh: iteration did not converge", static_cast<double>(r.norm()));
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Scalar>
DenseVector<Scalar> eigvalsh(const SymMatrix<Scalar>& m) {
  if (!m.dense().allFinite()) throw InputError("eigvalsh: non-finite entries");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(m.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigvalsh: no convergence", 0.0);
  return solver.eigenvalues();
}

namespace detail {

template <typename Scalar>
SymMatrix<Scalar> clamp_spectrum(const EigenDecomposition<Scalar>& e) {
  const DenseVector<Scalar> w = e.values.cwiseMax(Scalar(0));
  Eigen::Index k = 0;
  while (k < w.size() && w(k) == Scalar(0)) ++k;
  const Eigen::Index r = w.size() - k;
  if (r == 0) return SymMatrix<Scalar>::zero(w.size());
  const auto v = e.vectors.rightCols(r);
  const DenseMatrix<Scalar> vs = v * w.tail(r).cwiseSqrt().asDiagonal();
  return SymMatrix<Scalar>::symmetrize(vs * vs.transpose());
}

}  // namespace detail

/// Frobenius-nearest PSD matrix: V max(L, 0) V^T.
template <typename Scalar>
SymMatrix<Scalar> project_psd(const SymMatrix<Scalar>& m) {
  return detail::clamp_spectrum(eigh(m));
}

/// Frobenius distance from m to the PSD cone.
template <typename Scalar>
Scalar psd_distance(const SymMatrix<Scalar>& m) {
  return eigvalsh(m).cwiseMin(Scalar(0)).norm();
}

/// Projection onto {X : diag X = c}.
template <typename Scalar>
SymMatrix<Scalar> project_fixed_diag(SymMatrix<Scalar> m, Scalar c) {
  m.set_diagonal(c);
  return m;
}

/// Projection onto {X : lo <= X_ij <= hi for i != j}; diagonal untouched.
template <typename Scalar>
SymMatrix<Scalar> project_offdiag_box(const SymMatrix<Scalar>& m, Scalar lo, Scalar hi) {
  DenseMatrix<Scalar> x = m.dense().cwiseMax(lo).cwiseMin(hi);
  x.diagonal() = m.dense().diagonal();
  return SymMatrix<Scalar>::symmetrize(x);
}

/// The second set of a Dykstra pair; the first is always the PSD cone.
template <typename Scalar>
struct ConstraintSet {
  enum class Kind { FixedDiagonal, OffDiagonalBox };
  Kind kind = Kind::FixedDiagonal;
  Scalar c = Scalar(0);
  Scalar lo = Scalar(0);
  Scalar hi = Scalar(1);

  static ConstraintSet fixed_diagonal(Scalar value) { return {Kind::FixedDiagonal, value, 0, 0}; }
  static ConstraintSet offdiag_box(Scalar lower, Scalar upper) {
    if (!(lower <= upper)) throw InputError("offdiag_box: lo > hi");
    return {Kind::OffDiagonalBox, 0, lower, upper};
  }

  SymMatrix<Scalar> project(const SymMatrix<Scalar>& m) const {
    return kind == Kind::FixedDiagonal ? project_fixed_diag(m, c) : project_offdiag_box(m, lo, hi);
  }
};

struct DykstraOptions {
  double tol = 1e-9;
  int max_iter = 5000;
};

template <typename Scalar>
struct DykstraResult {
  SymMatrix<Scalar> x;      // lies exactly in the second set
  int iterations = 0;
  Scalar psd_residual = 0;  // upper bound on dist(x, PSD)
  Scalar set_residual = 0;  // dist(PSD iterate, second set)
  bool converged = false;
};

/// Dykstra's alternating projection onto PSD ∩ S, with persistent correction
/// terms so that consecutive nearby projections can be warm-started. Starting
/// from nonzero corrections is block-coordinate descent on the projection dual
/// from a different initial point and converges to the same projection.
template <typename Scalar>
class DykstraProjector {
 public:
  explicit DykstraProjector(ConstraintSet<Scalar> set, DykstraOptions opts = {})
      : set_(set), opts_(opts) {}

  void reset() {
    psd_corr_ = SymMatrix<Scalar>();
    set_corr_ = SymMatrix<Scalar>();
    shift_ = DenseVector<Scalar>();
  }

  /// Rescales the stored general-projection corrections; when the input is
  /// x + s g with a changing s, the corrections scale roughly with s.
  void scale_corrections(Scalar factor) {
    psd_corr_ *= factor;
    set_corr_ *= factor;
  }

  DykstraResult<Scalar> project(const SymMatrix<Scalar>& m) {
    return set_.kind == ConstraintSet<Scalar>::Kind::FixedDiagonal ? project_diag(m)
                                                                   : project_general(m);
  }

  const DykstraOptions& options() const { return opts_; }
  void set_tolerance(double tol) { opts_.tol = tol; }

  /// Correction terms of the last general (box) projection. After
  /// convergence the input m splits as x + psd_correction + set_correction,
  /// with the corrections in the normal cones of PSD and of the box at x.
  const SymMatrix<Scalar>& psd_correction() const { return psd_corr_; }
  const SymMatrix<Scalar>& set_correction() const { return set_corr_; }

 private:
  // The box has a smooth projection dual in its multiplier Z:
  //   min_Z 1/2 ||Pi_PSD(m + Z)||^2 - sum_{i!=j} min(lo Z_ij, hi Z_ij),
  // whose plain proximal-gradient step (step 1) is exactly Dykstra's
  // iteration. It is run with momentum and gradient restart; the corrections
  // are set_corr = -Z and psd_corr = m + Z - Pi_PSD(m + Z).
  DykstraResult<Scalar> project_general(const SymMatrix<Scalar>& m) {
    const auto n = m.n();
    if (set_corr_.n() != n) set_corr_ = SymMatrix<Scalar>::zero(n);
    const Scalar scale = std::max(Scalar(1), m.frobenius());
    const Scalar tol = static_cast<Scalar>(opts_.tol) * scale;

    auto prox_step = [&](const SymMatrix<Scalar>& z, SymMatrix<Scalar>& x) {
      x = project_psd(m + z);
      DenseMatrix<Scalar> next = (z - x).dense() + set_.project(x - z).dense();
      next.diagonal().setZero();
      return SymMatrix<Scalar>::symmetrize(next);
    };

    SymMatrix<Scalar> z = set_corr_ * Scalar(-1);
    SymMatrix<Scalar> y = z;
    SymMatrix<Scalar> x;
    Scalar t = 1;
    DykstraResult<Scalar> out;
    for (int it = 1; it <= opts_.max_iter; ++it) {
      SymMatrix<Scalar> z_next = prox_step(y, x);
      const SymMatrix<Scalar> gmap = y - z_next;
      const SymMatrix<Scalar> dz = z_next - z;
      out.iterations = it;
      if (gmap.frobenius() <= tol) {
        z = std::move(z_next);
        out.converged = true;
        break;
      }
      if ((gmap.dense().array() * dz.dense().array()).sum() > 0) {
        t = 1;
        y = z_next;
      } else {
        const Scalar t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
        y = z_next + dz * ((t - 1) / t_next);
        t = t_next;
      }
      z = std::move(z_next);
    }
    x = project_psd(m + z);
    set_corr_ = z * Scalar(-1);
    psd_corr_ = m + z - x;
    out.x = set_.project(x);
    out.psd_residual = (out.x - x).frobenius();
    out.set_residual = out.psd_residual;
    if (out.converged && out.psd_residual > tol) out.converged = false;
    return out;
  }

  // With an affine second set the correction of that set never alters its
  // projection, and the PSD correction stays diagonal-shifted: the iterate is
  // Pi_PSD(m + Diag z) with z <- z + c - diag(Pi_PSD(m + Diag z)). That
  // fixed-point map is Anderson-accelerated (with fallback to the plain step).
  DykstraResult<Scalar> project_diag(const SymMatrix<Scalar>& m) {
    using Vec = DenseVector<Scalar>;
    const auto n = m.n();
    if (shift_.size() != n) shift_ = Vec::Zero(n);
    const Scalar scale = std::max(Scalar(1), m.frobenius());
    const Scalar tol = static_cast<Scalar>(opts_.tol) * scale;
    constexpr int kMemory = 5;

    auto evaluate = [&](const Vec& z, SymMatrix<Scalar>& y) {
      SymMatrix<Scalar> shifted = m;
      shifted.set_diagonal(m.diagonal() + z);
      y = project_psd(shifted);
      return Vec(Vec::Constant(n, set_.c) - y.diagonal());
    };

    DykstraResult<Scalar> out;
    std::vector<Vec> dz, df;
    Vec z = shift_;
    SymMatrix<Scalar> y;
    Vec f = evaluate(z, y);
    SymMatrix<Scalar> x = project_fixed_diag(y, set_.c);
    Scalar best = f.norm();
    for (int it = 1; it <= opts_.max_iter; ++it) {
      out.iterations = it;
      out.psd_residual = f.norm();
      out.set_residual = out.psd_residual;
      if (out.psd_residual <= tol && it > 1) {
        out.converged = true;
        break;
      }
      Vec z_next = z + f;
      if (!dz.empty()) {
        const auto k = static_cast<Eigen::Index>(dz.size());
        DenseMatrix<Scalar> dfm(n, k), dzm(n, k);
        for (Eigen::Index i = 0; i < k; ++i) {
          dfm.col(i) = df[static_cast<std::size_t>(i)];
          dzm.col(i) = dz[static_cast<std::size_t>(i)];
        }
        const Vec gamma = dfm.colPivHouseholderQr().solve(f);
        if (gamma.allFinite()) z_next -= (dzm + dfm) * gamma;
      }
      SymMatrix<Scalar> y_next;
      Vec f_next = evaluate(z_next, y_next);
      if (f_next.norm() > Scalar(2) * best) {
        // Extrapolation overshot: restart the history with a plain step.
        dz.clear();
        df.clear();
        z_next = z + f;
        f_next = evaluate(z_next, y_next);
      } else {
        dz.push_back(z_next - z);
        df.push_back(f_next - f);
        if (static_cast<int>(dz.size()) > kMemory) {
          dz.erase(dz.begin());
          df.erase(df.begin());
        }
      }
      best = std::min(best, f_next.norm());
      SymMatrix<Scalar> x_next = project_fixed_diag(y_next, set_.c);
      const Scalar change = (x_next - x).frobenius();
      z = std::move(z_next);
      f = std::move(f_next);
      y = std::move(y_next);
      x = std::move(x_next);
      out.psd_residual = f.norm();
      out.set_residual = out.psd_residual;
      if (change <= tol && out.psd_residual <= tol) {
        out.converged = true;
        break;
      }
    }
    shift_ = z;
    out.x = std::move(x);
    return out;
  }

  ConstraintSet<Scalar> set_;
  DykstraOptions opts_;
  SymMatrix<Scalar> psd_corr_;
  SymMatrix<Scalar> set_corr_;
  DenseVector<Scalar> shift_;
};

/// Projection of m onto PSD ∩ set from a cold start. Throws NumericalError
/// carrying both residuals when max_iter is reached.
template <typename Scalar>
SymMatrix<Scalar> dykstra(const SymMatrix<Scalar>& m, const ConstraintSet<Scalar>& set,
                          double tol, int max_iter = 5000) {
  if (!(tol > 0)) throw InputError("dykstra: tol must be positive");
  DykstraProjector<Scalar> proj(set, {tol, max_iter});
  auto r = proj.project(m);
  if (!r.converged) {
    throw NumericalError("dykstra: iteration cap reached", static_cast<double>(r.psd_residual),
                         static_cast<double>(r.set_residual));
  }
  return std::move(r.x);
}

/// Largest absolute eigenvalue (operator 2-norm for symmetric input).
template <typename Scalar>
Scalar spectral_norm(const SymMatrix<Scalar>& m) {
  return eigvalsh(m).cwiseAbs().maxCoeff();
}

/// Number of eigenvalues with |lambda| > tau.
template <typename Scalar>
int numerical_rank(const SymMatrix<Scalar>& m, Scalar tau) {
  if (!(tau > 0)) throw InputError("numerical_rank: tau must be positive");
  return static_cast<int>((eigvalsh(m).cwiseAbs().array() > tau).count());
}

template <typename Scalar>
Scalar min_eigenvalue(const SymMatrix<Scalar>& m) {
  return eigvalsh(m).minCoeff();
}

}  // namespace rdpg
