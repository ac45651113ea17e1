#include "panelbreak/eigen_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>

namespace panelbreak {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 1) {
    throw InvalidInput("SymMatrix: dim must be >= 1, got " + std::to_string(dim));
  }
  p_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw InvalidInput("SymMatrix::from_rows: row " + std::to_string(i) +
                         " has length " + std::to_string(rows[i].size()) +
                         ", expected " + std::to_string(n));
    }
    for (int j = 0; j <= i; ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

double trace(const SymMatrix& m) {
  double sum = 0.0;
  for (int i = 0; i < m.dim(); ++i) sum += m(i, i);
  return sum;
}

namespace detail {

void JacobiWorkspace::reset(int n_new) {
  n = n_new;
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  a.assign(nn, 0.0);
  v.assign(nn, 0.0);
  eval.assign(n, 0.0);
  order.resize(n);
}

void JacobiWorkspace::load(const SymMatrix& m) {
  if (n != m.dim()) reset(m.dim());
  const double* p = m.packed().data();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double x = p[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
      a[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n] = x;
      a[static_cast<std::size_t>(j) + static_cast<std::size_t>(i) * n] = x;
    }
  }
}

namespace {

// Off-diagonal Frobenius norm of the column-major symmetric matrix a.
double offdiag_norm(const double* a, int n) {
  double sum2 = 0.0;
  for (int q = 1; q < n; ++q) {
    const double* col = a + static_cast<std::size_t>(q) * n;
    for (int p = 0; p < q; ++p) sum2 += col[p] * col[p];
  }
  return std::sqrt(2.0 * sum2);
}

double frobenius_norm(const double* a, std::size_t nn) {
  double sum2 = 0.0;
  for (std::size_t e = 0; e < nn; ++e) sum2 += a[e] * a[e];
  return std::sqrt(sum2);
}

}  // namespace

void jacobi_eigen(JacobiWorkspace& ws, bool want_vectors) {
  constexpr int kMaxSweeps = 64;
  constexpr double kRelTol = 1e-12;

  const int n = ws.n;
  const std::size_t sn = static_cast<std::size_t>(n);
  double* a = ws.a.data();
  double* v = ws.v.data();

  if (want_vectors) {
    std::fill(ws.v.begin(), ws.v.end(), 0.0);
    for (int i = 0; i < n; ++i) v[i + i * sn] = 1.0;
  }

  const double tol = kRelTol * frobenius_norm(a, sn * sn);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (offdiag_norm(a, n) <= tol) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double* colp = a + sn * p;
        double* colq = a + sn * q;
        const double apq = colq[p];
        if (apq == 0.0) continue;

        const double app = colp[p];
        const double aqq = colq[q];

        // Once an element is negligible against both diagonal entries a
        // rotation would only shuffle rounding noise; zero it instead.
        if (sweep > 3 && std::abs(apq) * 100.0 + std::abs(app) == std::abs(app) &&
            std::abs(apq) * 100.0 + std::abs(aqq) == std::abs(aqq)) {
          colq[p] = 0.0;
          colp[q] = 0.0;
          continue;
        }

        const double theta = 0.5 * (aqq - app) / apq;
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = std::copysign(1.0, theta) /
              (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        for (int r = 0; r < n; ++r) {
          const double g = colp[r];
          const double h = colq[r];
          colp[r] = g - s * (h + tau * g);
          colq[r] = h + s * (g - tau * h);
        }
        const double tapq = t * apq;
        colp[p] = app - tapq;
        colq[q] = aqq + tapq;
        colq[p] = 0.0;
        colp[q] = 0.0;
        // Restore symmetry: copy the updated columns into rows p and q.
        for (int r = 0; r < n; ++r) {
          a[p + r * sn] = colp[r];
          a[q + r * sn] = colq[r];
        }

        if (want_vectors) {
          double* vcolp = v + sn * p;
          double* vcolq = v + sn * q;
          for (int r = 0; r < n; ++r) {
            const double g = vcolp[r];
            const double h = vcolq[r];
            vcolp[r] = g - s * (h + tau * g);
            vcolq[r] = h + s * (g - tau * h);
          }
        }
      }
    }
  }
  if (!converged && offdiag_norm(a, n) > tol) {
    throw NumericalFailure("jacobi_eigen: no convergence after " +
                           std::to_string(kMaxSweeps) + " sweeps (dim " +
                           std::to_string(n) + ")");
  }

  for (int i = 0; i < n; ++i) ws.eval[i] = a[i + i * sn];
  std::iota(ws.order.begin(), ws.order.end(), 0);
  std::stable_sort(ws.order.begin(), ws.order.end(),
                   [&](int x, int y) { return ws.eval[x] > ws.eval[y]; });
}

}  // namespace detail

EigenPairs sym_eigen_topk(const SymMatrix& m, int k) {
  const int n = m.dim();
  if (k < 1 || k > n) {
    throw InvalidInput("sym_eigen_topk: k must be in [1, " + std::to_string(n) +
                       "], got " + std::to_string(k));
  }
  for (double x : m.packed()) {
    if (!std::isfinite(x)) {
      throw InvalidInput("sym_eigen_topk: matrix has non-finite entries");
    }
  }

  detail::JacobiWorkspace ws;
  ws.load(m);
  detail::jacobi_eigen(ws, /*want_vectors=*/true);

  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(k);
  for (int r = 0; r < k; ++r) {
    const int col = ws.order[r];
    out.values[r] = ws.eval[col];
    std::vector<double>& vec = out.vectors[r];
    vec.assign(ws.v.begin() + static_cast<std::size_t>(col) * n,
               ws.v.begin() + static_cast<std::size_t>(col + 1) * n);
    for (int j = 0; j < n; ++j) {
      if (vec[j] != 0.0) {
        if (vec[j] < 0.0) {
          for (double& x : vec) x = -x;
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace panelbreak
