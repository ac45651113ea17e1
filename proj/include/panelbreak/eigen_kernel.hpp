#pragma once

// Dense symmetric eigensolver used throughout the library.
//
// The covariance matrices we decompose are small (N up to a few hundred) but
// the Monte Carlo harness decomposes them millions of times, so the solver is
// a cyclic Jacobi iteration working in a caller-owned workspace: no per-call
// allocation, contiguous column updates, and an eigenvalues-only mode that
// performs the identical rotation sequence without accumulating vectors.

#include <vector>

#include "panelbreak/errors.hpp"

namespace panelbreak {

// Symmetric matrix stored as the packed lower triangle. Writes through set()
// land in one slot shared by (i,j) and (j,i), so symmetry holds by
// construction.
class SymMatrix {
 public:
  explicit SymMatrix(int dim);

  // Builds from dense rows, reading only the lower triangle.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return dim_; }

  double operator()(int i, int j) const {
    return i >= j ? p_[idx(i, j)] : p_[idx(j, i)];
  }

  void set(int i, int j, double value) {
    if (i >= j) {
      p_[idx(i, j)] = value;
    } else {
      p_[idx(j, i)] = value;
    }
  }

  // Packed lower triangle, row-wise: element (i,j), j <= i, at i*(i+1)/2 + j.
  const std::vector<double>& packed() const { return p_; }
  std::vector<double>& packed() { return p_; }

 private:
  static std::size_t idx(int i, int j) {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  int dim_;
  std::vector<double> p_;
};

// Top slice of a spectral decomposition: values descending, vectors[i] the
// unit eigenvector paired with values[i].
struct EigenPairs {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

// Largest k eigenvalues and eigenvectors of m, descending. The full spectrum
// is computed (Jacobi is a full decomposition) and the top k returned.
// Eigenvector signs are fixed so the first nonzero component is positive.
// Throws InvalidInput for non-finite entries or k outside [1, dim],
// NumericalFailure if the sweep cap is hit before convergence.
EigenPairs sym_eigen_topk(const SymMatrix& m, int k);

double trace(const SymMatrix& m);

namespace detail {

// Scratch for repeated same-size decompositions. `a` is the n x n working
// copy (column-major, both triangles filled); it is destroyed by the solve.
struct JacobiWorkspace {
  int n = 0;
  std::vector<double> a;
  std::vector<double> v;      // eigenvector columns, valid when requested
  std::vector<double> eval;   // unsorted eigenvalues (final diagonal)
  std::vector<int> order;     // order[r] = index of the (r+1)-largest value

  void reset(int n_new);

  // Loads the packed lower triangle of m into `a`.
  void load(const SymMatrix& m);
};

// Cyclic Jacobi on ws.a. Convergence: off-diagonal Frobenius norm at most
// 1e-12 times the Frobenius norm of the input, checked before each sweep;
// at most 64 sweeps, then NumericalFailure. `order` is filled by a stable
// descending sort, so equal eigenvalues keep their diagonal order. When
// want_vectors is false the rotation sequence is unchanged and the resulting
// eigenvalues are bit-identical; only the accumulation of `v` is skipped.
void jacobi_eigen(JacobiWorkspace& ws, bool want_vectors);

}  // namespace detail

}  // namespace panelbreak
