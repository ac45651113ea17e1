#pragma once

// Partial-sample covariance matrices and their leading-eigenvalue processes.
//
// For a T x N panel with grand mean m, the partial covariance at cut t is
//
//     C(t) = (1/t) * sum_{s<=t} (X_s - m)(X_s - m)'
//
// where the grand mean over the FULL sample is used even in partial sums.
// The eigenvalue process tracks the k largest eigenvalues of C(t) on the
// grid u = t/T, t = 1..T, together with the rescaled variant
// u * lambda_hat(u), which is the object the break statistic is built from.

#include <vector>

#include "panelbreak/eigen_kernel.hpp"
#include "panelbreak/panel.hpp"

namespace panelbreak {

// Trajectories of the k largest eigenvalues over the evaluation grid.
// Slot t (0-based) corresponds to grid point u = (t+1)/T, so the last slot
// is the full-sample covariance.
struct EigenProcess {
  int k = 0;
  int t_len = 0;
  std::vector<double> grid;    // grid[t] = (t+1)/T
  std::vector<double> hat;     // k x T row-major, hat[i*T + t]
  std::vector<double> tilde;   // tilde[i*T + t] = grid[t] * hat[i*T + t]

  double hat_at(int i, int t) const {
    return hat[static_cast<std::size_t>(i) * t_len + t];
  }
  double tilde_at(int i, int t) const {
    return tilde[static_cast<std::size_t>(i) * t_len + t];
  }
};

// Columnwise mean over all T rows.
std::vector<double> grand_mean(const PanelData& p);

// Partial covariance at cut t_cut (1-based count of leading rows), demeaned
// by the grand mean. Throws InvalidInput for t_cut outside [1, T].
SymMatrix partial_cov(const PanelData& p, int t_cut);

// Eigenvalue trajectories for the k largest eigenvalues, 1 <= k <= min(N,T).
// The final grid slot reproduces sym_eigen_topk(partial_cov(p, T), k)
// exactly: both paths accumulate and divide identically.
EigenProcess eigen_process(const PanelData& p, int k);

}  // namespace panelbreak
