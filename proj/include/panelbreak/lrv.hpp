#pragma once

// Long-run variance of the squared-projection series xi.
//
// Given the leading eigenvector e of the full-sample covariance and a
// least-squares breakpoint t*, the series
//
//     xi_t = ( e'(X_t - segment mean at t) )^2
//
// is the object whose long-run variance normalizes the bridge statistic.
// Demeaning by segment (before/after t*) keeps the normalizer consistent
// under a one-time mean shift, which is what makes the test's power
// monotone in the break size. The estimator is the usual kernel-weighted
// sum of sample autocovariances
//
//     v2 = r_0 + 2 * sum_{s=1..S} J(s/h) r_s,   S = min(T-1, ceil(h)),
//
// with r_s centered at the sample mean of xi and divided by T-s, and h the
// AR(1) plug-in bandwidth for the chosen kernel.

#include <span>
#include <vector>

#include "panelbreak/panel.hpp"

namespace panelbreak {

enum class KernelKind { parzen, bartlett };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::parzen;
  double bandwidth = 1.0;  // >= 1 for every spec produced by the plug-in rule
};

// J(s/h). Parzen: 1 - 6x^2 + 6|x|^3 on |x| <= 1/2, 2(1-|x|)^3 on (1/2, 1],
// 0 beyond. Bartlett: max(0, 1 - |x|). Total in s; a degenerate bandwidth
// (h <= 0) yields the lag-0 indicator.
double kernel_weight(const KernelSpec& spec, long s);

struct BandwidthEstimate {
  double bandwidth = 1.0;
  double rho_hat = 0.0;     // fitted lag-1 autocorrelation
  bool rho_clamped = false; // true when |rho_hat| >= 0.999 forced the clamp
};

// Bandwidth from a known AR(1) coefficient: Parzen h = 2.6614*(a2*T)^(1/5)
// with a2 = 4 rho^2/(1-rho)^4; Bartlett h = 1.1447*(a1*T)^(1/3) with
// a1 = 4 rho^2/((1-rho)^2 (1+rho)^2). Floored at 1, capped at T-1.
double plugin_bandwidth_from_rho(double rho, int t_len, KernelKind kind);

// AR(1) plug-in: fits rho as the lag-1/lag-0 autocovariance ratio of xi
// (same T-|s| denominators as the kernel sum), clamping |rho| to 0.999.
// Throws InvalidInput for T < 4.
BandwidthEstimate ar1_plugin_bandwidth(std::span<const double> xi, KernelKind kind);

// Least-squares mean-break index: argmin over k in [1, T-1] of the total
// within-segment sum of squares when rows 1..k and k+1..T are demeaned
// separately, summed over columns. Ties resolve to the smallest k.
// Throws InvalidInput for T < 2.
int least_squares_breakpoint(const PanelData& p);

// Subtracts the pre-segment mean from rows 1..t_star and the post-segment
// mean from the rest. t_star in [1, T-1].
PanelData segment_demean(const PanelData& p, int t_star);

// xi_t = (e_hat'(X_t - segment mean at t))^2. e_hat must have length N and
// unit norm within 1e-8.
std::vector<double> xi_series(const PanelData& p, std::span<const double> e_hat,
                              int t_star);

// Sample autocovariances r_s of x for s = 0..max_lag, centered at the sample
// mean, denominator T - s.
std::vector<double> lag_autocovariances(std::span<const double> x, int max_lag);

struct LrvEstimate {
  double value = 0.0;      // floored, strictly positive
  double raw_value = 0.0;  // unfloored kernel sum (can be negative)
  double bandwidth = 1.0;
  double rho_hat = 0.0;
  bool rho_clamped = false;
  int break_index = 1;     // t* used for segment demeaning
  std::vector<double> xi;
};

// Core estimator for a caller-supplied eigenvector and breakpoint; used by
// the test pipeline so one eigendecomposition serves all tracked components.
LrvEstimate lrv_estimate_with(const PanelData& p, std::span<const double> e_hat,
                              int t_star, KernelKind kind);

// Full estimator for the eigen_index-th (1-based) eigenvector of the
// full-sample covariance. T >= 8, eigen_index <= min(N, T).
LrvEstimate lrv_estimate(const PanelData& p, int eigen_index,
                         KernelKind kind = KernelKind::parzen);

}  // namespace panelbreak
