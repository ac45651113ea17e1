#include "panelbreak/lrv.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "panelbreak/cov_process.hpp"

namespace panelbreak {

std::string to_string(KernelKind kind) {
  return kind == KernelKind::parzen ? "parzen" : "bartlett";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "parzen") return KernelKind::parzen;
  if (name == "bartlett") return KernelKind::bartlett;
  throw InvalidInput("unknown kernel '" + name + "' (expected parzen or bartlett)");
}

double kernel_weight(const KernelSpec& spec, long s) {
  if (s == 0) return 1.0;
  if (!(spec.bandwidth > 0.0)) return 0.0;
  const double x = std::abs(static_cast<double>(s)) / spec.bandwidth;
  if (x > 1.0) return 0.0;
  switch (spec.kind) {
    case KernelKind::parzen:
      if (x <= 0.5) return 1.0 - 6.0 * x * x + 6.0 * x * x * x;
      return 2.0 * (1.0 - x) * (1.0 - x) * (1.0 - x);
    case KernelKind::bartlett:
      return 1.0 - x;
  }
  return 0.0;
}

double plugin_bandwidth_from_rho(double rho, int t_len, KernelKind kind) {
  const double tt = static_cast<double>(t_len);
  double h;
  if (kind == KernelKind::parzen) {
    const double om = 1.0 - rho;
    const double alpha2 = 4.0 * rho * rho / (om * om * om * om);
    h = 2.6614 * std::pow(alpha2 * tt, 0.2);
  } else {
    const double alpha1 =
        4.0 * rho * rho / ((1.0 - rho) * (1.0 - rho) * (1.0 + rho) * (1.0 + rho));
    h = 1.1447 * std::cbrt(alpha1 * tt);
  }
  if (!(h >= 1.0)) h = 1.0;
  const double cap = tt - 1.0;
  if (h > cap) h = cap;
  return h;
}

BandwidthEstimate ar1_plugin_bandwidth(std::span<const double> xi, KernelKind kind) {
  const int t_len = static_cast<int>(xi.size());
  if (t_len < 4) {
    throw InvalidInput("ar1_plugin_bandwidth: needs T >= 4, got " +
                       std::to_string(t_len));
  }
  double mean = 0.0;
  for (double x : xi) mean += x;
  mean /= static_cast<double>(t_len);

  double r0 = 0.0;
  for (double x : xi) r0 += (x - mean) * (x - mean);
  r0 /= static_cast<double>(t_len);
  double r1 = 0.0;
  for (int t = 1; t < t_len; ++t) r1 += (xi[t] - mean) * (xi[t - 1] - mean);
  r1 /= static_cast<double>(t_len - 1);

  BandwidthEstimate est;
  est.rho_hat = r0 > 0.0 ? r1 / r0 : 0.0;
  if (!std::isfinite(est.rho_hat)) est.rho_hat = 0.0;
  if (std::abs(est.rho_hat) >= 0.999) {
    est.rho_hat = std::copysign(0.999, est.rho_hat);
    est.rho_clamped = true;
  }
  est.bandwidth = plugin_bandwidth_from_rho(est.rho_hat, t_len, kind);
  return est;
}

int least_squares_breakpoint(const PanelData& p) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  if (t_len < 2) {
    throw InvalidInput("least_squares_breakpoint: needs T >= 2, got " +
                       std::to_string(t_len));
  }

  std::vector<double> total(n, 0.0);
  for (int t = 0; t < t_len; ++t) {
    auto row = p.row(t);
    for (int i = 0; i < n; ++i) total[i] += row[i];
  }

  // Minimizing the within-segment SSR is maximizing
  // sum_i (pre_i^2/k + post_i^2/(T-k)) over segment sums; strict improvement
  // keeps the smallest k on ties.
  std::vector<double> pre(n, 0.0);
  int best_k = 1;
  double best_gain = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= t_len - 1; ++k) {
    auto row = p.row(k - 1);
    for (int i = 0; i < n; ++i) pre[i] += row[i];
    double gain = 0.0;
    const double nk = static_cast<double>(k);
    const double nrest = static_cast<double>(t_len - k);
    for (int i = 0; i < n; ++i) {
      const double post = total[i] - pre[i];
      gain += pre[i] * pre[i] / nk + post * post / nrest;
    }
    if (gain > best_gain) {
      best_gain = gain;
      best_k = k;
    }
  }
  return best_k;
}

namespace {

void segment_means(const PanelData& p, int t_star, std::vector<double>& m_pre,
                   std::vector<double>& m_post) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  if (t_star < 1 || t_star > t_len - 1) {
    throw InvalidInput("segment demeaning: t_star must be in [1, " +
                       std::to_string(t_len - 1) + "], got " +
                       std::to_string(t_star));
  }
  m_pre.assign(n, 0.0);
  m_post.assign(n, 0.0);
  for (int t = 0; t < t_star; ++t) {
    auto row = p.row(t);
    for (int i = 0; i < n; ++i) m_pre[i] += row[i];
  }
  for (int t = t_star; t < t_len; ++t) {
    auto row = p.row(t);
    for (int i = 0; i < n; ++i) m_post[i] += row[i];
  }
  for (int i = 0; i < n; ++i) {
    m_pre[i] /= static_cast<double>(t_star);
    m_post[i] /= static_cast<double>(t_len - t_star);
  }
}

}  // namespace

PanelData segment_demean(const PanelData& p, int t_star) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  std::vector<double> m_pre, m_post;
  segment_means(p, t_star, m_pre, m_post);
  std::vector<double> out(p.values());
  for (int t = 0; t < t_len; ++t) {
    const std::vector<double>& m = t < t_star ? m_pre : m_post;
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(t) * n + i] -= m[i];
  }
  return PanelData(t_len, n, std::move(out), p.labels());
}

std::vector<double> xi_series(const PanelData& p, std::span<const double> e_hat,
                              int t_star) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  if (static_cast<int>(e_hat.size()) != n) {
    throw InvalidInput("xi_series: e_hat length " + std::to_string(e_hat.size()) +
                       " does not match N = " + std::to_string(n));
  }
  double norm2 = 0.0;
  for (double e : e_hat) norm2 += e * e;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8) {
    throw InvalidInput("xi_series: e_hat is not unit norm");
  }
  std::vector<double> m_pre, m_post;
  segment_means(p, t_star, m_pre, m_post);

  std::vector<double> xi(t_len);
  for (int t = 0; t < t_len; ++t) {
    const std::vector<double>& m = t < t_star ? m_pre : m_post;
    auto row = p.row(t);
    double proj = 0.0;
    for (int i = 0; i < n; ++i) proj += e_hat[i] * (row[i] - m[i]);
    xi[t] = proj * proj;
  }
  return xi;
}

std::vector<double> lag_autocovariances(std::span<const double> x, int max_lag) {
  const int t_len = static_cast<int>(x.size());
  if (t_len < 1) throw InvalidInput("lag_autocovariances: empty series");
  if (max_lag < 0) throw InvalidInput("lag_autocovariances: negative max_lag");
  if (max_lag > t_len - 1) max_lag = t_len - 1;

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(t_len);

  std::vector<double> r(max_lag + 1, 0.0);
  for (int s = 0; s <= max_lag; ++s) {
    double sum = 0.0;
    for (int t = s; t < t_len; ++t) sum += (x[t] - mean) * (x[t - s] - mean);
    r[s] = sum / static_cast<double>(t_len - s);
  }
  return r;
}

LrvEstimate lrv_estimate_with(const PanelData& p, std::span<const double> e_hat,
                              int t_star, KernelKind kind) {
  const int t_len = p.t_len();
  if (t_len < 8) {
    throw InvalidInput("lrv_estimate: needs T >= 8, got " + std::to_string(t_len));
  }

  LrvEstimate est;
  est.break_index = t_star;
  est.xi = xi_series(p, e_hat, t_star);

  const BandwidthEstimate bw = ar1_plugin_bandwidth(est.xi, kind);
  est.bandwidth = bw.bandwidth;
  est.rho_hat = bw.rho_hat;
  est.rho_clamped = bw.rho_clamped;

  const int s_max = std::min<int>(t_len - 1, static_cast<int>(std::ceil(bw.bandwidth)));
  const std::vector<double> r = lag_autocovariances(est.xi, s_max);
  const KernelSpec spec{kind, bw.bandwidth};
  double sum = r[0];
  for (int s = 1; s <= s_max; ++s) sum += 2.0 * kernel_weight(spec, s) * r[s];
  est.raw_value = sum;

  double mean_xi = 0.0;
  for (double v : est.xi) mean_xi += v;
  mean_xi /= static_cast<double>(t_len);
  est.value = std::max({sum, 1e-10 * mean_xi * mean_xi + 1e-300, 1e-12});
  return est;
}

LrvEstimate lrv_estimate(const PanelData& p, int eigen_index, KernelKind kind) {
  const int k_max = std::min(p.n_len(), p.t_len());
  if (eigen_index < 1 || eigen_index > k_max) {
    throw InvalidInput("lrv_estimate: eigen_index must be in [1, " +
                       std::to_string(k_max) + "], got " + std::to_string(eigen_index));
  }
  const SymMatrix c = partial_cov(p, p.t_len());
  const EigenPairs pairs = sym_eigen_topk(c, eigen_index);
  const int t_star = least_squares_breakpoint(p);
  return lrv_estimate_with(p, pairs.vectors[eigen_index - 1], t_star, kind);
}

}  // namespace panelbreak
