#include "panelbreak/cov_process.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace panelbreak {

PanelData::PanelData(int t_len, int n_len, std::vector<double> row_major,
                     std::vector<std::string> labels)
    : t_len_(t_len), n_len_(n_len), values_(std::move(row_major)),
      labels_(std::move(labels)) {
  if (t_len_ < 1) {
    throw InvalidInput("PanelData: t_len must be >= 1, got " + std::to_string(t_len_));
  }
  if (n_len_ < 1) {
    throw InvalidInput("PanelData: n_len must be >= 1, got " + std::to_string(n_len_));
  }
  if (values_.size() != static_cast<std::size_t>(t_len_) * n_len_) {
    throw InvalidInput("PanelData: values size " + std::to_string(values_.size()) +
                       " does not match " + std::to_string(t_len_) + "x" +
                       std::to_string(n_len_));
  }
  for (double x : values_) {
    if (!std::isfinite(x)) throw InvalidInput("PanelData: non-finite value");
  }
  if (!labels_.empty()) {
    if (labels_.size() != static_cast<std::size_t>(t_len_)) {
      throw InvalidInput("PanelData: labels size " + std::to_string(labels_.size()) +
                         " does not match t_len " + std::to_string(t_len_));
    }
    for (int t = 1; t < t_len_; ++t) {
      if (!(labels_[t - 1] < labels_[t])) {
        throw InvalidInput("PanelData: labels not strictly increasing at row " +
                           std::to_string(t) + " (" + labels_[t] + ")");
      }
    }
  }
}

std::vector<double> grand_mean(const PanelData& p) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  std::vector<double> mean(n, 0.0);
  for (int t = 0; t < t_len; ++t) {
    auto row = p.row(t);
    for (int i = 0; i < n; ++i) mean[i] += row[i];
  }
  for (int i = 0; i < n; ++i) mean[i] /= static_cast<double>(t_len);
  return mean;
}

namespace {

// sum += y y' in packed lower-triangle layout.
void accumulate_outer(std::vector<double>& sum, const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  double* s = sum.data();
  for (int i = 0; i < n; ++i) {
    const double yi = y[i];
    double* row = s + static_cast<std::size_t>(i) * (i + 1) / 2;
    for (int j = 0; j <= i; ++j) row[j] += yi * y[j];
  }
}

void demean_row(const PanelData& p, int t, const std::vector<double>& mean,
                std::vector<double>& y) {
  auto row = p.row(t);
  for (int i = 0; i < p.n_len(); ++i) y[i] = row[i] - mean[i];
}

}  // namespace

SymMatrix partial_cov(const PanelData& p, int t_cut) {
  if (t_cut < 1 || t_cut > p.t_len()) {
    throw InvalidInput("partial_cov: t_cut must be in [1, " +
                       std::to_string(p.t_len()) + "], got " + std::to_string(t_cut));
  }
  const int n = p.n_len();
  const std::vector<double> mean = grand_mean(p);
  std::vector<double> y(n);
  SymMatrix c(n);
  for (int t = 0; t < t_cut; ++t) {
    demean_row(p, t, mean, y);
    accumulate_outer(c.packed(), y);
  }
  for (double& e : c.packed()) e /= static_cast<double>(t_cut);
  return c;
}

EigenProcess eigen_process(const PanelData& p, int k) {
  const int t_len = p.t_len();
  const int n = p.n_len();
  const int k_max = n < t_len ? n : t_len;
  if (k < 1 || k > k_max) {
    throw InvalidInput("eigen_process: k must be in [1, " + std::to_string(k_max) +
                       "], got " + std::to_string(k));
  }

  const std::vector<double> mean = grand_mean(p);
  std::vector<double> sum(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
  std::vector<double> y(n);

  EigenProcess ep;
  ep.k = k;
  ep.t_len = t_len;
  ep.grid.resize(t_len);
  ep.hat.resize(static_cast<std::size_t>(k) * t_len);
  ep.tilde.resize(static_cast<std::size_t>(k) * t_len);

  detail::JacobiWorkspace ws;
  ws.reset(n);

  for (int t = 0; t < t_len; ++t) {
    demean_row(p, t, mean, y);
    accumulate_outer(sum, y);

    // Same entries partial_cov would produce at t_cut = t+1.
    const double cut = static_cast<double>(t + 1);
    for (int i = 0; i < n; ++i) {
      const double* row = sum.data() + static_cast<std::size_t>(i) * (i + 1) / 2;
      for (int j = 0; j <= i; ++j) {
        const double x = row[j] / cut;
        ws.a[static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * n] = x;
        ws.a[static_cast<std::size_t>(j) + static_cast<std::size_t>(i) * n] = x;
      }
    }

    try {
      detail::jacobi_eigen(ws, /*want_vectors=*/false);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("eigen_process: step t=" + std::to_string(t + 1) +
                             ": " + e.what());
    }

    const double u = static_cast<double>(t + 1) / static_cast<double>(t_len);
    ep.grid[t] = u;
    for (int i = 0; i < k; ++i) {
      const double lam = ws.eval[ws.order[i]];
      ep.hat[static_cast<std::size_t>(i) * t_len + t] = lam;
      ep.tilde[static_cast<std::size_t>(i) * t_len + t] = u * lam;
    }
  }
  return ep;
}

}  // namespace panelbreak
