#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "panelbreak/counter_rng.hpp"
#include "panelbreak/lrv.hpp"

namespace pb = panelbreak;

namespace {

pb::PanelData random_panel(int t_len, int n_len, std::uint64_t seed) {
  oracle::Lcg rng(seed);
  std::vector<double> values(static_cast<std::size_t>(t_len) * n_len);
  for (auto& v : values) v = rng.sym();
  return pb::PanelData(t_len, n_len, std::move(values));
}

}  // namespace

TEST_CASE("kernel weights: closed-form anchors") {
  pb::KernelSpec parzen{pb::KernelKind::parzen, 1.0};
  CHECK(pb::kernel_weight(parzen, 0) == 1.0);
  CHECK(pb::kernel_weight(parzen, 1) == 0.0);  // boundary |x|=1
  parzen.bandwidth = 2.0;
  CHECK(pb::kernel_weight(parzen, 1) == doctest::Approx(0.25));  // 1-6/4+6/8
  parzen.bandwidth = 4.0;
  CHECK(pb::kernel_weight(parzen, 1) ==
        doctest::Approx(1.0 - 6.0 * 0.0625 + 6.0 * 0.015625));
  CHECK(pb::kernel_weight(parzen, 3) == doctest::Approx(2.0 * 0.015625));

  pb::KernelSpec bartlett{pb::KernelKind::bartlett, 4.0};
  CHECK(pb::kernel_weight(bartlett, 0) == 1.0);
  CHECK(pb::kernel_weight(bartlett, 1) == doctest::Approx(0.75));
  CHECK(pb::kernel_weight(bartlett, 4) == 0.0);
  CHECK(pb::kernel_weight(bartlett, 5) == 0.0);
  CHECK(pb::kernel_weight(bartlett, -1) == doctest::Approx(0.75));  // symmetry
}

TEST_CASE("kernel weights are symmetric and non-increasing in |s|") {
  for (pb::KernelKind kind : {pb::KernelKind::parzen, pb::KernelKind::bartlett}) {
    const pb::KernelSpec spec{kind, 7.3};
    double prev = 1.0;
    for (long s = 0; s <= 10; ++s) {
      const double w = pb::kernel_weight(spec, s);
      CHECK(w == pb::kernel_weight(spec, -s));
      CHECK(w <= prev + 1e-15);
      CHECK(w >= 0.0);
      CHECK(w <= 1.0);
      prev = w;
    }
  }
}

TEST_CASE("kernel kind string round-trip") {
  CHECK(pb::to_string(pb::KernelKind::parzen) == "parzen");
  CHECK(pb::kernel_kind_from_string("bartlett") == pb::KernelKind::bartlett);
  CHECK_THROWS_AS((void)pb::kernel_kind_from_string("gauss"), pb::InvalidInput);
}

TEST_CASE("plug-in bandwidth formula arithmetic") {
  // rho = 0.5: a2 = 4*0.25/0.0625 = 16, h = 2.6614*(1600)^0.2
  const double h = pb::plugin_bandwidth_from_rho(0.5, 100, pb::KernelKind::parzen);
  CHECK(h == doctest::Approx(2.6614 * std::pow(1600.0, 0.2)).epsilon(1e-12));
  CHECK(h == doctest::Approx(11.6388).epsilon(1e-4));

  // rho = 0.5 Bartlett: a1 = 4*0.25/(0.25*2.25) = 16/9
  const double hb = pb::plugin_bandwidth_from_rho(0.5, 100, pb::KernelKind::bartlett);
  CHECK(hb == doctest::Approx(1.1447 * std::pow(1600.0 / 9.0, 1.0 / 3.0))
                  .epsilon(1e-12));

  // white noise floors at 1
  CHECK(pb::plugin_bandwidth_from_rho(0.0, 100, pb::KernelKind::parzen) == 1.0);
  // cap at T-1
  CHECK(pb::plugin_bandwidth_from_rho(0.99, 20, pb::KernelKind::parzen) == 19.0);
}

TEST_CASE("ar1 plug-in bandwidth on a near-white series floors at 1") {
  oracle::Lcg rng(5);
  std::vector<double> xi(400);
  for (auto& v : xi) v = rng.sym();
  const pb::BandwidthEstimate est =
      pb::ar1_plugin_bandwidth(xi, pb::KernelKind::parzen);
  CHECK(!est.rho_clamped);
  CHECK(std::abs(est.rho_hat) < 0.2);
  CHECK(est.bandwidth >= 1.0);
  CHECK(est.bandwidth < 5.0);
}

TEST_CASE("ar1 plug-in clamps a deterministic alternating series") {
  std::vector<double> xi(64);
  for (int t = 0; t < 64; ++t) xi[t] = (t % 2 == 0) ? 1.0 : -1.0;
  const pb::BandwidthEstimate est =
      pb::ar1_plugin_bandwidth(xi, pb::KernelKind::parzen);
  CHECK(est.rho_clamped);
  CHECK(est.rho_hat == doctest::Approx(-0.999));
  CHECK(est.bandwidth >= 1.0);
  CHECK(est.bandwidth <= 63.0);
  CHECK_THROWS_AS((void)pb::ar1_plugin_bandwidth(std::vector<double>(3, 0.0),
                                                 pb::KernelKind::parzen),
                  pb::InvalidInput);
}

TEST_CASE("breakpoint: exact split and constant tie-break") {
  const pb::PanelData split(6, 1, {0.0, 0.0, 0.0, 5.0, 5.0, 5.0});
  CHECK(pb::least_squares_breakpoint(split) == 3);

  const pb::PanelData flat(5, 1, {2.0, 2.0, 2.0, 2.0, 2.0});
  CHECK(pb::least_squares_breakpoint(flat) == 1);  // flat SSR, smallest k

  CHECK_THROWS_AS((void)pb::least_squares_breakpoint(pb::PanelData(1, 1, {0.0})),
                  pb::InvalidInput);
}

TEST_CASE("breakpoint matches the exhaustive oracle on seeded panels") {
  for (int rep = 0; rep < 60; ++rep) {
    const int t_len = 6 + rep % 15;
    const int n_len = 1 + rep % 4;
    pb::PanelData p = random_panel(t_len, n_len, 600 + rep);
    // plant a break in half the cases so both regimes are exercised
    if (rep % 2 == 0) {
      std::vector<double> v = p.values();
      const int t_star = 1 + rep % (t_len - 1);
      for (int t = t_star; t < t_len; ++t) {
        for (int i = 0; i < n_len; ++i) v[t * n_len + i] += 3.0;
      }
      p = pb::PanelData(t_len, n_len, std::move(v));
    }
    CHECK(pb::least_squares_breakpoint(p) ==
          oracle::breakpoint_exhaustive(p.values(), t_len, n_len));
  }
}

TEST_CASE("breakpoint with a planted 3-sigma break at t=12 on a 20x3 panel") {
  std::vector<double> values(60);
  oracle::Lcg rng(888);
  for (auto& v : values) v = rng.sym();  // sd ~ 0.577
  for (int t = 12; t < 20; ++t) {
    for (int i = 0; i < 3; ++i) values[t * 3 + i] += 1.74;
  }
  const pb::PanelData p(20, 3, std::move(values));
  const int hat = pb::least_squares_breakpoint(p);
  CHECK(hat == oracle::breakpoint_exhaustive(p.values(), 20, 3));
  CHECK(hat == 12);
}

TEST_CASE("breakpoint is invariant under adding a constant to all rows") {
  const pb::PanelData p = random_panel(14, 3, 4711);
  std::vector<double> shifted = p.values();
  for (int t = 0; t < 14; ++t) {
    shifted[t * 3 + 0] += 100.0;
    shifted[t * 3 + 1] -= 3.5;
    shifted[t * 3 + 2] += 0.25;
  }
  CHECK(pb::least_squares_breakpoint(pb::PanelData(14, 3, std::move(shifted))) ==
        pb::least_squares_breakpoint(p));
}

TEST_CASE("segment demean zeroes a two-level step exactly") {
  const pb::PanelData p(4, 1, {0.0, 0.0, 5.0, 5.0});
  const pb::PanelData d = pb::segment_demean(p, 2);
  for (int t = 0; t < 4; ++t) CHECK(d(t, 0) == 0.0);

  const pb::PanelData flat(4, 2, {3.0, -1.0, 3.0, -1.0, 3.0, -1.0, 3.0, -1.0});
  const pb::PanelData df = pb::segment_demean(flat, 2);
  for (int t = 0; t < 4; ++t) {
    CHECK(df(t, 0) == 0.0);
    CHECK(df(t, 1) == 0.0);
  }
}

TEST_CASE("segment demean leaves each segment with columnwise mean zero") {
  const pb::PanelData p = random_panel(11, 3, 2024);
  const int t_star = 4;
  const pb::PanelData d = pb::segment_demean(p, t_star);
  for (int i = 0; i < 3; ++i) {
    double pre = 0.0, post = 0.0;
    for (int t = 0; t < t_star; ++t) pre += d(t, i);
    for (int t = t_star; t < 11; ++t) post += d(t, i);
    CHECK(std::abs(pre / t_star) < 1e-12);
    CHECK(std::abs(post / (11 - t_star)) < 1e-12);
  }
  CHECK_THROWS_AS((void)pb::segment_demean(p, 0), pb::InvalidInput);
  CHECK_THROWS_AS((void)pb::segment_demean(p, 11), pb::InvalidInput);
}

TEST_CASE("xi series: alternating scalar example") {
  const pb::PanelData p(4, 1, {2.0, -2.0, 2.0, -2.0});
  const std::vector<double> e = {1.0};
  const std::vector<double> xi = pb::xi_series(p, e, 2);
  CHECK(xi == std::vector<double>{4.0, 4.0, 4.0, 4.0});
}

TEST_CASE("xi series matches elementwise recomputation") {
  const pb::PanelData p = random_panel(9, 4, 37);
  std::vector<double> e = {0.5, -0.5, 0.5, 0.5};
  const int t_star = 5;
  const std::vector<double> xi = pb::xi_series(p, e, t_star);
  const pb::PanelData d = pb::segment_demean(p, t_star);
  for (int t = 0; t < 9; ++t) {
    double proj = 0.0;
    for (int i = 0; i < 4; ++i) proj += e[i] * d(t, i);
    CHECK(xi[t] == doctest::Approx(proj * proj).epsilon(1e-12));
    CHECK(xi[t] >= 0.0);
  }
  std::vector<double> not_unit = {1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS((void)pb::xi_series(p, not_unit, 2), pb::InvalidInput);
}

TEST_CASE("autocovariances match the naive oracle") {
  oracle::Lcg rng(606);
  std::vector<double> x(120);
  for (auto& v : x) v = rng.sym() + 0.3;
  const std::vector<double> mine = pb::lag_autocovariances(x, 10);
  const std::vector<double> ref = oracle::autocov_naive(x, 10);
  REQUIRE(mine.size() == 11);
  for (int s = 0; s <= 10; ++s) {
    CHECK(mine[s] == doctest::Approx(ref[s]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("constant xi floors the estimate") {
  const pb::PanelData p(10, 1,
                        {3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0});
  const pb::LrvEstimate est = pb::lrv_estimate(p, 1);
  CHECK(est.raw_value == 0.0);
  CHECK(est.value > 0.0);
  CHECK(est.value <= 1e-10 * 9.0 * 9.0 + 1e-300 + 1e-12);
}

TEST_CASE("iid squared-normal series: lrv close to Var(Z^2) = 2") {
  // Scalar panel of iid N(0,1): xi_t ~ (Z - mean)^2, long-run variance 2.
  pb::CounterRng rng(99);
  std::vector<double> values(2000);
  for (int t = 0; t < 2000; ++t) values[t] = rng.normal(0, t);
  const pb::PanelData p(2000, 1, std::move(values));
  const pb::LrvEstimate est = pb::lrv_estimate(p, 1);
  CHECK(est.value > 1.5);
  CHECK(est.value < 2.5);
  CHECK(est.break_index >= 1);
  CHECK(est.break_index <= 1999);
}

TEST_CASE("ar1 xi series: estimate within 25% of the truncated-sum oracle") {
  // xi built from an AR(1) via the library pipeline is awkward to control;
  // instead feed a panel whose squared projections follow a known AR(1) by
  // using N=1 and X_t the square root trick is ill-posed, so check the
  // estimator directly against the oracle sum on a synthetic xi autocovariance
  // structure: x_t = ar(0.6) + drift, long-run variance of x known.
  pb::CounterRng rng(1234);
  const double rho = 0.6;
  const int t_len = 5000;
  std::vector<double> x(t_len);
  double state = rng.normal(7, 0) / std::sqrt(1.0 - rho * rho);
  for (int t = 0; t < t_len; ++t) {
    state = rho * state + rng.normal(8, t);
    x[t] = state;
  }
  // oracle: truncated autocovariance sum over lags <= 200
  const std::vector<double> r = oracle::autocov_naive(x, 200);
  double oracle_lrv = r[0];
  for (int s = 1; s <= 200; ++s) oracle_lrv += 2.0 * r[s];

  const pb::BandwidthEstimate bw = pb::ar1_plugin_bandwidth(x, pb::KernelKind::parzen);
  CHECK(bw.rho_hat == doctest::Approx(rho).epsilon(0.15));
  const pb::KernelSpec spec{pb::KernelKind::parzen, bw.bandwidth};
  const int s_max = std::min<int>(t_len - 1, static_cast<int>(std::ceil(bw.bandwidth)));
  const std::vector<double> rr = pb::lag_autocovariances(x, s_max);
  double mine = rr[0];
  for (int s = 1; s <= s_max; ++s) mine += 2.0 * pb::kernel_weight(spec, s) * rr[s];
  CHECK(mine == doctest::Approx(oracle_lrv).epsilon(0.25));
}

TEST_CASE("lrv scale equivariance: panel*c scales xi by c^2, value by c^4") {
  const pb::PanelData p = random_panel(40, 3, 135);
  const double c = 2.5;
  std::vector<double> scaled = p.values();
  for (auto& v : scaled) v *= c;
  const pb::PanelData pc(40, 3, std::move(scaled));
  const pb::LrvEstimate a = pb::lrv_estimate(p, 1);
  const pb::LrvEstimate b = pb::lrv_estimate(pc, 1);
  CHECK(b.bandwidth == doctest::Approx(a.bandwidth).epsilon(1e-8));
  CHECK(b.value == doctest::Approx(a.value * c * c * c * c).epsilon(1e-8));
  for (int t = 0; t < 40; ++t) {
    CHECK(b.xi[t] == doctest::Approx(a.xi[t] * c * c).epsilon(1e-8));
  }
}

TEST_CASE("lrv invariant under column permutation") {
  const pb::PanelData p = random_panel(30, 4, 7777);
  std::vector<double> perm(30 * 4);
  const int map[4] = {2, 0, 3, 1};
  for (int t = 0; t < 30; ++t) {
    for (int i = 0; i < 4; ++i) perm[t * 4 + map[i]] = p(t, i);
  }
  const pb::LrvEstimate a = pb::lrv_estimate(p, 1);
  const pb::LrvEstimate b = pb::lrv_estimate(pb::PanelData(30, 4, std::move(perm)), 1);
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-8));
  CHECK(b.break_index == a.break_index);
}

TEST_CASE("lrv_estimate validates inputs") {
  CHECK_THROWS_AS((void)pb::lrv_estimate(random_panel(7, 2, 1), 1), pb::InvalidInput);
  CHECK_THROWS_AS((void)pb::lrv_estimate(random_panel(10, 2, 1), 3), pb::InvalidInput);
  CHECK_THROWS_AS((void)pb::lrv_estimate(random_panel(10, 2, 1), 0), pb::InvalidInput);
}
