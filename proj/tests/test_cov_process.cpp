#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "panelbreak/cov_process.hpp"

namespace pb = panelbreak;

namespace {

pb::PanelData random_panel(int t_len, int n_len, std::uint64_t seed) {
  oracle::Lcg rng(seed);
  std::vector<double> values(static_cast<std::size_t>(t_len) * n_len);
  for (auto& v : values) v = rng.sym();
  return pb::PanelData(t_len, n_len, std::move(values));
}

}  // namespace

TEST_CASE("panel validation") {
  CHECK_THROWS_AS(pb::PanelData(0, 1, {}), pb::InvalidInput);
  CHECK_THROWS_AS(pb::PanelData(1, 0, {}), pb::InvalidInput);
  CHECK_THROWS_AS(pb::PanelData(2, 1, {1.0}), pb::InvalidInput);  // size mismatch
  CHECK_THROWS_AS(pb::PanelData(1, 2, {1.0, std::nan("")}), pb::InvalidInput);
  CHECK_THROWS_AS(pb::PanelData(2, 1, {1.0, 2.0}, {"2001-01-01"}),
                  pb::InvalidInput);  // label count mismatch
  CHECK_THROWS_AS(pb::PanelData(2, 1, {1.0, 2.0}, {"2001-02-01", "2001-01-01"}),
                  pb::InvalidInput);  // labels must increase
  const pb::PanelData ok(2, 2, {1.0, 2.0, 3.0, 4.0}, {"2001-01", "2001-02"});
  CHECK(ok(1, 0) == 3.0);
  CHECK(ok.row(1)[1] == 4.0);
}

TEST_CASE("grand mean of a single row is the row itself") {
  const pb::PanelData p(1, 3, {4.0, 5.0, 6.0});
  CHECK(pb::grand_mean(p) == std::vector<double>{4.0, 5.0, 6.0});
}

TEST_CASE("grand mean averages columns over all rows") {
  const pb::PanelData p(2, 2, {1.0, 10.0, 3.0, 30.0});
  CHECK(pb::grand_mean(p) == std::vector<double>{2.0, 20.0});
}

TEST_CASE("partial covariance of an N=1 alternating series") {
  // X = (1,-1,1,-1): grand mean 0, so C(t) = (1/t) sum of squares = 1 always.
  const pb::PanelData p(4, 1, {1.0, -1.0, 1.0, -1.0});
  for (int cut = 1; cut <= 4; ++cut) {
    CHECK(pb::partial_cov(p, cut)(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS((void)pb::partial_cov(p, 0), pb::InvalidInput);
  CHECK_THROWS_AS((void)pb::partial_cov(p, 5), pb::InvalidInput);
}

TEST_CASE("partial covariance uses the grand mean, not the partial mean") {
  // X = (0, 2): grand mean 1, so C(1) = (0-1)^2 = 1, not 0.
  const pb::PanelData p(2, 1, {0.0, 2.0});
  CHECK(pb::partial_cov(p, 1)(0, 0) == doctest::Approx(1.0));
  CHECK(pb::partial_cov(p, 2)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("partial covariance matches the textbook oracle on seeded panels") {
  for (int rep = 0; rep < 25; ++rep) {
    const int t_len = 5 + rep % 7;
    const int n_len = 1 + rep % 5;
    const pb::PanelData p = random_panel(t_len, n_len, 2200 + rep);
    for (int cut : {1, t_len / 2 + 1, t_len}) {
      const pb::SymMatrix c = pb::partial_cov(p, cut);
      const std::vector<double> ref =
          oracle::partial_cov_full(p.values(), t_len, n_len, cut);
      for (int i = 0; i < n_len; ++i) {
        for (int j = 0; j < n_len; ++j) {
          CHECK(c(i, j) == doctest::Approx(ref[i * n_len + j])
                               .epsilon(1e-12)
                               .scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("eigen process grid and rescaling") {
  const pb::PanelData p = random_panel(8, 3, 77);
  const pb::EigenProcess ep = pb::eigen_process(p, 2);
  REQUIRE(ep.t_len == 8);
  REQUIRE(ep.k == 2);
  for (int t = 0; t < 8; ++t) {
    CHECK(ep.grid[t] == doctest::Approx((t + 1) / 8.0).epsilon(1e-15));
    for (int i = 0; i < 2; ++i) {
      CHECK(ep.tilde_at(i, t) == ep.grid[t] * ep.hat_at(i, t));  // exact
    }
  }
}

TEST_CASE("eigen process endpoint equals the one-shot decomposition exactly") {
  for (int rep = 0; rep < 6; ++rep) {
    const int t_len = 10 + rep;
    const int n_len = 2 + rep % 4;
    const pb::PanelData p = random_panel(t_len, n_len, 31000 + rep);
    const int k = 1 + rep % n_len;
    const pb::EigenProcess ep = pb::eigen_process(p, k);
    const pb::EigenPairs direct = pb::sym_eigen_topk(pb::partial_cov(p, t_len), k);
    for (int i = 0; i < k; ++i) {
      CHECK(ep.hat_at(i, t_len - 1) == direct.values[i]);  // bit-identical
    }
  }
}

TEST_CASE("every slot of the process matches a from-scratch decomposition") {
  const pb::PanelData p = random_panel(9, 4, 5511);
  const pb::EigenProcess ep = pb::eigen_process(p, 4);
  for (int cut = 1; cut <= 9; ++cut) {
    const pb::EigenPairs direct = pb::sym_eigen_topk(pb::partial_cov(p, cut), 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(ep.hat_at(i, cut - 1) ==
            doctest::Approx(direct.values[i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("eigen process eigenvalues are nonnegative up to roundoff") {
  const pb::PanelData p = random_panel(12, 5, 808);
  const pb::EigenProcess ep = pb::eigen_process(p, 5);
  for (int i = 0; i < 5; ++i) {
    for (int t = 0; t < 12; ++t) CHECK(ep.hat_at(i, t) >= -1e-12);
  }
}

TEST_CASE("eigen process validates k") {
  const pb::PanelData p = random_panel(6, 3, 99);
  CHECK_THROWS_AS((void)pb::eigen_process(p, 0), pb::InvalidInput);
  CHECK_THROWS_AS((void)pb::eigen_process(p, 4), pb::InvalidInput);
}

TEST_CASE("trace identity: sum of all eigenvalues equals the trace") {
  const pb::PanelData p = random_panel(10, 4, 1234);
  const pb::EigenProcess ep = pb::eigen_process(p, 4);
  for (int cut = 1; cut <= 10; ++cut) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += ep.hat_at(i, cut - 1);
    CHECK(sum == doctest::Approx(pb::trace(pb::partial_cov(p, cut)))
                     .epsilon(1e-11)
                     .scale(1.0));
  }
}
