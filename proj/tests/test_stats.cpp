#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "msaw/rng.hpp"
#include "msaw/stats.hpp"

using msaw::KahanSum;

TEST_CASE("compensated summation survives adversarial cancellation") {
  // 1 + 1e-16 added 1e6 times loses the small part in naive order
  KahanSum k;
  k.add(1.0);
  for (int i = 0; i < 1000000; ++i) k.add(1e-16);
  CHECK(k.value() == doctest::Approx(1.0 + 1e-10).epsilon(1e-14));

  // merge equals sequential
  KahanSum a, b, all;
  msaw::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.normal() * std::pow(10.0, i % 17 - 8);
    (i % 2 ? a : b).add(x);
    all.add(x);
  }
  KahanSum merged = b;
  merged.merge(a);
  CHECK(merged.value() == doctest::Approx(all.value()).epsilon(1e-12));
}

TEST_CASE("mean and variance match closed forms") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const msaw::MeanVar mv = msaw::mean_var(xs);
  CHECK(mv.mean == doctest::Approx(2.5));
  CHECK(mv.var == doctest::Approx(5.0 / 3.0));  // unbiased
  CHECK(mv.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(mv.n == 4);
}

TEST_CASE("jackknife reproduces closed forms for linear and smooth statistics") {
  // linear statistic: value is the plain mean, se the usual standard error
  std::vector<std::vector<double>> rows;
  msaw::Rng rng(23);
  std::vector<double> flat;
  for (int i = 0; i < 40; ++i) {
    const double x = rng.normal() + 3.0;
    rows.push_back({x});
    flat.push_back(x);
  }
  const msaw::JackknifeResult lin =
      msaw::jackknife(rows, [](const std::vector<double>& m) { return m[0]; });
  const msaw::MeanVar mv = msaw::mean_var(flat);
  CHECK(lin.value == doctest::Approx(mv.mean).epsilon(1e-12));
  CHECK(lin.se == doctest::Approx(mv.se).epsilon(1e-10));
  CHECK(lin.n == 40);

  // ratio statistic: jackknife se agrees with the delta method within a few
  // percent on well-behaved data
  std::vector<std::vector<double>> pairs;
  for (int i = 0; i < 4000; ++i) {
    const double u = 5.0 + rng.normal();
    const double v = 2.0 + 0.1 * rng.normal();
    pairs.push_back({u, v});
  }
  const msaw::JackknifeResult ratio =
      msaw::jackknife(pairs, [](const std::vector<double>& m) { return m[0] / m[1]; });
  CHECK(ratio.value == doctest::Approx(2.5).epsilon(0.05));
  // delta-method se for independent u, v: |r| sqrt(se_u^2/u^2 + se_v^2/v^2)
  std::vector<double> us, vs;
  for (auto& p : pairs) {
    us.push_back(p[0]);
    vs.push_back(p[1]);
  }
  const msaw::MeanVar mu = msaw::mean_var(us), mvv = msaw::mean_var(vs);
  const double delta_se = std::fabs(ratio.value) *
                          std::sqrt(mu.se * mu.se / (mu.mean * mu.mean) +
                                    mvv.se * mvv.se / (mvv.mean * mvv.mean));
  CHECK(ratio.se == doctest::Approx(delta_se).epsilon(0.10));
}

TEST_CASE("jackknife on two replicas has a closed form") {
  std::vector<std::vector<double>> rows{{1.0}, {3.0}};
  const msaw::JackknifeResult r =
      msaw::jackknife(rows, [](const std::vector<double>& m) { return m[0] * m[0]; });
  // leave-one-out values are 9 and 1; value at full mean is 4
  // se = sqrt((n-1)/n * sum (theta_i - theta_bar)^2) = sqrt(1/2 * 32) = 4
  CHECK(r.value == doctest::Approx(4.0));
  CHECK(r.se == doctest::Approx(4.0));
}

TEST_CASE("ks exponential test accepts matched and rejects mismatched rates") {
  msaw::Rng rng(4242);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(rng.exponential() / 2.0);

  const msaw::KsResult good = msaw::ks_test_exponential(xs, 2.0);
  CHECK(good.n == 20000);
  CHECK(good.p_value > 0.01);
  CHECK(good.d_stat < 0.02);

  const msaw::KsResult bad = msaw::ks_test_exponential(xs, 2.4);
  CHECK(bad.p_value < 1e-6);
  CHECK(bad.d_stat > good.d_stat);
}

TEST_CASE("ks statistic has a hand-checkable value on a tiny sample") {
  // Exp(1), samples {ln 2}: F(x) = 1/2 at the sample; D = max over the jump
  const msaw::KsResult r = msaw::ks_test_exponential({std::log(2.0)}, 1.0);
  CHECK(r.d_stat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("two-sample ks accepts same-law samples and rejects shifted ones") {
  msaw::Rng rng(77);
  std::vector<double> a, b, c;
  for (int i = 0; i < 8000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
    c.push_back(rng.normal() + 0.15);
  }
  CHECK(msaw::ks_test_two_sample(a, b).p_value > 0.01);
  CHECK(msaw::ks_test_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("anderson-darling accepts gaussian data and rejects heavy tails") {
  msaw::Rng rng(99);
  std::vector<double> gauss, expo;
  for (int i = 0; i < 2000; ++i) {
    gauss.push_back(2.0 + 3.0 * rng.normal());
    expo.push_back(rng.exponential());
  }
  CHECK(msaw::anderson_darling_normal(gauss).p_value > 0.01);
  CHECK(msaw::anderson_darling_normal(expo).p_value < 1e-4);
  CHECK_THROWS(msaw::anderson_darling_normal({1.0, 2.0, 3.0}));  // needs n >= 8
}

TEST_CASE("distributional tests are calibrated: uniform p-values under the null") {
  // repeat the ks exponential test on independent draws and check the
  // rejection rate at level 0.1 stays near 0.1
  msaw::Rng rng(2026);
  int rejects = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs;
    for (int i = 0; i < 400; ++i) xs.push_back(rng.exponential());
    if (msaw::ks_test_exponential(xs, 1.0).p_value < 0.1) ++rejects;
  }
  // binomial(200, 0.1): 3 sigma is about 13
  CHECK(rejects >= 7);
  CHECK(rejects <= 34);
}

TEST_CASE("seed fan-out gives decorrelated, reproducible streams") {
  const uint64_t master = 123456789ull;
  CHECK(msaw::splitmix64_at(master, 0) != msaw::splitmix64_at(master, 1));
  CHECK(msaw::splitmix64_at(master, 0) == msaw::splitmix64_at(master, 0));
  // same child seed gives the same stream
  msaw::Rng a(msaw::splitmix64_at(master, 5)), b(msaw::splitmix64_at(master, 5));
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());
}
