#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msaw/rng.hpp"
#include "msaw/spectral.hpp"
#include "msaw/torus.hpp"
#include "oracles.hpp"

using msaw::SpectralCache;
using msaw::Torus;

TEST_CASE("torus indexing round-trips and neighbors are involutive") {
  for (int d : {1, 2, 3}) {
    const Torus t(d, 5);
    int c[msaw::kMaxDim];
    for (int64_t i = 0; i < t.volume(); ++i) {
      t.coords(i, c);
      CHECK(t.index(c) == i);
      for (int j = 0; j < 2 * d; ++j) {
        const int64_t n = t.neighbor_edge(i, j);
        const int back = j ^ 1;  // opposite direction on the same axis
        CHECK(t.neighbor_edge(n, back) == i);
      }
    }
  }
}

TEST_CASE("momentum table lies in (-pi, pi] and dhat matches its definition") {
  const Torus t(3, 6);
  const SpectralCache cache(t);
  CHECK(cache.dhat[0] == 0.0);
  for (int64_t k = 0; k < t.volume(); ++k) {
    double dh = 0.0;
    for (int a = 0; a < t.d; ++a) {
      const double p = cache.p(k, a);
      CHECK(p > -M_PI - 1e-15);
      CHECK(p <= M_PI + 1e-15);
      dh += 1.0 - std::cos(p);
    }
    CHECK(cache.dhat[size_t(k)] == doctest::Approx(dh).epsilon(1e-14));
  }
}

TEST_CASE("green kernel matches a dense pinned-laplacian solve") {
  for (auto [d, L] : {std::pair{1, 7}, std::pair{2, 4}, std::pair{3, 4}}) {
    const Torus t(d, L);
    const SpectralCache cache(t);
    const std::vector<double> b = msaw::torus_green(cache);
    const std::vector<double> ref = oracles::dense_green(t);
    // same mean-zero inverse: both drop the zero mode
    for (int64_t x = 0; x < t.volume(); ++x)
      CHECK(b[size_t(x)] == doctest::Approx(ref[size_t(x)]).epsilon(1e-10));
  }
}

TEST_CASE("green kernel satisfies the exact edge identity") {
  for (auto [d, L] : {std::pair{2, 8}, std::pair{3, 8}, std::pair{3, 16}, std::pair{2, 32}}) {
    const Torus t(d, L);
    const SpectralCache cache(t);
    const std::vector<double> b = msaw::torus_green(cache);
    const double vinv = 1.0 / double(t.volume());

    // sum over the 2d unit edges at the origin
    double total = 0.0;
    for (int j = 0; j < 2 * t.d; ++j) total += b[0] - b[size_t(t.neighbor_edge(0, j))];
    CHECK(std::fabs(total - (1.0 - vinv)) <= 1e-12);

    // each edge carries an equal share by lattice symmetry
    for (int j = 0; j < 2 * t.d; ++j) {
      const double one = b[0] - b[size_t(t.neighbor_edge(0, j))];
      CHECK(one == doctest::Approx((1.0 - vinv) / double(2 * t.d)).epsilon(1e-12));
    }

    // -Lap b = delta_0 - 1/V at every site
    for (int64_t x = 0; x < t.volume(); ++x) {
      double lap = 0.0;
      for (int j = 0; j < 2 * t.d; ++j) lap += b[size_t(t.neighbor_edge(x, j))] - b[size_t(x)];
      const double want = (x == 0 ? 1.0 : 0.0) - vinv;
      CHECK(-lap == doctest::Approx(want).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("direction kernels partition unity and average to 1/d") {
  const Torus t(3, 8);
  const SpectralCache cache(t);
  std::vector<std::vector<double>> g;
  for (int a = 0; a < t.d; ++a) g.push_back(msaw::gamma_kernel_hat(cache, a));
  for (int64_t k = 0; k < t.volume(); ++k) {
    double sum = 0.0;
    for (int a = 0; a < t.d; ++a) sum += g[size_t(a)][size_t(k)];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  }
  // grid average of each kernel is exactly 1/d by symmetry
  for (int a = 0; a < t.d; ++a) {
    double acc = 0.0;
    for (double x : g[size_t(a)]) acc += x;
    CHECK(acc / double(t.volume()) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("midpoint rule: exactness, symmetry and input validation") {
  // constants integrate exactly
  CHECK(msaw::midpoint_brillouin([](const double*) { return 2.5; }, 3, 8) ==
        doctest::Approx(2.5).epsilon(1e-15));
  // odd integrands vanish on the symmetric grid
  CHECK(msaw::midpoint_brillouin([](const double* p) { return std::sin(p[0]); }, 2, 10) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // (2pi)^{-1} int cos^2 = 1/2
  CHECK(msaw::midpoint_brillouin([](const double* p) { return std::cos(p[0]) * std::cos(p[0]); },
                                 1, 16) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK_THROWS_AS(msaw::midpoint_brillouin([](const double*) { return 1.0; }, 2, 7),
                  std::invalid_argument);

  // threading does not change the result bitwise
  const auto f = [](const double* p) {
    return 1.0 / (3.0 - std::cos(p[0]) - std::cos(p[1]) - std::cos(p[2]) + 0.1);
  };
  const double one = msaw::midpoint_brillouin(f, 3, 12, 1);
  const double four = msaw::midpoint_brillouin(f, 3, 12, 4);
  CHECK(one == four);
}

TEST_CASE("direction kernel integrates to 1/d over the zone") {
  const auto f = [](const double* p) {
    const double dh = (1.0 - std::cos(p[0])) + (1.0 - std::cos(p[1])) + (1.0 - std::cos(p[2]));
    return (1.0 - std::cos(p[0])) / dh;
  };
  const msaw::QuadratureResult q = msaw::integrate_brillouin(f, 3, 16);
  CHECK(q.converged);
  CHECK(q.richardson == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(q.value == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("singular zone integral reproduces the known cubic-lattice constant") {
  // (2pi)^{-3} int 1 / (2 Dhat(p)) dp = 0.25273100985866...
  const double ref = 1.516386059151978 / 6.0;
  const auto f = [](const double* p) {
    const double dh = (1.0 - std::cos(p[0])) + (1.0 - std::cos(p[1])) + (1.0 - std::cos(p[2]));
    return dh > 0.0 ? 1.0 / (2.0 * dh) : 0.0;
  };
  const msaw::QuadratureResult q = msaw::integrate_brillouin(f, 3, 48, 4);
  CHECK(q.converged);
  // the 1/p^2 singularity slows midpoint convergence to roughly first order
  CHECK(q.richardson == doctest::Approx(ref).epsilon(6e-3));
  const msaw::QuadratureResult q2 = msaw::integrate_brillouin(f, 3, 24, 4);
  // refinement moves the estimate toward the reference
  CHECK(std::fabs(q.richardson - ref) < std::fabs(q2.richardson - ref));
}

TEST_CASE("richardson bookkeeping is the stated combination") {
  const auto f = [](const double* p) { return std::cos(p[0]) * std::cos(p[0]); };
  const msaw::QuadratureResult q = msaw::integrate_brillouin(f, 2, 8);
  CHECK(q.richardson == doctest::Approx((4.0 * q.value - q.coarse) / 3.0).epsilon(1e-15));
  CHECK(q.err_estimate == doctest::Approx(std::fabs(q.value - q.coarse)).epsilon(1e-12));
}

TEST_CASE("momentum transform matches a brute-force transform") {
  const Torus t(2, 4);
  msaw::TorusFft fft(t);
  msaw::Rng rng(7);
  std::vector<double> values(static_cast<size_t>(t.volume()));
  for (double& v : values) v = rng.normal();

  std::vector<std::complex<double>> hat(values.begin(), values.end());
  fft.to_momentum(hat);
  const std::vector<std::complex<double>> ref = oracles::naive_dft(t, values);
  REQUIRE(hat.size() == ref.size());
  for (size_t k = 0; k < hat.size(); ++k) {
    CHECK(hat[k].real() == doctest::Approx(ref[k].real()).epsilon(1e-10).scale(1.0));
    CHECK(hat[k].imag() == doctest::Approx(ref[k].imag()).epsilon(1e-10).scale(1.0));
  }

  // and the inverse recovers the input
  fft.to_position(hat);
  for (size_t x = 0; x < values.size(); ++x) {
    CHECK(hat[x].real() == doctest::Approx(values[x]).epsilon(1e-12));
    CHECK(hat[x].imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}
