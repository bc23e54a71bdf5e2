#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msaw/gibbs.hpp"
#include "msaw/rate.hpp"
#include "msaw/spectral.hpp"
#include "msaw/walk.hpp"

using msaw::RateSpec;
using msaw::SpectralCache;
using msaw::Torus;
using msaw::TorusField;
using msaw::Walker;

namespace {

TorusField gauss_env(const Torus& t, uint64_t seed, double scale = 0.5) {
  const SpectralCache cache(t);
  return msaw::sample_gff(cache, seed, scale);
}

// numeric integral of the per-axis compensator integrands over [0, sigma]
double simpson_compensator(const msaw::Poly& f, double up, double um, double sigma, int n) {
  auto g = [&](double tau) { return f(up + tau) - f(um + tau); };
  double acc = g(0.0) + g(sigma);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(double(i) * sigma / n);
  return acc * sigma / (3.0 * n);
}

}  // namespace

TEST_CASE("cumulative hazard: closed form equals the numeric integral of the rate sum") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 8);
  Walker wk(spec, gauss_env(t, 7), 13);

  CHECK(wk.cumulative_hazard(0.0) == 0.0);
  for (double tau : {0.1, 0.7, 2.3}) {
    // simpson on the rate sum (a polynomial, so this converges very fast)
    const int n = 400;
    double acc = wk.rate_sum(0.0) + wk.rate_sum(tau);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * wk.rate_sum(double(i) * tau / n);
    acc *= tau / (3.0 * n);
    CHECK(wk.cumulative_hazard(tau) == doctest::Approx(acc).epsilon(1e-10));
  }
  // strictly increasing, slope bounded below by the floor rate
  CHECK(wk.cumulative_hazard(2.0) > wk.cumulative_hazard(1.0));
  CHECK(wk.rate_sum(1.5) >= 2.0 * t.d * spec.gamma);
}

TEST_CASE("hazard inversion is exact along an evolving trajectory") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 8);
  Walker wk(spec, gauss_env(t, 21), 99);
  msaw::Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double target = rng.exponential() * (i % 7 == 0 ? 10.0 : 1.0);
    const Walker::Jump jp = wk.sample_jump_inversion(target);
    const double resid = std::fabs(wk.cumulative_hazard(jp.tau) - target) / (1.0 + target);
    worst = std::max(worst, resid);
    wk.apply_jump(jp);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("inversion is monotone in the exponential target") {
  const RateSpec spec = RateSpec::cubic_reference();
  const Torus t(2, 8);
  Walker wk(spec, gauss_env(t, 3), 4);
  const double t1 = wk.sample_jump_inversion(1.0).tau;
  const double t2 = wk.sample_jump_inversion(2.0).tau;
  CHECK(t2 > t1);
}

TEST_CASE("constant-rate mode: exponential holding times and uniform directions") {
  const RateSpec spec = RateSpec::constant(1.0);
  const Torus t(3, 8);
  const double total_rate = 2.0 * t.d * spec.gamma;

  for (msaw::JumpMode mode : {msaw::JumpMode::inversion, msaw::JumpMode::thinning}) {
    msaw::WalkOptions opt;
    opt.mode = mode;
    Walker wk(spec, TorusField(t, msaw::FieldTag::dynamics, 0), 4242, opt);
    std::vector<double> taus;
    std::vector<int64_t> dir_count(size_t(2 * t.d), 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const Walker::Jump jp = wk.next_jump();
      taus.push_back(jp.tau);
      ++dir_count[size_t(jp.dir)];
      wk.apply_jump(jp);
    }
    const msaw::KsResult ks = msaw::ks_test_exponential(taus, total_rate);
    CHECK(ks.p_value > 0.01);
    const double p = 1.0 / double(2 * t.d);
    const double sigma = std::sqrt(p * (1.0 - p) / double(n));
    for (int64_t c : dir_count)
      CHECK(std::fabs(double(c) / double(n) - p) <= 4.5 * sigma);
  }
}

TEST_CASE("inversion and thinning sample the same first-jump law") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 8);
  const SpectralCache cache(t);
  std::vector<double> inv, thin;
  const int n = 2500;
  for (int i = 0; i < n; ++i) {
    const TorusField env =
        msaw::sample_stationary_env(spec, cache, msaw::splitmix64_at(10, uint64_t(i)));
    msaw::WalkOptions oi, ot;
    oi.mode = msaw::JumpMode::inversion;
    ot.mode = msaw::JumpMode::thinning;
    Walker wi(spec, env, msaw::splitmix64_at(11, uint64_t(i)), oi);
    Walker wt(spec, env, msaw::splitmix64_at(12, uint64_t(i)), ot);
    inv.push_back(wi.next_jump().tau);
    thin.push_back(wt.next_jump().tau);
  }
  const msaw::KsResult ks = msaw::ks_test_two_sample(inv, thin);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("jump bookkeeping: directions, counters and gradient refresh") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 8);
  Walker wk(spec, gauss_env(t, 17), 1);

  // axis/sign layout of the 2d directions matches the torus neighbor table
  for (int j = 0; j < 2 * t.d; ++j) {
    CHECK(msaw::edge_axis(j) == j / 2);
    CHECK(msaw::edge_sign(j) == (j % 2 == 0 ? +1 : -1));
  }

  wk.apply_jump(Walker::Jump{0.25, 3});  // axis 1, negative direction
  msaw::Observation ob = wk.observe(0.0);
  CHECK(ob.x[0] == 0);
  CHECK(ob.x[1] == -1);
  CHECK(ob.jumps == 1);
  CHECK(ob.t == doctest::Approx(0.25));

  wk.apply_jump(Walker::Jump{0.5, 0});  // axis 0, positive direction
  ob = wk.observe(0.0);
  CHECK(ob.x[0] == 1);
  CHECK(ob.x[1] == -1);
  CHECK(ob.jumps == 2);

  // holding grows every gradient at the occupied site linearly
  const double before = wk.u(2);
  wk.hold(0.75);
  CHECK(wk.u(2) == doctest::Approx(before + 0.75).epsilon(1e-12));
}

TEST_CASE("compensators accumulate the closed-form integrals of the rate parts") {
  const RateSpec spec = RateSpec::cubic_reference();
  const Torus t(2, 6);
  Walker wk(spec, gauss_env(t, 23), 8);
  const msaw::Poly S = spec.s_antiderivative();
  const msaw::Poly R = spec.potential();
  const msaw::Poly s = spec.s;
  const msaw::Poly r = spec.r;

  const double sigma = 0.8;
  const msaw::Observation ob = wk.observe(sigma);
  for (int l = 0; l < t.d; ++l) {
    const double up = wk.u(2 * l), um = wk.u(2 * l + 1);
    // closed form via antiderivatives
    const double bar = (S(up + sigma) - S(up)) - (S(um + sigma) - S(um));
    const double til = (R(up + sigma) - R(up)) - (R(um + sigma) - R(um));
    CHECK(ob.comp_bar[size_t(l)] == doctest::Approx(bar).epsilon(1e-12));
    CHECK(ob.comp_tilde[size_t(l)] == doctest::Approx(til).epsilon(1e-12));
    // and against a blind numeric integral of the defining integrands
    CHECK(bar == doctest::Approx(simpson_compensator(s, up, um, sigma, 800)).epsilon(1e-9));
    CHECK(til == doctest::Approx(simpson_compensator(r, up, um, sigma, 800)).epsilon(1e-9));
  }

  // gradients reported at lag sigma include the linear local-time growth
  for (int j = 0; j < 2 * t.d; ++j)
    CHECK(ob.grad[size_t(j)] == doctest::Approx(wk.u(j) + sigma).epsilon(1e-12));

  // after a few jumps the accumulated values stay consistent across observe(0)
  for (int k = 0; k < 50; ++k) wk.apply_jump(wk.next_jump());
  const msaw::Observation late = wk.observe(0.0);
  CHECK(std::isfinite(late.comp_bar[0]));
  CHECK(late.jumps == 50);
}

TEST_CASE("constant-rate runs: compensators vanish and the thinned count equals the walk") {
  const RateSpec spec = RateSpec::constant(1.0);
  const Torus t(3, 16);
  const std::vector<double> obs_times{10.0, 25.0, 50.0};
  std::vector<double> msd;
  for (int i = 0; i < 400; ++i) {
    const msaw::WalkResult res =
        msaw::run_walk(spec, TorusField(t, msaw::FieldTag::dynamics, 0), 50.0, obs_times,
                       msaw::splitmix64_at(2000, uint64_t(i)));
    for (const auto& ob : res.obs) {
      for (int l = 0; l < t.d; ++l) {
        CHECK(ob.comp_bar[size_t(l)] == 0.0);
        CHECK(ob.comp_tilde[size_t(l)] == 0.0);
        CHECK(ob.nmart[size_t(l)] == ob.x[size_t(l)]);  // acceptance gamma/w = 1
      }
      // parity: each jump moves exactly one coordinate by one
      int64_t l1 = 0;
      for (int l = 0; l < t.d; ++l) l1 += std::llabs(ob.x[size_t(l)]);
      CHECK(l1 <= int64_t(ob.jumps));
      CHECK((int64_t(ob.jumps) - l1) % 2 == 0);
    }
    double q = 0.0;
    for (int l = 0; l < t.d; ++l)
      q += double(res.obs.back().x[size_t(l)]) * double(res.obs.back().x[size_t(l)]);
    msd.push_back(q);
  }
  const msaw::MeanVar mv = msaw::mean_var(msd);
  CHECK(std::fabs(mv.mean - 2.0 * t.d * spec.gamma * 50.0) <= 4.0 * mv.se);
}

TEST_CASE("horizon close-out and observation grid handling") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 8);
  const TorusField env = gauss_env(t, 31);
  const std::vector<double> obs_times{0.0, 1.5, 3.0};
  const msaw::WalkResult res = msaw::run_walk(spec, env, 3.0, obs_times, 77);

  REQUIRE(res.obs.size() == 3);
  CHECK(res.obs[0].t == 0.0);
  CHECK(res.obs[0].x[0] == 0);
  CHECK(res.obs[0].comp_bar[0] == 0.0);
  CHECK(res.obs[1].t == doctest::Approx(1.5));
  CHECK(res.obs[2].t == doctest::Approx(3.0));
  CHECK(res.final_time == doctest::Approx(3.0));
  // the final unwrapped position matches the last observation at the horizon
  for (int l = 0; l < t.d; ++l) CHECK(res.final_x[size_t(l)] == res.obs[2].x[size_t(l)]);
  CHECK(!res.rng_state.empty());

  CHECK_THROWS_AS(msaw::run_walk(spec, env, -1.0, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(msaw::run_walk(spec, env, 1.0, {2.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(msaw::run_walk(spec, env, 1.0, {0.8, 0.2}, 1), std::invalid_argument);
}

TEST_CASE("winding detection on a small torus") {
  const RateSpec spec = RateSpec::constant(1.0);
  const Torus t(1, 4);
  const msaw::WalkResult far =
      msaw::run_walk(spec, TorusField(t, msaw::FieldTag::dynamics, 0), 200.0, {200.0}, 5);
  CHECK(far.wrapped);
  const Torus big(1, 64);
  const msaw::WalkResult near =
      msaw::run_walk(spec, TorusField(big, msaw::FieldTag::dynamics, 0), 0.5, {0.5}, 5);
  CHECK_FALSE(near.wrapped);
}

TEST_CASE("runs are deterministic in the seed") {
  const RateSpec spec = RateSpec::cubic_reference();
  const Torus t(2, 6);
  const TorusField env = gauss_env(t, 99);
  const std::vector<double> obs{1.0, 2.0};
  const msaw::WalkResult a = msaw::run_walk(spec, env, 2.0, obs, 1234);
  const msaw::WalkResult b = msaw::run_walk(spec, env, 2.0, obs, 1234);
  const msaw::WalkResult c = msaw::run_walk(spec, env, 2.0, obs, 1235);
  REQUIRE(a.obs.size() == b.obs.size());
  for (size_t i = 0; i < a.obs.size(); ++i) {
    CHECK(a.obs[i].x == b.obs[i].x);
    CHECK(a.obs[i].comp_bar == b.obs[i].comp_bar);
    CHECK(a.obs[i].comp_tilde == b.obs[i].comp_tilde);
    CHECK(a.obs[i].nmart == b.obs[i].nmart);
  }
  CHECK(a.rng_state == b.rng_state);
  CHECK(a.final_env.values == b.final_env.values);
  CHECK(a.jumps != c.jumps);  // different seed takes a different path
}

TEST_CASE("final-state checkpoint round-trips through disk") {
  const RateSpec spec = RateSpec::quartic_reference();
  const Torus t(2, 6);
  const msaw::WalkResult res = msaw::run_walk(spec, gauss_env(t, 1), 2.0, {2.0}, 9);

  msaw::FinalState st;
  st.t = res.final_time;
  st.x = res.final_x;
  st.jumps = res.jumps;
  st.rng_state = res.rng_state;
  st.env = res.final_env;

  const std::string path = "/tmp/msaw_test_final_state.bin";
  msaw::save_final_state(st, path);
  const msaw::FinalState back = msaw::load_final_state(path);
  CHECK(back.t == st.t);
  CHECK(back.x == st.x);
  CHECK(back.jumps == st.jumps);
  CHECK(back.rng_state == st.rng_state);
  CHECK(back.env.values == st.env.values);
  CHECK(back.env.torus == st.env.torus);
  CHECK(back.env.tag == st.env.tag);
  std::remove(path.c_str());
  CHECK_THROWS(msaw::load_final_state(path));
}

TEST_CASE("walker rejects degenerate inputs") {
  const Torus t(2, 6);
  RateSpec bad = RateSpec::quartic_reference();
  bad.gamma = 0.0;
  CHECK_THROWS_AS(Walker(bad, TorusField(t, msaw::FieldTag::dynamics, 0), 1),
                  std::invalid_argument);
  Walker ok(RateSpec::quartic_reference(), TorusField(t, msaw::FieldTag::dynamics, 0), 1);
  CHECK_THROWS_AS(ok.hold(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(ok.observe(-0.1), std::invalid_argument);
}
