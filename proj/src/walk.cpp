#include "msaw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace msaw {

namespace {
Poly abs_coeff_poly(const Poly& p) {
  std::vector<double> c(p.coeffs());
  for (double& x : c) x = std::fabs(x);
  return Poly(std::move(c));
}
}  // namespace

Walker::Walker(const RateSpec& spec, const TorusField& init, uint64_t seed,
               const WalkOptions& opt)
    : spec_(spec),
      w_(spec.w_poly()),
      big_w_(spec.w_antiderivative()),
      big_r_(spec.potential()),
      big_s_(spec.s_antiderivative()),
      w_abs_d_(abs_coeff_poly(spec.w_poly().derivative())),
      torus_(init.torus),
      nb_(init.torus.neighbor_table()),
      ell_(init.values),
      opt_(opt),
      rng_(seed) {
  if (spec_.gamma <= 0.0) throw std::invalid_argument("walker: need floor rate gamma > 0");
  if (ell_.size() != size_t(torus_.volume()))
    throw std::invalid_argument("walker: initial field does not match torus");
  // pin the height gauge; only gradients matter
  KahanSum m;
  for (double v : ell_) m.add(v);
  const double mean = m.value() / double(ell_.size());
  for (double& v : ell_) v -= mean;
  refresh_gradients();
}

void Walker::refresh_gradients() {
  const int twod = 2 * torus_.d;
  for (int j = 0; j < twod; ++j)
    u_[size_t(j)] = ell_[size_t(site_)] - ell_[size_t(nb_[size_t(site_) * size_t(twod) + size_t(j)])];
}

double Walker::cumulative_hazard(double tau) const {
  const int twod = 2 * torus_.d;
  double acc = 0.0;
  for (int j = 0; j < twod; ++j) acc += big_w_(u_[size_t(j)] + tau) - big_w_(u_[size_t(j)]);
  return acc;
}

double Walker::rate_sum(double tau) const {
  const int twod = 2 * torus_.d;
  double acc = 0.0;
  for (int j = 0; j < twod; ++j) acc += w_(u_[size_t(j)] + tau);
  return acc;
}

Walker::Jump Walker::sample_jump_inversion(double target) {
  const int twod = 2 * torus_.d;
  const double floor_rate = double(twod) * spec_.gamma;
  // Lambda' >= 2 d gamma everywhere, so Lambda(target / (2 d gamma)) >= target
  double lo = 0.0;
  double hi = target / floor_rate * (1.0 + 1e-12) + 1e-300;
  // the closed-form hazard differences W(u_j + hi) - W(u_j) carry rounding
  // noise proportional to |W(u_j)|, which can exceed the relative slack above
  // when the target is tiny; widen geometrically instead of failing
  for (int g = 0; g < 64 && cumulative_hazard(hi) < target; ++g) hi *= 2.0;
  if (cumulative_hazard(hi) < target)
    throw std::logic_error("jump inversion: hazard bracket failed");
  const double tol = 1e-12 * (1.0 + target);
  double tau = std::min(hi, target / std::max(rate_sum(0.0), floor_rate));
  bool solved = false;
  for (int it = 0; it < 200; ++it) {
    const double f = cumulative_hazard(tau) - target;
    if (std::fabs(f) <= tol) {
      solved = true;
      break;
    }
    if (f < 0.0)
      lo = tau;
    else
      hi = tau;
    const double step = tau - f / rate_sum(tau);
    tau = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
  }
  if (!solved) {
    for (int it = 0; it < 200 && !solved; ++it) {
      tau = 0.5 * (lo + hi);
      const double f = cumulative_hazard(tau) - target;
      if (std::fabs(f) <= tol)
        solved = true;
      else if (f < 0.0)
        lo = tau;
      else
        hi = tau;
    }
    if (!solved) throw std::runtime_error("jump inversion: no convergence");
  }

  // direction probabilities are the instantaneous rates at the jump time
  double rates[2 * kMaxDim];
  double total = 0.0;
  for (int j = 0; j < twod; ++j) {
    rates[j] = w_(u_[size_t(j)] + tau);
    if (rates[j] < 0.0) throw std::runtime_error("jump inversion: negative rate");
    total += rates[j];
  }
  double pick = rng_.uniform() * total;
  int dir = twod - 1;
  for (int j = 0; j < twod; ++j) {
    pick -= rates[j];
    if (pick <= 0.0) {
      dir = j;
      break;
    }
  }
  return {tau, dir};
}

Walker::Jump Walker::sample_jump_thinning() {
  const int twod = 2 * torus_.d;
  double a = 0.0;
  for (int window = 0; window < 100000; ++window) {
    const double delta = 1.0 / std::max(rate_sum(a), 1e-9);
    // majorant over [a, a + delta]: grid max plus half-spacing times a bound
    // on |d rate_sum / d tau| from the absolute-coefficient series of w'
    const int grid_n = 16;
    const double h = delta / grid_n;
    double gmax = 0.0;
    for (int i = 0; i <= grid_n; ++i) gmax = std::max(gmax, rate_sum(a + double(i) * h));
    double dbound = 0.0;
    for (int j = 0; j < twod; ++j) {
      const double reach =
          std::max(std::fabs(u_[size_t(j)] + a), std::fabs(u_[size_t(j)] + a + delta));
      dbound += w_abs_d_(reach);
    }
    const double bar = gmax + 0.5 * h * dbound;
    double sigma = a;
    while (true) {
      sigma += rng_.exponential() / bar;
      if (sigma > a + delta) break;
      const double lam = rate_sum(sigma);
      if (lam > bar * (1.0 + 1e-9)) throw std::logic_error("thinning: majorant violated");
      if (rng_.uniform() * bar <= lam) {
        double rates[2 * kMaxDim];
        double total = 0.0;
        for (int j = 0; j < twod; ++j) {
          rates[j] = w_(u_[size_t(j)] + sigma);
          total += rates[j];
        }
        double pick = rng_.uniform() * total;
        int dir = twod - 1;
        for (int j = 0; j < twod; ++j) {
          pick -= rates[j];
          if (pick <= 0.0) {
            dir = j;
            break;
          }
        }
        return {sigma, dir};
      }
    }
    a += delta;
  }
  throw std::runtime_error("thinning: no jump within window budget");
}

Walker::Jump Walker::next_jump() {
  if (opt_.mode == JumpMode::inversion) return sample_jump_inversion(rng_.exponential());
  return sample_jump_thinning();
}

void Walker::apply_jump(const Jump& jp) {
  const double tau = jp.tau;
  // compensators in closed form over the holding interval
  for (int l = 0; l < torus_.d; ++l) {
    const double up = u_[size_t(2 * l)], um = u_[size_t(2 * l + 1)];
    comp_tilde_[size_t(l)].add((big_r_(up + tau) - big_r_(up)) - (big_r_(um + tau) - big_r_(um)));
    comp_bar_[size_t(l)].add((big_s_(up + tau) - big_s_(up)) - (big_s_(um + tau) - big_s_(um)));
  }
  ell_[size_t(site_)] += tau;
  t_ += tau;

  // gamma-thinned direction martingale
  const double wj = w_(u_[size_t(jp.dir)] + tau);
  const int axis = edge_axis(jp.dir), sign = edge_sign(jp.dir);
  if (rng_.uniform() * wj < spec_.gamma) nmart_[size_t(axis)] += sign;

  site_ = nb_[size_t(site_) * size_t(2 * torus_.d) + size_t(jp.dir)];
  x_[size_t(axis)] += sign;
  if (std::llabs(x_[size_t(axis)]) > torus_.L / 4) wrapped_ = true;
  ++jumps_;
  if (opt_.recenter_stride > 0 && int64_t(jumps_ % uint64_t(opt_.recenter_stride)) == 0) {
    KahanSum m;
    for (double v : ell_) m.add(v);
    const double mean = m.value() / double(ell_.size());
    for (double& v : ell_) v -= mean;
  }
  refresh_gradients();
}

void Walker::hold(double dt) {
  if (dt < 0.0) throw std::invalid_argument("hold: negative duration");
  for (int l = 0; l < torus_.d; ++l) {
    const double up = u_[size_t(2 * l)], um = u_[size_t(2 * l + 1)];
    comp_tilde_[size_t(l)].add((big_r_(up + dt) - big_r_(up)) - (big_r_(um + dt) - big_r_(um)));
    comp_bar_[size_t(l)].add((big_s_(up + dt) - big_s_(up)) - (big_s_(um + dt) - big_s_(um)));
  }
  ell_[size_t(site_)] += dt;
  t_ += dt;
  refresh_gradients();
}

Observation Walker::observe(double sigma) const {
  if (sigma < 0.0) throw std::invalid_argument("observe: negative lag");
  Observation ob;
  ob.t = t_ + sigma;
  ob.x = x_;
  ob.nmart = nmart_;
  ob.jumps = jumps_;
  for (int l = 0; l < torus_.d; ++l) {
    const double up = u_[size_t(2 * l)], um = u_[size_t(2 * l + 1)];
    ob.comp_tilde[size_t(l)] = comp_tilde_[size_t(l)].value() +
                               (big_r_(up + sigma) - big_r_(up)) - (big_r_(um + sigma) - big_r_(um));
    ob.comp_bar[size_t(l)] = comp_bar_[size_t(l)].value() +
                             (big_s_(up + sigma) - big_s_(up)) - (big_s_(um + sigma) - big_s_(um));
  }
  for (int j = 0; j < 2 * torus_.d; ++j) ob.grad[size_t(j)] = u_[size_t(j)] + sigma;
  return ob;
}

TorusField Walker::environment() const {
  TorusField env(torus_, FieldTag::dynamics, 0);
  int zc[kMaxDim];
  for (int64_t k = 0; k < torus_.volume(); ++k) {
    torus_.coords(k, zc);
    env.values[size_t(k)] = ell_[size_t(torus_.shifted(site_, zc))];
  }
  env.re_center();
  return env;
}

WalkResult run_walk(const RateSpec& spec, const TorusField& init, double T,
                    const std::vector<double>& obs_times, uint64_t seed,
                    const WalkOptions& opt) {
  if (T < 0.0) throw std::invalid_argument("run_walk: negative horizon");
  for (size_t i = 0; i < obs_times.size(); ++i) {
    if (obs_times[i] < 0.0 || obs_times[i] > T)
      throw std::invalid_argument("run_walk: observation time outside [0, T]");
    if (i > 0 && obs_times[i] < obs_times[i - 1])
      throw std::invalid_argument("run_walk: observation times must be sorted");
  }
  Walker wk(spec, init, seed, opt);
  WalkResult res;
  res.obs.reserve(obs_times.size());
  size_t oi = 0;
  while (oi < obs_times.size() && obs_times[oi] <= wk.time()) {
    res.obs.push_back(wk.observe(0.0));
    ++oi;
  }
  while (wk.time() < T || oi < obs_times.size()) {
    const Walker::Jump jp = wk.next_jump();
    const double t_next = wk.time() + jp.tau;
    while (oi < obs_times.size() && obs_times[oi] <= t_next) {
      res.obs.push_back(wk.observe(obs_times[oi] - wk.time()));
      ++oi;
    }
    if (t_next >= T && oi >= obs_times.size()) {
      // close out the run at the horizon: hold without jumping
      wk.hold(T - wk.time());
      break;
    }
    wk.apply_jump(jp);
  }
  res.jumps = wk.jumps();
  res.wrapped = wk.wrapped();
  res.final_env = wk.environment();
  res.final_time = std::max(wk.time(), T);
  const Observation end = wk.observe(0.0);
  res.final_x = end.x;
  res.rng_state = wk.rng_state();
  return res;
}

std::string Walker::rng_state() const {
  std::ostringstream os;
  os << rng_.engine();
  return os.str();
}

namespace {
constexpr char kFinMagic[8] = {'M', 'S', 'A', 'W', 'F', 'I', 'N', '1'};
constexpr uint32_t kFinVersion = 1;

template <typename T>
void put(std::ostream& os, const T& x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& x) {
  is.read(reinterpret_cast<char*>(&x), sizeof(T));
}
}  // namespace

void save_final_state(const FinalState& st, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_final_state: cannot open " + tmp);
    os.write(kFinMagic, sizeof(kFinMagic));
    put(os, kFinVersion);
    put(os, st.t);
    put(os, uint32_t(st.env.torus.d));
    for (int a = 0; a < st.env.torus.d; ++a) put(os, st.x[size_t(a)]);
    put(os, st.jumps);
    put(os, uint64_t(st.rng_state.size()));
    os.write(st.rng_state.data(), std::streamsize(st.rng_state.size()));
    write_field_stream(st.env, os);
    if (!os) {
      std::remove(tmp.c_str());
      throw std::runtime_error("save_final_state: write failed for " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("save_final_state: rename failed for " + path);
}

FinalState load_final_state(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_final_state: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kFinMagic, sizeof(kFinMagic)) != 0)
    throw std::runtime_error("load_final_state: bad magic in " + path);
  uint32_t version = 0, d = 0;
  FinalState st;
  get(is, version);
  get(is, st.t);
  get(is, d);
  if (!is || version != kFinVersion || d == 0 || d > uint32_t(kMaxDim))
    throw std::runtime_error("load_final_state: bad header in " + path);
  for (uint32_t a = 0; a < d; ++a) get(is, st.x[a]);
  get(is, st.jumps);
  uint64_t rlen = 0;
  get(is, rlen);
  if (!is || rlen > (1u << 20)) throw std::runtime_error("load_final_state: bad header in " + path);
  st.rng_state.resize(size_t(rlen));
  is.read(st.rng_state.data(), std::streamsize(rlen));
  st.env = read_field_stream(is);
  if (st.env.torus.d != int(d))
    throw std::runtime_error("load_final_state: dimension mismatch in " + path);
  return st;
}

}  // namespace msaw
