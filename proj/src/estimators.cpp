#include "msaw/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "msaw/fft.hpp"

namespace msaw {

size_t Ensemble::time_index(double t) const {
  for (size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - t) <= 1e-9 * (1.0 + std::fabs(t))) return i;
  throw std::invalid_argument("ensemble: requested time not on the observation grid");
}

Ensemble run_ensemble(const RateSpec& spec, const Torus& torus, const EnsembleParams& par) {
  if (par.replicas <= 0) throw std::invalid_argument("run_ensemble: need replicas > 0");
  if (par.obs_times.empty()) throw std::invalid_argument("run_ensemble: need observation times");
  Ensemble ens;
  ens.torus = torus;
  ens.spec = spec;
  ens.T = par.T;
  ens.times = par.obs_times;
  ens.rows.resize(size_t(par.replicas));

  const SpectralCache cache(torus);
  const size_t nt = par.obs_times.size();
  const int d = torus.d;

  auto one_replica = [&](int64_t i) {
    const uint64_t walk_seed = splitmix64_at(par.master_seed, uint64_t(2 * i));
    const uint64_t env_seed = splitmix64_at(par.master_seed, uint64_t(2 * i + 1));
    TorusField init = (par.init == InitKind::stationary)
                          ? sample_stationary_env(spec, cache, env_seed, par.mcmc)
                          : TorusField(torus, FieldTag::dynamics, env_seed);
    WalkOptions wopt;
    wopt.mode = par.mode;
    const WalkResult res = run_walk(spec, init, par.T, par.obs_times, walk_seed, wopt);
    if (res.obs.size() != nt) throw std::logic_error("run_ensemble: observation count mismatch");
    ReplicaRow row;
    row.replica = uint32_t(i);
    row.jumps = res.jumps;
    row.wrapped = res.wrapped;
    row.x.resize(nt * size_t(d));
    row.nmart.resize(nt * size_t(d));
    row.cbar.resize(nt * size_t(d));
    row.ctil.resize(nt * size_t(d));
    row.grad.resize(nt * size_t(2 * d));
    for (size_t ti = 0; ti < nt; ++ti) {
      const Observation& ob = res.obs[ti];
      for (int l = 0; l < d; ++l) {
        row.x[ti * size_t(d) + size_t(l)] = double(ob.x[size_t(l)]);
        row.nmart[ti * size_t(d) + size_t(l)] = double(ob.nmart[size_t(l)]);
        row.cbar[ti * size_t(d) + size_t(l)] = ob.comp_bar[size_t(l)];
        row.ctil[ti * size_t(d) + size_t(l)] = ob.comp_tilde[size_t(l)];
      }
      for (int j = 0; j < 2 * d; ++j) row.grad[ti * size_t(2 * d) + size_t(j)] = ob.grad[size_t(j)];
    }
    ens.rows[size_t(i)] = std::move(row);
  };

  const int nthreads = int(std::min<int64_t>(std::max(1, par.threads), par.replicas));
  if (nthreads == 1) {
    for (int64_t i = 0; i < par.replicas; ++i) one_replica(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(nthreads));
    for (int tid = 0; tid < nthreads; ++tid)
      pool.emplace_back([&, tid] {
        for (int64_t i = tid; i < par.replicas; i += nthreads) one_replica(i);
      });
    for (auto& th : pool) th.join();
  }
  return ens;
}

void CheckReport::add(const std::string& name, double value, double se, double reference,
                      double tol, bool one_sided) {
  CheckLine ln;
  ln.name = name;
  ln.value = value;
  ln.se = se;
  ln.reference = reference;
  ln.tol = tol;
  ln.one_sided = one_sided;
  ln.ok = one_sided ? (value - reference) <= tol : std::fabs(value - reference) <= tol;
  ok = ok && ln.ok;
  lines.push_back(std::move(ln));
}

void CheckReport::merge(const CheckReport& o) {
  ok = ok && o.ok;
  lines.insert(lines.end(), o.lines.begin(), o.lines.end());
}

namespace {

std::string axis_name(int l) { return "axis" + std::to_string(l + 1); }

// jackknife over replicas with ingredient extractor per replica
JackknifeResult jk_stat(const Ensemble& e,
                        const std::function<std::vector<double>(size_t)>& ingredients,
                        const std::function<double(const std::vector<double>&)>& f) {
  std::vector<std::vector<double>> rows;
  rows.reserve(e.rows.size());
  for (size_t i = 0; i < e.rows.size(); ++i) rows.push_back(ingredients(i));
  return jackknife(rows, f);
}

}  // namespace

CheckReport lln_check(const Ensemble& e, double z) {
  if (e.rows.size() < 30)
    throw std::runtime_error("lln check underpowered: need at least 30 replicas, got " +
                             std::to_string(e.rows.size()));
  CheckReport rep;
  const size_t ti = e.nt() - 1;
  const double t = e.times[ti];
  for (int l = 0; l < e.d(); ++l) {
    std::vector<double> v(e.rows.size());
    for (size_t i = 0; i < e.rows.size(); ++i) v[i] = e.x(i, ti, l) / t;
    const MeanVar mv = mean_var(v);
    rep.add("lln_mean_velocity_" + axis_name(l), mv.mean, mv.se, 0.0, z * mv.se);
  }
  return rep;
}

CheckReport msd_check(const Ensemble& e, size_t ti, double reference, double nsigma) {
  CheckReport rep;
  std::vector<double> v(e.rows.size());
  for (size_t i = 0; i < e.rows.size(); ++i) {
    double s = 0;
    for (int l = 0; l < e.d(); ++l) s += e.x(i, ti, l) * e.x(i, ti, l);
    v[i] = s;
  }
  const MeanVar mv = mean_var(v);
  char name[64];
  std::snprintf(name, sizeof(name), "msd_t%g", e.times[ti]);
  rep.add(name, mv.mean, mv.se, reference, nsigma * mv.se);
  return rep;
}

CheckReport diffusive_lower_check(const Ensemble& e, double gamma,
                                  const std::vector<size_t>& tis, double nsigma) {
  CheckReport rep;
  for (size_t ti : tis) {
    const double t = e.times[ti];
    std::vector<double> v(e.rows.size());
    for (size_t i = 0; i < e.rows.size(); ++i) {
      double s = 0;
      for (int l = 0; l < e.d(); ++l) s += e.x(i, ti, l) * e.x(i, ti, l);
      v[i] = s / (2.0 * double(e.d()) * t);
    }
    const MeanVar mv = mean_var(v);
    char name[64];
    std::snprintf(name, sizeof(name), "diffusive_lower_t%g", t);
    // gamma - mean <= nsigma * se
    rep.add(name, gamma, mv.se, mv.mean, nsigma * mv.se, /*one_sided=*/true);
  }
  return rep;
}

CheckReport plateau_check(const Ensemble& e, const std::vector<size_t>& tis, double nsigma) {
  if (tis.size() < 2) throw std::invalid_argument("plateau_check: need at least two times");
  CheckReport rep;
  const size_t m = tis.size();
  std::vector<double> ts(m);
  for (size_t k = 0; k < m; ++k) ts[k] = e.times[tis[k]];
  auto ingredients = [&](size_t i) {
    std::vector<double> row(m);
    for (size_t k = 0; k < m; ++k) {
      double s = 0;
      for (int l = 0; l < e.d(); ++l) s += e.x(i, tis[k], l) * e.x(i, tis[k], l);
      row[k] = s / (2.0 * double(e.d()) * ts[k]);
    }
    return row;
  };
  auto slope = [&](const std::vector<double>& means) {
    double tbar = 0, mbar = 0;
    for (size_t k = 0; k < m; ++k) {
      tbar += ts[k];
      mbar += means[k];
    }
    tbar /= double(m);
    mbar /= double(m);
    double num = 0, den = 0;
    for (size_t k = 0; k < m; ++k) {
      num += (ts[k] - tbar) * (means[k] - mbar);
      den += (ts[k] - tbar) * (ts[k] - tbar);
    }
    return num / den;
  };
  auto drift = [&](const std::vector<double>& means) { return means.back() - means.front(); };
  const JackknifeResult js = jk_stat(e, ingredients, slope);
  // slope is per unit time; scale by the window length for a comparable number
  const double window = ts.back() - ts.front();
  rep.add("diffusivity_plateau_slope_x_window", js.value * window, js.se * window, 0.0,
          nsigma * js.se * window);
  const JackknifeResult jd = jk_stat(e, ingredients, drift);
  rep.add("diffusivity_plateau_drift", jd.value, jd.se, 0.0, nsigma * jd.se);
  return rep;
}

SigmaEstimate sigma_estimate(const Ensemble& e, size_t ti) {
  SigmaEstimate out;
  const double t = e.times[ti];
  for (int l = 0; l < e.d(); ++l)
    for (int mx = 0; mx < e.d(); ++mx) {
      auto ingredients = [&](size_t i) {
        const double a = e.x(i, ti, l), b = e.x(i, ti, mx);
        return std::vector<double>{a, b, a * b};
      };
      auto cov = [&](const std::vector<double>& m) { return (m[2] - m[0] * m[1]) / t; };
      const JackknifeResult jk = jk_stat(e, ingredients, cov);
      out.value[l][mx] = jk.value;
      out.se[l][mx] = jk.se;
    }
  return out;
}

CheckReport isotropy_check(const Ensemble& e, size_t ti, double nsigma) {
  CheckReport rep;
  const double t = e.times[ti];
  for (int l = 0; l < e.d(); ++l)
    for (int mx = l + 1; mx < e.d(); ++mx) {
      auto ingredients = [&](size_t i) {
        const double a = e.x(i, ti, l), b = e.x(i, ti, mx);
        return std::vector<double>{a, b, a * b, a * a, b * b};
      };
      auto cov = [&](const std::vector<double>& m) { return (m[2] - m[0] * m[1]) / t; };
      const JackknifeResult jc = jk_stat(e, ingredients, cov);
      rep.add("sigma_offdiag_" + axis_name(l) + axis_name(mx), jc.value, jc.se, 0.0,
              nsigma * jc.se);
      auto diagdiff = [&](const std::vector<double>& m) {
        return ((m[3] - m[0] * m[0]) - (m[4] - m[1] * m[1])) / t;
      };
      const JackknifeResult jd = jk_stat(e, ingredients, diagdiff);
      rep.add("sigma_diag_match_" + axis_name(l) + axis_name(mx), jd.value, jd.se, 0.0,
              nsigma * jd.se);
    }
  return rep;
}

CheckReport clt_shape_check(const Ensemble& e, size_t ti, double nsigma) {
  CheckReport rep;
  for (int l = 0; l < e.d(); ++l) {
    auto ingredients = [&](size_t i) {
      const double a = e.x(i, ti, l);
      return std::vector<double>{a, a * a, a * a * a, a * a * a * a};
    };
    auto skew = [](const std::vector<double>& m) {
      const double var = m[1] - m[0] * m[0];
      const double m3 = m[2] - 3.0 * m[0] * m[1] + 2.0 * m[0] * m[0] * m[0];
      return m3 / std::pow(var, 1.5);
    };
    auto exkurt = [](const std::vector<double>& m) {
      const double var = m[1] - m[0] * m[0];
      const double m4 = m[3] - 4.0 * m[0] * m[2] + 6.0 * m[0] * m[0] * m[1] -
                        3.0 * m[0] * m[0] * m[0] * m[0];
      return m4 / (var * var) - 3.0;
    };
    const JackknifeResult jsk = jk_stat(e, ingredients, skew);
    rep.add("clt_skewness_" + axis_name(l), jsk.value, jsk.se, 0.0, nsigma * jsk.se);
    const JackknifeResult jku = jk_stat(e, ingredients, exkurt);
    rep.add("clt_excess_kurtosis_" + axis_name(l), jku.value, jku.se, 0.0, nsigma * jku.se);
  }
  return rep;
}

CheckReport clt_crosstime_check(const Ensemble& e, size_t ti_half, size_t ti_full,
                                double nsigma) {
  CheckReport rep;
  for (int l = 0; l < e.d(); ++l) {
    auto ingredients = [&](size_t i) {
      const double a = e.x(i, ti_half, l), b = e.x(i, ti_full, l);
      return std::vector<double>{a, b, a * b, a * a};
    };
    auto gap = [](const std::vector<double>& m) {
      return (m[2] - m[0] * m[1]) - (m[3] - m[0] * m[0]);
    };
    const JackknifeResult jk = jk_stat(e, ingredients, gap);
    rep.add("clt_crosstime_cov_minus_var_" + axis_name(l), jk.value, jk.se, 0.0,
            nsigma * jk.se);
  }
  return rep;
}

CheckReport gaussianity_advisory(const Ensemble& e, size_t ti) {
  CheckReport rep;
  std::vector<double> v(e.rows.size());
  for (size_t i = 0; i < e.rows.size(); ++i) v[i] = e.x(i, ti, 0);
  const AdResult ad = anderson_darling_normal(v);
  // informational only: never gates
  CheckLine ln;
  ln.name = "gaussianity_ad_pvalue_advisory";
  ln.value = ad.p_value;
  ln.reference = ad.a2_star;
  ln.ok = true;
  rep.lines.push_back(ln);
  return rep;
}

CheckReport martingale_check(const Ensemble& e, size_t ti, double nsigma) {
  CheckReport rep;
  for (int l = 0; l < e.d(); ++l) {
    std::vector<double> v(e.rows.size());
    for (size_t i = 0; i < e.rows.size(); ++i)
      v[i] = e.x(i, ti, l) - e.cbar(i, ti, l) - e.ctil(i, ti, l);
    const MeanVar mv = mean_var(v);
    rep.add("martingale_mean_" + axis_name(l), mv.mean, mv.se, 0.0, nsigma * mv.se);

    auto ingredients = [&](size_t i) {
      const double n = e.nmart(i, ti, l);
      const double rest = e.x(i, ti, l) - n;
      return std::vector<double>{n, rest, n * rest};
    };
    auto cov = [](const std::vector<double>& m) { return m[2] - m[0] * m[1]; };
    const JackknifeResult jk = jk_stat(e, ingredients, cov);
    rep.add("martingale_noise_vs_rest_cov_" + axis_name(l), jk.value, jk.se, 0.0,
            nsigma * jk.se);
  }
  return rep;
}

CheckReport stationarity_check(const Ensemble& e, size_t ti0, size_t ti1, int max_order,
                               double nsigma) {
  CheckReport rep;
  for (int j = 0; j < 2 * e.d(); ++j)
    for (int k = 1; k <= max_order; ++k) {
      auto ingredients = [&](size_t i) {
        return std::vector<double>{std::pow(e.grad(i, ti0, j), k),
                                   std::pow(e.grad(i, ti1, j), k)};
      };
      auto diff = [](const std::vector<double>& m) { return m[0] - m[1]; };
      const JackknifeResult jk = jk_stat(e, ingredients, diff);
      char name[96];
      std::snprintf(name, sizeof(name), "stationarity_grad%d_order%d", j, k);
      rep.add(name, jk.value, jk.se, 0.0, nsigma * jk.se);
    }
  return rep;
}

CheckReport reversal_check(const Ensemble& e, size_t ti0, size_t ti1, double nsigma) {
  CheckReport rep;
  const int ja = 0;
  const int jb = (e.d() >= 2) ? 2 : 1;
  const int pairs[3][2] = {{1, 1}, {3, 1}, {1, 3}};
  for (const auto& pq : pairs) {
    const int p = pq[0], q = pq[1];
    const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
    auto ingredients = [&](size_t i) {
      const double a0 = e.grad(i, ti0, ja), a1 = e.grad(i, ti1, ja);
      const double b0 = e.grad(i, ti0, jb), b1 = e.grad(i, ti1, jb);
      return std::vector<double>{std::pow(a0, p) * std::pow(b1, q),
                                 sign * std::pow(a1, p) * std::pow(b0, q)};
    };
    auto diff = [](const std::vector<double>& m) { return m[0] - m[1]; };
    const JackknifeResult jk = jk_stat(e, ingredients, diff);
    char name[96];
    std::snprintf(name, sizeof(name), "reversal_pair_p%d_q%d", p, q);
    rep.add(name, jk.value, jk.se, 0.0, nsigma * jk.se);
  }
  return rep;
}

ChatEstimate chat_estimate(const std::vector<TorusField>& fields, GradFunctional kind,
                           int axis, const RateSpec* spec) {
  if (fields.empty()) throw std::invalid_argument("chat_estimate: no fields");
  if (kind == GradFunctional::odd_rate && spec == nullptr)
    throw std::invalid_argument("chat_estimate: odd_rate functional needs the rate spec");
  const Torus& t = fields.front().torus;
  const int64_t v = t.volume();
  ChatEstimate out;
  out.torus = t;
  out.chat.assign(size_t(v), 0.0);
  out.chat_se.assign(size_t(v), 0.0);

  TorusFft fft(t);
  std::vector<KahanSum> sum(static_cast<size_t>(v)), sumsq(static_cast<size_t>(v));
  std::vector<std::complex<double>> g(static_cast<size_t>(v));
  for (const auto& f : fields) {
    if (!(f.torus == t)) throw std::invalid_argument("chat_estimate: mixed torus sizes");
    KahanSum mean_acc;
    for (int64_t y = 0; y < v; ++y) {
      double gy = 0;
      const double dip = f.values[size_t(y)] - f.values[size_t(t.neighbor(y, axis, +1))];
      switch (kind) {
        case GradFunctional::dipole: gy = dip; break;
        case GradFunctional::dipole_square: gy = dip * dip; break;
        case GradFunctional::odd_rate: {
          const double dipm = f.values[size_t(y)] - f.values[size_t(t.neighbor(y, axis, -1))];
          gy = spec->r(dip) - spec->r(dipm);
          break;
        }
      }
      g[size_t(y)] = gy;
      mean_acc.add(gy);
    }
    const double gm = mean_acc.value() / double(v);
    for (auto& z : g) z -= gm;
    fft.to_momentum(g);
    for (int64_t k = 0; k < v; ++k) {
      const double c = std::norm(g[size_t(k)]) / double(v);
      sum[size_t(k)].add(c);
      sumsq[size_t(k)].add(c * c);
    }
  }
  const double n = double(fields.size());
  for (int64_t k = 0; k < v; ++k) {
    const double m = sum[size_t(k)].value() / n;
    out.chat[size_t(k)] = m;
    if (fields.size() >= 2) {
      const double var = std::max(0.0, (sumsq[size_t(k)].value() - n * m * m) / (n - 1.0));
      out.chat_se[size_t(k)] = std::sqrt(var / n);
    }
    if (std::fabs(m) > out.sup_abs) {
      out.sup_abs = std::fabs(m);
      out.arg_sup = k;
    }
  }
  // position-space covariance and the infrared sum
  std::vector<std::complex<double>> cx(out.chat.begin(), out.chat.end());
  fft.to_position(cx);
  out.cx.resize(size_t(v));
  for (int64_t x = 0; x < v; ++x) out.cx[size_t(x)] = cx[size_t(x)].real();
  const SpectralCache cache(t);
  KahanSum ir;
  for (int64_t k = 1; k < v; ++k) ir.add(out.chat[size_t(k)] / cache.dhat[size_t(k)]);
  out.infrared = ir.value() / double(v);
  return out;
}

}  // namespace msaw
