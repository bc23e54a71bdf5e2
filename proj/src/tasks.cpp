#include "msaw/tasks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <stdexcept>

#include "msaw/estimators.hpp"
#include "msaw/fock.hpp"
#include "msaw/gibbs.hpp"
#include "msaw/gsc.hpp"
#include "msaw/report.hpp"
#include "msaw/spectral.hpp"

namespace msaw {

namespace {

std::string path_join(const std::string& dir, const std::string& name) {
  return dir + "/" + name;
}

std::string zero_padded(const char* stem, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05d%s", stem, i, ext);
  return buf;
}

Json config_echo(const TaskOptions& opt) {
  const ExperimentConfig& c = opt.cfg;
  Json j;
  j["task"] = opt.task;
  Json model;
  if (c.gamma) model["gamma"] = *c.gamma;
  if (c.c) model["c"] = *c.c;
  if (c.r_coeffs) model["r_coeffs"] = *c.r_coeffs;
  if (c.s_coeffs) model["s_coeffs"] = *c.s_coeffs;
  if (!model.empty()) j["model"] = std::move(model);
  Json lat;
  if (c.d) lat["d"] = *c.d;
  if (c.L) lat["L"] = *c.L;
  if (!lat.empty()) j["lattice"] = std::move(lat);
  Json run;
  if (c.T) run["T"] = *c.T;
  if (c.obs_times) run["obs_times"] = *c.obs_times;
  if (c.obs_count) run["obs_count"] = *c.obs_count;
  if (c.replicas) run["replicas"] = *c.replicas;
  if (c.seed) run["seed"] = *c.seed;
  run["init"] = c.init.value_or("stationary");
  run["jump_mode"] = c.jump_mode.value_or("inversion");
  j["run"] = std::move(run);
  if (c.gsc_r || c.gsc_kappa || c.gsc_C) {
    Json g;
    if (c.gsc_r) g["r"] = *c.gsc_r;
    if (c.gsc_kappa) g["kappa"] = *c.gsc_kappa;
    if (c.gsc_C) g["C"] = *c.gsc_C;
    if (c.gsc_n1_max) g["n1_max"] = *c.gsc_n1_max;
    j["gsc"] = std::move(g);
  }
  return j;
}

void write_meta(const TaskOptions& opt, double wall_seconds) {
  Json meta;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  meta["generated_at"] = buf;
  meta["threads"] = opt.threads;
  meta["wall_seconds"] = wall_seconds;
  write_json_atomic(path_join(opt.out_dir, "report.meta.json"), meta);
}

McmcOptions mcmc_from(const ExperimentConfig& c) {
  McmcOptions m;
  if (c.burn_in_sweeps) m.burn_in_sweeps = *c.burn_in_sweeps;
  if (c.stride_sweeps) m.stride_sweeps = *c.stride_sweeps;
  return m;
}

EnsembleParams ensemble_params_from(const TaskOptions& opt) {
  const ExperimentConfig& c = opt.cfg;
  EnsembleParams par;
  par.T = c.T.value();
  par.obs_times = make_obs_times(opt.cfg);
  par.replicas = c.replicas.value();
  par.master_seed = c.seed.value();
  par.threads = opt.threads;
  par.init = c.init.value_or("stationary") == "flat" ? InitKind::flat : InitKind::stationary;
  par.mode = c.jump_mode.value_or("inversion") == "thinning" ? JumpMode::thinning
                                                             : JumpMode::inversion;
  par.mcmc = mcmc_from(c);
  return par;
}

Json field_summary(const TorusField& f, const std::string& rel_path) {
  double lo = f.values[0], hi = f.values[0];
  KahanSum s;
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    s.add(v);
  }
  Json j;
  j["path"] = rel_path;
  j["mean"] = s.value() / double(f.values.size());
  j["min"] = lo;
  j["max"] = hi;
  return j;
}

int finish(const TaskOptions& opt, Json& report, const CheckReport& checks,
           std::chrono::steady_clock::time_point start) {
  report["results"] = check_report_json(checks);
  report["overall_ok"] = checks.ok;
  write_json_atomic(path_join(opt.out_dir, "report.json"), report);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_meta(opt, wall);
  log_note(1, opt.task + (checks.ok ? ": all checks passed" : ": CHECK FAILURES"));
  return checks.ok ? 0 : 1;
}

int task_sample_gibbs(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  const RateSpec spec = make_rate_spec(opt.cfg);
  const Torus torus = make_torus(opt.cfg);
  SpectralCache cache(torus);
  const int n = opt.cfg.n_fields.value();
  const auto fields = sample_field_ensemble(spec, cache, n, opt.cfg.seed.value(), opt.threads,
                                            mcmc_from(opt.cfg), /*env_law=*/false);
  Json report = config_echo(opt);
  Json flist = Json::array();
  for (int i = 0; i < n; ++i) {
    const std::string bin = zero_padded("field", i, ".bin");
    const std::string csv = zero_padded("field", i, ".csv");
    save_field(fields[size_t(i)], path_join(opt.out_dir, bin));
    save_field_csv(fields[size_t(i)], path_join(opt.out_dir, csv));
    flist.push_back(field_summary(fields[size_t(i)], bin));
  }
  report["fields"] = std::move(flist);
  CheckReport checks;
  return finish(opt, report, checks, start);
}

int task_run_walk(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  const RateSpec spec = make_rate_spec(opt.cfg);
  const Torus torus = make_torus(opt.cfg);
  SpectralCache cache(torus);
  const EnsembleParams par = ensemble_params_from(opt);
  WalkOptions wopt;
  wopt.mode = par.mode;
  const int d = torus.d;
  Json report = config_echo(opt);
  Json rep_list = Json::array();
  for (int64_t i = 0; i < par.replicas; ++i) {
    const uint64_t walk_seed = splitmix64_at(par.master_seed, uint64_t(2 * i));
    const uint64_t env_seed = splitmix64_at(par.master_seed, uint64_t(2 * i + 1));
    TorusField init = par.init == InitKind::stationary
                          ? sample_stationary_env(spec, cache, env_seed, par.mcmc)
                          : TorusField(torus, FieldTag::dynamics, env_seed);
    const WalkResult res = run_walk(spec, init, par.T, par.obs_times, walk_seed, wopt);
    std::string lines;
    for (const auto& ob : res.obs) {
      Json row;
      row["t"] = ob.t;
      Json xs = Json::array(), nm = Json::array(), cb = Json::array(), ct = Json::array();
      for (int l = 0; l < d; ++l) {
        xs.push_back(ob.x[size_t(l)]);
        nm.push_back(ob.nmart[size_t(l)]);
        cb.push_back(ob.comp_bar[size_t(l)]);
        ct.push_back(ob.comp_tilde[size_t(l)]);
      }
      row["X"] = std::move(xs);
      row["N"] = std::move(nm);
      row["comp_bar"] = std::move(cb);
      row["comp_tilde"] = std::move(ct);
      lines += row.dump() + "\n";
    }
    const std::string traj = zero_padded("trajectory", int(i), ".jsonl");
    write_text_atomic(path_join(opt.out_dir, traj), lines);
    if (i == 0) {
      FinalState st;
      st.t = res.final_time;
      st.x = res.final_x;
      st.jumps = res.jumps;
      st.rng_state = res.rng_state;
      st.env = res.final_env;
      save_final_state(st, path_join(opt.out_dir, "final_state_00000.bin"));
    }
    Json rj;
    rj["trajectory"] = traj;
    rj["jumps"] = res.jumps;
    rj["wrapped"] = res.wrapped;
    rep_list.push_back(std::move(rj));
  }
  report["replicas_out"] = std::move(rep_list);
  CheckReport checks;
  return finish(opt, report, checks, start);
}

Json sigma_json(const SigmaEstimate& sg, int d) {
  Json v = Json::array(), s = Json::array();
  for (int a = 0; a < d; ++a) {
    Json rv = Json::array(), rs = Json::array();
    for (int b = 0; b < d; ++b) {
      rv.push_back(sg.value[a][b]);
      rs.push_back(sg.se[a][b]);
    }
    v.push_back(std::move(rv));
    s.push_back(std::move(rs));
  }
  Json j;
  j["value"] = std::move(v);
  j["se"] = std::move(s);
  return j;
}

int task_estimate(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  const RateSpec spec = make_rate_spec(opt.cfg);
  const Torus torus = make_torus(opt.cfg);
  SpectralCache cache(torus);
  const EnsembleParams par = ensemble_params_from(opt);
  log_note(1, "running " + std::to_string(par.replicas) + " replicas to T = " +
                  std::to_string(par.T));
  const Ensemble ens = run_ensemble(spec, torus, par);
  const size_t nt = ens.nt();
  const size_t last = nt - 1;
  CheckReport checks;
  Json estimates;

  // displacement second moment per observation time (jackknife)
  {
    std::string csv = "t,msd,se\n";
    Json msd = Json::array();
    for (size_t ti = 0; ti < nt; ++ti) {
      std::vector<std::vector<double>> rows(ens.rows.size());
      for (size_t i = 0; i < ens.rows.size(); ++i) {
        double q = 0;
        for (int l = 0; l < ens.d(); ++l) q += ens.x(i, ti, l) * ens.x(i, ti, l);
        rows[i] = {q};
      }
      const JackknifeResult jk =
          jackknife(rows, [](const std::vector<double>& m) { return m[0]; });
      Json e;
      e["t"] = ens.times[ti];
      e["msd"] = jk.value;
      e["se"] = jk.se;
      msd.push_back(std::move(e));
      char line[96];
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", ens.times[ti], jk.value, jk.se);
      csv += line;
    }
    estimates["msd"] = std::move(msd);
    write_text_atomic(path_join(opt.out_dir, "msd.csv"), csv);
  }

  std::vector<size_t> all_tis(nt);
  for (size_t ti = 0; ti < nt; ++ti) all_tis[ti] = ti;
  std::vector<size_t> late_tis;
  for (size_t ti = 0; ti < nt; ++ti)
    if (ens.times[ti] >= par.T / 4.0 && ens.times[ti] > 0.0) late_tis.push_back(ti);

  if (ens.rows.size() >= 30) checks.merge(lln_check(ens));
  if (spec.interaction_free()) {
    const double ref = 2.0 * double(ens.d()) * spec.gamma * ens.times[last];
    checks.merge(msd_check(ens, last, ref, 3.0));
  }
  {
    std::vector<size_t> pos_tis;
    for (size_t ti = 0; ti < nt; ++ti)
      if (ens.times[ti] > 0.0) pos_tis.push_back(ti);
    if (!pos_tis.empty()) checks.merge(diffusive_lower_check(ens, spec.gamma, pos_tis));
  }
  if (late_tis.size() >= 2) checks.merge(plateau_check(ens, late_tis));
  estimates["sigma"] = sigma_json(sigma_estimate(ens, last), ens.d());
  if (ens.d() >= 2) checks.merge(isotropy_check(ens, last));
  checks.merge(clt_shape_check(ens, last));
  for (size_t ti = 0; ti < nt; ++ti)
    if (std::fabs(ens.times[ti] - par.T / 2.0) <= 1e-9 * par.T) {
      checks.merge(clt_crosstime_check(ens, ti, last));
      break;
    }
  if (ens.rows.size() >= 8) checks.merge(gaussianity_advisory(ens, last));
  checks.merge(martingale_check(ens, last));
  if (par.init == InitKind::stationary && nt >= 2) {
    checks.merge(stationarity_check(ens, 0, last));
    checks.merge(reversal_check(ens, 0, last));
  }

  // gradient-spectrum diagnostics on an independent stationary-field ensemble
  if (!spec.interaction_free()) {
    const int nf = opt.cfg.n_fields.value_or(100);
    const auto fields =
        sample_field_ensemble(spec, cache, nf, splitmix64_at(par.master_seed, 0x5eedfull),
                              opt.threads, par.mcmc, /*env_law=*/true);
    const ChatEstimate chat = chat_estimate(fields, GradFunctional::dipole, 0, &spec);
    Json cj;
    cj["sup_abs"] = chat.sup_abs;
    cj["arg_sup"] = chat.arg_sup;
    cj["infrared"] = chat.infrared;
    estimates["chat_dipole"] = std::move(cj);
  }

  Json report = config_echo(opt);
  report["estimates"] = std::move(estimates);
  return finish(opt, report, checks, start);
}

int task_fock_check(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  const Torus torus = make_torus(opt.cfg);
  SpectralCache cache(torus);
  SectorFamily fam(cache);
  const int n_max = opt.cfg.fock_n_max.value_or(2);
  const uint64_t seed = opt.cfg.seed.value();
  CheckReport checks;
  Json estimates;
  Json norms = Json::array();
  for (int n = 0; n <= n_max; ++n) {
    const double ref2 = creation_norm_squared_reference(cache, n);
    const NormEstimate cr = creation_norm(fam, n, 0, +1, splitmix64_at(seed, uint64_t(4 * n)));
    char name[64];
    std::snprintf(name, sizeof(name), "creation_norm_n%d", n);
    checks.add(name, cr.norm, 0.0, std::sqrt(ref2), 1e-6);
    Json e;
    e["n"] = n;
    e["creation_norm"] = cr.norm;
    e["reference"] = std::sqrt(ref2);
    e["iters"] = cr.iters;
    e["resid"] = cr.resid;
    if (n >= 1) {
      const NormEstimate an =
          annihilation_norm(fam, n, 0, +1, splitmix64_at(seed, uint64_t(4 * n + 1)));
      std::snprintf(name, sizeof(name), "annihilation_norm_n%d", n);
      checks.add(name, an.norm, 0.0, std::sqrt(creation_norm_squared_reference(cache, n - 1)),
                 1e-6);
      e["annihilation_norm"] = an.norm;
    }
    const double ar = adjoint_residual(fam, n, 0, +1, splitmix64_at(seed, uint64_t(4 * n + 2)));
    std::snprintf(name, sizeof(name), "adjoint_residual_n%d", n);
    checks.add(name, ar, 0.0, 0.0, 1e-10);
    e["adjoint_residual"] = ar;
    norms.push_back(std::move(e));
  }
  const double him = half_inv_nabla_max(fam.sector(1), 0, +1);
  checks.add("half_inv_nabla_max_le_1", him, 0.0, 1.0, 1e-12, /*one_sided=*/true);
  estimates["half_inv_nabla_max_sector1"] = him;
  const double srr = shift_reflection_residual(fam.sector(1), 0, +1);
  checks.add("shift_reflection_residual", srr, 0.0, 0.0, 1e-10);
  estimates["norms"] = std::move(norms);
  Json report = config_echo(opt);
  report["estimates"] = std::move(estimates);
  return finish(opt, report, checks, start);
}

int task_gsc_threshold(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  GscParams p;
  p.r = opt.cfg.gsc_r.value();
  p.kappa = opt.cfg.gsc_kappa.value();
  p.C = opt.cfg.gsc_C.value();
  if (opt.cfg.gsc_n1_max) p.n1_max = *opt.cfg.gsc_n1_max;
  const GscReport rep = gsc_threshold(p);
  CheckReport checks;
  checks.add("gsc_feasible", rep.feasible ? 1.0 : 0.0, 0.0, 1.0, 0.0);
  if (rep.feasible) {
    checks.add("gsc_sup_q1_within_budget", rep.sup_q1, 0.0, rep.budget + p.slack, 0.0,
               /*one_sided=*/true);
    checks.add("gsc_sup_q2_within_budget", rep.sup_q2, 0.0, rep.budget + p.slack, 0.0,
               /*one_sided=*/true);
  }
  Json estimates;
  estimates["feasible"] = rep.feasible;
  estimates["boundary"] = rep.boundary;
  estimates["n1"] = rep.n1;
  estimates["budget"] = rep.budget;
  estimates["plateau"] = rep.plateau;
  estimates["sup_q1"] = rep.sup_q1;
  estimates["sup_q2"] = rep.sup_q2;
  estimates["margin"] = rep.margin;
  estimates["scan_end"] = rep.scan_end;
  estimates["note"] = rep.note;
  Json report = config_echo(opt);
  report["estimates"] = std::move(estimates);
  return finish(opt, report, checks, start);
}

int task_full_verify(const TaskOptions& opt, std::chrono::steady_clock::time_point start) {
  const RateSpec spec = make_rate_spec(opt.cfg);
  const Torus torus = make_torus(opt.cfg);
  SpectralCache cache(torus);
  CheckReport checks;
  Json estimates;
  const uint64_t seed = opt.cfg.seed.value();

  // exact lattice green identity: sum over directed edges of b(0) - b(e)
  {
    const std::vector<double> green = torus_green(cache);
    double acc = 0.0;
    for (int j = 0; j < 2 * torus.d; ++j) acc += green[0] - green[size_t(torus.neighbor_edge(0, j))];
    checks.add("green_edge_identity", acc, 0.0, 1.0 - 1.0 / double(torus.volume()), 1e-12);
  }

  // normalized gradient-kernel integral over the brillouin zone = 1/d
  {
    const int d = torus.d;
    auto f = [d](const double* p) {
      double dh = 0.0;
      for (int a = 0; a < d; ++a) dh += 1.0 - std::cos(p[a]);
      if (dh == 0.0) return 1.0 / double(d);
      return (1.0 - std::cos(p[0])) / dh;
    };
    const QuadratureResult q = integrate_brillouin(f, d, 24, opt.threads);
    checks.add("gamma_kernel_integral", q.richardson, 0.0, 1.0 / double(d), 1e-6);
  }

  // spectral sampler covariance at one lag vs the green function
  {
    const int nf = 400;
    const auto fields = sample_field_ensemble(RateSpec{1.0, 1.0, Poly({0.0, 1.0}), Poly{}},
                                              cache, nf, splitmix64_at(seed, 0xfeedull),
                                              opt.threads, {}, /*env_law=*/false);
    const std::vector<double> green = torus_green(cache);
    const int64_t lag = torus.neighbor_edge(0, 0);
    std::vector<std::vector<double>> rows(static_cast<size_t>(nf));
    for (size_t i = 0; i < fields.size(); ++i)
      rows[i] = {fields[i].values[0] * fields[i].values[size_t(lag)]};
    const JackknifeResult jk = jackknife(rows, [](const std::vector<double>& m) { return m[0]; });
    checks.add("gff_cov_neighbor", jk.value, jk.se, green[size_t(lag)], 3.0 * jk.se);
  }

  // walk ensemble battery
  {
    const EnsembleParams par = ensemble_params_from(opt);
    const Ensemble ens = run_ensemble(spec, torus, par);
    const size_t last = ens.nt() - 1;
    if (spec.interaction_free()) {
      const double ref = 2.0 * double(ens.d()) * spec.gamma * ens.times[last];
      checks.merge(msd_check(ens, last, ref, 3.0));
    }
    std::vector<size_t> pos_tis;
    for (size_t ti = 0; ti < ens.nt(); ++ti)
      if (ens.times[ti] > 0.0) pos_tis.push_back(ti);
    if (!pos_tis.empty()) checks.merge(diffusive_lower_check(ens, spec.gamma, pos_tis));
    if (ens.rows.size() >= 30) checks.merge(lln_check(ens));
    checks.merge(martingale_check(ens, last));
    if (ens.d() >= 2) checks.merge(isotropy_check(ens, last));
  }

  // fock norms on a small grid (d unchanged, L = 4)
  {
    const Torus t4(torus.d, 4);
    SpectralCache c4(t4);
    SectorFamily fam(c4);
    for (int n = 0; n <= 1; ++n) {
      const NormEstimate cr = creation_norm(fam, n, 0, +1, splitmix64_at(seed, uint64_t(16 + n)));
      char name[64];
      std::snprintf(name, sizeof(name), "fock_creation_norm_n%d", n);
      checks.add(name, cr.norm, 0.0, std::sqrt(creation_norm_squared_reference(c4, n)), 1e-6);
    }
    checks.add("fock_adjoint_residual",
               adjoint_residual(fam, 1, 0, +1, splitmix64_at(seed, 21ull)), 0.0, 0.0, 1e-10);
    checks.add("fock_shift_reflection", shift_reflection_residual(fam.sector(1), 0, +1), 0.0,
               0.0, 1e-10);
  }

  // graded-multiplier threshold at the reference parameters
  {
    GscParams p;
    const GscReport rep = gsc_threshold(p);
    checks.add("gsc_feasible", rep.feasible ? 1.0 : 0.0, 0.0, 1.0, 0.0);
    checks.add("gsc_margin_nonnegative", -rep.margin, 0.0, 0.0, 0.0, /*one_sided=*/true);
    estimates["gsc_n1"] = rep.n1;
  }

  Json report = config_echo(opt);
  report["estimates"] = std::move(estimates);
  return finish(opt, report, checks, start);
}

}  // namespace

int run_task(const TaskOptions& opt) {
  const auto errs = validate_config(opt.cfg, opt.task);
  if (!errs.empty()) {
    for (const auto& e : errs) std::fprintf(stderr, "config error: %s\n", e.c_str());
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    std::filesystem::create_directories(opt.out_dir);
    if (opt.task == "sample-gibbs") return task_sample_gibbs(opt, start);
    if (opt.task == "run-walk") return task_run_walk(opt, start);
    if (opt.task == "estimate") return task_estimate(opt, start);
    if (opt.task == "fock-check") return task_fock_check(opt, start);
    if (opt.task == "gsc-threshold") return task_gsc_threshold(opt, start);
    if (opt.task == "full-verify") return task_full_verify(opt, start);
    std::fprintf(stderr, "unknown task: %s\n", opt.task.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s failed: %s\n", opt.task.c_str(), e.what());
    return 2;
  }
}

}  // namespace msaw
