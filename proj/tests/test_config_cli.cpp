#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "msaw/config.hpp"
#include "msaw/report.hpp"
#include "msaw/tasks.hpp"
#include "msaw/walk.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& stem) {
  const fs::path p = fs::temp_directory_path() / ("msaw_cli_test_" + stem);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// quartic reference model in config-file form
std::string quartic_model() {
  std::ostringstream ss;
  ss << "gamma = 0.75\nc = 1.0\nr_coeffs = 0, 1\n";
  const double s0 = 3.0 / (4.0 * std::cbrt(4.0));
  ss.setf(std::ios::fixed);
  ss.precision(17);
  ss << "s_coeffs = " << s0 << ", 0, 0, 0, 1\n";
  return ss.str();
}

std::string msaw_binary() {
  char buf[4096];
  const ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  REQUIRE(n > 0);
  buf[n] = '\0';
  return (fs::path(buf).parent_path() / "msaw").string();
}

int run_cli(const std::string& args) {
  const std::string cmd = "MSAW_LOG=0 " + msaw_binary() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parser: full happy path with comments and spacing") {
  const std::string text =
      "# model\n"
      "gamma = 1.5\n"
      "  c=2.0   # inline comment\n"
      "r_coeffs = 0, 2.0\n"
      "s_coeffs = 1, 0, 3\n"
      "\n"
      "d = 2\n"
      "L = 16\n"
      "T = 12.5\n"
      "obs_times = 1.0, 2.5, 12.5\n"
      "replicas = 40\n"
      "seed = 18446744073709551615\n"
      "init = stationary\n"
      "jump_mode = thinning\n"
      "burn_in_sweeps = 100\n"
      "stride_sweeps = 3\n"
      "n_fields = 7\n"
      "fock_n_max = 2\n"
      "gsc_r = 2\n"
      "gsc_kappa = 2.0\n"
      "gsc_C = 0.5\n"
      "gsc_n1_max = 1000\n"
      "out_dir = /tmp/somewhere\n";
  const msaw::ParseResult res = msaw::parse_config(text);
  REQUIRE(res.ok());
  const msaw::ExperimentConfig& c = res.config;
  CHECK(c.gamma == 1.5);
  CHECK(c.c == 2.0);
  CHECK(*c.r_coeffs == std::vector<double>{0.0, 2.0});
  CHECK(*c.s_coeffs == std::vector<double>{1.0, 0.0, 3.0});
  CHECK(c.d == 2);
  CHECK(c.L == 16);
  CHECK(c.T == 12.5);
  CHECK(*c.obs_times == std::vector<double>{1.0, 2.5, 12.5});
  CHECK(c.replicas == 40);
  CHECK(c.seed == UINT64_MAX);
  CHECK(c.init == "stationary");
  CHECK(c.jump_mode == "thinning");
  CHECK(c.burn_in_sweeps == 100);
  CHECK(c.stride_sweeps == 3);
  CHECK(c.n_fields == 7);
  CHECK(c.fock_n_max == 2);
  CHECK(c.gsc_r == 2);
  CHECK(c.gsc_kappa == 2.0);
  CHECK(c.gsc_C == 0.5);
  CHECK(c.gsc_n1_max == 1000);
  CHECK(c.out_dir == "/tmp/somewhere");

  const msaw::RateSpec spec = msaw::make_rate_spec(c);
  CHECK(spec.gamma == 1.5);
  CHECK(spec.r.coeff(1) == 2.0);
  CHECK(msaw::make_torus(c).volume() == 256);
}

TEST_CASE("config parser: every malformed line is reported with its number") {
  const std::string text =
      "gamma = not_a_number\n"   // 1
      "flux = 3\n"               // 2: unknown key
      "gamma = 2.0\n"            // 3: duplicate
      "just some words\n"        // 4: no '='
      "obs_times = 1.0, , 2.0\n" // 5: bad list
      "r_coeffs = 1.0, 2.0,\n"   // 6: trailing comma
      "init = sideways\n"        // 7: bad enum
      "seed = -4\n"              // 8: negative
      "= 3\n"                    // 9: missing key
      "L = 2.5\n";               // 10: non-integer
  const msaw::ParseResult res = msaw::parse_config(text);
  CHECK_FALSE(res.ok());
  REQUIRE(res.errors.size() == 10);
  CHECK(res.errors[0].find("line 1") == 0);
  CHECK(res.errors[0].find("gamma") != std::string::npos);
  CHECK(res.errors[1].find("line 2") == 0);
  CHECK(res.errors[1].find("unknown key 'flux'") != std::string::npos);
  CHECK(res.errors[2].find("line 3") == 0);
  CHECK(res.errors[2].find("duplicate") != std::string::npos);
  CHECK(res.errors[3].find("line 4") == 0);
  CHECK(res.errors[4].find("line 5") == 0);
  CHECK(res.errors[5].find("line 6") == 0);
  CHECK(res.errors[6].find("line 7") == 0);
  CHECK(res.errors[6].find("flat|stationary") != std::string::npos);
  CHECK(res.errors[7].find("line 8") == 0);
  CHECK(res.errors[8].find("line 9") == 0);
  CHECK(res.errors[9].find("line 10") == 0);
  // no failed line may leave a value behind
  CHECK_FALSE(res.config.gamma.has_value());
  CHECK_FALSE(res.config.obs_times.has_value());
  CHECK_FALSE(res.config.r_coeffs.has_value());
  CHECK_FALSE(res.config.L.has_value());
}

TEST_CASE("task validation: completeness, domains and model wiring") {
  msaw::ParseResult base = msaw::parse_config(
      quartic_model() + "d = 2\nL = 8\nT = 10\nreplicas = 4\nseed = 1\n");
  REQUIRE(base.ok());

  CHECK(msaw::validate_config(base.config, "estimate").empty());
  CHECK(msaw::validate_config(base.config, "run-walk").empty());
  CHECK(msaw::validate_config(base.config, "full-verify").empty());

  // unknown task short-circuits
  {
    const auto errs = msaw::validate_config(base.config, "frobnicate");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("unknown task") != std::string::npos);
  }

  // missing model keys are each reported
  {
    msaw::ExperimentConfig c = base.config;
    c.gamma.reset();
    c.r_coeffs.reset();
    const auto errs = msaw::validate_config(c, "run-walk");
    CHECK(errs.size() == 2);
    bool saw_gamma = false, saw_r = false;
    for (const auto& e : errs) {
      saw_gamma |= e.find("'gamma'") != std::string::npos;
      saw_r |= e.find("'r_coeffs'") != std::string::npos;
    }
    CHECK(saw_gamma);
    CHECK(saw_r);
  }

  // lattice domain checks
  {
    msaw::ExperimentConfig c = base.config;
    c.d = 5;
    CHECK_FALSE(msaw::validate_config(c, "estimate").empty());
    c.d = 2;
    c.L = 1;
    CHECK_FALSE(msaw::validate_config(c, "estimate").empty());
    c.d = 4;
    c.L = 200;  // 1.6e9 sites
    bool saw_volume = false;
    for (const auto& e : msaw::validate_config(c, "estimate"))
      saw_volume |= e.find("volume") != std::string::npos;
    CHECK(saw_volume);
  }

  // observation grid rules
  {
    msaw::ExperimentConfig c = base.config;
    c.obs_times = std::vector<double>{3.0, 1.0};
    bool saw_sorted = false;
    for (const auto& e : msaw::validate_config(c, "estimate"))
      saw_sorted |= e.find("non-decreasing") != std::string::npos;
    CHECK(saw_sorted);
    c.obs_times = std::vector<double>{1.0, 20.0};  // beyond T = 10
    bool saw_range = false;
    for (const auto& e : msaw::validate_config(c, "estimate"))
      saw_range |= e.find("[0, T]") != std::string::npos;
    CHECK(saw_range);
    c.obs_times = std::vector<double>{1.0, 2.0};
    c.obs_count = 5;
    bool saw_mutex = false;
    for (const auto& e : msaw::validate_config(c, "estimate"))
      saw_mutex |= e.find("mutually exclusive") != std::string::npos;
    CHECK(saw_mutex);
  }

  // rate-model structural failures surface through validation
  {
    msaw::ExperimentConfig c = base.config;
    c.r_coeffs = std::vector<double>{0.0, 1.0, 0.5};  // even term in the odd part
    bool saw_model = false;
    for (const auto& e : msaw::validate_config(c, "estimate"))
      saw_model |= e.rfind("model: ", 0) == 0;
    CHECK(saw_model);
  }

  // per-task extras
  {
    msaw::ExperimentConfig c = base.config;
    const auto errs = msaw::validate_config(c, "sample-gibbs");
    bool saw_nf = false;
    for (const auto& e : errs) saw_nf |= e.find("'n_fields'") != std::string::npos;
    CHECK(saw_nf);
    msaw::ExperimentConfig g;
    g.seed = 1;
    const auto gerrs = msaw::validate_config(g, "gsc-threshold");
    CHECK(gerrs.size() == 3);  // gsc_r, gsc_kappa, gsc_C all required
  }
}

TEST_CASE("observation grids from the config") {
  msaw::ExperimentConfig c;
  c.T = 10.0;
  c.obs_count = 4;
  CHECK(msaw::make_obs_times(c) == std::vector<double>{2.5, 5.0, 7.5, 10.0});
  c.obs_count.reset();
  CHECK(msaw::make_obs_times(c).size() == 10);
  CHECK(msaw::make_obs_times(c).back() == 10.0);
  c.obs_times = std::vector<double>{1.0, 9.0};
  CHECK(msaw::make_obs_times(c) == std::vector<double>{1.0, 9.0});
}

TEST_CASE("atomic writers leave complete files and no temporaries") {
  const fs::path dir = fresh_dir("atomic");
  const std::string path = (dir / "note.txt").string();
  msaw::write_text_atomic(path, "alpha\nbeta\n");
  CHECK(slurp(path) == "alpha\nbeta\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  // overwrite in place
  msaw::write_text_atomic(path, "gamma\n");
  CHECK(slurp(path) == "gamma\n");
  CHECK_THROWS_AS(msaw::write_text_atomic((dir / "no_dir" / "x.txt").string(), "y"),
                  std::runtime_error);
  msaw::Json j;
  j["k"] = 3;
  msaw::write_json_atomic((dir / "o.json").string(), j);
  CHECK(nlohmann::json::parse(slurp((dir / "o.json").string()))["k"] == 3);
  fs::remove_all(dir);
}

TEST_CASE("threshold task: deterministic report, pinned result, failure exit code") {
  msaw::TaskOptions opt;
  opt.task = "gsc-threshold";
  opt.cfg.seed = 9;
  opt.cfg.gsc_r = 2;
  opt.cfg.gsc_kappa = 2.0;
  opt.cfg.gsc_C = 0.0;

  const fs::path d1 = fresh_dir("gsc1"), d2 = fresh_dir("gsc2");
  opt.out_dir = d1.string();
  CHECK(msaw::run_task(opt) == 0);
  opt.out_dir = d2.string();
  CHECK(msaw::run_task(opt) == 0);
  const std::string r1 = slurp((d1 / "report.json").string());
  CHECK(r1 == slurp((d2 / "report.json").string()));  // bytes, not just values

  const nlohmann::json rep = nlohmann::json::parse(r1);
  CHECK(rep["estimates"]["n1"] == 17);
  CHECK(rep["estimates"]["feasible"] == true);
  CHECK(rep["overall_ok"] == true);
  CHECK(rep["results"]["ok"] == true);
  CHECK(fs::exists(d1 / "report.meta.json"));

  // boundary parameters fail the feasibility check: exit code 1
  msaw::TaskOptions bad = opt;
  bad.cfg.gsc_r = 1;
  bad.cfg.gsc_n1_max = 2000;
  const fs::path d3 = fresh_dir("gsc3");
  bad.out_dir = d3.string();
  CHECK(msaw::run_task(bad) == 1);
  const nlohmann::json brep = nlohmann::json::parse(slurp((d3 / "report.json").string()));
  CHECK(brep["overall_ok"] == false);
  CHECK(brep["estimates"]["boundary"] == true);
  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
}

TEST_CASE("walk task: pinned trajectory schema and reproducible outputs") {
  msaw::ParseResult parsed = msaw::parse_config(
      quartic_model() +
      "d = 2\nL = 6\nT = 4\nobs_times = 2, 4\nreplicas = 2\nseed = 31\ninit = stationary\n");
  REQUIRE(parsed.ok());
  msaw::TaskOptions opt;
  opt.task = "run-walk";
  opt.cfg = parsed.config;

  const fs::path d1 = fresh_dir("walk1"), d2 = fresh_dir("walk2");
  opt.out_dir = d1.string();
  CHECK(msaw::run_task(opt) == 0);
  opt.out_dir = d2.string();
  CHECK(msaw::run_task(opt) == 0);

  for (const char* name : {"trajectory_00000.jsonl", "trajectory_00001.jsonl", "report.json"})
    CHECK(slurp((d1 / name).string()) == slurp((d2 / name).string()));
  CHECK(slurp((d1 / "final_state_00000.bin").string()) ==
        slurp((d2 / "final_state_00000.bin").string()));

  // one json object per observation time with exactly the pinned keys
  std::istringstream lines(slurp((d1 / "trajectory_00000.jsonl").string()));
  std::string line;
  int rows = 0;
  double prev_t = -1.0;
  while (std::getline(lines, line)) {
    const nlohmann::json row = nlohmann::json::parse(line);
    CHECK(row.size() == 5);
    for (const char* key : {"t", "X", "N", "comp_bar", "comp_tilde"})
      CHECK(row.contains(key));
    CHECK(row["X"].size() == 2);
    CHECK(row["N"].size() == 2);
    CHECK(row["comp_bar"].size() == 2);
    CHECK(row["t"].get<double>() > prev_t);
    prev_t = row["t"].get<double>();
    ++rows;
  }
  CHECK(rows == 2);

  // the final-state checkpoint reloads and matches the configured lattice
  const msaw::FinalState st =
      msaw::load_final_state((d1 / "final_state_00000.bin").string());
  CHECK(st.env.torus.d == 2);
  CHECK(st.env.torus.L == 6);
  CHECK(st.t == 4.0);
  CHECK_FALSE(st.rng_state.empty());

  const nlohmann::json rep = nlohmann::json::parse(slurp((d1 / "report.json").string()));
  CHECK(rep["replicas_out"].size() == 2);
  CHECK(rep["replicas_out"][0]["jumps"].get<uint64_t>() > 0);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("task runner error paths return the config exit code") {
  msaw::TaskOptions opt;
  opt.task = "estimate";  // config is empty: many missing keys
  CHECK(msaw::run_task(opt) == 2);

  opt.task = "nonsense";
  opt.cfg.seed = 1;
  CHECK(msaw::run_task(opt) == 2);

  // unwritable output directory surfaces as a runtime failure, not a crash
  msaw::TaskOptions gsc;
  gsc.task = "gsc-threshold";
  gsc.cfg.seed = 1;
  gsc.cfg.gsc_r = 2;
  gsc.cfg.gsc_kappa = 2.0;
  gsc.cfg.gsc_C = 0.0;
  gsc.out_dir = "/proc/definitely/not/writable";
  CHECK(msaw::run_task(gsc) == 2);
}

TEST_CASE("command-line front end: exit codes and reproducibility") {
  const fs::path dir = fresh_dir("cli");
  const std::string cfg = (dir / "run.cfg").string();
  msaw::write_text_atomic(
      cfg, "seed = 3\ngsc_r = 2\ngsc_kappa = 2\ngsc_C = 0\n");

  const std::string out1 = (dir / "o1").string(), out2 = (dir / "o2").string();
  CHECK(run_cli("gsc-threshold --config " + cfg + " --out " + out1) == 0);
  CHECK(run_cli("gsc-threshold --config " + cfg + " --out " + out2) == 0);
  CHECK(slurp(out1 + "/report.json") == slurp(out2 + "/report.json"));
  CHECK(nlohmann::json::parse(slurp(out1 + "/report.json"))["estimates"]["n1"] == 17);

  // config file problems: missing file, parse errors, validation errors
  CHECK(run_cli("gsc-threshold --config " + (dir / "absent.cfg").string()) == 2);
  const std::string broken = (dir / "broken.cfg").string();
  msaw::write_text_atomic(broken, "gsc_r = maybe\n");
  CHECK(run_cli("gsc-threshold --config " + broken) == 2);
  const std::string incomplete = (dir / "incomplete.cfg").string();
  msaw::write_text_atomic(incomplete, "seed = 3\n");
  CHECK(run_cli("gsc-threshold --config " + incomplete + " --out " + (dir / "o3").string()) ==
        2);

  // malformed invocations
  CHECK(run_cli("no-such-subcommand") == 2);
  CHECK(run_cli("gsc-threshold") == 2);  // --config is required
  CHECK(run_cli("--help") == 0);

  // the seed override reroutes the run stream
  const std::string wcfg = (dir / "walk.cfg").string();
  msaw::write_text_atomic(wcfg, quartic_model() +
                                    "d = 1\nL = 8\nT = 2\nobs_times = 2\nreplicas = 1\n"
                                    "seed = 5\ninit = flat\n");
  const std::string w1 = (dir / "w1").string(), w2 = (dir / "w2").string(),
                    w3 = (dir / "w3").string();
  CHECK(run_cli("run-walk --config " + wcfg + " --out " + w1) == 0);
  CHECK(run_cli("run-walk --config " + wcfg + " --seed 5 --out " + w2) == 0);
  CHECK(run_cli("run-walk --config " + wcfg + " --seed 6 --out " + w3) == 0);
  CHECK(slurp(w1 + "/trajectory_00000.jsonl") == slurp(w2 + "/trajectory_00000.jsonl"));
  CHECK(slurp(w1 + "/trajectory_00000.jsonl") != slurp(w3 + "/trajectory_00000.jsonl"));
  fs::remove_all(dir);
}
