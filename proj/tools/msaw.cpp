// command-line front end: subcommand picks the task, --config supplies the
// model/run description, everything is seeded explicitly for reproducibility.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "msaw/tasks.hpp"

namespace {

int run(const std::string& task, const std::string& config_path, const std::string& out_dir,
        int threads, bool has_seed, uint64_t seed) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "cannot read config file: %s\n", config_path.c_str());
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  msaw::ParseResult parsed = msaw::parse_config(ss.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::fprintf(stderr, "%s: %s\n", config_path.c_str(), e.c_str());
    return 2;
  }
  msaw::TaskOptions opt;
  opt.task = task;
  opt.cfg = parsed.config;
  if (has_seed) opt.cfg.seed = seed;
  if (!out_dir.empty())
    opt.out_dir = out_dir;
  else if (opt.cfg.out_dir)
    opt.out_dir = *opt.cfg.out_dir;
  opt.threads = threads;
  return msaw::run_task(opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice walk with self-repelling local-time interaction: "
               "samplers, estimators and operator checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  uint64_t seed = 0;
  bool has_seed = false;

  const char* names[] = {"sample-gibbs", "run-walk",      "estimate",
                         "fock-check",   "gsc-threshold", "full-verify"};
  const char* descs[] = {
      "draw fields from the gradient Gibbs measure and dump them",
      "simulate walk replicas and write trajectories",
      "run the full statistical battery on a replica ensemble",
      "verify operator norms and residuals on momentum sectors",
      "solve for the minimal graded-multiplier cutoff n1",
      "run the cross-module verification battery",
  };
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "path to the key = value config file")
        ->required();
    sub->add_option("--seed", seed, "override the config seed")
        ->each([&has_seed](const std::string&) { has_seed = true; });
    sub->add_option("--threads", threads, "worker thread budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (default: out_dir key or ./out)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(app.get_subcommands()[0]->get_name(), config_path, out_dir, threads, has_seed,
             seed);
}
