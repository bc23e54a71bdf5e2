#pragma once

#include <string>

#include "msaw/config.hpp"

namespace msaw {

struct TaskOptions {
  std::string task;  // sample-gibbs | run-walk | estimate | fock-check |
                     // gsc-threshold | full-verify
  ExperimentConfig cfg;
  std::string out_dir = "out";
  int threads = 1;
};

// executes the task and writes report.json (deterministic for fixed config and
// seed) plus report.meta.json (timestamp, threads, wall time) into out_dir.
// returns 0 when all checks pass, 1 when a check fails, 2 on config or
// runtime errors.
int run_task(const TaskOptions& opt);

}  // namespace msaw
