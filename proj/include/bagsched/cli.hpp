// Copyright 2026 The bagsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bagsched/analysis_duals.hpp"

namespace bagsched {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInfeasible = 1,
    kExitIo = 2,
    kExitPrecondition = 3,
};

/// Environment variable naming the directory for default output files.
inline constexpr const char* kOutDirEnv = "BAGSCHED_OUT_DIR";

/// Entry point of the `bagsched` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct BenchOptions {
    int k_min = 1;
    int k_max = 4;
    std::vector<std::uint64_t> seeds{0};
    std::string family = "lower-bound";  // or "random"
    int jobs = 5;
    int max_tasks = 6;
    std::string certificate = "auto";    // weaker | single | general | none | auto
    std::optional<double> gamma;         // speed-up of the measured run (default 1)
    int threads = 0;                     // 0: hardware concurrency
};

/// One bench measurement. makespan and objective belong to the run at `gamma`. dual_lb is the
/// objective of a feasible certificate fitted to a run at the family's required speed-up, which
/// bounds the relaxation from below; lp_lb = dual_lb / 2 then bounds the optimum from below and
/// ratio = objective / lp_lb bounds the run's competitive ratio from above.
struct BenchRow {
    int K = 0;
    std::int64_t n = 0;
    std::uint64_t seed = 0;
    double gamma = 1.0;
    double makespan = 0.0;
    double objective = 0.0;
    std::optional<double> lp_lb;
    std::optional<double> dual_lb;
    std::optional<double> ratio;
};

inline constexpr const char* kBenchHeader = "K,n,seed,gamma,makespan,objective,lp_lb,dual_lb,ratio";

/// Runs every (K, seed) pair, possibly concurrently; rows come back sorted by (K, seed).
std::vector<BenchRow> run_bench(const BenchOptions& options);
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Speed-up a certificate family asks for on an instance.
double required_gamma(DualFamily family, int K, std::int64_t n);

}  // namespace bagsched
