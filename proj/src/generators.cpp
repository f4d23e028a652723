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

#include "bagsched/generators.hpp"

#include <cmath>
#include <utility>

namespace bagsched {

std::int64_t SplitMix64::range(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
}

std::vector<SpeedClass> lower_bound_classes(int K) {
    if (K < 1) throw InvalidInput("lower-bound family needs K >= 1");
    if (K > 9) throw InvalidInput("lower-bound family is limited to K <= 9");
    std::vector<SpeedClass> classes;
    double capacity = 0.0;
    for (int l = 0; l < K; ++l) {
        const double sigma = std::pow(kRoundingBase, K - 1 - l);
        const auto count = l == 0 ? std::int64_t{1} : static_cast<std::int64_t>(std::ceil(2.0 * capacity / sigma));
        classes.push_back({sigma, count});
        capacity += sigma * static_cast<double>(count);
    }
    return classes;
}

Instance gen_lower_bound(int K, double speedup) {
    auto classes = lower_bound_classes(K);
    Job job;
    for (const auto& c : classes) job.tasks.push_back({c.sigma, c.count});
    return Instance(std::move(classes), {job}, speedup);
}

Instance gen_random_ica(int K, int num_jobs, int max_tasks, std::uint64_t seed, double speedup) {
    if (K < 1 || K > 8) throw InvalidInput("random ICA generator supports 1 <= K <= 8");
    if (num_jobs < 0 || max_tasks < 1) throw InvalidInput("random ICA generator needs max_tasks >= 1");
    SplitMix64 rng(seed);
    std::vector<SpeedClass> classes;
    double capacity = 0.0;
    for (int l = 0; l < K; ++l) {
        const double sigma = std::pow(kRoundingBase, K - 1 - l);
        std::int64_t count = 0;
        if (l == 0) {
            count = rng.range(1, 2);
        } else {
            const auto minimal = static_cast<std::int64_t>(std::ceil(2.0 * capacity / sigma));
            count = minimal * rng.range(1, 2);
        }
        classes.push_back({sigma, count});
        capacity += sigma * static_cast<double>(count);
    }
    const double log_max = std::log(std::pow(kRoundingBase, K));
    std::vector<Job> jobs;
    for (int j = 0; j < num_jobs; ++j) {
        Job job;
        job.weight = static_cast<double>(rng.range(1, 10));
        const auto n = rng.range(1, max_tasks);
        for (std::int64_t v = 0; v < n; ++v) job.tasks.push_back({std::exp(rng.uniform() * log_max), 1});
        jobs.push_back(std::move(job));
    }
    return Instance(std::move(classes), std::move(jobs), speedup);
}

std::vector<double> gen_raw_speeds(const std::string& profile, int count, std::uint64_t seed) {
    if (count < 1) throw InvalidInput("need at least one machine");
    SplitMix64 rng(seed);
    std::vector<double> speeds;
    if (profile == "uniform") {
        speeds.assign(static_cast<std::size_t>(count), 1.0 + 999.0 * rng.uniform());
    } else if (profile == "geometric") {
        for (int i = 0; i < count; ++i) speeds.push_back(std::ldexp(1.0, i));
        for (int i = count - 1; i > 0; --i) std::swap(speeds[static_cast<std::size_t>(i)], speeds[static_cast<std::size_t>(rng.range(0, i))]);
    } else if (profile == "clustered") {
        for (int i = 0; i < count; ++i)
            speeds.push_back(i % 5 == 0 ? 100.0 + 100.0 * rng.uniform() : 1.5 + 1.5 * rng.uniform());
    } else {
        throw InvalidInput("unknown speed profile '" + profile + "' (expected uniform, geometric or clustered)");
    }
    return speeds;
}

}  // namespace bagsched
