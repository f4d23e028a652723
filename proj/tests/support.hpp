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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bagsched/instance.hpp"
#include "bagsched/rate_engine.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// Speed classes satisfying ICA: each speed at least 64x below the previous one, each capacity at
// least twice everything faster. Counts kept small enough to list machines one by one.
inline std::vector<bagsched::SpeedClass> random_ica_classes(Rng& rng, int K, std::int64_t first_count = 1) {
    std::vector<bagsched::SpeedClass> out;
    double sigma = std::pow(64.0, K - 1) * uniform(rng, 1.0, 4.0);
    double cap = 0.0;
    for (int l = 0; l < K; ++l) {
        std::int64_t m = first_count;
        if (l > 0) {
            sigma /= 64.0 * uniform(rng, 1.0, 1.5);
            m = static_cast<std::int64_t>(std::ceil(2.0 * cap / sigma)) + pick(rng, 0, 3);
        }
        out.push_back({sigma, m});
        cap += sigma * static_cast<double>(m);
    }
    return out;
}

// Machines listed one by one, fastest first.
inline std::vector<double> expand_speeds(const std::vector<bagsched::SpeedClass>& classes) {
    std::vector<double> s;
    for (const auto& c : classes)
        for (std::int64_t i = 0; i < c.count; ++i) s.push_back(c.sigma);
    return s;
}

// Arbitrary (not necessarily ICA) decreasing speeds with small counts.
inline std::vector<bagsched::SpeedClass> random_classes(Rng& rng, int max_classes, std::int64_t max_total) {
    const int K = static_cast<int>(pick(rng, 1, max_classes));
    std::vector<bagsched::SpeedClass> out;
    double sigma = uniform(rng, 1.0, 100.0);
    std::int64_t total = 0;
    for (int l = 0; l < K && total < max_total; ++l) {
        const std::int64_t m = pick(rng, 1, std::max<std::int64_t>(1, (max_total - total) / (K - l)));
        out.push_back({sigma, m});
        total += m;
        sigma /= uniform(rng, 1.1, 8.0);
    }
    return out;
}

// Alive jobs with small task counts; total tasks at most max_tasks.
inline std::vector<bagsched::AliveJob> random_alive(Rng& rng, int max_tasks) {
    std::vector<bagsched::AliveJob> out;
    int left = static_cast<int>(pick(rng, 1, max_tasks));
    int job = 0;
    while (left > 0) {
        const int n = static_cast<int>(pick(rng, 1, left));
        // occasional duplicate weights and shares exercise the tie handling
        const double w = pick(rng, 0, 3) == 0 ? 1.0 : uniform(rng, 0.1, 10.0);
        out.push_back({job++, w, n});
        left -= n;
    }
    return out;
}

}  // namespace testing_support
