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

// Checks the subset condition over every subset of tasks. Exponential, so only for a dozen tasks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline bool all_subsets_fit(const std::vector<double>& rates, std::vector<double> speeds, double gamma,
                            double rel_tol = 1e-9) {
    std::sort(speeds.begin(), speeds.end(), std::greater<>());
    std::vector<double> prefix{0.0};
    for (double s : speeds) prefix.push_back(prefix.back() + gamma * s);
    const std::size_t n = rates.size();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        double sum = 0.0;
        std::size_t k = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (mask & (1u << v)) {
                sum += rates[v];
                ++k;
            }
        const double cap = prefix[std::min(k, speeds.size())];
        if (sum > cap * (1 + rel_tol) + 1e-300) return false;
    }
    return true;
}

}  // namespace oracle
