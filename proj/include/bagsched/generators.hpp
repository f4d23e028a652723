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
#include <string>
#include <vector>

#include "bagsched/instance.hpp"

namespace bagsched {

/// SplitMix64. Small, seedable and identical on every platform, which keeps generated instances
/// reproducible across builds.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi);

  private:
    std::uint64_t state_;
};

/// The K-class lower-bound family: σ_ℓ = 64^{K-ℓ}, m_1 = 1 and each later class just large enough
/// to double the capacity before it. One unit-weight job with m_ℓ tasks of size σ_ℓ per class, so
/// an offline schedule finishes everything at time 1.
Instance gen_lower_bound(int K, double speedup = 1.0);

/// Machine classes of the lower-bound family alone.
std::vector<SpeedClass> lower_bound_classes(int K);

/// Random instance satisfying ICA with all releases at zero. Weights are integers in [1, 10], task
/// counts uniform in [1, max_tasks] and sizes log-uniform in [1, 64^K].
Instance gen_random_ica(int K, int num_jobs, int max_tasks, std::uint64_t seed, double speedup = 1.0);

/// Raw machine speeds for exercising preprocessing: "uniform" gives `count` equal speeds,
/// "geometric" the powers 1, 2, 4, ... in shuffled order, "clustered" one machine in five near
/// 150 and the rest near 2.
std::vector<double> gen_raw_speeds(const std::string& profile, int count, std::uint64_t seed);

}  // namespace bagsched
