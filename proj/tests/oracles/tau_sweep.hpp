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

// Water-filling by raising a common level and watching the prefix constraints directly. Knows
// nothing about blocks or closed forms: every task is listed on its own, every machine too.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

struct SweepResult {
    std::vector<double> rates;  // per task, in input order
    std::vector<double> freeze_level;
};

// Sum of the k largest values must stay below gamma * (sum of the k fastest speeds) for all k.
inline double worst_prefix_gap(std::vector<double> rates, const std::vector<double>& speeds, double gamma) {
    std::sort(rates.begin(), rates.end(), std::greater<>());
    double lhs = 0.0, cap = 0.0, worst = 1e300;
    for (std::size_t k = 0; k < rates.size(); ++k) {
        lhs += rates[k];
        if (k < speeds.size()) cap += gamma * speeds[k];
        worst = std::min(worst, cap - lhs);
    }
    return worst;
}

// shares: per task; speeds: per machine, any order.
inline SweepResult tau_sweep(const std::vector<double>& shares, std::vector<double> speeds, double gamma) {
    std::sort(speeds.begin(), speeds.end(), std::greater<>());
    const std::size_t n = shares.size();
    SweepResult out;
    out.rates.assign(n, 0.0);
    out.freeze_level.assign(n, -1.0);
    std::vector<bool> frozen(n, false);
    const double total = gamma * std::accumulate(speeds.begin(), speeds.end(), 0.0);
    double level = 0.0;
    auto rates_at = [&](double tau) {
        std::vector<double> r(n);
        for (std::size_t v = 0; v < n; ++v) r[v] = frozen[v] ? out.rates[v] : shares[v] * tau;
        return r;
    };
    auto fits = [&](double tau) { return worst_prefix_gap(rates_at(tau), speeds, gamma) >= -1e-13 * total; };
    std::size_t left = n;
    while (left > 0) {
        // Coarse sweep upward by doubling, then bisect the crossing.
        double lo = level, step = std::max(level, 1e-9);
        double hi = lo + step;
        while (fits(hi)) {
            lo = hi;
            step *= 2.0;
            hi = lo + step;
            if (step > 1e300) break;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (fits(mid) ? lo : hi) = mid;
        }
        level = lo;
        auto r = rates_at(level);
        // Freeze every unfrozen task in the longest prefix that is tight at this level.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
        double lhs = 0.0, cap = 0.0;
        std::size_t tight = 0;
        for (std::size_t k = 0; k < n; ++k) {
            lhs += r[order[k]];
            if (k < speeds.size()) cap += gamma * speeds[k];
            if (cap - lhs <= 1e-9 * total) tight = k + 1;
        }
        if (tight == 0) tight = n;
        // Equal rates straddling the cut belong to the same tight set.
        while (tight < n && r[order[tight]] >= r[order[tight - 1]] * (1 - 1e-9)) ++tight;
        bool progressed = false;
        for (std::size_t k = 0; k < tight; ++k) {
            const std::size_t v = order[k];
            if (frozen[v]) continue;
            frozen[v] = true;
            out.rates[v] = r[v];
            out.freeze_level[v] = level;
            --left;
            progressed = true;
        }
        if (!progressed) {
            for (std::size_t v = 0; v < n; ++v)
                if (!frozen[v]) {
                    frozen[v] = true;
                    out.rates[v] = r[v];
                    out.freeze_level[v] = level;
                    --left;
                }
        }
    }
    return out;
}

}  // namespace oracle
