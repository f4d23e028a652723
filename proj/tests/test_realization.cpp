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

#include "doctest.h"

#include "bagsched/simulator.hpp"
#include "oracles/delta_step.hpp"
#include "oracles/subsets.hpp"
#include "support.hpp"

using namespace bagsched;

namespace {

RateProfile hand_profile(std::vector<double> rates, double gamma = 1.0) {
    RateProfile p;
    p.gamma = gamma;
    int j = 0;
    for (double r : rates) p.jobs.push_back({j++, 1, 1.0, 1.0, r, 0});
    return p;
}

const JobWork& work_of(const ScheduleSlice& s, int job) {
    for (const auto& w : s.work)
        if (w.job == job) return w;
    FAIL("job missing from slice");
    return s.work.front();
}

}  // namespace

TEST_CASE("equal rates share the fast machine") {
    MachineProfile m({{2, 1}, {1, 1}});
    auto p = assign_rates({{0, 1.0, 1}, {1, 1.0, 1}}, m, 1.0);
    auto s = realize_slice(p, m, 0.0, 1.0);
    CHECK(s.success);
    CHECK(work_of(s, 0).processed == doctest::Approx(1.5));
    CHECK(work_of(s, 1).processed == doctest::Approx(1.5));
    auto runs = expand_slice(s);
    auto audit = audit_expanded(runs, s, m, 1.0);
    CHECK(audit.machine_exclusive);
    CHECK(audit.task_exclusive);
    CHECK(audit.max_work_error <= 1e-9);
    // machine 0 is split between both tasks
    double on_fast[2] = {0.0, 0.0};
    for (const auto& r : runs)
        if (r.machine == 0) on_fast[r.job] += r.end - r.start;
    CHECK(on_fast[0] > 0.0);
    CHECK(on_fast[1] > 0.0);
    auto oracle_work = oracle::delta_step({1.5, 1.5}, {2.0, 1.0}, 1.0, 10000);
    CHECK(oracle_work[0] == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(oracle_work[1] == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("single task occupies the fastest machine") {
    MachineProfile m({{3, 1}, {1, 2}});
    auto p = assign_rates({{0, 2.0, 1}}, m, 2.0);
    auto s = realize_slice(p, m, 1.0, 3.0);
    CHECK(s.success);
    auto runs = expand_slice(s);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].machine == 0);
    CHECK(runs[0].start == 1.0);
    CHECK(runs[0].end == 3.0);
}

TEST_CASE("rates (4,1) stay on their own machines") {
    MachineProfile m({{4, 1}, {1, 1}});
    auto p = assign_rates({{0, 10.0, 1}, {1, 1.0, 1}}, m, 1.0);
    auto s = realize_slice(p, m, 0.0, 1.0);
    CHECK(s.success);
    for (const auto& r : expand_slice(s)) CHECK(r.machine == r.job);
}

TEST_CASE("infeasible rates fail to realize") {
    MachineProfile m({{2, 1}, {1, 1}});
    auto s = realize_slice(hand_profile({3.0, 3.0}), m, 0.0, 1.0);
    CHECK_FALSE(s.success);
}

TEST_CASE("hall_feasibility examples") {
    MachineProfile m({{2, 1}, {1, 1}});
    CHECK_FALSE(hall_feasibility(std::vector<double>{3.0, 3.0}, m, 1.0));
    CHECK(hall_feasibility(std::vector<double>{2.0, 1.0}, m, 1.0));
    CHECK(hall_feasibility(std::vector<double>{4.0, 2.0}, m, 2.0));
    CHECK_FALSE(hall_feasibility(std::vector<double>{2.0, 1.0, 0.5}, m, 1.0));
    CHECK(hall_feasibility(hand_profile({1.5, 1.5}), m));
}

TEST_CASE("hall_feasibility agrees with the subset scan") {
    testing_support::Rng rng(3);
    int infeasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto classes = testing_support::random_classes(rng, 3, 5);
        MachineProfile m(classes);
        const auto n = testing_support::pick(rng, 1, 10);
        std::vector<double> rates;
        const double top = classes[0].sigma * 1.2;
        for (std::int64_t v = 0; v < n; ++v) rates.push_back(testing_support::uniform(rng, 0.0, top));
        const bool want = oracle::all_subsets_fit(rates, testing_support::expand_speeds(classes), 1.0);
        CHECK(hall_feasibility(rates, m, 1.0) == want);
        infeasible += want ? 0 : 1;
    }
    CHECK(infeasible > 100);
}

TEST_CASE("realize_slice matches quotas and the delta-step oracle") {
    testing_support::Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        auto classes = testing_support::random_classes(rng, 3, 6);
        MachineProfile m(classes);
        const double gamma = testing_support::uniform(rng, 1.0, 4.0);
        auto p = assign_rates(testing_support::random_alive(rng, 12), m, gamma);
        const double start = testing_support::uniform(rng, 0.0, 5.0);
        const double length = testing_support::uniform(rng, 0.01, 3.0);
        auto s = realize_slice(p, m, start, start + length);
        REQUIRE(s.success);
        CHECK(s.exchange_violations == 0);
        for (const auto& w : s.work) CHECK(std::abs(w.processed - w.quota) <= 1e-6 * std::max(1.0, w.quota));

        auto audit = audit_expanded(expand_slice(s), s, m, gamma);
        CHECK(audit.machine_exclusive);
        CHECK(audit.task_exclusive);
        CHECK(audit.max_work_error <= 1e-6);

        std::vector<double> quotas;
        std::vector<int> owner;
        for (const auto& jr : p.jobs)
            for (std::int64_t i = 0; i < jr.alive; ++i) {
                quotas.push_back(jr.rate * length);
                owner.push_back(jr.job);
            }
        std::vector<double> speeds = testing_support::expand_speeds(classes);
        for (double& x : speeds) x *= gamma;
        const int steps = 4000;
        auto done = oracle::delta_step(quotas, speeds, length, steps);
        const double slack = 2.0 * speeds.front() * length / steps;
        for (std::size_t v = 0; v < quotas.size(); ++v)
            CHECK(std::abs(done[v] - work_of(s, owner[v]).processed) <= slack + 1e-9 * quotas[v]);
    }
}

TEST_CASE("every simulated interval realizes") {
    testing_support::Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        auto classes = testing_support::random_classes(rng, 3, 8);
        std::vector<Job> jobs;
        for (int j = 0; j < 4; ++j)
            jobs.push_back(Job{testing_support::uniform(rng, 1, 4), 0,
                               {{testing_support::uniform(rng, 1, 9), testing_support::pick(rng, 1, 3)}}});
        Instance inst(classes, jobs, 2.0);
        auto t = simulate(inst);
        for (const auto& iv : t.intervals) {
            auto s = realize_slice(iv.profile, inst.machines(), iv.start, iv.end);
            CHECK(s.success);
            CHECK(hall_feasibility(iv.profile, inst.machines()));
        }
    }
}
