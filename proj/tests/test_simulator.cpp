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

#include <map>

#include "bagsched/generators.hpp"
#include "bagsched/simulator.hpp"
#include "oracles/equal_rate.hpp"
#include "support.hpp"

using namespace bagsched;

namespace {

// Σ over intervals of rate * length for every cohort, against its size.
double worst_work_error(const Trace& trace, const Instance& inst) {
    std::map<CohortRef, double> work;
    for (const auto& iv : trace.intervals)
        for (const auto& c : iv.alive_cohorts) work[c] += iv.profile.find(c.job)->rate * iv.length();
    double worst = 0.0;
    for (int j = 0; j < inst.num_jobs(); ++j)
        for (int c = 0; c < static_cast<int>(inst.jobs()[j].tasks.size()); ++c) {
            const double p = inst.jobs()[j].tasks[c].size;
            const double got = work.count({j, c}) ? work[{j, c}] : 0.0;
            worst = std::max(worst, std::abs(got - p) / std::max(p, 1e-300));
            if (p == 0.0) worst = std::max(worst, got);
        }
    return worst;
}

}  // namespace

TEST_CASE("one task on one machine") {
    Instance inst({{1, 1}}, {Job{1, 0, {{5, 1}}}});
    auto t = simulate(inst);
    CHECK(t.job_completion[0] == doctest::Approx(5.0));
    CHECK(t.makespan() == doctest::Approx(5.0));
    CHECK(t.objective(inst) == doctest::Approx(5.0));
}

TEST_CASE("two tasks on speeds (2,1) finish together") {
    Instance inst({{2, 1}, {1, 1}}, {Job{1, 0, {{3, 2}}}});
    auto t = simulate(inst);
    CHECK(t.job_completion[0] == doctest::Approx(2.0));
    REQUIRE(t.intervals.size() == 1);
    CHECK(t.intervals[0].profile.jobs[0].rate == doctest::Approx(1.5));
}

TEST_CASE("speed-up scales time") {
    Instance inst({{2, 1}, {1, 1}}, {Job{1, 0, {{3, 2}}}}, 4.0);
    CHECK(simulate(inst).makespan() == doctest::Approx(0.5));
}

TEST_CASE("lower-bound family follows the equal-rate dynamics") {
    for (int K = 1; K <= 5; ++K) {
        auto inst = gen_lower_bound(K);
        auto t = simulate(inst);
        std::vector<oracle::SizeGroup> sizes;
        std::vector<oracle::SpeedGroup> machines;
        for (const auto& c : inst.classes()) {
            sizes.push_back({c.sigma, c.count});
            machines.push_back({c.sigma, c.count});
        }
        const double expected = oracle::equal_rate_makespan(sizes, machines, 1.0);
        CHECK(t.makespan() == doctest::Approx(expected).epsilon(1e-10));
        CHECK(t.makespan() >= K / 4.0);
    }
    CHECK(simulate(gen_lower_bound(2)).makespan() == doctest::Approx(1.65625).epsilon(1e-12));
}

TEST_CASE("release dates enter mid-run") {
    Instance inst({{1, 1}}, {Job{1, 0, {{5, 1}}}, Job{1, 2, {{1, 1}}}});
    auto t = simulate(inst);
    CHECK(t.has_release_dates);
    CHECK(t.job_completion[1] == doctest::Approx(4.0));
    CHECK(t.job_completion[0] == doctest::Approx(6.0));
    CHECK(t.objective(inst) == doctest::Approx(10.0));
    bool saw_release = false;
    for (const auto& e : t.events) saw_release |= e.kind == EventKind::job_release && e.job == 1;
    CHECK(saw_release);
}

TEST_CASE("idle gap before a late release") {
    Instance inst({{1, 1}}, {Job{2, 3, {{1, 1}}}});
    auto t = simulate(inst);
    CHECK(t.job_completion[0] == doctest::Approx(4.0));
    CHECK(t.objective(inst) == doctest::Approx(8.0));
}

TEST_CASE("zero-size tasks complete on arrival") {
    Instance inst({{1, 1}}, {Job{1, 0, {{0, 2}, {2, 1}}}, Job{3, 0, {{0, 1}}}});
    auto t = simulate(inst);
    CHECK(t.job_completion[1] == 0.0);
    CHECK(t.job_completion[0] == doctest::Approx(2.0));
    CHECK(t.cohort_completion[0][0] == 0.0);
}

TEST_CASE("random instances: work conservation, objective identity, determinism") {
    testing_support::Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        auto classes = testing_support::random_classes(rng, 3, 6);
        std::vector<Job> jobs;
        const int n = static_cast<int>(testing_support::pick(rng, 1, 6));
        for (int j = 0; j < n; ++j) {
            Job job;
            job.weight = testing_support::uniform(rng, 0.5, 5.0);
            const int cohorts = static_cast<int>(testing_support::pick(rng, 1, 3));
            for (int c = 0; c < cohorts; ++c)
                job.tasks.push_back({testing_support::uniform(rng, 0.1, 20.0), testing_support::pick(rng, 1, 4)});
            jobs.push_back(job);
        }
        Instance inst(classes, jobs, testing_support::uniform(rng, 1.0, 3.0));
        auto t = simulate(inst);
        CHECK(worst_work_error(t, inst) <= 1e-8);
        CHECK(t.objective(inst) == doctest::Approx(t.weighted_alive_integral()).epsilon(1e-8));
        for (const auto& iv : t.intervals) CHECK(verify_star(iv.profile, inst.machines()));

        auto again = simulate(inst);
        REQUIRE(again.intervals.size() == t.intervals.size());
        bool identical = again.job_completion == t.job_completion;
        for (std::size_t i = 0; i < t.intervals.size(); ++i) {
            identical = identical && again.intervals[i].start == t.intervals[i].start &&
                        again.intervals[i].end == t.intervals[i].end;
            for (std::size_t j = 0; j < t.intervals[i].profile.jobs.size(); ++j)
                identical = identical && again.intervals[i].profile.jobs[j].rate == t.intervals[i].profile.jobs[j].rate;
        }
        CHECK(identical);
    }
}

TEST_CASE("huge cohort counts stay cheap") {
    auto inst = gen_lower_bound(5);
    CHECK(inst.num_tasks() > 100000000);
    auto t = simulate(inst);
    CHECK(t.intervals.size() == 5);
}
