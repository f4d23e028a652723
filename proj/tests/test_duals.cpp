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

#include <cmath>

#include "bagsched/analysis_duals.hpp"
#include "bagsched/generators.hpp"
#include "bagsched/simulator.hpp"
#include "oracles/dual_scan.hpp"

using namespace bagsched;

namespace {

std::int64_t pads_of(const DualCertificate& c, int job) {
    std::int64_t n = 0;
    for (const auto& s : c.segments)
        if (s.job == job && s.cohort < 0) n += s.count;
    return n;
}

double weaker_gamma(const Instance& inst) {
    return 2.0 * std::max<double>(inst.num_classes(), std::log2(static_cast<double>(inst.num_tasks())));
}

}  // namespace

TEST_CASE("family names") {
    CHECK(parse_family("weaker") == DualFamily::weaker);
    CHECK(parse_family("single") == DualFamily::single_job);
    CHECK(parse_family("single_job") == DualFamily::single_job);
    CHECK(parse_family("general") == DualFamily::general);
    CHECK_THROWS_AS(parse_family("strong"), InvalidInput);
    CHECK(parse_family(to_string(DualFamily::general)) == DualFamily::general);
    CHECK(log_k(1) == 1.0);
    CHECK(log_k(8) == 3.0);
}

TEST_CASE("weaker duals on a single task") {
    Instance inst({{1, 1}}, {Job{1, 0, {{1, 1}}}}, 2.0);
    auto t = simulate(inst);
    auto c = build_weaker_duals(t, inst);
    CHECK(c.feasible);
    CHECK(c.gamma_sufficient);
    REQUIRE(c.delta.size() == 1);
    CHECK(c.delta[0] == doctest::Approx(0.5));
    CHECK(c.weighted_completion == doctest::Approx(0.5));
    CHECK(c.dual_objective == doctest::Approx(0.25));
    CHECK(certified_ratio(c, t, inst) == doctest::Approx(4.0));
    auto scan = oracle::scan_duals(c, t, inst);
    CHECK(scan.violations == 0);
    CHECK(scan.objective == doctest::Approx(c.dual_objective));
}

TEST_CASE("weaker grouping pads to one less than a power of two") {
    Instance three({{1, 1}}, {Job{1, 0, {{3, 1}, {2, 1}, {1, 1}}}}, 4.0);
    auto c3 = build_weaker_duals(simulate(three), three);
    CHECK(pads_of(c3, 0) == 0);
    // ranks 1 | 2-3: δ = w / (2^{h-1} γ)
    std::vector<double> d;
    for (std::size_t s = 0; s < c3.segments.size(); ++s) d.push_back(c3.delta[s]);
    std::sort(d.begin(), d.end(), std::greater<>());
    CHECK(d[0] == doctest::Approx(1.0 / 4.0));
    CHECK(d[1] == doctest::Approx(1.0 / 8.0));
    CHECK(d[2] == doctest::Approx(1.0 / 8.0));

    Instance four({{1, 1}}, {Job{1, 0, {{1, 4}}}}, 4.0);
    CHECK(pads_of(build_weaker_duals(simulate(four), four), 0) == 3);
}

TEST_CASE("weaker duals below the speed-up threshold") {
    auto inst = gen_lower_bound(2);
    auto t = simulate(inst);
    auto c = build_weaker_duals(t, inst);
    CHECK_FALSE(c.gamma_sufficient);
    CHECK_FALSE(c.feasible);
    CHECK_FALSE(c.violations.empty());
    CHECK(oracle::scan_duals(c, t, inst).violations > 0);
    CHECK_THROWS_AS(certified_ratio(c, t, inst), PreconditionError);
}

TEST_CASE("weaker duals on random ICA instances") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const int K = 1 + static_cast<int>(seed % 3);
        auto base = gen_random_ica(K, 1 + static_cast<int>(seed % 5), 4, seed);
        auto inst = base.with_speedup(weaker_gamma(base));
        auto t = simulate(inst);
        auto c = build_weaker_duals(t, inst);
        CHECK(c.feasible);
        CHECK(c.dual_objective >= 0.5 * c.weighted_completion - 1e-6);
        auto scan = oracle::scan_duals(c, t, inst);
        CHECK(scan.violations == 0);
        CHECK(scan.objective == doctest::Approx(c.dual_objective).epsilon(1e-9));
        CHECK(certified_ratio(c, t, inst) <= 2.0 * inst.speedup() * (1 + 1e-9));
    }
}

TEST_CASE("single-job duals on the lower-bound family") {
    for (int K = 2; K <= 4; ++K) {
        auto inst = gen_lower_bound(K, 2.0 * K);
        auto t = simulate(inst);
        auto c = build_single_job_duals(t, inst);
        CHECK(c.feasible);
        CHECK(c.gamma_sufficient);
        CHECK(std::abs(c.dual_objective - 0.5 * t.makespan()) <= 1e-8 * t.makespan());
        for (std::size_t i = 0; i < t.intervals.size(); ++i) {
            double per_unit = 0.0;
            for (int l = 0; l < inst.num_classes(); ++l)
                per_unit += static_cast<double>(inst.classes()[l].count) * c.beta[i][static_cast<std::size_t>(l)];
            CHECK(per_unit == doctest::Approx(0.5));
        }
        if (K <= 3) CHECK(oracle::scan_duals(c, t, inst).violations == 0);
    }
}

TEST_CASE("single-job duals: trivial job, flags and rejections") {
    Instance one({{1, 1}}, {Job{1, 0, {{2, 1}}}}, 2.0);
    auto c = build_single_job_duals(simulate(one), one);
    CHECK(c.feasible);

    auto low = gen_lower_bound(2, 2.0);
    auto cl = build_single_job_duals(simulate(low), low);
    CHECK_FALSE(cl.gamma_sufficient);

    Instance two({{1, 1}}, {Job{1, 0, {{1, 1}}}, Job{1, 0, {{1, 1}}}}, 2.0);
    CHECK_THROWS_AS(build_single_job_duals(simulate(two), two), PreconditionError);
    Instance late({{1, 1}}, {Job{1, 1, {{1, 1}}}}, 2.0);
    CHECK_THROWS_AS(build_single_job_duals(simulate(late), late), PreconditionError);
}

TEST_CASE("block classification examples") {
    Instance one_class({{3, 4}}, {Job{1, 0, {{1, 4}}}}, 2.0);
    auto a = classify_blocks(simulate(one_class), one_class);
    REQUIRE(a.intervals.size() == 1);
    REQUIRE(a.intervals[0].size() == 1);
    CHECK(a.intervals[0][0].kind == BlockKind::simple);
    CHECK(a.intervals[0][0].cls == 0);
    CHECK(a.intervals[0][0].average_speed == doctest::Approx(6.0));

    Instance both({{64, 1}, {1, 128}}, {Job{1, 0, {{5, 129}}}}, 1.0);
    auto b = classify_blocks(simulate(both), both);
    REQUIRE(b.intervals[0].size() == 1);
    CHECK(b.intervals[0][0].kind == BlockKind::simple);
    CHECK(b.intervals[0][0].cls == 1);
    CHECK(b.intervals[0][0].average_speed == doctest::Approx(192.0 / 129.0));

    Instance bad({{64, 1}, {1, 100}}, {Job{1, 0, {{1, 1}}}});
    CHECK_THROWS_AS(classify_blocks(simulate(bad), bad), PreconditionError);
}

TEST_CASE("general duals: two unit jobs") {
    const double gamma = 1024.0 * 2 * log_k(2);
    Instance inst({{64, 1}, {1, 128}}, {Job{1, 0, {{1, 1}}}, Job{1, 0, {{1, 1}}}}, gamma);
    auto t = simulate(inst);
    auto c = build_general_duals(t, inst);
    CHECK(c.feasible);
    REQUIRE(c.claim("claim_alpha"));
    CHECK(c.claim("claim_alpha")->ok());
    CHECK(c.alpha_total >= c.weighted_completion / (1800.0 * 2 * log_k(2)));
    CHECK(oracle::scan_duals(c, t, inst).violations == 0);
}

TEST_CASE("general duals on random ICA instances") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const int K = 1 + static_cast<int>(seed % 3);
        auto base = gen_random_ica(K, 1 + static_cast<int>(seed % 6), 5, seed);
        auto inst = base.with_speedup(1024.0 * K * log_k(K));
        auto t = simulate(inst);
        auto c = build_general_duals(t, inst);
        CHECK(c.feasible);
        for (const char* name : {"claim_alpha", "lemma_final", "claim_beta"}) {
            INFO(name);
            REQUIRE(c.claim(name));
            CHECK(c.claim(name)->ok());
        }
        auto whole = oracle::scan_duals(c, t, inst);
        CHECK(whole.violations == 0);
        CHECK(whole.objective == doctest::Approx(c.dual_objective).epsilon(1e-9));
        CHECK(oracle::scan_duals(c, t, inst, c.alpha_simple, c.delta_simple, c.beta, 0.5, 0.5).violations == 0);
        CHECK(oracle::scan_duals(c, t, inst, c.alpha_long, c.delta_long, c.beta, 0.5, 0.5).violations == 0);
    }
}

TEST_CASE("general duals refuse release dates") {
    Instance inst({{1, 1}}, {Job{1, 0, {{1, 1}}}, Job{1, 2, {{1, 1}}}}, 1024.0);
    auto t = simulate(inst);
    CHECK_THROWS_AS(build_general_duals(t, inst), PreconditionError);
    CHECK_THROWS_AS(build_weaker_duals(t, inst), PreconditionError);
}

TEST_CASE("build_duals dispatches") {
    auto inst = gen_lower_bound(2, 4.0);
    auto t = simulate(inst);
    CHECK(build_duals(DualFamily::single_job, t, inst).family == DualFamily::single_job);
    CHECK(build_duals(DualFamily::weaker, t, inst).family == DualFamily::weaker);
}
