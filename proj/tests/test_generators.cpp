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

#include <algorithm>
#include <cmath>
#include <set>

#include "bagsched/generators.hpp"
#include "bagsched/lp_bridge.hpp"

using namespace bagsched;

TEST_CASE("SplitMix64 reference values") {
    SplitMix64 g(0);
    CHECK(g.next() == 0xE220A8397B1DCDAFULL);
    CHECK(g.next() == 0x6E789E6AA1B965F4ULL);
    SplitMix64 r(99);
    for (int i = 0; i < 1000; ++i) {
        const auto x = r.range(-3, 4);
        CHECK(x >= -3);
        CHECK(x <= 4);
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("lower-bound classes") {
    auto one = lower_bound_classes(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].sigma == 1.0);
    CHECK(one[0].count == 1);

    auto two = lower_bound_classes(2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].sigma == 64.0);
    CHECK(two[0].count == 1);
    CHECK(two[1].sigma == 1.0);
    CHECK(two[1].count == 128);

    auto three = lower_bound_classes(3);
    REQUIRE(three.size() == 3);
    CHECK(three[0].sigma == 4096.0);
    CHECK(three[1].count == 128);
    CHECK(three[2].count == 24576);

    CHECK_THROWS_AS(lower_bound_classes(0), InvalidInput);
    CHECK_THROWS_AS(lower_bound_classes(10), InvalidInput);
}

TEST_CASE("lower-bound counts are minimal for capacity doubling") {
    for (int K = 2; K <= 9; ++K) {
        auto c = lower_bound_classes(K);
        CHECK(validate_ica(c).satisfied);
        // speeds are powers of 64, so exact integers fit every capacity up to K = 9
        std::int64_t faster = 0;
        for (int l = 0; l + 1 < K; ++l) {
            faster += static_cast<std::int64_t>(c[l].sigma) * c[l].count;
            const auto sigma = static_cast<std::int64_t>(c[l + 1].sigma);
            const std::int64_t cap = sigma * c[l + 1].count;
            CHECK(cap >= 2 * faster);
            CHECK(cap - sigma < 2 * faster);
            CHECK(c[l].sigma == 64.0 * c[l + 1].sigma);
        }
    }
}

TEST_CASE("lower-bound instance and its offline schedule") {
    for (int K = 1; K <= 5; ++K) {
        auto inst = gen_lower_bound(K, 3.0);
        CHECK(inst.speedup() == 3.0);
        REQUIRE(inst.num_jobs() == 1);
        CHECK(inst.jobs()[0].weight == 1.0);
        CHECK(inst.num_tasks() == inst.machines().num_machines());
        for (std::size_t l = 0; l < inst.classes().size(); ++l) {
            CHECK(inst.jobs()[0].tasks[l].size == inst.classes()[l].sigma);
            CHECK(inst.jobs()[0].tasks[l].count == inst.classes()[l].count);
        }
    }
    auto inst = gen_lower_bound(2);
    double latest = 0.0;
    for (const auto& p : lower_bound_offline_pieces(inst)) latest = std::max(latest, p.end);
    CHECK(latest == 1.0);
}

TEST_CASE("random ICA instances") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int K = 1 + static_cast<int>(seed % 4);
        auto a = gen_random_ica(K, 6, 5, seed, 2.0);
        CHECK(a.ica_satisfied());
        CHECK(a.speedup() == 2.0);
        CHECK(a.num_jobs() == 6);
        CHECK(a.all_released_at_zero());
        for (const auto& j : a.jobs()) {
            CHECK(j.weight >= 1.0);
            CHECK(j.weight <= 10.0);
            CHECK(j.weight == std::floor(j.weight));
            CHECK(j.task_count() >= 1);
            CHECK(j.task_count() <= 5);
            for (const auto& c : j.tasks) {
                CHECK(c.size >= 1.0);
                CHECK(c.size <= std::pow(64.0, K));
            }
        }
        CHECK((a.classes()[0].count == 1 || a.classes()[0].count == 2));
        auto b = gen_random_ica(K, 6, 5, seed, 2.0);
        REQUIRE(b.num_jobs() == a.num_jobs());
        for (int j = 0; j < a.num_jobs(); ++j) {
            CHECK(a.jobs()[j].weight == b.jobs()[j].weight);
            REQUIRE(a.jobs()[j].tasks.size() == b.jobs()[j].tasks.size());
            for (std::size_t c = 0; c < a.jobs()[j].tasks.size(); ++c)
                CHECK(a.jobs()[j].tasks[c].size == b.jobs()[j].tasks[c].size);
        }
    }
    CHECK(gen_random_ica(2, 4, 4, 1).jobs()[0].tasks[0].size != gen_random_ica(2, 4, 4, 2).jobs()[0].tasks[0].size);
    CHECK_THROWS_AS(gen_random_ica(0, 3, 3, 1), InvalidInput);
    CHECK_THROWS_AS(gen_random_ica(9, 3, 3, 1), InvalidInput);
    CHECK_THROWS_AS(gen_random_ica(2, 3, 0, 1), InvalidInput);
}

TEST_CASE("raw speed profiles") {
    auto u = gen_raw_speeds("uniform", 7, 3);
    CHECK(u.size() == 7);
    CHECK(std::all_of(u.begin(), u.end(), [&](double s) { return s == u[0] && s > 0; }));

    auto g = gen_raw_speeds("geometric", 6, 3);
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<double>{1, 2, 4, 8, 16, 32});

    auto c = gen_raw_speeds("clustered", 20, 3);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i % 5 == 0) {
            CHECK(c[i] >= 100.0);
            CHECK(c[i] <= 200.0);
        } else {
            CHECK(c[i] >= 1.5);
            CHECK(c[i] <= 3.0);
        }
    }
    CHECK(gen_raw_speeds("clustered", 20, 3) == c);
    CHECK_THROWS_AS(gen_raw_speeds("zipf", 5, 1), InvalidInput);
    CHECK_THROWS_AS(gen_raw_speeds("uniform", 0, 1), InvalidInput);

    for (const char* profile : {"uniform", "geometric", "clustered"}) {
        auto res = preprocess_speeds(gen_raw_speeds(profile, 40, 5));
        CHECK(validate_ica(res.selection.classes).satisfied);
    }
}
