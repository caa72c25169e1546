/*
 * Copyright 2026 The bisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include "bisim/engine.hpp"
#include "bisim/oracle.hpp"
#include "helpers.hpp"

using namespace bisim;
using bisim::testing::make_lts;

TEST_CASE("oracle_partition")
{
    CHECK(canonical_form(oracle_partition(make_lts(1, {}))) == CanonicalForm{{0}});
    CHECK(oracle_partition(bisim::testing::two_cycle()).num_blocks() == 1);
    CHECK(canonical_form(oracle_partition(gen_chain(4))) == CanonicalForm{{0, 4}, {1, 5}, {2, 6}, {3, 7}});
}

TEST_CASE("oracle output is stable and passes transfer")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto lts = bisim::testing::small_random(seed);
        const auto p = oracle_partition(lts);
        CHECK(is_stable(lts, p));
        CHECK(check_transfer(lts, p));
    }
}

TEST_CASE("check_transfer")
{
    const auto chain = gen_chain(2);
    std::vector<BlockId> singletons{0, 1, 2, 3};
    CHECK(check_transfer(chain, Partition::from_assignment(singletons)));

    const auto v = find_transfer_violation(chain, Partition::from_blocks(4, {{0, 1, 2, 3}}));
    REQUIRE(v.has_value());
    CHECK(v->mover == 0);
    CHECK(v->partner == 1);
    CHECK(v->target == 1);

    for (std::uint64_t seed = 40; seed < 80; ++seed) {
        const auto lts = bisim::testing::small_random(seed);
        CHECK(check_transfer(lts, run(lts).partition));
    }
}

TEST_CASE("quotient")
{
    SUBCASE("singletons give an isomorphic copy")
    {
        const auto lts = gen_random(10, 2, 25, 4);
        std::vector<BlockId> ids(10);
        for (BlockId i = 0; i < 10; ++i)
            ids[i] = i;
        const auto q = quotient(lts, Partition::from_assignment(ids));
        CHECK(write_aut_string(q.lts) == write_aut_string(lts));
    }
    SUBCASE("2-cycle collapses to a self-loop")
    {
        const auto q = quotient(bisim::testing::two_cycle(), Partition::from_blocks(2, {{0, 1}}));
        CHECK(write_aut_string(q.lts) == "des (0,1,1)\n(0,\"a\",0)\n");
    }
    SUBCASE("chain collapses to a single chain")
    {
        for (std::size_t n : {1u, 2u, 5u, 17u}) {
            const auto lts = gen_chain(n);
            const auto q = quotient(lts, run(lts).partition);
            CHECK(q.lts.num_states() == n);
            CHECK(q.lts.num_transitions() == n - 1);
            CHECK(quotient_is_sound(lts, q));
        }
    }
    SUBCASE("unstable partition is refused")
    {
        CHECK_THROWS_AS(quotient(gen_chain(2), Partition::from_blocks(4, {{0, 1, 2, 3}})), Error);
    }
    SUBCASE("random inputs")
    {
        for (std::uint64_t seed = 80; seed < 120; ++seed) {
            const auto lts = bisim::testing::small_random(seed);
            CHECK(quotient_is_sound(lts, quotient(lts, run(lts).partition)));
        }
    }
}

TEST_CASE("disjoint_union merges labels by text")
{
    const auto left = make_lts(2, {{0, "x", 1}});
    const auto right = make_lts(2, {{1, "y", 0}, {0, "x", 0}});
    const auto u = disjoint_union(left, right);
    CHECK(u.num_states() == 4);
    CHECK(u.num_labels() == 2);
    CHECK(write_aut_string(u) == "des (0,3,4)\n(0,\"x\",1)\n(2,\"x\",2)\n(3,\"y\",2)\n");
}
