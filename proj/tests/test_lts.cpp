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

#include <sstream>

#include "bisim/lts.hpp"
#include "helpers.hpp"

using namespace bisim;
using bisim::testing::labels_of;
using bisim::testing::make_lts;

TEST_CASE("parse_aut reads header and transitions")
{
    const auto lts = parse_aut_string("des (0,2,3)\n(0,\"a\",1)\n(1,\"b\",2)\n");
    CHECK(lts.num_states() == 3);
    CHECK(lts.num_transitions() == 2);
    CHECK(labels_of(lts, signature_of(lts, 0)) == std::vector<std::string>{"a"});
    CHECK(signature_of(lts, 2).empty());
}

TEST_CASE("parse_aut accepts an LTS without transitions")
{
    const auto lts = parse_aut_string("des (0,0,1)\n");
    CHECK(lts.num_states() == 1);
    CHECK(lts.num_transitions() == 0);
}

TEST_CASE("parse_aut rejects out-of-range states")
{
    CHECK_THROWS_WITH_AS(parse_aut_string("des (0,1,2)\n(0,\"a\",5)\n"), doctest::Contains("state index out of range"),
                         ParseError);
}

TEST_CASE("parse_aut tolerates CRLF, blank lines and unquoted labels")
{
    const auto lts = parse_aut_string("des (1, 2, 2)\r\n\r\n( 0 , tau , 1 )\r\n(1,\"x, y\",0)\r\n");
    CHECK(lts.initial() == 1);
    CHECK(lts.num_transitions() == 2);
    CHECK(lts.alphabet().find("tau") < lts.num_labels());
    CHECK(lts.alphabet().find("x, y") < lts.num_labels());
}

TEST_CASE("parse_aut reports malformed input with a line number")
{
    CHECK_THROWS_AS(parse_aut_string("hello\n"), ParseError);
    CHECK_THROWS_AS(parse_aut_string("des (0,2,2)\n(0,\"a\",1)\n"), ParseError);
    CHECK_THROWS_AS(parse_aut_string("des (0,1,2)\n(0,\"a,1)\n"), ParseError);
    CHECK_THROWS_AS(parse_aut_string("des (0,0,0)\n"), ParseError);
    try {
        parse_aut_string("des (0,2,2)\n(0,\"a\",1)\n(0 \"a\" 1)\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("write_aut emits the empty case and quotes labels")
{
    CHECK(write_aut_string(parse_aut_string("des (0,0,1)")) == "des (0,0,1)\n");
    const auto lts = make_lts(2, {{0, "send msg", 1}});
    const auto text = write_aut_string(lts);
    CHECK(text == "des (0,1,2)\n(0,\"send msg\",1)\n");
    CHECK(write_aut_string(parse_aut_string(text)) == text);
}

TEST_CASE("write then parse preserves the triple set")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto lts = bisim::testing::small_random(seed);
        const auto text = write_aut_string(lts);
        const auto again = parse_aut_string(text);
        CHECK(again.num_states() == lts.num_states());
        CHECK(again.initial() == lts.initial());
        CHECK(bisim::testing::triples_of(again) == bisim::testing::triples_of(lts));
        CHECK(write_aut_string(again) == text);
    }
}

TEST_CASE("writer output does not depend on label interning order")
{
    const auto ab = make_lts(2, {{0, "a", 1}, {0, "b", 1}});
    const auto ba = make_lts(2, {{0, "b", 1}, {0, "a", 1}, {1, "b", 0}});
    CHECK(write_aut_string(ab) == "des (0,2,2)\n(0,\"a\",1)\n(0,\"b\",1)\n");
    CHECK(write_aut_string(ba) == "des (0,3,2)\n(0,\"a\",1)\n(0,\"b\",1)\n(1,\"b\",0)\n");
    CHECK_THROWS_AS(write_aut_string(make_lts(2, {{0, "say \"hi\"", 1}})), Error);
}

TEST_CASE("adjacency rows agree with the transition list")
{
    const auto lts = gen_random(40, 3, 150, 11);
    std::size_t out_total = 0;
    std::size_t in_total = 0;
    for (StateId s = 0; s < lts.num_states(); ++s) {
        out_total += lts.out(s).size();
        in_total += lts.in(s).size();
    }
    CHECK(out_total == lts.num_transitions());
    CHECK(in_total == lts.num_transitions());
}

TEST_CASE("duplicate triples collapse; parallel labels survive")
{
    const auto lts = make_lts(2, {{0, "a", 1}, {0, "a", 1}, {0, "b", 1}});
    CHECK(lts.num_transitions() == 2);
    CHECK_THROWS_AS(make_lts(1, {{0, "a", 3}}), Error);
}

TEST_CASE("gen_chain")
{
    SUBCASE("n = 1")
    {
        const auto lts = gen_chain(1);
        CHECK(lts.num_states() == 2);
        CHECK(lts.num_transitions() == 0);
    }
    SUBCASE("n = 3")
    {
        const auto lts = gen_chain(3);
        CHECK(lts.num_states() == 6);
        CHECK(lts.num_transitions() == 4);
        CHECK(signature_of(lts, 2).empty());
        CHECK(signature_of(lts, 5).empty());
        CHECK(labels_of(lts, signature_of(lts, 0)) == std::vector<std::string>{"a"});
        CHECK(write_aut_string(lts).starts_with("des (0,4,6)\n"));
    }
    SUBCASE("n = 1000")
    {
        const auto lts = gen_chain(1000);
        CHECK(lts.num_states() == 2000);
        CHECK(lts.num_transitions() == 1998);
    }
    CHECK_THROWS_AS(gen_chain(0), Error);
}

TEST_CASE("gen_random")
{
    const auto single = gen_random(1, 1, 0, 99);
    CHECK(single.num_states() == 1);
    CHECK(single.num_transitions() == 0);

    CHECK(write_aut_string(gen_random(4, 2, 8, 42)) == write_aut_string(gen_random(4, 2, 8, 42)));
    CHECK(gen_random(16, 3, 40, 7).num_transitions() == 40);
    // Dense request: every possible triple.
    CHECK(gen_random(3, 2, 18, 1).num_transitions() == 18);
    CHECK_THROWS_AS(gen_random(3, 2, 19, 1), Error);
}

TEST_CASE("signature has set semantics")
{
    const auto lts = make_lts(4, {{0, "a", 1}, {0, "a", 2}, {0, "b", 3}});
    CHECK(labels_of(lts, signature_of(lts, 0)) == std::vector<std::string>{"a", "b"});
    CHECK(signature_of(lts, 3).empty());
    CHECK(Signature({2, 1, 2}) == Signature({1, 2}));
}
