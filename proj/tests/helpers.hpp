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

#ifndef BISIM_TESTS_HELPERS_HPP
#define BISIM_TESTS_HELPERS_HPP

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "bisim/lts.hpp"

namespace bisim::testing {

using Triple = std::tuple<StateId, std::string, StateId>;

inline Lts make_lts(std::size_t n, const std::vector<Triple>& triples)
{
    Alphabet alphabet;
    std::vector<Transition> transitions;
    for (const auto& [src, label, dst] : triples)
        transitions.push_back({src, alphabet.intern(label), dst});
    return Lts(n, std::move(alphabet), std::move(transitions));
}

/// s0 <-a-> s1
inline Lts two_cycle()
{
    return make_lts(2, {{0, "a", 1}, {1, "a", 0}});
}

inline std::vector<std::string> labels_of(const Lts& lts, const Signature& sig)
{
    std::vector<std::string> out;
    for (auto l : sig.labels())
        out.push_back(lts.alphabet().text(l));
    return out;
}

/// Transitions as sorted (src, label text, dst) triples.
inline std::vector<Triple> triples_of(const Lts& lts)
{
    std::vector<Triple> out;
    for (const auto& t : lts.transitions())
        out.emplace_back(t.src, lts.alphabet().text(t.label), t.dst);
    std::sort(out.begin(), out.end());
    return out;
}

/// Random instance drawn from the small-suite bounds: |S| <= 64, |A| <= 4,
/// |T| <= 256.
inline Lts small_random(std::uint64_t seed)
{
    const std::size_t n = 1 + seed % 64;
    const std::size_t labels = 1 + (seed / 64) % 4;
    const std::size_t cap = std::min<std::size_t>(256, n * n * labels);
    const std::size_t t = (seed * 2654435761u) % (cap + 1);
    return gen_random(n, labels, t, seed);
}

} // namespace bisim::testing

#endif // BISIM_TESTS_HELPERS_HPP
