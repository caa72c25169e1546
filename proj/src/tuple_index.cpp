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

#include "bisim/tuple_index.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "bisim/lts.hpp"

namespace bisim {

namespace {

constexpr std::uint64_t kInfinity = std::numeric_limits<std::uint64_t>::max();
constexpr std::uint64_t kFoldRadix = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t x) noexcept
{
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

// Steps 1-4: sort, overwrite every repeated cell with the infinity marker,
// sort again so the markers collect at the tail, and cut the table at the
// last finite cell.
std::vector<std::uint64_t> distinct_prefix(std::span<const std::uint64_t> tbl)
{
    std::vector<std::uint64_t> work(tbl.begin(), tbl.end());
    std::sort(work.begin(), work.end());
    for (std::size_t i = work.size(); i-- > 1;) {
        if (work[i - 1] == work[i])
            work[i] = kInfinity;
    }
    std::sort(work.begin(), work.end());
    std::size_t ts = 0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i] != kInfinity && (i + 1 == work.size() || work[i + 1] == kInfinity))
            ts = i;
    }
    work.resize(ts + 1);
    return work;
}

} // namespace

BigIndex tuple_index(std::span<const std::uint64_t> tbl, IndexDomain domain)
{
    if (domain.size == 0)
        throw Error("tuple_index: domain size must be positive");
    if (tbl.empty())
        throw Error("tuple_index: empty input");
    for (auto x : tbl) {
        if (x >= domain.size)
            throw Error("tuple_index: element " + std::to_string(x) + " outside domain [0, " +
                        std::to_string(domain.size) + ")");
    }
    const auto distinct = distinct_prefix(tbl);

    // Steps 5-6: weighted terms, then their sum.
    BigIndex result = 0;
    BigIndex weight = 1;
    for (auto t : distinct) {
        result += weight * t;
        weight *= domain.size;
    }
    return result;
}

std::uint64_t tuple_index_hashed(std::span<const std::uint64_t> tbl)
{
    if (tbl.empty())
        return 0;
    const auto distinct = distinct_prefix(tbl);
    std::uint64_t result = 0;
    std::uint64_t weight = 1;
    for (auto t : distinct) {
        result += weight * mix(t + 1);
        weight *= kFoldRadix;
    }
    return mix(result);
}

BigIndex tuple_index_nested(std::span<const MarkerEntry> entries, IndexDomain label_domain,
                            IndexDomain block_domain)
{
    if (entries.empty())
        return 0;
    if (label_domain.size == 0 || block_domain.size == 0)
        throw Error("tuple_index_nested: domain sizes must be positive");

    // Inner indices are bounded by block_domain^block_domain.
    BigIndex inner_bound = 1;
    for (std::uint64_t i = 0; i < block_domain.size; ++i)
        inner_bound *= block_domain.size;
    const BigIndex code_domain = inner_bound * label_domain.size;

    BigIndex result = 0;
    BigIndex weight = 1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [label, ids] = entries[i];
        if (i > 0 && entries[i - 1].first >= label)
            throw Error("tuple_index_nested: labels not strictly increasing");
        if (label >= label_domain.size)
            throw Error("tuple_index_nested: label outside domain");
        if (ids.empty())
            throw Error("tuple_index_nested: empty id set");
        if (!std::is_sorted(ids.begin(), ids.end()) ||
            std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw Error("tuple_index_nested: id set not strictly sorted");
        // Entry codes increase with the label, so this is the weighted sum
        // over the sorted code set.
        const BigIndex code = BigIndex(label) + BigIndex(label_domain.size) * tuple_index(ids, block_domain);
        result += weight * code;
        weight *= code_domain;
    }
    return result;
}

std::uint64_t tuple_index_nested_hashed(std::span<const std::pair<std::uint32_t, std::uint32_t>> flat)
{
    if (flat.empty())
        return 0;
    std::uint64_t result = 0;
    std::uint64_t weight = 1;
    std::size_t i = 0;
    while (i < flat.size()) {
        const auto label = flat[i].first;
        std::uint64_t inner = 0;
        std::uint64_t inner_weight = 1;
        for (; i < flat.size() && flat[i].first == label; ++i) {
            inner += inner_weight * mix(std::uint64_t{flat[i].second} + 1);
            inner_weight *= kFoldRadix;
        }
        result += weight * mix(mix(inner) ^ label);
        weight *= kFoldRadix;
    }
    return mix(result);
}

TupleIndexCheck verify_tuple_index(std::uint64_t domain_size, std::size_t samples, std::uint64_t seed)
{
    if (domain_size == 0 || domain_size > 20)
        throw Error("verify_tuple_index: domain size must be in [1, 20]");
    const IndexDomain domain{domain_size};
    TupleIndexCheck check;

    std::set<BigIndex> seen;
    std::vector<std::uint64_t> subset;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << domain_size); ++mask) {
        subset.clear();
        for (std::uint64_t bit = 0; bit < domain_size; ++bit) {
            if (mask & (std::uint64_t{1} << bit))
                subset.push_back(bit);
        }
        ++check.subsets;
        if (!seen.insert(tuple_index(subset, domain)).second) {
            check.failure = "collision at subset mask " + std::to_string(mask);
            return check;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> element(0, domain_size - 1);
    std::uniform_int_distribution<std::size_t> length(1, 2 * domain_size);
    std::vector<std::uint64_t> multiset;
    for (std::size_t i = 0; i < samples; ++i) {
        multiset.resize(length(rng));
        for (auto& x : multiset)
            x = element(rng);
        const auto reference = tuple_index(multiset, domain);
        const auto reference_hash = tuple_index_hashed(multiset);

        auto shuffled = multiset;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        // Duplicate a random element.
        shuffled.push_back(shuffled[element(rng) % shuffled.size()]);

        std::vector<std::uint64_t> distinct = multiset;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        if (tuple_index(shuffled, domain) != reference || tuple_index(distinct, domain) != reference ||
            tuple_index_hashed(shuffled) != reference_hash) {
            check.failure = "invariance broken on sample " + std::to_string(i);
            return check;
        }
        ++check.samples;
    }
    return check;
}

} // namespace bisim
