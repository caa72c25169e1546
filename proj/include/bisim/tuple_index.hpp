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

#ifndef BISIM_TUPLE_INDEX_HPP
#define BISIM_TUPLE_INDEX_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bisim {

using BigIndex = boost::multiprecision::cpp_int;

/// Uniform bound on the elements of an indexed set: every element lies in
/// [0, size).
struct IndexDomain {
    std::uint64_t size;
};

/// Perfect index of an unordered set of integers: sum of t_i * d^i over the
/// sorted distinct elements t_0 < t_1 < ... Order and multiplicity of the
/// input are irrelevant. Throws Error on empty input or out-of-domain
/// elements.
BigIndex tuple_index(std::span<const std::uint64_t> tbl, IndexDomain domain);

/// Same weighted sum folded to 64 bits. The radix is replaced by a fixed odd
/// multiplier so that the fold does not degenerate when d shares factors
/// with 2^64; collisions are possible and callers must compare structurally.
std::uint64_t tuple_index_hashed(std::span<const std::uint64_t> tbl);

/// One marker entry: a label and the strictly sorted ids reached under it.
using MarkerEntry = std::pair<std::uint64_t, std::vector<std::uint64_t>>;

/// Exact digest of a canonical marker (entries strictly increasing by label,
/// each id set strictly sorted and non-empty). Each entry is encoded as
/// label + |labels| * tuple_index(ids), and the entry codes are indexed
/// again as a set. The empty marker maps to 0. Throws Error on a
/// non-canonical form or out-of-domain values.
BigIndex tuple_index_nested(std::span<const MarkerEntry> entries, IndexDomain label_domain,
                            IndexDomain block_domain);

/// 64-bit fold of the nested digest over the flat sorted (label, id) list.
/// The empty marker maps to 0.
std::uint64_t tuple_index_nested_hashed(std::span<const std::pair<std::uint32_t, std::uint32_t>> flat);

struct TupleIndexCheck {
    std::size_t subsets = 0;
    std::size_t samples = 0;
    /// Empty when every check passed.
    std::string failure;
    bool ok() const { return failure.empty(); }
};

/// Injectivity over every non-empty subset of {0..domain_size-1}, then
/// permutation and duplicate invariance on `samples` random multisets.
TupleIndexCheck verify_tuple_index(std::uint64_t domain_size, std::size_t samples, std::uint64_t seed);

} // namespace bisim

#endif // BISIM_TUPLE_INDEX_HPP
