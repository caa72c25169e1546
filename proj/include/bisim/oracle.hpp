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

#ifndef BISIM_ORACLE_HPP
#define BISIM_ORACLE_HPP

#include <optional>
#include <vector>

#include "bisim/lts.hpp"
#include "bisim/partition.hpp"

namespace bisim {

// Slow reference algorithms. Nothing here shares code with the refinement
// engine beyond the Lts and Partition types.

/// Naive fixpoint: re-key every state by (current block, set of
/// (label, successor block)) until the number of blocks stops growing.
/// O(|S| * |T| log) worst case.
Partition oracle_partition(const Lts& lts);

/// A failed transfer clause: `mover` takes `label` into a block that
/// `partner` (same block as `mover`) cannot reach under that label.
struct TransferViolation {
    StateId mover;
    StateId partner;
    LabelId label;
    StateId target;
};

/// Checks both transfer clauses of the partition read as a relation, one
/// step deep.
std::optional<TransferViolation> find_transfer_violation(const Lts& lts, const Partition& partition);
inline bool check_transfer(const Lts& lts, const Partition& partition)
{
    return !find_transfer_violation(lts, partition).has_value();
}

struct QuotientLts {
    Lts lts;
    /// Original state -> quotient state.
    std::vector<StateId> block_of;
};

/// One state per block, numbered by canonical block order; (B, a, C) iff
/// some u in B has an a-move into C. The quotient's initial state is the
/// image of the input's. Throws Error if the partition is not stable.
QuotientLts quotient(const Lts& lts, const Partition& partition);

/// States of `left` keep their ids; states of `right` are shifted by
/// left.num_states(). Labels are merged by text.
Lts disjoint_union(const Lts& left, const Lts& right);

/// Runs the oracle on the disjoint union of `lts` and `q.lts` and checks
/// that every state is bisimilar to its quotient image.
bool quotient_is_sound(const Lts& lts, const QuotientLts& q);

} // namespace bisim

#endif // BISIM_ORACLE_HPP
