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

#ifndef BISIM_PARTITION_HPP
#define BISIM_PARTITION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bisim/lts.hpp"

namespace bisim {

using BlockId = std::uint32_t;

/// Key of one a-predecessor set: the edge label and the block of the
/// predecessor. Ordered lexicographically.
struct SplitsKey {
    LabelId label;
    BlockId block;

    friend auto operator<=>(const SplitsKey&, const SplitsKey&) = default;
};

struct SplitsKeyHash {
    std::size_t operator()(const SplitsKey& k) const noexcept;
};

struct Block {
    BlockId id = 0;
    std::vector<StateId> members;
    /// Marked states, ms(M). Always a subset of members.
    std::vector<StateId> marked;
};

/// A queued splitter. `sibling_withheld` is set when the block was produced
/// by a split whose largest piece was kept out of the splitter queue.
struct Splitter {
    BlockId block;
    bool sibling_withheld = false;

    friend bool operator==(const Splitter&, const Splitter&) = default;
};

/// Ids are erased; blocks sorted by smallest member, members ascending.
using CanonicalForm = std::vector<std::vector<StateId>>;

/// Partition of the state set [0, n) plus the refinement queues.
///
/// Blocks are stored densely by id. An id whose block has been removed keeps
/// an empty slot; ids are never reused.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::size_t num_states);

    /// Builds a partition from a per-state block assignment; block ids are
    /// the assignment values.
    static Partition from_assignment(std::span<const BlockId> assignment);
    /// Builds a partition from explicit member lists; block i gets id i.
    static Partition from_blocks(std::size_t num_states, const std::vector<std::vector<StateId>>& blocks);

    std::size_t num_states() const noexcept { return state_to_block_.size(); }
    /// Number of blocks currently present.
    std::size_t num_blocks() const noexcept { return live_blocks_; }
    /// One past the largest id ever allocated.
    BlockId id_bound() const noexcept { return static_cast<BlockId>(blocks_.size()); }

    bool contains(BlockId id) const noexcept { return id < blocks_.size() && !blocks_[id].members.empty(); }
    /// Throws Error for an id not present in the partition.
    const Block& block(BlockId id) const;
    Block& block(BlockId id);
    /// Ids of present blocks in ascending order.
    std::vector<BlockId> block_ids() const;

    BlockId block_of(StateId s) const { return state_to_block_.at(s); }
    std::span<const BlockId> state_to_block() const noexcept { return state_to_block_; }

    /// Allocates a fresh id and installs `members` under it. Updates the
    /// pending assignment map, not state_to_block.
    BlockId create_block(std::vector<StateId> members);
    /// Installs `members` under a pre-allocated id; used by the engine once
    /// ids have been assigned for a whole round.
    void install_block(BlockId id, std::vector<StateId> members);
    void reserve_ids(BlockId bound);
    /// Removes the states of `states` from block `id` in O(|states|).
    void remove_members(BlockId id, std::span<const StateId> states);
    /// Drops an emptied block from the partition.
    void retire_block(BlockId id);

    /// Pending (state, block) assignments published by the Copy phase.
    std::vector<std::pair<StateId, BlockId>>& next_state_to_block() noexcept { return next_state_to_block_; }
    const std::vector<std::pair<StateId, BlockId>>& next_state_to_block() const noexcept
    {
        return next_state_to_block_;
    }

    std::vector<Splitter>& splitters() noexcept { return splitters_; }
    const std::vector<Splitter>& splitters() const noexcept { return splitters_; }
    std::vector<BlockId>& marked_blocks() noexcept { return marked_blocks_; }
    const std::vector<BlockId>& marked_blocks() const noexcept { return marked_blocks_; }

    /// Copy phase: applies every pending assignment to state_to_block and
    /// clears the pending map.
    void copy_next();

    /// Throws Error describing the first violated structural invariant
    /// (disjoint, non-empty, covering blocks; consistent state_to_block;
    /// marked subset of members; consistent member positions).
    void check_invariants() const;

    /// Sequential marking: adds `s` to ms(block_of(s)) and the block to the
    /// marked-block set. Both have set semantics. Returns false if `s` was
    /// already marked.
    bool mark_state(StateId s);
    bool is_marked(StateId s) const noexcept { return state_marked_[s] != 0; }

private:
    friend struct PartitionAccess;

    std::vector<Block> blocks_;
    std::vector<BlockId> state_to_block_;
    std::vector<std::uint32_t> position_;
    std::vector<std::pair<StateId, BlockId>> next_state_to_block_;
    std::vector<Splitter> splitters_;
    std::vector<BlockId> marked_blocks_;
    std::vector<std::uint8_t> state_marked_;
    std::vector<std::uint8_t> block_marked_;
    std::size_t live_blocks_ = 0;
};

/// Reference implementation of the a-predecessors of `target` within
/// `source`: {u in source | some (u, a, t) with t in target}. Sorted.
std::vector<StateId> a_predecessors(const Lts& lts, const Partition& partition, BlockId source, LabelId label,
                                    BlockId target);

struct StabilityViolation {
    BlockId source;
    LabelId label;
    BlockId target;
};

/// Empty when every block is a-stable or a-disjoint with respect to every
/// block for every label; otherwise the first (source, label, target) found
/// in ascending order.
std::optional<StabilityViolation> find_instability(const Lts& lts, const Partition& partition);
inline bool is_stable(const Lts& lts, const Partition& partition)
{
    return !find_instability(lts, partition).has_value();
}

CanonicalForm canonical_form(const Partition& partition);
CanonicalForm canonical_form(std::span<const BlockId> assignment);

/// True iff every block of `finer` lies inside a block of `coarser`.
/// Throws Error when the state counts differ.
bool refines(const Partition& finer, const Partition& coarser);

/// One line per block, members space-separated, in canonical order.
void write_partition_text(std::ostream& out, const CanonicalForm& form);
std::string partition_to_json(const CanonicalForm& form);

} // namespace bisim

#endif // BISIM_PARTITION_HPP
