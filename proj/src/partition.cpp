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

#include "bisim/partition.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bisim/tuple_index.hpp"

namespace bisim {

std::size_t SplitsKeyHash::operator()(const SplitsKey& k) const noexcept
{
    const std::pair<std::uint32_t, std::uint32_t> flat[] = {{k.label, k.block}};
    return tuple_index_nested_hashed(flat);
}

Partition::Partition(std::size_t num_states)
    : state_to_block_(num_states, 0), position_(num_states, 0), state_marked_(num_states, 0)
{
}

Partition Partition::from_assignment(std::span<const BlockId> assignment)
{
    Partition p(assignment.size());
    BlockId bound = 0;
    for (auto b : assignment)
        bound = std::max<BlockId>(bound, b + 1);
    p.reserve_ids(bound);
    for (StateId s = 0; s < assignment.size(); ++s) {
        auto& block = p.blocks_[assignment[s]];
        p.position_[s] = static_cast<std::uint32_t>(block.members.size());
        block.members.push_back(s);
        p.state_to_block_[s] = assignment[s];
    }
    for (const auto& b : p.blocks_)
        p.live_blocks_ += b.members.empty() ? 0 : 1;
    return p;
}

Partition Partition::from_blocks(std::size_t num_states, const std::vector<std::vector<StateId>>& blocks)
{
    std::vector<BlockId> assignment(num_states, static_cast<BlockId>(-1));
    for (BlockId id = 0; id < blocks.size(); ++id) {
        if (blocks[id].empty())
            throw Error("from_blocks: block " + std::to_string(id) + " is empty");
        for (auto s : blocks[id]) {
            if (s >= num_states)
                throw Error("from_blocks: state " + std::to_string(s) + " out of range");
            if (assignment[s] != static_cast<BlockId>(-1))
                throw Error("from_blocks: state " + std::to_string(s) + " listed twice");
            assignment[s] = id;
        }
    }
    for (StateId s = 0; s < num_states; ++s) {
        if (assignment[s] == static_cast<BlockId>(-1))
            throw Error("from_blocks: state " + std::to_string(s) + " not covered");
    }
    return from_assignment(assignment);
}

const Block& Partition::block(BlockId id) const
{
    if (!contains(id))
        throw Error("unknown block id " + std::to_string(id));
    return blocks_[id];
}

Block& Partition::block(BlockId id)
{
    if (!contains(id))
        throw Error("unknown block id " + std::to_string(id));
    return blocks_[id];
}

std::vector<BlockId> Partition::block_ids() const
{
    std::vector<BlockId> ids;
    ids.reserve(live_blocks_);
    for (const auto& b : blocks_) {
        if (!b.members.empty())
            ids.push_back(b.id);
    }
    return ids;
}

BlockId Partition::create_block(std::vector<StateId> members)
{
    const auto id = static_cast<BlockId>(blocks_.size());
    reserve_ids(id + 1);
    install_block(id, std::move(members));
    return id;
}

void Partition::reserve_ids(BlockId bound)
{
    const auto old = blocks_.size();
    if (bound > old) {
        blocks_.resize(bound);
        block_marked_.resize(bound, 0);
        for (auto id = old; id < bound; ++id)
            blocks_[id].id = static_cast<BlockId>(id);
    }
}

void Partition::install_block(BlockId id, std::vector<StateId> members)
{
    auto& block = blocks_[id];
    block.id = id;
    block.marked.clear();
    for (std::uint32_t i = 0; i < members.size(); ++i) {
        position_[members[i]] = i;
        next_state_to_block_.emplace_back(members[i], id);
    }
    block.members = std::move(members);
    ++live_blocks_;
}

void Partition::remove_members(BlockId id, std::span<const StateId> states)
{
    auto& members = blocks_[id].members;
    for (auto s : states) {
        const auto pos = position_[s];
        const auto last = members.back();
        members[pos] = last;
        position_[last] = pos;
        members.pop_back();
    }
}

void Partition::retire_block(BlockId id)
{
    auto& block = blocks_[id];
    block.members.clear();
    block.members.shrink_to_fit();
    block.marked.clear();
    block.marked.shrink_to_fit();
    --live_blocks_;
}

bool Partition::mark_state(StateId s)
{
    if (state_marked_[s])
        return false;
    state_marked_[s] = 1;
    const auto id = state_to_block_[s];
    blocks_[id].marked.push_back(s);
    if (!block_marked_[id]) {
        block_marked_[id] = 1;
        marked_blocks_.push_back(id);
    }
    return true;
}

void Partition::copy_next()
{
    for (const auto& [s, id] : next_state_to_block_)
        state_to_block_[s] = id;
    next_state_to_block_.clear();
}

void Partition::check_invariants() const
{
    std::vector<char> seen(num_states(), 0);
    std::size_t live = 0;
    std::size_t marked_total = 0;
    for (BlockId id = 0; id < blocks_.size(); ++id) {
        const auto& b = blocks_[id];
        if (b.id != id)
            throw Error("block slot " + std::to_string(id) + " carries id " + std::to_string(b.id));
        if (b.members.empty()) {
            if (!b.marked.empty())
                throw Error("removed block " + std::to_string(id) + " has marked states");
            continue;
        }
        ++live;
        for (std::uint32_t i = 0; i < b.members.size(); ++i) {
            const auto s = b.members[i];
            if (s >= num_states())
                throw Error("block " + std::to_string(id) + " holds out-of-range state");
            if (seen[s])
                throw Error("state " + std::to_string(s) + " in two blocks");
            seen[s] = 1;
            if (state_to_block_[s] != id)
                throw Error("state_to_block(" + std::to_string(s) + ") disagrees with membership");
            if (position_[s] != i)
                throw Error("position index of state " + std::to_string(s) + " is stale");
        }
        marked_total += b.marked.size();
        for (auto s : b.marked) {
            if (s >= num_states() || state_to_block_[s] != id)
                throw Error("marked state " + std::to_string(s) + " not a member of block " + std::to_string(id));
            if (!state_marked_[s])
                throw Error("marked state " + std::to_string(s) + " lacks its mark flag");
        }
        if (!b.marked.empty() && !block_marked_[id])
            throw Error("block " + std::to_string(id) + " has marked states but is not in the marked set");
    }
    for (StateId s = 0; s < num_states(); ++s) {
        if (!seen[s])
            throw Error("state " + std::to_string(s) + " not covered by any block");
    }
    if (live != live_blocks_)
        throw Error("live block count out of sync");
    if (marked_total != static_cast<std::size_t>(std::count(state_marked_.begin(), state_marked_.end(), 1)))
        throw Error("mark flags disagree with the marked lists");
}

std::vector<StateId> a_predecessors(const Lts& lts, const Partition& partition, BlockId source, LabelId label,
                                    BlockId target)
{
    const auto& p = partition.block(source);
    partition.block(target);
    std::vector<StateId> result;
    for (auto u : p.members) {
        for (const auto& e : lts.out(u)) {
            if (e.label == label && partition.block_of(e.state) == target) {
                result.push_back(u);
                break;
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::optional<StabilityViolation> find_instability(const Lts& lts, const Partition& partition)
{
    for (auto id : partition.block_ids()) {
        const auto& members = partition.block(id).members;
        // For every (label, target) reached from the block, count members
        // that reach it. Stability means each count is all or nothing.
        std::map<std::pair<LabelId, BlockId>, std::size_t> reach;
        for (auto u : members) {
            std::set<std::pair<LabelId, BlockId>> mine;
            for (const auto& e : lts.out(u))
                mine.emplace(e.label, partition.block_of(e.state));
            for (const auto& key : mine)
                ++reach[key];
        }
        for (const auto& [key, count] : reach) {
            if (count != members.size())
                return StabilityViolation{id, key.first, key.second};
        }
    }
    return std::nullopt;
}

CanonicalForm canonical_form(std::span<const BlockId> assignment)
{
    std::map<BlockId, std::vector<StateId>> groups;
    for (StateId s = 0; s < assignment.size(); ++s)
        groups[assignment[s]].push_back(s);
    CanonicalForm form;
    form.reserve(groups.size());
    for (auto& [id, members] : groups)
        form.push_back(std::move(members));
    std::sort(form.begin(), form.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return form;
}

CanonicalForm canonical_form(const Partition& partition)
{
    CanonicalForm form;
    form.reserve(partition.num_blocks());
    for (auto id : partition.block_ids()) {
        auto members = partition.block(id).members;
        std::sort(members.begin(), members.end());
        form.push_back(std::move(members));
    }
    std::sort(form.begin(), form.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return form;
}

bool refines(const Partition& finer, const Partition& coarser)
{
    if (finer.num_states() != coarser.num_states())
        throw Error("refines: partitions cover different state sets");
    for (auto id : finer.block_ids()) {
        const auto& members = finer.block(id).members;
        const auto home = coarser.block_of(members.front());
        for (auto s : members) {
            if (coarser.block_of(s) != home)
                return false;
        }
    }
    return true;
}

void write_partition_text(std::ostream& out, const CanonicalForm& form)
{
    for (const auto& block : form) {
        for (std::size_t i = 0; i < block.size(); ++i)
            out << (i ? " " : "") << block[i];
        out << '\n';
    }
}

std::string partition_to_json(const CanonicalForm& form)
{
    return nlohmann::json(form).dump();
}

} // namespace bisim
