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

#include "bisim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

namespace bisim {

// Raw access to the partition for the refinement phases. Each Splitting
// task only touches the blocks, positions and flags of the states of its own
// marked block, so tasks on distinct blocks never write the same element.
struct PartitionAccess {
    static std::vector<Block>& blocks(Partition& p) { return p.blocks_; }
    static std::vector<BlockId>& state_to_block(Partition& p) { return p.state_to_block_; }
    static std::vector<std::uint32_t>& positions(Partition& p) { return p.position_; }
    static std::vector<std::pair<StateId, BlockId>>& next(Partition& p) { return p.next_state_to_block_; }
    static std::vector<std::uint8_t>& state_marked(Partition& p) { return p.state_marked_; }
    static std::vector<std::uint8_t>& block_marked(Partition& p) { return p.block_marked_; }
    static std::size_t& live_blocks(Partition& p) { return p.live_blocks_; }
};

StateMarker::StateMarker(std::vector<std::pair<LabelId, BlockId>> pairs) : pairs_(std::move(pairs))
{
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    hash_ = tuple_index_nested_hashed(pairs_);
}

std::vector<MarkerEntry> StateMarker::entries() const
{
    std::vector<MarkerEntry> result;
    for (const auto& [label, block] : pairs_) {
        if (result.empty() || result.back().first != label)
            result.push_back({label, {}});
        result.back().second.push_back(block);
    }
    return result;
}

StateMarker compute_marker(const Lts& lts, std::span<const BlockId> state_to_block, StateId v)
{
    std::vector<std::pair<LabelId, BlockId>> pairs;
    pairs.reserve(lts.out(v).size());
    for (const auto& e : lts.out(v))
        pairs.emplace_back(e.label, state_to_block[e.state]);
    return StateMarker(std::move(pairs));
}

std::uint32_t RunStats::max_per_state_split_count() const
{
    if (per_state_split_count.empty())
        return 0;
    return *std::max_element(per_state_split_count.begin(), per_state_split_count.end());
}

std::string RunStats::to_json() const
{
    nlohmann::json j;
    j["rounds"] = rounds;
    j["splits"] = splits;
    j["max_per_state_split_count"] = max_per_state_split_count();
    j["phase_times_ms"] = {{"init", phase_times.init_ms},
                           {"mark", phase_times.mark_ms},
                           {"split", phase_times.split_ms},
                           {"copy", phase_times.copy_ms}};
    return j.dump();
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void run_loop(WorkerPool* pool, std::size_t n, const std::function<void(std::size_t, unsigned)>& body,
              std::size_t grain = 1)
{
    if (pool)
        pool->parallel_for(n, body, grain);
    else
        for (std::size_t i = 0; i < n; ++i)
            body(i, 0);
}

Partition build_initial_partition(const Lts& lts, WorkerPool* pool)
{
    const auto n = lts.num_states();
    std::vector<Signature> signatures(n);
    run_loop(
        pool, n, [&](std::size_t s, unsigned) { signatures[s] = signature_of(lts, static_cast<StateId>(s)); },
        256);

    // Ids are handed out in order of each signature's smallest state.
    std::unordered_map<Signature, BlockId, SignatureHash> block_of_signature;
    std::vector<BlockId> assignment(n);
    for (StateId s = 0; s < n; ++s) {
        auto [it, inserted] =
            block_of_signature.try_emplace(std::move(signatures[s]), static_cast<BlockId>(block_of_signature.size()));
        assignment[s] = it->second;
    }
    auto partition = Partition::from_assignment(assignment);
    for (auto id : partition.block_ids())
        partition.splitters().push_back({id, false});
    return partition;
}

struct SplitsEntry {
    LabelId label;
    BlockId block;
    StateId state;

    friend auto operator<=>(const SplitsEntry&, const SplitsEntry&) = default;
};

// splitsMap of one splitter, laid out as entries sorted by
// (label, predecessor block, predecessor) with duplicates dropped, so each
// key's value set is a contiguous run.
void collect_splits(const Lts& lts, const Partition& partition, const Splitter& splitter,
                    std::vector<SplitsEntry>& out)
{
    out.clear();
    const auto assignment = partition.state_to_block();
    for (auto s : partition.block(splitter.block).members) {
        for (const auto& e : lts.in(s))
            out.push_back({e.label, assignment[e.state], e.state});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

// Calls mark(block, states) for every key whose predecessor set must be
// marked. A block that is a-stable with respect to the splitter is left
// alone, unless the splitter's largest sibling was withheld: the block may
// then be a-stable with respect to this splitter yet unstable with respect
// to the withheld piece, which is never processed itself.
template <typename MarkFn>
void for_each_mark(const Partition& partition, const Splitter& splitter, std::span<const SplitsEntry> entries,
                   MarkFn&& mark)
{
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].label == entries[i].label && entries[j].block == entries[i].block)
            ++j;
        const auto block_size = partition.block(entries[i].block).members.size();
        const auto preds = j - i;
        if (block_size > 1 && (splitter.sibling_withheld || block_size > preds))
            mark(entries[i].block, entries.subspan(i, preds));
        i = j;
    }
}

} // namespace

Partition init_phase(const Lts& lts)
{
    return build_initial_partition(lts, nullptr);
}

MarkingResult marking(const Lts& lts, Partition& partition, const Splitter& splitter)
{
    std::vector<SplitsEntry> entries;
    collect_splits(lts, partition, splitter, entries);

    MarkingResult result;
    for (const auto& e : entries) {
        const SplitsKey key{e.label, e.block};
        if (result.splits.empty() || result.splits.back().first != key)
            result.splits.push_back({key, {}});
        result.splits.back().second.push_back(e.state);
    }
    auto& block_flags = PartitionAccess::block_marked(partition);
    for_each_mark(partition, splitter, entries, [&](BlockId block, std::span<const SplitsEntry> preds) {
        const bool was_marked = block_flags[block] != 0;
        for (const auto& e : preds) {
            if (partition.mark_state(e.state))
                result.marked_states.push_back(e.state);
        }
        if (!was_marked && block_flags[block])
            result.added_blocks.push_back(block);
    });
    return result;
}

namespace {

constexpr std::size_t kNoPiece = static_cast<std::size_t>(-1);

struct SplitPlan {
    BlockId block = 0;
    /// Groups of marker-equal marked states, each sorted ascending.
    std::vector<std::vector<StateId>> pieces;
    bool block_survives = false;
    bool reduced_withheld = false;
    std::size_t withheld_piece = kNoPiece;
    BlockId first_id = 0;
    std::size_t first_slot = 0;

    bool anything_withheld() const noexcept { return reduced_withheld || withheld_piece != kNoPiece; }
    std::size_t piece_count() const noexcept { return pieces.size() + (block_survives ? 1 : 0); }
};

// Splitting, first half: groups ms(M) by marker against the round-start
// assignment, removes ms(M) from M and picks the piece to withhold. Writes
// only block M and the entries of its own states.
SplitPlan plan_split(const Lts& lts, Partition& partition, BlockId m, std::size_t round, bool omit_largest)
{
    auto& blocks = PartitionAccess::blocks(partition);
    auto& block = blocks.at(m);
    if (block.members.empty() || block.marked.empty())
        throw InternalError("splitting block " + std::to_string(m) + " without marked states");

    SplitPlan plan;
    plan.block = m;
    std::vector<StateId> ms = std::move(block.marked);
    block.marked.clear();
    std::sort(ms.begin(), ms.end());

    auto& state_flags = PartitionAccess::state_marked(partition);
    for (auto v : ms)
        state_flags[v] = 0;
    PartitionAccess::block_marked(partition)[m] = 0;

    const auto assignment = partition.state_to_block();
    std::unordered_map<StateMarker, std::size_t, StateMarkerHash> piece_of_marker;
    for (auto v : ms) {
        auto [it, inserted] = piece_of_marker.try_emplace(compute_marker(lts, assignment, v), plan.pieces.size());
        if (inserted)
            plan.pieces.emplace_back();
        plan.pieces[it->second].push_back(v);
    }

    partition.remove_members(m, ms);
    plan.block_survives = !block.members.empty();

    if (round >= 2 && omit_largest) {
        // Largest piece; ties go to the piece holding the smallest state.
        std::size_t best = 0;
        for (std::size_t k = 1; k < plan.pieces.size(); ++k) {
            const auto size = plan.pieces[k].size();
            const auto best_size = plan.pieces[best].size();
            if (size > best_size || (size == best_size && plan.pieces[k].front() < plan.pieces[best].front()))
                best = k;
        }
        const auto best_size = plan.pieces[best].size();
        const auto reduced_size = block.members.size();
        bool reduced_wins = reduced_size > best_size;
        if (reduced_size == best_size) {
            // Only reached when |M \ ms(M)| <= |ms(M)|, so the scan is cheap.
            reduced_wins = *std::min_element(block.members.begin(), block.members.end()) <
                           plan.pieces[best].front();
        }
        if (reduced_wins)
            plan.reduced_withheld = true;
        else
            plan.withheld_piece = best;
    }
    return plan;
}

struct ApplyOutcome {
    std::vector<BlockId> new_blocks;
    std::vector<Splitter> splitter_additions;
    std::vector<BlockId> removed;
};

// Splitting, second half: hands out block ids in plan order, installs the
// pieces, records their pending assignments and queues the new splitters.
ApplyOutcome apply_plans(Partition& partition, std::vector<SplitPlan>& plans, WorkerPool* pool, RunStats& stats,
                         bool instrument)
{
    auto& next = PartitionAccess::next(partition);
    if (!next.empty())
        throw InternalError("pending assignments left over from an earlier round");

    BlockId next_id = partition.id_bound();
    std::size_t slots = 0;
    for (auto& plan : plans) {
        plan.first_id = next_id;
        plan.first_slot = slots;
        next_id += static_cast<BlockId>(plan.pieces.size());
        for (const auto& piece : plan.pieces)
            slots += piece.size();
    }
    partition.reserve_ids(next_id);
    next.resize(slots);

    auto& blocks = PartitionAccess::blocks(partition);
    auto& positions = PartitionAccess::positions(partition);
    auto& counts = stats.per_state_split_count;

    run_loop(pool, plans.size(), [&](std::size_t p, unsigned) {
        auto& plan = plans[p];
        auto slot = plan.first_slot;
        for (std::size_t k = 0; k < plan.pieces.size(); ++k) {
            const auto id = static_cast<BlockId>(plan.first_id + k);
            auto& members = plan.pieces[k];
            for (std::uint32_t i = 0; i < members.size(); ++i) {
                positions[members[i]] = i;
                next[slot++] = {members[i], id};
                if (instrument && k != plan.withheld_piece)
                    ++counts[members[i]];
            }
            blocks[id].members = std::move(members);
        }
        if (instrument && plan.block_survives && !plan.reduced_withheld) {
            for (auto s : blocks[plan.block].members)
                ++counts[s];
        }
    });

    ApplyOutcome outcome;
    auto& live = PartitionAccess::live_blocks(partition);
    for (const auto& plan : plans) {
        live += plan.pieces.size();
        const bool withheld = plan.anything_withheld();
        if (plan.block_survives) {
            if (!plan.reduced_withheld)
                outcome.splitter_additions.push_back({plan.block, withheld});
        } else {
            partition.retire_block(plan.block);
            outcome.removed.push_back(plan.block);
        }
        for (std::size_t k = 0; k < plan.pieces.size(); ++k) {
            const auto id = static_cast<BlockId>(plan.first_id + k);
            outcome.new_blocks.push_back(id);
            if (k != plan.withheld_piece)
                outcome.splitter_additions.push_back({id, withheld});
        }
        if (plan.piece_count() >= 2)
            ++stats.splits;
    }
    auto& queue = partition.splitters();
    queue.insert(queue.end(), outcome.splitter_additions.begin(), outcome.splitter_additions.end());
    return outcome;
}

} // namespace

SplitResult splitting(const Lts& lts, Partition& partition, BlockId m, std::size_t round, bool omit_largest)
{
    std::vector<SplitPlan> plans;
    plans.push_back(plan_split(lts, partition, m, round, omit_largest));
    auto& marked = partition.marked_blocks();
    marked.erase(std::remove(marked.begin(), marked.end(), m), marked.end());
    RunStats scratch_stats;
    auto outcome = apply_plans(partition, plans, nullptr, scratch_stats, false);
    return {std::move(outcome.new_blocks), std::move(outcome.splitter_additions), !outcome.removed.empty()};
}

void copy_phase(Partition& partition)
{
    partition.copy_next();
}

struct Engine::Scratch {
    std::vector<SplitsEntry> entries;
    std::vector<StateId> marked;
    std::vector<BlockId> blocks;
};

Engine::Engine(const Lts& lts, EngineConfig config) : lts_(lts), config_(config)
{
    if (config_.threads == 0)
        throw Error("engine needs at least one thread");
    if (config_.threads > 1)
        pool_ = std::make_unique<WorkerPool>(config_.threads);
    scratch_.resize(config_.threads);
    if (config_.instrument)
        stats_.per_state_split_count.assign(lts.num_states(), 0);

    const auto start = Clock::now();
    partition_ = build_initial_partition(lts_, pool_.get());
    stats_.phase_times.init_ms = elapsed_ms(start);
    // A single signature class is already the answer.
    done_ = partition_.num_blocks() <= 1;
    if (done_)
        partition_.splitters().clear();
}

Engine::~Engine() = default;

void Engine::mark_phase()
{
    std::vector<Splitter> round_splitters;
    round_splitters.swap(partition_.splitters());

    if (!pool_) {
        auto& scratch = scratch_[0];
        for (const auto& splitter : round_splitters) {
            collect_splits(lts_, partition_, splitter, scratch.entries);
            for_each_mark(partition_, splitter, scratch.entries, [&](BlockId, std::span<const SplitsEntry> preds) {
                for (const auto& e : preds)
                    partition_.mark_state(e.state);
            });
        }
    } else {
        auto& state_flags = PartitionAccess::state_marked(partition_);
        auto& block_flags = PartitionAccess::block_marked(partition_);
        for (auto& scratch : scratch_) {
            scratch.marked.clear();
            scratch.blocks.clear();
        }
        pool_->parallel_for(round_splitters.size(), [&](std::size_t i, unsigned worker) {
            auto& scratch = scratch_[worker];
            const auto& splitter = round_splitters[i];
            collect_splits(lts_, partition_, splitter, scratch.entries);
            for_each_mark(partition_, splitter, scratch.entries, [&](BlockId block, std::span<const SplitsEntry> preds) {
                for (const auto& e : preds) {
                    if (std::atomic_ref<std::uint8_t>(state_flags[e.state]).exchange(1, std::memory_order_relaxed) == 0)
                        scratch.marked.push_back(e.state);
                }
                if (std::atomic_ref<std::uint8_t>(block_flags[block]).exchange(1, std::memory_order_relaxed) == 0)
                    scratch.blocks.push_back(block);
            });
        });
        // Past the barrier: move the per-worker marks into ms(M) and M.
        auto& blocks = PartitionAccess::blocks(partition_);
        const auto assignment = partition_.state_to_block();
        for (auto& scratch : scratch_) {
            for (auto s : scratch.marked)
                blocks[assignment[s]].marked.push_back(s);
            auto& marked = partition_.marked_blocks();
            marked.insert(marked.end(), scratch.blocks.begin(), scratch.blocks.end());
        }
    }
    auto& marked = partition_.marked_blocks();
    std::sort(marked.begin(), marked.end());
}

void Engine::split_phase()
{
    auto& marked = partition_.marked_blocks();
    std::vector<SplitPlan> plans(marked.size());
    const auto round = stats_.rounds + 1;
    run_loop(pool_.get(), marked.size(), [&](std::size_t i, unsigned) {
        plans[i] = plan_split(lts_, partition_, marked[i], round, config_.omit_largest);
    });
    marked.clear();
    apply_plans(partition_, plans, pool_.get(), stats_, config_.instrument);
}

void Engine::copy_phase_parallel()
{
    auto& next = PartitionAccess::next(partition_);
    auto& assignment = PartitionAccess::state_to_block(partition_);
    run_loop(
        pool_.get(), next.size(),
        [&](std::size_t i, unsigned) { assignment[next[i].first] = next[i].second; }, 4096);
    next.clear();
}

bool Engine::step()
{
    if (done_)
        return false;

    auto start = Clock::now();
    mark_phase();
    stats_.phase_times.mark_ms += elapsed_ms(start);
    if (partition_.marked_blocks().empty()) {
        done_ = true;
        partition_.splitters().clear();
        return false;
    }

    start = Clock::now();
    split_phase();
    stats_.phase_times.split_ms += elapsed_ms(start);

    start = Clock::now();
    copy_phase_parallel();
    stats_.phase_times.copy_ms += elapsed_ms(start);

    ++stats_.rounds;
    return true;
}

std::pair<Partition, RunStats> Engine::finish() &&
{
    while (step()) {
    }
    return {std::move(partition_), std::move(stats_)};
}

RunResult run(const Lts& lts, const EngineConfig& config)
{
    auto [partition, stats] = Engine(lts, config).finish();
    return {std::move(partition), std::move(stats)};
}

bool bisimilar(const Lts& lts, StateId s1, StateId s2, const EngineConfig& config)
{
    if (s1 >= lts.num_states() || s2 >= lts.num_states())
        throw Error("bisimilar: state out of range");
    if (s1 == s2)
        return true;
    const auto result = run(lts, config);
    return result.partition.block_of(s1) == result.partition.block_of(s2);
}

} // namespace bisim
