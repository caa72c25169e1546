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

#ifndef BISIM_ENGINE_HPP
#define BISIM_ENGINE_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bisim/lts.hpp"
#include "bisim/partition.hpp"
#include "bisim/tuple_index.hpp"
#include "bisim/worker_pool.hpp"

namespace bisim {

/// Raised when the engine detects a broken internal invariant.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Summary of a state's outgoing edges against a block assignment: for each
/// label, the set of blocks reached. Stored flat as strictly sorted
/// (label, block) pairs; the digest is fixed at construction.
class StateMarker {
public:
    StateMarker() = default;
    /// Accepts pairs in any order, duplicates allowed.
    explicit StateMarker(std::vector<std::pair<LabelId, BlockId>> pairs);

    std::span<const std::pair<LabelId, BlockId>> pairs() const noexcept { return pairs_; }
    std::uint64_t hash() const noexcept { return hash_; }
    /// Grouped form: one entry per label with its sorted block ids.
    std::vector<MarkerEntry> entries() const;

    friend bool operator==(const StateMarker& a, const StateMarker& b) noexcept
    {
        return a.hash_ == b.hash_ && a.pairs_ == b.pairs_;
    }

private:
    std::vector<std::pair<LabelId, BlockId>> pairs_;
    std::uint64_t hash_ = 0;
};

struct StateMarkerHash {
    std::size_t operator()(const StateMarker& m) const noexcept { return m.hash(); }
};

StateMarker compute_marker(const Lts& lts, std::span<const BlockId> state_to_block, StateId v);

struct EngineConfig {
    unsigned threads = 1;
    /// Withhold the largest piece of every split from the splitter queue
    /// (from the second round on).
    bool omit_largest = true;
    /// Maintain per-state split counters.
    bool instrument = false;
};

struct PhaseTimes {
    double init_ms = 0;
    double mark_ms = 0;
    double split_ms = 0;
    double copy_ms = 0;
};

struct RunStats {
    /// Completed Mark-Split-Copy rounds.
    std::size_t rounds = 0;
    /// Marked blocks that ended up in two or more pieces.
    std::size_t splits = 0;
    /// Per state: how many times it was placed in a piece queued as a
    /// splitter. Empty unless instrumentation is on.
    std::vector<std::uint32_t> per_state_split_count;
    PhaseTimes phase_times;

    std::uint32_t max_per_state_split_count() const;
    /// {"rounds", "splits", "max_per_state_split_count", "phase_times_ms"}
    std::string to_json() const;
};

/// Groups states by signature. Every block becomes a splitter; block ids
/// follow the smallest member.
Partition init_phase(const Lts& lts);

struct MarkingResult {
    /// a-predecessor sets of the splitter, keyed by (label, predecessor block).
    std::vector<std::pair<SplitsKey, std::vector<StateId>>> splits;
    /// Blocks newly added to the marked set by this call.
    std::vector<BlockId> added_blocks;
    /// States newly marked by this call.
    std::vector<StateId> marked_states;
};

/// Processes one splitter against the partition's current assignment and
/// records the marks in the partition.
MarkingResult marking(const Lts& lts, Partition& partition, const Splitter& splitter);

struct SplitResult {
    /// New block ids in creation order.
    std::vector<BlockId> new_blocks;
    /// Blocks queued as splitters (the reduced block first if queued).
    std::vector<Splitter> splitter_additions;
    /// True when the marked block was emptied and removed.
    bool block_removed = false;
};

/// Splits marked block `m` by the markers of its marked states. `round` is
/// the 1-based Mark-Split-Copy pass. Throws InternalError when `m` has no
/// marked states.
SplitResult splitting(const Lts& lts, Partition& partition, BlockId m, std::size_t round, bool omit_largest);

/// Publishes pending assignments into state_to_block.
void copy_phase(Partition& partition);

/// Step-wise driver. Every round runs its three phases to completion, each
/// behind a barrier.
class Engine {
public:
    Engine(const Lts& lts, EngineConfig config);
    ~Engine();

    const Partition& partition() const noexcept { return partition_; }
    const RunStats& stats() const noexcept { return stats_; }
    std::size_t round() const noexcept { return stats_.rounds; }

    /// One Mark-Split-Copy round. Returns false once marking finds nothing
    /// to split; the partition is then final.
    bool step();

    /// Steps to the fixpoint and hands out the result.
    std::pair<Partition, RunStats> finish() &&;

private:
    struct Scratch;

    void mark_phase();
    void split_phase();
    void copy_phase_parallel();

    const Lts& lts_;
    EngineConfig config_;
    std::unique_ptr<WorkerPool> pool_;
    Partition partition_;
    RunStats stats_;
    std::vector<Scratch> scratch_;
    bool done_ = false;
};

struct RunResult {
    Partition partition;
    RunStats stats;
};

/// Coarsest bisimulation partition of `lts`.
RunResult run(const Lts& lts, const EngineConfig& config = {});

/// True iff `s1` and `s2` are bisimilar.
bool bisimilar(const Lts& lts, StateId s1, StateId s2, const EngineConfig& config = {});

} // namespace bisim

#endif // BISIM_ENGINE_HPP
