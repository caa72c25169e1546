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

#ifndef BISIM_BENCH_HPP
#define BISIM_BENCH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bisim/lts.hpp"

namespace bisim {

/// Raised when runs at different thread counts disagree on the partition.
class PartitionMismatch : public Error {
public:
    using Error::Error;
};

struct BenchOptions {
    std::vector<unsigned> threads{1, 2, 4, 8};
    unsigned warmup = 2;
    unsigned measured = 3;
};

struct BenchRow {
    std::string input;
    std::size_t states = 0;
    std::size_t transitions = 0;
    unsigned threads = 1;
    unsigned warmup = 0;
    unsigned measured = 0;
    double mean_ms = 0;
    /// Mean single-thread time over mean time at this thread count.
    double speedup = 1.0;
    std::size_t rounds = 0;
    std::size_t splits = 0;
    std::uint32_t max_split_count = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;

    /// input,states,transitions,threads,mean_ms,speedup,rounds,max_split_count
    std::string to_csv() const;
    std::string to_json() const;
};

struct BenchInput {
    std::string name;
    Lts lts;
};

/// Times the engine alone (no parsing or validation): `warmup` discarded
/// runs, then the mean of `measured` runs, per input and thread count. The
/// single-thread mean is always measured as the speedup baseline. Throws
/// PartitionMismatch if any thread count yields a different partition.
BenchReport run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& options);

} // namespace bisim

#endif // BISIM_BENCH_HPP
