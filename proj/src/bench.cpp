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

#include "bisim/bench.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "bisim/engine.hpp"

namespace bisim {

namespace {

struct Timing {
    double mean_ms = 0;
    CanonicalForm form;
};

Timing time_engine(const Lts& lts, unsigned threads, unsigned warmup, unsigned measured)
{
    EngineConfig config;
    config.threads = threads;
    Timing timing;
    double total = 0;
    for (unsigned i = 0; i < warmup + measured; ++i) {
        const auto start = std::chrono::steady_clock::now();
        auto result = run(lts, config);
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (i >= warmup)
            total += ms;
        if (i + 1 == warmup + measured)
            timing.form = canonical_form(result.partition);
    }
    timing.mean_ms = total / measured;
    return timing;
}

} // namespace

BenchReport run_bench(const std::vector<BenchInput>& inputs, const BenchOptions& options)
{
    if (options.threads.empty())
        throw Error("bench: thread list is empty");
    if (options.measured == 0)
        throw Error("bench: at least one measured run is required");
    for (auto t : options.threads) {
        if (t == 0)
            throw Error("bench: thread counts must be positive");
    }

    BenchReport report;
    for (const auto& input : inputs) {
        // Statistics are thread-count independent; take them from one
        // instrumented run outside the timed loop.
        EngineConfig probe;
        probe.instrument = true;
        const auto reference = run(input.lts, probe);
        const auto reference_form = canonical_form(reference.partition);

        const auto baseline = time_engine(input.lts, 1, options.warmup, options.measured);
        if (baseline.form != reference_form)
            throw PartitionMismatch("bench: " + input.name + ": single-thread runs disagree");

        for (auto t : options.threads) {
            const auto timing = t == 1 ? baseline : time_engine(input.lts, t, options.warmup, options.measured);
            if (timing.form != reference_form)
                throw PartitionMismatch("bench: " + input.name + ": partition at " + std::to_string(t) +
                                        " threads differs from the single-thread partition");
            BenchRow row;
            row.input = input.name;
            row.states = input.lts.num_states();
            row.transitions = input.lts.num_transitions();
            row.threads = t;
            row.warmup = options.warmup;
            row.measured = options.measured;
            row.mean_ms = timing.mean_ms;
            row.speedup = t == 1 ? 1.0 : baseline.mean_ms / timing.mean_ms;
            row.rounds = reference.stats.rounds;
            row.splits = reference.stats.splits;
            row.max_split_count = reference.stats.max_per_state_split_count();
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string BenchReport::to_csv() const
{
    std::ostringstream out;
    out << "input,states,transitions,threads,mean_ms,speedup,rounds,max_split_count\n";
    out << std::fixed;
    for (const auto& r : rows) {
        out << r.input << ',' << r.states << ',' << r.transitions << ',' << r.threads << ',' << std::setprecision(3)
            << r.mean_ms << ',' << std::setprecision(3) << r.speedup << ',' << r.rounds << ',' << r.max_split_count
            << '\n';
    }
    return out.str();
}

std::string BenchReport::to_json() const
{
    auto rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"input", r.input},
                             {"states", r.states},
                             {"transitions", r.transitions},
                             {"threads", r.threads},
                             {"warmup", r.warmup},
                             {"measured", r.measured},
                             {"mean_ms", r.mean_ms},
                             {"speedup", r.speedup},
                             {"rounds", r.rounds},
                             {"splits", r.splits},
                             {"max_split_count", r.max_split_count}});
    }
    return nlohmann::json{{"rows", rows_json}}.dump(2);
}

} // namespace bisim
