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

#include "bisim/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "bisim/bench.hpp"
#include "bisim/engine.hpp"
#include "bisim/lts.hpp"
#include "bisim/oracle.hpp"
#include "bisim/partition.hpp"
#include "bisim/tuple_index.hpp"

namespace bisim {

namespace {

/// Validation failure of a produced partition.
class VerifyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

/// Writes `text` to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw Error("cannot open '" + path + "' for writing");
    file << text;
    if (!file.flush())
        throw Error("write to '" + path + "' failed");
}

void verify_partition(const Lts& lts, const Partition& partition)
{
    partition.check_invariants();
    if (auto v = find_instability(lts, partition))
        throw VerifyError("verify: partition is not stable (block " + std::to_string(v->source) + ")");
    if (auto v = find_transfer_violation(lts, partition))
        throw VerifyError("verify: transfer fails for states " + std::to_string(v->mover) + " and " +
                          std::to_string(v->partner));
}

struct MinOptions {
    std::string input;
    std::string output;
    std::string partition_out;
    std::string partition_format = "text";
    unsigned threads = 1;
    bool verify = false;
};

int cmd_min(const MinOptions& o, Streams io)
{
    const auto lts = read_aut_file(o.input);
    EngineConfig config;
    config.threads = o.threads;
    auto result = run(lts, config);
    if (o.verify)
        verify_partition(lts, result.partition);
    const auto q = quotient(lts, result.partition);
    if (o.verify && !quotient_is_sound(lts, q))
        throw VerifyError("verify: quotient is not bisimilar to the input");

    emit(o.output, write_aut_string(q.lts), io.out);
    if (!o.partition_out.empty()) {
        const auto form = canonical_form(result.partition);
        std::string text;
        if (o.partition_format == "json") {
            text = partition_to_json(form) + "\n";
        } else {
            std::ostringstream buffer;
            write_partition_text(buffer, form);
            text = buffer.str();
        }
        emit(o.partition_out, text, io.out);
    }
    auto& summary = o.output.empty() || o.output == "-" ? io.err : io.out;
    summary << "states " << lts.num_states() << " transitions " << lts.num_transitions() << " blocks "
            << result.partition.num_blocks() << " rounds " << result.stats.rounds << "\n";
    return kExitOk;
}

struct CheckOptions {
    std::string input;
    std::uint64_t s1 = 0;
    std::uint64_t s2 = 0;
    unsigned threads = 1;
    bool oracle = false;
    bool verify = false;
};

int cmd_check(const CheckOptions& o, Streams io)
{
    const auto lts = read_aut_file(o.input);
    if (o.s1 >= lts.num_states() || o.s2 >= lts.num_states())
        throw Error("state id out of range (the LTS has " + std::to_string(lts.num_states()) + " states)");
    const auto s1 = static_cast<StateId>(o.s1);
    const auto s2 = static_cast<StateId>(o.s2);

    EngineConfig config;
    config.threads = o.threads;
    const auto result = run(lts, config);
    if (o.verify)
        verify_partition(lts, result.partition);
    const bool verdict = result.partition.block_of(s1) == result.partition.block_of(s2);
    if (o.oracle) {
        const auto reference = oracle_partition(lts);
        if ((reference.block_of(s1) == reference.block_of(s2)) != verdict)
            throw VerifyError("oracle disagrees with the engine");
        if (canonical_form(reference) != canonical_form(result.partition))
            throw VerifyError("oracle partition differs from the engine partition");
    }
    io.out << (verdict ? "bisimilar" : "not-bisimilar") << "\n";
    return verdict ? kExitOk : kExitNotBisimilar;
}

struct BenchCliOptions {
    std::vector<std::string> inputs;
    BenchOptions bench;
    std::string format = "csv";
    std::string output;
};

int cmd_bench(const BenchCliOptions& o, Streams io)
{
    std::vector<BenchInput> inputs;
    inputs.reserve(o.inputs.size());
    for (const auto& path : o.inputs)
        inputs.push_back({std::filesystem::path(path).filename().string(), read_aut_file(path)});
    const auto report = run_bench(inputs, o.bench);
    emit(o.output, o.format == "json" ? report.to_json() + "\n" : report.to_csv(), io.out);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Streams io{out, err};
    CLI::App app{"Bisimulation minimization of labelled transition systems", "bisim"};
    app.require_subcommand(1);

    unsigned threads = 1;
    if (const char* env = std::getenv("BISIM_THREADS"); env && *env) {
        const std::string_view text(env);
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), threads);
        if (ec != std::errc() || end != text.data() + text.size() || threads == 0 || threads > 1024) {
            err << "bisim: BISIM_THREADS must be an integer in [1, 1024], got '" << text << "'\n";
            return kExitUsage;
        }
    }
    auto add_threads = [&threads](CLI::App* sub) {
        sub->add_option("--threads", threads, "Worker threads (default $BISIM_THREADS or 1)")
            ->check(CLI::Range(1u, 1024u));
    };

    std::function<int()> action;

    MinOptions min;
    auto* min_cmd = app.add_subcommand("min", "Write the bisimulation quotient of an .aut file");
    min_cmd->add_option("input", min.input, "Input .aut file")->required();
    min_cmd->add_option("-o,--output", min.output, "Output .aut file (default stdout)");
    min_cmd->add_option("--partition", min.partition_out, "Also write the final partition here");
    min_cmd->add_option("--partition-format", min.partition_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    min_cmd->add_flag("--verify", min.verify, "Re-validate the partition and the quotient");
    add_threads(min_cmd);
    min_cmd->callback([&] {
        min.threads = threads;
        action = [&] { return cmd_min(min, io); };
    });

    CheckOptions check;
    auto* check_cmd = app.add_subcommand("check", "Decide whether two states are bisimilar");
    check_cmd->add_option("input", check.input, "Input .aut file")->required();
    check_cmd->add_option("s1", check.s1, "First state")->required();
    check_cmd->add_option("s2", check.s2, "Second state")->required();
    check_cmd->add_flag("--oracle", check.oracle, "Cross-check against the naive fixpoint");
    check_cmd->add_flag("--verify", check.verify, "Re-validate the partition");
    add_threads(check_cmd);
    check_cmd->callback([&] {
        check.threads = threads;
        action = [&] { return cmd_check(check, io); };
    });

    std::string gen_output;
    auto* gen_cmd = app.add_subcommand("gen", "Generate an .aut file");
    gen_cmd->require_subcommand(1);
    gen_cmd->add_option("-o,--output", gen_output, "Output file (default stdout)");

    std::size_t chain_n = 0;
    auto* chain_cmd = gen_cmd->add_subcommand("chain", "Two disjoint a-chains of N states each");
    chain_cmd->add_option("n", chain_n, "Chain length")->required();
    chain_cmd->add_option("-o,--output", gen_output, "Output file (default stdout)");
    chain_cmd->callback([&] { action = [&] { emit(gen_output, write_aut_string(gen_chain(chain_n)), io.out); return int{kExitOk}; }; });

    std::size_t random_states = 0;
    std::size_t random_labels = 0;
    std::size_t random_transitions = 0;
    std::uint64_t seed = 0;
    auto* random_cmd = gen_cmd->add_subcommand("random", "Uniform random LTS");
    random_cmd->add_option("states", random_states, "Number of states")->required();
    random_cmd->add_option("labels", random_labels, "Number of labels")->required();
    random_cmd->add_option("transitions", random_transitions, "Number of distinct transitions")->required();
    random_cmd->add_option("--seed", seed, "Random seed");
    random_cmd->add_option("-o,--output", gen_output, "Output file (default stdout)");
    random_cmd->callback([&] {
        action = [&] {
            emit(gen_output, write_aut_string(gen_random(random_states, random_labels, random_transitions, seed)),
                 io.out);
            return int{kExitOk};
        };
    });

    BenchCliOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time the engine across thread counts");
    bench_cmd->add_option("inputs", bench.inputs, "Input .aut files")->required();
    bench_cmd->add_option("--threads", bench.bench.threads, "Comma separated thread counts")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--warmup", bench.bench.warmup, "Discarded runs per cell");
    bench_cmd->add_option("--measured", bench.bench.measured, "Averaged runs per cell")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--format", bench.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    bench_cmd->add_option("-o,--output", bench.output, "Report file (default stdout)");
    bench_cmd->callback([&] { action = [&] { return cmd_bench(bench, io); }; });

    std::uint64_t domain = 12;
    std::size_t samples = 10000;
    std::uint64_t index_seed = 1;
    auto* index_cmd = app.add_subcommand("tuple-index", "Self-check of the set indexing");
    index_cmd->group("");
    index_cmd->add_option("--domain", domain, "Subsets of {0..domain-1}")->check(CLI::Range(1, 20));
    index_cmd->add_option("--samples", samples, "Random multisets");
    index_cmd->add_option("--seed", index_seed, "Random seed");
    index_cmd->callback([&] {
        action = [&] {
            const auto result = verify_tuple_index(domain, samples, index_seed);
            if (!result.ok()) {
                io.err << "bisim: tuple-index: " << result.failure << "\n";
                return int{kExitInternal};
            }
            io.out << "subsets " << result.subsets << " distinct, samples " << result.samples << " invariant\n";
            return int{kExitOk};
        };
    });

    try {
        std::vector<std::string> args;
        for (int i = argc - 1; i > 0; --i)
            args.emplace_back(argv[i]);
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "bisim: " << e.what() << "\n";
        if (e.get_exit_code() == 0)
            return kExitOk;
        return kExitUsage;
    }

    try {
        return action ? action() : int{kExitUsage};
    } catch (const VerifyError& e) {
        err << "bisim: " << e.what() << "\n";
        return kExitInternal;
    } catch (const InternalError& e) {
        err << "bisim: internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const PartitionMismatch& e) {
        err << "bisim: " << e.what() << "\n";
        return kExitInternal;
    } catch (const ParseError& e) {
        err << "bisim: parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "bisim: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        err << "bisim: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace bisim
