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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "bisim/bench.hpp"
#include "bisim/cli.hpp"
#include "bisim/lts.hpp"

using namespace bisim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "bisim");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("bisim-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("gen")
{
    TempDir dir;
    auto r = cli({"gen", "chain", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.starts_with("des (0,4,6)\n"));

    CHECK(cli({"gen", "random", "16", "3", "40", "--seed", "7", "-o", dir / "a.aut"}).code == 0);
    CHECK(cli({"gen", "random", "16", "3", "40", "--seed", "7", "-o", dir / "b.aut"}).code == 0);
    CHECK(slurp(dir / "a.aut") == slurp(dir / "b.aut"));
    CHECK(read_aut_file(dir / "a.aut").num_transitions() == 40);

    r = cli({"gen", "chain", "0"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK(cli({"gen", "random", "2", "1", "9"}).code == 2);
}

TEST_CASE("min")
{
    TempDir dir;
    cli({"gen", "chain", "3", "-o", dir / "c3.aut"});
    auto r = cli({"min", dir / "c3.aut", "-o", dir / "q.aut", "--verify"});
    CHECK(r.code == 0);
    CHECK(r.out.find("blocks 3") != std::string::npos);
    const auto q = read_aut_file(dir / "q.aut");
    CHECK(q.num_states() == 3);
    CHECK(q.num_transitions() == 2);

    // Already minimal: same counts again.
    r = cli({"min", dir / "q.aut", "-o", dir / "qq.aut", "--verify", "--threads", "4"});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "qq.aut") == slurp(dir / "q.aut"));

    r = cli({"min", dir / "c3.aut", "-o", dir / "q2.aut", "--verify", "--partition", dir / "p.json",
             "--partition-format", "json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "p.json")) == nlohmann::json::parse("[[0,3],[1,4],[2,5]]"));

    CHECK(cli({"min", dir / "missing.aut"}).code == 2);
    std::ofstream(dir / "bad.aut") << "des (0,1,2)\n(0,\"a\",5)\n";
    r = cli({"min", dir / "bad.aut"});
    CHECK(r.code == 2);
    CHECK(r.err.find("out of range") != std::string::npos);
}

TEST_CASE("check")
{
    TempDir dir;
    cli({"gen", "chain", "5", "-o", dir / "c.aut"});
    auto r = cli({"check", dir / "c.aut", "0", "5", "--oracle", "--verify"});
    CHECK(r.code == 0);
    CHECK(r.out == "bisimilar\n");
    CHECK(cli({"check", dir / "c.aut", "2", "2", "--verify"}).code == 0);
    r = cli({"check", dir / "c.aut", "0", "1", "--oracle", "--verify"});
    CHECK(r.code == 1);
    CHECK(r.out == "not-bisimilar\n");
    CHECK(cli({"check", dir / "c.aut", "0", "10"}).code == 2);
    CHECK(cli({"check", dir / "c.aut", "0"}).code == 2);
}

TEST_CASE("thread count from the environment")
{
    TempDir dir;
    cli({"gen", "chain", "4", "-o", dir / "c.aut"});
    ::setenv("BISIM_THREADS", "3", 1);
    CHECK(cli({"check", dir / "c.aut", "0", "4", "--verify"}).code == 0);
    ::setenv("BISIM_THREADS", "zero", 1);
    CHECK(cli({"check", dir / "c.aut", "0", "4"}).code == 2);
    ::unsetenv("BISIM_THREADS");
}

TEST_CASE("usage errors")
{
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"min", "x.aut", "--threads", "0"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("bench")
{
    TempDir dir;
    cli({"gen", "random", "200", "3", "600", "--seed", "1", "-o", dir / "r.aut"});
    auto r = cli({"bench", dir / "r.aut", "--threads", "1", "--warmup", "0", "--measured", "1"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string header;
    std::string row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "input,states,transitions,threads,mean_ms,speedup,rounds,max_split_count");
    CHECK(row.starts_with("r.aut,200,600,1,"));
    CHECK(row.find(",1.000,") != std::string::npos);
    std::string extra;
    CHECK_FALSE(std::getline(lines, extra));

    r = cli({"bench", dir / "r.aut", "--threads", "1,4", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j.at("rows").size() == 2);
    CHECK(j["rows"][0]["speedup"] == 1.0);
    CHECK(j["rows"][1]["threads"] == 4);
    CHECK(j["rows"][0]["warmup"] == 2);
    CHECK(j["rows"][0]["measured"] == 3);

    CHECK(cli({"bench", dir / "r.aut", "--measured", "0"}).code == 2);
}

TEST_CASE("run_bench agreement gate and protocol")
{
    std::vector<BenchInput> inputs{{"chain", gen_chain(50)}};
    BenchOptions options;
    options.threads = {1};
    const auto report = run_bench(inputs, options);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].speedup == 1.0);
    CHECK(report.rows[0].warmup + report.rows[0].measured == 5);
    CHECK(report.rows[0].rounds > 0);

    options.threads = {};
    CHECK_THROWS_AS(run_bench(inputs, options), Error);
}

TEST_CASE("tuple-index self-check")
{
    const auto r = cli({"tuple-index", "--samples", "500"});
    CHECK(r.code == 0);
    CHECK(r.out.find("4095") != std::string::npos);
}
