// Copyright 2026 The qloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "commands.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "nlohmann/json.hpp"

#include "qloop/resources.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = qloop::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path p = fs::temp_directory_path() / "qloop_cli_test" / (std::string(info->name()) + "_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path &p, const std::string &text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

}  // namespace

TEST(cli, exit_codes_for_bad_invocations) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
    EXPECT_EQ(run({"estimate", "--L", "ten"}).code, 2);
    EXPECT_EQ(run({"estimate", "--format", "xml"}).code, 2);
}

TEST(cli, estimate_defaults) {
    const fs::path dir = scratch("out");
    const Result r = run({"estimate", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j, json::parse(slurp(dir / "estimate.json")));
    const double years = j["totals"]["quantum_s"].get<double>() / qloop::kSecondsPerYear;
    EXPECT_NEAR(years, 2.8, 0.05 * 2.8);
    EXPECT_EQ(j["params"]["N"].get<uint64_t>(), 200u);
}

TEST(cli, estimate_classical_loop_length) {
    const Result r = run({"estimate", "--L", "14", "--out", scratch("out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["params"]["L"].get<uint64_t>(), 14u);
    EXPECT_EQ(j["params"]["N"].get<uint64_t>(), 280u);
    EXPECT_GT(j["totals"]["quantum_s"].get<double>(), 0.0);
}

TEST(cli, estimate_precision_increases_cost) {
    const Result a = run({"estimate", "--bprime", "16", "--out", scratch("a").string()});
    const Result b = run({"estimate", "--bprime", "32", "--out", scratch("b").string()});
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    const json ja = json::parse(a.out);
    const json jb = json::parse(b.out);
    EXPECT_GT(jb["totals"]["quantum_s"].get<double>(), ja["totals"]["quantum_s"].get<double>());
    EXPECT_GT(jb["qubits"]["logical"].get<uint64_t>(), ja["qubits"]["logical"].get<uint64_t>());
}

TEST(cli, estimate_validation_names_field) {
    const Result r = run({"estimate", "--bprime", "0", "--out", scratch("out").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bprime"), std::string::npos);
    EXPECT_EQ(run({"estimate", "--mode", "sideways"}).code, 2);
    EXPECT_EQ(run({"estimate", "--variant", "euler"}).code, 2);
}

TEST(cli, estimate_csv_format) {
    const Result r = run({"estimate", "--format", "csv", "--out", scratch("out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("key,value\n", 0), 0u);
    EXPECT_NE(r.out.find("steps,89443"), std::string::npos);
}

TEST(cli, tables_written) {
    const fs::path dir = scratch("nested") / "tables";
    const Result r = run({"tables", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char *f : {"table2.csv", "table3.csv", "table4.csv", "table5.csv", "table6.csv", "report.json"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const std::string t5 = slurp(dir / "table5.csv");
    EXPECT_NE(t5.find("0.06 s"), std::string::npos);
    EXPECT_NE(t5.find("0.004 s"), std::string::npos);
}

TEST(cli, tables_rescale_with_toffoli_time) {
    const fs::path a = scratch("a");
    const fs::path b = scratch("b");
    ASSERT_EQ(run({"tables", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"tables", "--toffoli-time", "1e-4", "--out", b.string()}).code, 0);
    const json ja = json::parse(slurp(a / "report.json"));
    const json jb = json::parse(slurp(b / "report.json"));
    const double f = 1e-4 / 1.7e-4;
    for (size_t i = 0; i < ja["table2"].size(); ++i) {
        EXPECT_NEAR(jb["table2"][i]["time_b32_s"].get<double>(), f * ja["table2"][i]["time_b32_s"].get<double>(),
                    1e-12);
    }
    for (size_t i = 0; i < ja["table3"].size(); ++i) {
        EXPECT_NEAR(jb["table3"][i]["time_s"].get<double>(), f * ja["table3"][i]["time_s"].get<double>(), 1e-12);
    }
    for (size_t i = 0; i < ja["table5"].size(); ++i) {
        const double wa = ja["table5"][i]["W"]["seconds"].get<double>();
        EXPECT_NEAR(jb["table5"][i]["W"]["seconds"].get<double>(), f * wa, 1e-9 * wa);
    }
}

TEST(cli, output_path_blocked_is_io_error) {
    const fs::path blocker = scratch("file");
    spit(blocker, "x");
    EXPECT_EQ(run({"tables", "--out", (blocker / "sub").string()}).code, 4);
}

TEST(cli, config_file_and_overrides) {
    const fs::path cfg = scratch("cfg") / "c.json";
    spit(cfg, R"({"L": 14, "bprime": 16})");
    Result r = run({"estimate", "--config", cfg.string(), "--L", "12", "--out", scratch("out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["params"]["L"].get<uint64_t>(), 12u);

    spit(cfg, R"({"L": 14, "colour": "blue"})");
    r = run({"estimate", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("colour"), std::string::npos);

    spit(cfg, "{not json");
    EXPECT_EQ(run({"estimate", "--config", cfg.string()}).code, 2);
    EXPECT_EQ(run({"estimate", "--config", (scratch("none") / "missing.json").string()}).code, 4);
}

TEST(cli, fold_requires_seed) {
    const Result r = run({"fold", "--L", "1", "--b1", "1", "--b2", "1", "--out", scratch("out").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST(cli, fold_flat_accepts_everything) {
    const fs::path dir = scratch("out");
    const Result r = run({"fold", "--L", "3", "--b1", "2", "--b2", "1", "--flat-energy", "--steps", "500", "--seed",
                          "3", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json meta = json::parse(slurp(dir / "metadata.json"));
    EXPECT_EQ(meta["chains"][0]["acceptance_rate"].get<double>(), 1.0);
    EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(dir / "final.xyz"));
    EXPECT_TRUE(fs::exists(dir / "best.xyz"));
    EXPECT_EQ(slurp(dir / "trajectory.csv").rfind("step,energy,accepted\n", 0), 0u);
}

TEST(cli, fold_is_deterministic) {
    const std::vector<std::string> base = {"fold",   "--L",      "2",     "--b1",   "2",    "--b2",
                                           "1",      "--steps",  "2000",  "--seed", "11",   "--dump-states",
                                           "--thin", "3",        "--chains", "2"};
    const fs::path a = scratch("a");
    const fs::path b = scratch("b");
    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", a.string()});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", b.string()});
    const Result ra = run(args_a);
    const Result rb = run(args_b);
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(ra.out, rb.out);
    for (const char *f : {"trajectory_0.csv", "trajectory_1.csv", "final.xyz", "best.xyz", "metadata.json"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_NE(slurp(a / "trajectory_0.csv"), slurp(a / "trajectory_1.csv"));
}

TEST(cli, fold_exact_check_on_toy) {
    const fs::path dir = scratch("out");
    const Result r = run({"fold", "--L", "1", "--b1", "2", "--b2", "2", "--steps", "100000", "--temperature", "2.0",
                          "--seed", "5", "--exact-check", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json meta = json::parse(slurp(dir / "metadata.json"));
    EXPECT_LT(meta["exact_check"]["tv_distance"].get<double>(), 0.02);
    EXPECT_EQ(meta["exact_check"]["states"].get<uint64_t>(), 16u);
}

TEST(cli, fold_with_table_files) {
    const fs::path dir = scratch("out");
    spit(dir / "bb.csv", "index,phi_deg,psi_deg\n0,-60,-45\n1,-120,130\n");
    spit(dir / "chi.csv", "index,chi1_deg\n0,60\n1,180\n2,-60\n3,-170\n");
    const Result r = run({"fold", "--L", "2", "--backbone-table", (dir / "bb.csv").string(), "--chi1-table",
                          (dir / "chi.csv").string(), "--steps", "200", "--seed", "1", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json meta = json::parse(r.out);
    EXPECT_EQ(meta["b1"].get<unsigned>(), 1u);
    EXPECT_EQ(meta["b2"].get<unsigned>(), 2u);
    EXPECT_EQ(run({"fold", "--L", "2", "--backbone-table", (dir / "nope.csv").string(), "--chi1-table",
                   (dir / "chi.csv").string(), "--seed", "1", "--out", dir.string()})
                  .code,
              4);
}

TEST(cli, refold_report) {
    const fs::path dir = scratch("out");
    const Result r = run({"refold", "--L", "3", "--b1", "3", "--b2", "2", "--state", "1:0,7:3,2:2", "--report",
                          "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json rep = json::parse(slurp(dir / "dihedrals.json"));
    EXPECT_LT(rep["max_error"].get<double>(), 1e-9);
    EXPECT_TRUE(fs::exists(dir / "refold.xyz"));
    EXPECT_NE(r.out.find("max_dihedral_error"), std::string::npos);
}

TEST(cli, refold_bad_input) {
    const fs::path dir = scratch("out");
    EXPECT_EQ(run({"refold", "--L", "2", "--b1", "1", "--b2", "1", "--state", "0:0,2:0", "--out", dir.string()}).code,
              2);
    EXPECT_EQ(run({"refold", "--L", "2", "--b1", "1", "--b2", "1", "--state", "0:0", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"refold", "--L", "2", "--b1", "1", "--b2", "1", "--random", "--out", dir.string()}).code, 2);
    EXPECT_EQ(
        run({"refold", "--L", "2", "--b1", "1", "--b2", "1", "--random", "--seed", "4", "--out", dir.string()}).code, 0);
}

TEST(cli, walk_two_level) {
    const fs::path dir = scratch("out");
    const Result r = run({"walk", "--instance", "two-level", "--seed", "2", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(slurp(dir / "spectrum.json"));
    EXPECT_EQ(j["sigma"].get<int>(), -1);
    EXPECT_LT(j["stationary_residual"].get<double>(), 1e-8);
    EXPECT_LT(j["match_signed"]["max_residual"].get<double>(), 1e-8);
    EXPECT_LT(j["max_unitarity_error"].get<double>(), 1e-10);
    EXPECT_NEAR(j["qpe"]["pi"]["success_probability"].get<double>(), 1.0, 1e-10);
    EXPECT_LT(j["qpe"]["uniform"]["tv_distance_exact"].get<double>(), 0.01);
}

TEST(cli, walk_is_deterministic) {
    const fs::path a = scratch("a");
    const fs::path b = scratch("b");
    ASSERT_EQ(run({"walk", "--instance", "random", "--L", "1", "--b1", "2", "--b2", "1", "--seed", "9", "--out",
                   a.string()})
                  .code,
              0);
    ASSERT_EQ(run({"walk", "--instance", "random", "--L", "1", "--b1", "2", "--b2", "1", "--seed", "9", "--out",
                   b.string()})
                  .code,
              0);
    EXPECT_EQ(slurp(a / "spectrum.json"), slurp(b / "spectrum.json"));
}

TEST(cli, walk_errors) {
    const fs::path dir = scratch("out");
    EXPECT_EQ(run({"walk", "--instance", "flat", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"walk", "--instance", "spiral", "--seed", "1", "--out", dir.string()}).code, 2);
    EXPECT_EQ(run({"walk", "--instance", "flat", "--L", "3", "--b1", "1", "--b2", "0", "--seed", "1", "--out",
                   dir.string()})
                  .code,
              2);
    EXPECT_EQ(run({"walk", "--instance", "flat", "--L", "4", "--b1", "2", "--b2", "2", "--seed", "1", "--out",
                   dir.string()})
                  .code,
              2);
    EXPECT_EQ(run({"walk", "--instance", "flat", "--resolution", "3", "--seed", "1", "--out", dir.string()}).code, 3);
}

TEST(cli, binary_exit_codes) {
    const std::string bin = QLOOP_CLI_PATH;
    const fs::path dir = scratch("out");
    const int ok = std::system((bin + " estimate --out " + dir.string() + " > /dev/null").c_str());
    EXPECT_EQ(WEXITSTATUS(ok), 0);
    const int bad = std::system((bin + " estimate --b 0 > /dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(bad), 2);
}
