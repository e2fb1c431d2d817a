// Copyright 2026 The estlab Authors
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


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "estlab_cli.hpp"

namespace fs = std::filesystem;
using namespace estlab;
using namespace estlab::cli;

namespace {

struct Argv {
    explicit Argv(std::vector<std::string> a) : args(std::move(a)) {
        args.insert(args.begin(), "estlab");
        for (auto &s : args) ptrs.push_back(s.c_str());
    }
    int argc() const { return static_cast<int>(ptrs.size()); }
    const char *const *argv() const { return ptrs.data(); }
    std::vector<std::string> args;
    std::vector<const char *> ptrs;
};

RunConfig parse(std::vector<std::string> a) {
    const Argv v(std::move(a));
    return parse_args(v.argc(), v.argv());
}

int run_cli(std::vector<std::string> a, std::string *err_text = nullptr) {
    const Argv v(std::move(a));
    std::ostringstream err;
    const int rc = estlab::cli::main(v.argc(), v.argv(), err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string data_section(const std::string &csv) { return csv.substr(csv.find('\n') + 1); }

class CliFiles : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("estlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }
    std::size_t file_count() const {
        return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir_), fs::directory_iterator()));
    }
    fs::path dir_;
};

} // namespace

TEST(ParseArgs, Table1HappyPath) {
    const auto cfg = parse({"table1", "--a", "1", "--c", "0.05", "--n", "1000", "--gamma", "0.005", "-o", "t1.csv"});
    EXPECT_EQ(cfg.command, Command::Table1);
    EXPECT_EQ(cfg.n, 1000u);
    EXPECT_EQ(cfg.gamma, 0.005);
    EXPECT_EQ(cfg.output, "t1.csv");
}

TEST(ParseArgs, Fig7Defaults) {
    const auto cfg = parse({"figure", "fig7", "--scheme", "periodic", "-o", "fig7.csv"});
    EXPECT_EQ(cfg.command, Command::Figure);
    EXPECT_EQ(cfg.figure, "fig7");
    EXPECT_EQ(cfg.n, 1000u);
    EXPECT_EQ(cfg.a, 1.0);
    EXPECT_EQ(cfg.c, 0.05);
    EXPECT_EQ(cfg.gamma, 0.005);
    EXPECT_EQ(cfg.scheme, Scheme::PeriodicPostselect);
}

TEST(ParseArgs, Fig6Defaults) {
    const auto cfg = parse({"figure", "fig6"});
    EXPECT_EQ(cfg.n, 100u);
    EXPECT_EQ(cfg.c, 0.5);
    const auto scaled = parse({"figure", "fig6", "--a", "2", "--c-over-a", "0.25", "--n", "40"});
    EXPECT_EQ(scaled.n, 40u);
    EXPECT_EQ(scaled.c, 0.5);
}

TEST(ParseArgs, SimulateOptions) {
    const auto cfg = parse({"simulate", "--estimator", "wva", "--scheme", "bernoulli", "--trials", "50", "--seed",
                            "9", "--wva-norm", "literal", "--phi", "0.2", "--threads", "3"});
    EXPECT_EQ(cfg.command, Command::Simulate);
    EXPECT_EQ(cfg.estimator, EstimatorKind::WeakValue);
    EXPECT_EQ(cfg.scheme, Scheme::BernoulliPostselect);
    EXPECT_EQ(cfg.trials, 50u);
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.wva_norm, WvaNormalization::Literal);
    EXPECT_EQ(cfg.threads, 3u);
    EXPECT_NEAR(cfg.gamma, 0.009966711079379185, 1e-15);
    EXPECT_EQ(cfg.d, 1.0);
}

TEST(ParseArgs, UsageErrors) {
    EXPECT_THROW(parse({}), UsageError);
    EXPECT_THROW(parse({"bogus"}), UsageError);
    EXPECT_THROW(parse({"table1", "--n", "abc"}), UsageError);
    EXPECT_THROW(parse({"table1", "--nope", "1"}), UsageError);
    EXPECT_THROW(parse({"figure", "fig9"}), UsageError);
    EXPECT_THROW(parse({"simulate", "--estimator", "median"}), UsageError);
    EXPECT_THROW(parse({"fisher", "--model", "pink"}), UsageError);
}

TEST(ParseArgs, ValidationErrors) {
    EXPECT_THROW(parse({"fisher", "--model", "solvable", "--c", "-2", "--a", "1", "--n", "3"}), ValidationError);
    EXPECT_THROW(parse({"table1", "--gamma", "1.5"}), ValidationError);
    EXPECT_THROW(parse({"fisher", "--phi", "4"}), ValidationError);
    EXPECT_THROW(parse({"simulate", "--trials", "1"}), ValidationError);
    EXPECT_THROW(parse({"figure", "fig7", "--scheme", "alternating"}), ValidationError);
    EXPECT_THROW(parse({"fisher", "--model", "exponential", "--eta", "-1"}), ValidationError);
}

TEST(ParseArgs, SeedFallsBackToEnvironment) {
    ::setenv("ESTLAB_SEED", "1234", 1);
    EXPECT_EQ(parse({"simulate"}).seed, 1234u);
    EXPECT_EQ(parse({"simulate", "--seed", "5"}).seed, 5u);
    ::unsetenv("ESTLAB_SEED");
    EXPECT_EQ(parse({"simulate"}).seed, 0u);
}

TEST(ParseArgs, HelpListsFlagsWithUnits) {
    const auto cfg = parse({"simulate", "--help"});
    EXPECT_TRUE(cfg.help);
    for (const char *flag : {"--a", "--c", "--n", "--eta", "--gamma", "--phi", "--trials", "--seed", "--threads",
                             "--estimator", "--scheme", "--output"}) {
        EXPECT_NE(cfg.help_text.find(flag), std::string::npos) << flag;
    }
    EXPECT_NE(cfg.help_text.find("units"), std::string::npos);
    EXPECT_NE(parse({"figure", "--help"}).help_text.find("fig7"), std::string::npos);
    EXPECT_EQ(run_cli({"--help"}), kOk);
}

TEST_F(CliFiles, ExitCodes) {
    std::string err;
    EXPECT_EQ(run_cli({"frobnicate"}, &err), kUsage);
    EXPECT_NE(err.find("usage"), std::string::npos);
    EXPECT_EQ(run_cli({"fisher", "--c", "-2", "--n", "3", "-o", path("v.csv")}, &err), kValidation);
    EXPECT_EQ(run_cli({"table1", "--n", "20", "--gamma", "0.1", "-o", path("missing/dir/t.csv")}, &err), kIo);
    EXPECT_EQ(run_cli({"fisher", "--c", "-0.00099999999999", "--n", "1000", "-o", path("num.csv")}, &err), kNumeric);
    EXPECT_NE(err.find("NotPositiveDefinite"), std::string::npos);
    // Nothing was left behind, not even temp files.
    EXPECT_EQ(file_count(), 0u);
}

TEST_F(CliFiles, Table1Output) {
    ASSERT_EQ(run_cli({"table1", "-o", path("t1.csv")}), kOk);
    const std::string csv = slurp(path("t1.csv"));
    EXPECT_EQ(csv.rfind("# estlab-version=0.1.0 config=", 0), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    std::istringstream lines(csv);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 8u);
    EXPECT_EQ(rows[1], "approach,regime,formula,table_value,closed_form,numeric,rel_diff,agree");
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_EQ(rows[i].back(), '1') << rows[i];
    EXPECT_EQ(file_count(), 1u);
}

TEST_F(CliFiles, SimulateIsByteIdentical) {
    const std::vector<std::string> base{"simulate", "--n", "100", "--trials", "1000", "--seed", "42"};
    auto with = [&](std::vector<std::string> extra) {
        auto v = base;
        v.insert(v.end(), extra.begin(), extra.end());
        return v;
    };
    ASSERT_EQ(run_cli(with({"-o", path("a.csv"), "--dump", path("a_trials.csv")})), kOk);
    ASSERT_EQ(run_cli(with({"-o", path("b.csv"), "--dump", path("b_trials.csv"), "--threads", "4"})), kOk);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a_trials.csv")), slurp(path("b_trials.csv")));
    EXPECT_NE(slurp(path("a.csv")).find("seed=42"), std::string::npos);
    // A different seed changes the trials.
    auto other = base;
    other[6] = "43";
    other.insert(other.end(), {"-o", path("c.csv")});
    ASSERT_EQ(run_cli(other), kOk);
    EXPECT_NE(data_section(slurp(path("a.csv"))), data_section(slurp(path("c.csv"))));
}

TEST_F(CliFiles, SweepsRerunIdentically) {
    for (const char *fig : {"fig2", "fig345", "fig6"}) {
        ASSERT_EQ(run_cli({"figure", fig, "-o", path("x.csv")}), kOk) << fig;
        ASSERT_EQ(run_cli({"figure", fig, "-o", path("y.csv")}), kOk) << fig;
        EXPECT_EQ(data_section(slurp(path("x.csv"))), data_section(slurp(path("y.csv")))) << fig;
    }
}

TEST_F(CliFiles, Fig6SumColumn) {
    ASSERT_EQ(run_cli({"figure", "fig6", "-o", path("f6.csv")}), kOk);
    std::istringstream in(slurp(path("f6.csv")));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line, "phi,gamma,aw,awp,i1,i2,i3,sum");
    int rows = 0;
    while (std::getline(in, line)) {
        const double sum = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_NEAR(sum, 1.0, 1e-9);
        ++rows;
    }
    EXPECT_EQ(rows, 100);
}

TEST_F(CliFiles, FisherReportsAllStrategies) {
    ASSERT_EQ(run_cli({"fisher", "--n", "1000", "--c", "0.05", "--gamma", "0.005", "-o", path("f.csv")}), kOk);
    const std::string csv = slurp(path("f.csv"));
    for (const char *s : {"\ndirect,", "\nwva,ideal,", "\nwva,spin,", "\nopm,spin,", "\nbgsub,alternating,"}) {
        EXPECT_NE(csv.find(s), std::string::npos) << s;
    }
    ASSERT_EQ(run_cli({"fisher", "--model", "exponential", "--eta", "5", "--n", "200", "-o", path("e.csv")}), kOk);
}

TEST_F(CliFiles, ConfigFile) {
    {
        std::ofstream cfg(path("run.cfg"));
        cfg << "# delta-i settings\nn = 200\nc=0.1\n";
    }
    const auto cfg = parse({"delta-i", "--config", path("run.cfg")});
    EXPECT_EQ(cfg.n, 200u);
    EXPECT_EQ(cfg.c, 0.1);
    const auto before = parse({"--config", path("run.cfg"), "delta-i", "--n", "10"});
    EXPECT_EQ(before.n, 10u);
    EXPECT_EQ(before.c, 0.1);
    {
        std::ofstream bad(path("bad.cfg"));
        bad << "bogus=1\n";
    }
    EXPECT_THROW(parse({"delta-i", "--config", path("bad.cfg")}), UsageError);
    EXPECT_EQ(run_cli({"delta-i", "--config", path("nope.cfg")}), kIo);
}

TEST_F(CliFiles, DeltaI) {
    ASSERT_EQ(run_cli({"delta-i", "--c", "0.001", "-o", path("d.csv")}), kOk);
    std::istringstream in(slurp(path("d.csv")));
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream row(line);
    std::vector<double> vals;
    for (std::string cell; std::getline(row, cell, ',');) vals.push_back(std::stod(cell));
    ASSERT_EQ(vals.size(), 5u);
    EXPECT_NEAR(vals[3], 0.999001, 1e-6);
}
