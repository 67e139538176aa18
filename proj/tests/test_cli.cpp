#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using wiener::cli::run;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string &text, std::string *header = nullptr) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

double summary_field(const std::string &line, const std::string &key) {
    const auto pos = line.find(key + "=");
    return std::stod(line.substr(pos + key.size() + 1));
}

class CliFiles : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wiener_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

TEST(Cli, CurveVersusRateIsDecreasing) {
    const Outcome o = invoke({"curve", "--fs", "1", "--min", "0.25", "--max", "5", "--log",
                              "--points", "50"});
    ASSERT_EQ(o.code, 0) << o.err;
    std::string header;
    const auto rows = parse_csv(o.out, &header);
    EXPECT_EQ(header, "x,d_opt,d_ce,d_upper,d_w,d_bar,mmse,theta_opt,theta_ce");
    ASSERT_EQ(rows.size(), 50u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i][1], rows[i - 1][1]);
    EXPECT_EQ(rows.front()[0], 0.25);
    EXPECT_EQ(rows.back()[0], 5.0);
}

TEST(Cli, CurveVersusSamplingRateApproachesShannon) {
    const Outcome o = invoke({"curve", "--sweep", "fs", "--rate", "1", "--min", "0.25", "--max",
                              "10", "--points", "30"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto rows = parse_csv(o.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(rows[i][5], rows[i - 1][5]);
        EXPECT_LT(rows[i][5], 0.29235113835560139);
    }
    EXPECT_GT(rows.back()[5], 0.28);
}

TEST(Cli, NormalizedCurveDividesBySampleVariance) {
    const auto plain = parse_csv(invoke({"curve", "--fs", "2", "--sigma2", "3", "--points", "3"}).out);
    const auto norm = parse_csv(
        invoke({"curve", "--fs", "2", "--sigma2", "3", "--points", "3", "--normalized"}).out);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(norm[i][0], plain[i][0]);
        EXPECT_NEAR(norm[i][1], plain[i][1] / 1.5, 1e-15);
        EXPECT_DOUBLE_EQ(norm[i][6], 1.0 / 6.0);
        EXPECT_DOUBLE_EQ(norm[i][7], plain[i][7]);
    }
}

TEST(Cli, RatioSweepPenaltyBound) {
    const Outcome o = invoke({"ratio", "--min", "0.05", "--max", "8", "--points", "100", "--log"});
    ASSERT_EQ(o.code, 0) << o.err;
    std::string header;
    const auto rows = parse_csv(o.out, &header);
    EXPECT_EQ(header, "rbar,d_tilde,ratio_smp,ratio_qnt,ce_penalty");
    double worst = 0.0;
    for (const auto &r : rows) worst = std::max(worst, r[4]);
    EXPECT_LE(worst, 1.028);
}

TEST(Cli, EigenSingleDiscrete) {
    const Outcome o = invoke({"eigen", "--kind", "discrete", "--n", "1", "--fs", "4"});
    ASSERT_EQ(o.code, 0) << o.err;
    std::string header;
    const auto rows = parse_csv(o.out, &header);
    EXPECT_EQ(header, "k,lambda,density_limit");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0][1], 0.25, 1e-15);
}

TEST(Cli, EigenInterpTracksTheDensity) {
    const auto rows = parse_csv(invoke({"eigen", "--kind", "interp", "--n", "1000", "--normalized"}).out);
    ASSERT_EQ(rows.size(), 1000u);
    double worst = 0.0;
    for (const auto &r : rows) worst = std::max(worst, std::abs(r[1] - r[2]) / r[2]);
    EXPECT_LT(worst, 1e-10);
}

TEST(Cli, InvalidArgumentsExitTwo) {
    EXPECT_EQ(invoke({"eigen", "--n", "0"}).code, 2);
    EXPECT_EQ(invoke({"eigen", "--kind", "spline"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--points", "1"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--min", "2", "--max", "1"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--min", "-1"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--sweep", "time"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--fs", "1e6", "--min", "0.01", "--max", "1"}).code, 2);
    EXPECT_EQ(invoke({"curve", "--fs", "abc"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--trials", "0"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--scheme", "random-code"}).code, 2);
    EXPECT_EQ(invoke({"simulate", "--scheme", "test-channel", "--rbar", "-1"}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    const Outcome bad = invoke({"ratio", "--min", "0"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("--min"), std::string::npos);
}

TEST(Cli, HelpAndVersionExitZero) {
    EXPECT_EQ(invoke({"--help"}).code, 0);
    const Outcome v = invoke({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_FALSE(v.out.empty());
}

TEST(Cli, MmseSimulationSummary) {
    const Outcome o = invoke({"simulate", "--scheme", "mmse-only", "--fs", "2", "--trials", "2000",
                              "--seed", "7"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_LE(std::abs(summary_field(o.out, "z")), 3.0);
    EXPECT_NEAR(summary_field(o.out, "analytic"), 1.0 / 12.0, 1e-15);
}

TEST(Cli, TestChannelSimulationSummary) {
    const Outcome o = invoke({"simulate", "--scheme", "test-channel", "--rbar", "2", "--fs", "1",
                              "--horizon", "32", "--oversample", "16", "--trials", "200",
                              "--seed", "3", "--workers", "2"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_LE(std::abs(summary_field(o.out, "z")), 3.0);
}

TEST_F(CliFiles, OutputsAreByteDeterministicWithManifest) {
    const fs::path a = dir_ / "a.csv";
    const fs::path b = dir_ / "b.csv";
    for (const fs::path &p : {a, b}) {
        const Outcome o = invoke({"simulate", "--fs", "2", "--trials", "50", "--seed", "11",
                                  "--out", p.string()});
        ASSERT_EQ(o.code, 0) << o.err;
    }
    EXPECT_EQ(slurp(a), slurp(b));
    const auto rows = parse_csv(slurp(a));
    EXPECT_EQ(rows.size(), 50u);
    const auto manifest = nlohmann::json::parse(slurp(dir_ / "a.csv.manifest.json"));
    EXPECT_EQ(manifest["command"], "simulate");
    EXPECT_EQ(manifest["seed"], 11);
    EXPECT_TRUE(manifest.contains("version"));
    EXPECT_EQ(manifest["flags"]["trials"], 50);
    for (const auto &entry : fs::directory_iterator(dir_)) {
        EXPECT_EQ(entry.path().extension().string().find("tmp"), std::string::npos);
    }

    const fs::path c = dir_ / "curve.csv";
    ASSERT_EQ(invoke({"curve", "--points", "5", "--out", c.string()}).code, 0);
    const std::string first = slurp(c);
    ASSERT_EQ(invoke({"curve", "--points", "5", "--out", c.string()}).code, 0);
    EXPECT_EQ(first, slurp(c));
    EXPECT_TRUE(fs::exists(dir_ / "curve.csv.manifest.json"));
}

TEST_F(CliFiles, FailedRunsLeaveNoFiles) {
    const fs::path p = dir_ / "bad.csv";
    EXPECT_EQ(invoke({"curve", "--points", "0", "--out", p.string()}).code, 2);
    EXPECT_EQ(invoke({"eigen", "--n", "0", "--out", p.string()}).code, 2);
    EXPECT_TRUE(fs::is_empty(dir_));
    EXPECT_EQ(invoke({"curve", "--out", (dir_ / "missing" / "x.csv").string()}).code, 2);
}

TEST(Cli, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) {
        EXPECT_EQ(std::stod(wiener::cli::format_double(v)), v);
    }
    EXPECT_EQ(wiener::cli::format_double(0.25), "0.25");
}

} // namespace
