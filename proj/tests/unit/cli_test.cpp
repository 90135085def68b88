#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using polyinf::cli::run_cli;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("polyinf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "polyinf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, DatagenIsByteIdentical) {
  const std::vector<std::string> base = {"--seed", "50", "datagen", "--A", "1.5", "--B", "1", "--N", "10",
                                         "--noise-sq-bound", "0.2"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(run(a), 0) << err_.str();
  ASSERT_EQ(run(b), 0) << err_.str();
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv.noise.csv")), slurp(path("b.csv.noise.csv")));
  EXPECT_FALSE(slurp(path("a.csv")).empty());
}

TEST_F(Cli, PipelineStabilize) {
  ASSERT_EQ(run({"--seed", "50", "datagen", "--A", "1.5", "--B", "1", "--N", "10", "--noise-sq-bound", "0.2",
                 "--out", path("d.csv")}),
            0)
      << err_.str();
  ASSERT_EQ(run({"set", "--data", path("d.csv"), "--lags", "5", "--bound", "0.1", "--out", path("set.json"),
                 "--vertices", path("v.json")}),
            0)
      << err_.str();
  const json set = json::parse(slurp(path("set.json")));
  EXPECT_EQ(set["bounded"], "bounded");
  EXPECT_EQ(json::parse(slurp(path("v.json")))["L"], 6);
  ASSERT_EQ(run({"synth", "--set", path("set.json"), "--objective", "stab", "--out", path("k.json")}), 0)
      << err_.str();
  const json k = json::parse(slurp(path("k.json")));
  EXPECT_EQ(k["status"], "feasible");
  EXPECT_NEAR(k["K"][0][0].get<double>(), -1.4353, 5e-3);
  EXPECT_EQ(run({"verify", "--controller", path("k.json"), "--set", path("set.json"), "--out", path("r.json")}),
            0)
      << err_.str();
  EXPECT_EQ(run({"verify", "--controller", path("k.json"), "--A", "1.5", "--B", "1"}), 0) << err_.str();
}

TEST_F(Cli, HinfNotInformativeExitCode) {
  write("set.json", "");
  ASSERT_EQ(run({"--seed", "50", "datagen", "--A", "1.5", "--B", "1", "--N", "10", "--noise-sq-bound", "0.2",
                 "--out", path("d.csv")}),
            0);
  ASSERT_EQ(run({"set", "--data", path("d.csv"), "--lags", "3", "--bound", "0.1", "--out", path("set.json")}), 0);
  write("perf.json", R"({"C": [[1]], "D": [[0]]})");
  EXPECT_EQ(run({"synth", "--set", path("set.json"), "--objective", "h2", "--gamma", "0.5", "--perf",
                 path("perf.json")}),
            4);
  EXPECT_EQ(run({"synth", "--set", path("set.json"), "--objective", "hinf", "--gamma", "5", "--perf",
                 path("perf.json"), "--out", path("k.json")}),
            0)
      << err_.str();
  EXPECT_EQ(run({"verify", "--controller", path("k.json"), "--set", path("set.json"), "--perf", path("perf.json")}),
            0)
      << err_.str();
}

TEST_F(Cli, ScalarUnboundedPath) {
  write("d.csv", "t,x1,u1\n0,0,1\n1,1.2,1\n2,3,-0.5\n3,4.1,-2\n4,4.25,\n");
  ASSERT_EQ(run({"set", "--data", path("d.csv"), "--lags", "1", "--bound", "0.25", "--out", path("set.json")}), 0)
      << err_.str();
  EXPECT_EQ(json::parse(slurp(path("set.json")))["bounded"], "unbounded");
  ASSERT_EQ(run({"synth", "--set", path("set.json"), "--out", path("k.json")}), 0) << err_.str();
  EXPECT_NEAR(json::parse(slurp(path("k.json")))["K"][0][0].get<double>(), -0.7353, 1e-3);
  EXPECT_EQ(run({"verify", "--controller", path("k.json"), "--set", path("set.json")}), 0) << err_.str();
  write("perf.json", R"({"C": [[1]], "D": [[0]]})");
  EXPECT_EQ(run({"synth", "--set", path("set.json"), "--objective", "hinf", "--gamma", "2", "--perf",
                 path("perf.json")}),
            6);
}

TEST_F(Cli, InputErrors) {
  write("bad.csv", "t,x1,u1\n0,0,1\n1,1,1\n");
  EXPECT_EQ(run({"set", "--data", path("bad.csv"), "--lags", "1", "--bound", "0.25"}), 2);
  EXPECT_EQ(run({"set", "--data", path("missing.csv"), "--lags", "1", "--bound", "0.25"}), 2);
  write("d.csv", "t,x1,u1\n0,0,1\n1,1.2,1\n2,3,-0.5\n3,4.1,-2\n4,4.25,\n");
  write("b.json", R"({"M": 1, "n": 1, "C_l": [[0.3]], "C_u": [[0.1]]})");
  EXPECT_EQ(run({"set", "--data", path("d.csv"), "--lags", "1", "--bounds", path("b.json")}), 2);
  EXPECT_NE(run({"frobnicate"}), 0);
}

TEST_F(Cli, EmptySetExitCode) {
  ASSERT_EQ(run({"--seed", "1", "datagen", "--A", "1.5", "--B", "1", "--N", "10", "--noise-sq-bound", "4",
                 "--out", path("d.csv")}),
            0);
  EXPECT_EQ(run({"set", "--data", path("d.csv"), "--lags", "5", "--bound", "0.0001", "--out", path("s.json")}), 3);
}

TEST_F(Cli, VerificationFailureExitCode) {
  write("d.csv", "t,x1,u1\n0,0,1\n1,1.2,1\n2,3,-0.5\n3,4.1,-2\n4,4.25,\n");
  ASSERT_EQ(run({"set", "--data", path("d.csv"), "--lags", "1", "--bound", "0.25", "--out", path("set.json")}), 0);
  write("k.json", R"({"K": [[0.5]], "status": "feasible"})");
  EXPECT_EQ(run({"verify", "--controller", path("k.json"), "--A", "1.5", "--B", "1"}), 7) << err_.str();
}

TEST_F(Cli, ReproduceCommands) {
  EXPECT_EQ(run({"reproduce", "example1"}), 0) << err_.str();
  EXPECT_NE(out_.str().find("PASS"), std::string::npos);
  EXPECT_EQ(run({"reproduce", "example2", "--out", path("e2.json")}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(path("e2.json")));
}
