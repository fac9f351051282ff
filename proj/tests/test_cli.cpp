#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "relief/cli.hpp"

using namespace relief;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("relief_cli_test_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kXor8 = RELIEF_SAMPLES_DIR "/xor8.tsv";

}  // namespace

TEST(Cli, ScoreXor8) {
  const auto r = run({"score", "--algo", "multisurf", "--input", kXor8});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t rows = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "feature\tscore\trank");
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 3u);
}

TEST(Cli, ReliefGoldenOutput) {
  const auto r = run({"score", "--algo", "relief", "--input", kXor8});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "feature\tscore\trank\nA1\t0.500000\t1\nA2\t0.500000\t2\nA3\t-1.000000\t3\n");
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"score", "--algo", "bogus", "--input", kXor8}).code, 2);
  EXPECT_EQ(run({"score", "--input", kXor8}).code, 2);
  EXPECT_EQ(run({"score", "--algo", "surf", "--m", "3", "--input", kXor8}).code, 2);
  EXPECT_EQ(run({"score", "--algo", "relieff", "--iterate", "3:0.01", "--turf", "2", "--input", kXor8}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DataErrorsExitOne) {
  EXPECT_EQ(run({"score", "--algo", "relief", "--input", "/nonexistent/file.tsv"}).code, 1);
  const auto bad = temp_path("onecls.tsv");
  std::ofstream(bad) << "a\tclass\n1\tx\n0\tx\n";
  const auto r = run({"score", "--algo", "relief", "--input", bad});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("fewer than 2 classes"), std::string::npos);
}

TEST(Cli, SelectWithAlpha) {
  const auto scores = temp_path("alpha.json");
  ASSERT_EQ(run({"score", "--algo", "relief", "--input", kXor8, "--format", "json", "--output", scores}).code, 0);
  const auto r = run({"select", "--scores", scores, "--alpha", "0.05", "--m", "2000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("tau=0.1"), std::string::npos);
  EXPECT_EQ(r.out, "feature\tscore\trank\nA1\t0.500000\t1\nA2\t0.500000\t2\n");
  const auto none = run({"select", "--scores", scores, "--tau", "0.9"});
  EXPECT_EQ(none.out, "feature\tscore\trank\n");
  EXPECT_EQ(run({"select", "--scores", scores, "--top", "9"}).code, 2);
  EXPECT_EQ(run({"select", "--scores", scores, "--top", "1", "--tau", "0.5"}).code, 2);
}

TEST(Cli, SimulateThenScore) {
  const auto data = temp_path("sim.tsv");
  const auto r = run({"simulate", "--model", "parity2", "--n", "100", "--a", "10", "--flip", "0.1", "--seed", "3",
                      "--output", data});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("A1,A2"), std::string::npos);
  const auto one = run({"score", "--algo", "multisurfstar", "--input", data, "--threads", "1"});
  const auto four = run({"score", "--algo", "multisurfstar", "--input", data, "--threads", "4"});
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(run({"simulate", "--model", "xor"}).code, 2);
  EXPECT_EQ(run({"simulate", "--model", "parity2", "--flip", "0.7"}).code, 2);
}

TEST(Cli, WrappersFromFlags) {
  const auto data = temp_path("wrap.tsv");
  ASSERT_EQ(run({"simulate", "--model", "parity2", "--n", "60", "--a", "12", "--seed", "1", "--output", data}).code, 0);
  const auto turf = run({"score", "--algo", "relieff", "--input", data, "--turf", "2:0.5", "--vls", "4:4"});
  EXPECT_EQ(turf.code, 0) << turf.err;
  const auto it = run({"score", "--algo", "relieff", "--input", data, "--iterate", "3:0.5", "--format", "json"});
  EXPECT_EQ(it.code, 0) << it.err;
  EXPECT_NE(it.out.find("\"iteration\""), std::string::npos);
}

TEST(Cli, PowerReport) {
  const auto r = run({"power", "--model", "main", "--algos", "multisurf,relieff", "--replicates", "2", "--n", "60",
                      "--a", "10", "--seed", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("model\talgorithm\treplicates\tsuccess_rate\n", 0), 0u);
  EXPECT_NE(r.out.find("main\tmultisurf\t2\t"), std::string::npos);
}
