#include <gtest/gtest.h>

#include <json.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using namespace fibfrac;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fibfrac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fibfrac_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(CliAngle, Forms) {
  EXPECT_DOUBLE_EQ(cli::parse_angle("pi/2"), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(cli::parse_angle("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(cli::parse_angle("2pi/12"), std::numbers::pi / 6);
  EXPECT_DOUBLE_EQ(cli::parse_angle("3*pi/8"), 3 * std::numbers::pi / 8);
  EXPECT_DOUBLE_EQ(cli::parse_angle("0.25"), 0.25);
  EXPECT_THROW(cli::parse_angle("pi/0"), cli::UsageError);
  EXPECT_THROW(cli::parse_angle("1.5x"), cli::UsageError);
  EXPECT_THROW(cli::parse_angle("tau"), cli::UsageError);
  const auto grid = cli::parse_angle_list("grid:4");
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_EQ(grid.back(), std::numbers::pi / 2);
}

TEST(CliWord, TableWords) {
  EXPECT_EQ(run_cli({"word", "--i", "2", "--n", "5"}).out, "01001010\n");
  EXPECT_EQ(run_cli({"word", "--i", "3", "--n", "2"}).out, "001\n");
  EXPECT_EQ(run_cli({"word", "--i", "2", "--n", "1"}).out, "0\n");
}

TEST(CliWord, BinaryFormat) {
  const Result r = run_cli({"word", "--i", "2", "--n", "12", "--format", "bin"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(word_from_binary(r.out), word_concat(2, 12));
}

TEST(CliExit, UsageErrors) {
  EXPECT_EQ(run_cli({"word", "--i", "1", "--n", "5"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"word", "--i", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"curve", "--i", "2", "--n", "5", "--alpha", "2"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"curve", "--i", "2", "--n", "5", "--alpha", "pi/2", "--format", "png"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"verify", "--level", "bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliFiles, CurveSvgVertexCount) {
  const fs::path svg = dir_ / "f17.svg";
  ASSERT_EQ(run_cli({"curve", "--i", "2", "--n", "17", "--alpha", "pi/2", "--svg", svg.string()}).code, 0);
  const std::string s = slurp(svg);
  const auto d0 = s.find(" d=\"") + 4;
  const std::string d = s.substr(d0, s.find('"', d0) - d0);
  EXPECT_EQ(static_cast<std::size_t>(std::count(d.begin(), d.end(), 'M') + std::count(d.begin(), d.end(), 'L')),
            fib_length(2, 17) + 1);
}

TEST_F(CliFiles, CurveIsDeterministic) {
  const fs::path a = dir_ / "a.svg", b = dir_ / "b.svg";
  ::setenv("FIBFRAC_THREADS", "1", 1);
  run_cli({"curve", "--i", "3", "--n", "14", "--alpha", "pi/6", "--box", "--svg", a.string()});
  ::setenv("FIBFRAC_THREADS", "4", 1);
  run_cli({"curve", "--i", "3", "--n", "14", "--alpha", "pi/6", "--box", "--svg", b.string()});
  ::unsetenv("FIBFRAC_THREADS");
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a).find("<polygon"), std::string::npos);
}

TEST_F(CliFiles, NoOutputOnError) {
  const fs::path svg = dir_ / "bad.svg";
  EXPECT_EQ(run_cli({"curve", "--i", "2", "--n", "9", "--alpha", "pi", "--svg", svg.string()}).code, 2);
  EXPECT_FALSE(fs::exists(svg));
}

TEST(CliCurve, ZeroAngleIsVertical) {
  const Result r = run_cli({"curve", "--i", "2", "--n", "6", "--alpha", "0"});
  EXPECT_EQ(r.out, "0,0\n0,1\n0,2\n0,3\n0,4\n0,5\n0,6\n0,7\n0,8\n0,9\n0,10\n0,11\n0,12\n0,13\n");
}

TEST(CliStats, Json) {
  const auto j = nlohmann::json::parse(run_cli({"stats", "--i", "2", "--n", "10", "--alpha", "pi/2"}).out);
  EXPECT_EQ(j["vertices"], fib_length(2, 10) + 1);
  EXPECT_NEAR(j["width"].get<double>(), 17.0, 1e-9);
  EXPECT_NEAR(j["height"].get<double>(), 11.0, 1e-9);
}

TEST(CliDim, Table) {
  const Result r = run_cli({"dim", "--alphas", "0,pi/4,pi/2"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,R,r_plus,aspect_limit,dimension");
  std::vector<double> s;
  while (std::getline(in, line)) s.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_LT(s[0], s[1]);
  EXPECT_LT(s[1], s[2]);
  EXPECT_NEAR(s[2], 1.6379382096763471, 1e-15);
}

TEST(CliIfs, Json) {
  const Result r = run_cli({"ifs", "--i", "3", "--alpha", "pi/4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["parity"], "odd");
  EXPECT_EQ(j["maps"].size(), 5u);
  EXPECT_EQ(run_cli({"ifs", "--i", "2", "--alpha", "pi/4", "--n-ref", "17"}).code, cli::kExitUsage);
}

TEST(CliAttractor, DepthAndBudget) {
  const Result r = run_cli({"attractor", "--i", "2", "--alpha", "pi/3", "--depth", "2"});
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 50);
  const Result b = run_cli({"attractor", "--i", "2", "--alpha", "pi/3", "--budget", "300"});
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 250);
  EXPECT_EQ(run_cli({"attractor", "--i", "2", "--budget", "1"}).code, cli::kExitUsage);
}

TEST(CliVerify, WordsPass) {
  const Result r = run_cli({"verify", "--level", "words"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(r.out)["passed"].get<bool>());
}

TEST(CliVerify, CurveLevelPasses) { EXPECT_EQ(run_cli({"verify", "--i", "2", "--alpha", "pi/2", "--level", "curve"}).code, 0); }

TEST(CliVerify, SwappedParityFails) {
  const Result r = run_cli({"verify", "--i", "2", "--alpha", "pi/2", "--level", "ifs", "--swap-parity"});
  EXPECT_EQ(r.code, cli::kExitFailed);
  const auto report = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& c : report["checks"])
    if (c["name"] == "curve_matches_attractor") found = !c["passed"].get<bool>();
  EXPECT_TRUE(found);
}
