#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "brsim/cli.hpp"

using namespace brsim;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("brsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesGrid) {
  const auto r = run({"simulate", "--method", "0", "--alpha", "1", "--b", "2", "--step", "0.1", "--seed", "1",
                      "--margins", "frechet", "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_EQ(rows[0], "t,z");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    EXPECT_GT(std::stod(rows[i].substr(comma + 1)), 0.0);
  }
  EXPECT_DOUBLE_EQ(std::stod(rows[1]), -2.0);
  EXPECT_DOUBLE_EQ(std::stod(rows[41]), 2.0);
  const auto other = run({"simulate", "--method", "0", "--seed", "2", "--margins", "frechet", "--no-cache"});
  EXPECT_NE(r.out, other.out);
  EXPECT_EQ(r.out, run({"simulate", "--method", "0", "--seed", "1", "--margins", "frechet", "--no-cache"}).out);
}

TEST_F(CliTest, SimulateMethod4UsesCache) {
  const std::string cache = path("lambda.json");
  const std::vector<std::string> args{"simulate", "--method", "4", "--b", "1", "--step", "0.5", "--reps", "3",
                                      "--lambda-samples", "2000", "--cache", cache};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 1u + 3 * 5);
  EXPECT_TRUE(fs::exists(cache));
  EXPECT_EQ(run(args).out, r.out);
}

TEST_F(CliTest, SimulateToFileThenCheck) {
  const std::string csv = path("sim.csv");
  const auto r = run({"simulate", "--method", "0", "--b", "1", "--step", "0.5", "--reps", "60", "--out", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(csv)).size(), 1u + 60 * 5);
  const auto c = run({"check", "--in", csv});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto doc = nlohmann::json::parse(c.out);
  EXPECT_EQ(doc["n_reps"], 60);
  EXPECT_DOUBLE_EQ(doc["t_a"].get<double>(), -1.0);
  EXPECT_DOUBLE_EQ(doc["t_b"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["DEV"].get<double>(), (doc["dev_a"].get<double>() + doc["dev_b"].get<double>()) / 2);
  EXPECT_TRUE(doc.contains("max_stability"));
  EXPECT_TRUE(doc.contains("stationarity"));
}

TEST_F(CliTest, BoundsJson) {
  const auto r = run({"bounds", "--method", "0", "--b", "1", "--k", "200", "--c", "-1", "--x", "-3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* key : {"conditional", "low_event", "high_event", "total", "total_clamped", "params"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_DOUBLE_EQ(doc["params"]["c"].get<double>(), -1.0);
  const auto table = run({"bounds", "--method", "0", "--k", "1000"});
  EXPECT_EQ(table.code, 0) << table.err;
  EXPECT_NE(table.out.find("total_clamped"), std::string::npos);
}

TEST_F(CliTest, BoundsErrors) {
  const auto asym = run({"bounds", "--method", "1", "--shifts", "-1,0,2"});
  EXPECT_EQ(asym.code, 2);
  EXPECT_NE(asym.err.find("AsymmetricShifts"), std::string::npos);
  const auto m3 = run({"bounds", "--method", "3", "--b", "2", "--step", "0.1", "--jmax", "50", "--k", "100"});
  EXPECT_EQ(m3.code, 2);
  EXPECT_NE(m3.err.find("DomainError"), std::string::npos);
  EXPECT_EQ(run({"bounds", "--method", "9"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST_F(CliTest, StudyDeterministicAcrossRunsAndThreads) {
  const std::string a = path("a"), b = path("b");
  fs::create_directories(a);
  fs::create_directories(b);
  const auto r1 = run({"study", "--method", "0", "--alpha", "1", "--reps", "4", "--threads", "1", "--out", a,
                       "--no-cache"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  const auto rows = lines(slurp(fs::path(a) / "study.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(std::count(rows[1].begin(), rows[1].end(), ','), 10);
  EXPECT_TRUE(fs::exists(fs::path(a) / "study.json"));
  const auto r2 = run({"study", "--method", "0", "--alpha", "1", "--reps", "4", "--threads", "8", "--out", b,
                       "--no-cache"});
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(slurp(fs::path(a) / "study.csv"), slurp(fs::path(b) / "study.csv"));
  EXPECT_EQ(r1.out, r2.out);
}

TEST_F(CliTest, StudyTimingColumn) {
  const auto r = run({"study", "--method", "0", "--alpha", "1", "--reps", "2", "--timing", "--out", dir_.string(),
                      "--no-cache"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_NE(rows[0].find("mean_runtime_s"), std::string::npos);
  EXPECT_EQ(std::count(rows[1].begin(), rows[1].end(), ','), 11);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const std::string cfg = path("c.json");
  std::ofstream(cfg) << R"({"b": 1, "step": 0.25, "seed": 9, "method": 0})";
  const auto r = run({"simulate", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 1u + 9);
  const auto o = run({"simulate", "--config", cfg, "--b", "0.5"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(lines(o.out).size(), 1u + 5);
  std::ofstream(path("bad.json")) << R"({"methods": [0], "bogus": 1})";
  EXPECT_EQ(run({"study", "--config", path("bad.json"), "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, IoErrorsExitThree) {
  EXPECT_EQ(run({"check", "--in", path("missing.csv")}).code, 3);
  EXPECT_EQ(run({"simulate", "--config", path("missing.json")}).code, 3);
  std::ofstream(path("plain")) << "x";
  EXPECT_EQ(run({"simulate", "--out", (dir_ / "plain" / "z.csv").string()}).code, 3);
}

TEST_F(CliTest, DomainErrorsExitTwo) {
  EXPECT_EQ(run({"simulate", "--alpha", "2.5"}).code, 2);
  EXPECT_EQ(run({"simulate", "--margins", "weibull"}).code, 2);
}
