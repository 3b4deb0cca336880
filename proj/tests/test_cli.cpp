// End-to-end runs of the command-line tool.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("daf_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // Runs the tool with stdout/stderr captured; returns the exit status.
  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" + std::string(DAF_CLI_PATH) + "' " + args + " > '" +
                            (dir_ / "stdout.txt").string() + "' 2> '" + (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string out() const { return slurp(dir_ / "stdout.txt"); }
  std::string err() const { return slurp(dir_ / "stderr.txt"); }

  static std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
  }

  static std::vector<std::string> column(const std::string& csv, std::size_t index) {
    std::vector<std::string> v;
    const auto ls = lines(csv);
    for (std::size_t i = 1; i < ls.size(); ++i) {
      std::istringstream row(ls[i]);
      std::string cell;
      for (std::size_t c = 0; c <= index; ++c) std::getline(row, cell, ',');
      v.push_back(cell);
    }
    return v;
  }

  fs::path dir_;
};

const char* kSmoke = R"({
  "fading_case": "CaseI", "variance_scenario": "symmetric", "weight_scheme": "SemiOpt1",
  "snr_grid_db": [0, 5, 10], "stopping": {"min_bit_errors": 50}, "block_size": 1, "master_seed": 3
})";

}  // namespace

TEST_F(CliTest, AnalyzeWritesOneRowPerGridPointDeterministically) {
  const auto cfg = write("a.json", R"({"fading_case": "CaseI", "variance_scenario": "symmetric",
    "weight_scheme": "SemiOpt1", "snr_grid_db": {"start": 0, "stop": 40, "step": 1}})");
  ASSERT_EQ(run("analyze --config '" + cfg.string() + "' --out '" + (dir_ / "o1").string() + "'"), 0) << err();
  ASSERT_EQ(run("analyze --config '" + cfg.string() + "' --out '" + (dir_ / "o2").string() + "'"), 0) << err();
  const auto a = slurp(dir_ / "o1" / "analyze.csv");
  EXPECT_EQ(lines(a).size(), 42u);
  EXPECT_EQ(lines(a)[0], "case,scenario,weight_scheme,q,snr_db,ber_analytical,error_floor");
  EXPECT_EQ(a, slurp(dir_ / "o2" / "analyze.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "o1" / "analyze.gp"));
}

TEST_F(CliTest, AnalyzeFloorColumnIsConstant) {
  const auto cfg = write("a.json", R"({"fading_case": "CaseIII", "variance_scenario": "symmetric",
    "weight_scheme": "SemiOpt1", "snr_grid_db": {"start": 0, "stop": 40, "step": 10}})");
  ASSERT_EQ(run("analyze --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 0) << err();
  const auto floors = column(slurp(dir_ / "analyze.csv"), 6);
  ASSERT_EQ(floors.size(), 5u);
  for (const auto& f : floors) EXPECT_EQ(f, floors[0]);
  EXPECT_GT(std::stod(floors[0]), 1e-4);
}

TEST_F(CliTest, ThreeCasesTwoSchemesGiveSixCurves) {
  const auto cfg = write("grid.json", R"({"fading_case": ["CaseI", "CaseII", "CaseIII"],
    "variance_scenario": "symmetric", "weight_scheme": ["SemiOpt1", "SemiOpt2"],
    "snr_grid_db": [0, 20], "stopping": {"max_symbols": 200}, "block_size": 100})");
  ASSERT_EQ(run("simulate --allow-truncation --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 0)
      << err();
  const auto csv = slurp(dir_ / "simulate.csv");
  std::set<std::string> curves;
  const auto c0 = column(csv, 0), c2 = column(csv, 2);
  for (std::size_t i = 0; i < c0.size(); ++i) curves.insert(c0[i] + "/" + c2[i]);
  EXPECT_EQ(curves.size(), 6u);
  EXPECT_EQ(c0.size(), 12u);
}

TEST_F(CliTest, MalformedConfigExitsTwoWithPosition) {
  const auto cfg = write("bad.json", "{\n  \"fading_case\": \"CaseI\",\n  \"snr_grid_db\": [0,,1]\n}");
  EXPECT_EQ(run("analyze --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 2);
  EXPECT_NE(err().find("bad.json:3:"), std::string::npos) << err();
}

TEST_F(CliTest, UnknownFieldExitsTwoNamingField) {
  const auto cfg = write("bad.json", R"({"fading_case": "CaseI", "variance_scenario": "symmetric",
    "weight_scheme": "SemiOpt1", "snr_grid_db": [0], "seed": 4})");
  EXPECT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 2);
  EXPECT_NE(err().find("/seed"), std::string::npos) << err();
}

TEST_F(CliTest, MissingConfigFileExitsTwo) {
  EXPECT_EQ(run("analyze --config '" + (dir_ / "nope.json").string() + "'"), 2);
  EXPECT_EQ(run("analyze"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(CliTest, SimulateSmokeWithinBudget) {
  const auto cfg = write("s.json", kSmoke);
  const auto t0 = std::chrono::steady_clock::now();
  ASSERT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 0) << err();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  const auto csv = slurp(dir_ / "simulate.csv");
  ASSERT_EQ(lines(csv).size(), 4u);
  EXPECT_EQ(lines(csv)[0],
            "case,scenario,weight_scheme,q,snr_db,ber_analytical,ber_simulated,bit_errors,"
            "bits_simulated,ci95_low,ci95_high,error_floor,truncated");
  for (const auto& e : column(csv, 7)) EXPECT_GE(std::stoull(e), 50u);
}

TEST_F(CliTest, SeedChangesOnlySimulatedColumns) {
  const auto cfg = write("s.json", kSmoke);
  ASSERT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + (dir_ / "a").string() + "'"), 0);
  ASSERT_EQ(run("simulate --seed 12345 --config '" + cfg.string() + "' --out '" + (dir_ / "b").string() + "'"), 0);
  const auto a = slurp(dir_ / "a" / "simulate.csv"), b = slurp(dir_ / "b" / "simulate.csv");
  EXPECT_EQ(column(a, 5), column(b, 5));
  EXPECT_EQ(column(a, 11), column(b, 11));
  EXPECT_NE(column(a, 8), column(b, 8));
}

TEST_F(CliTest, CsvIndependentOfWorkerCount) {
  const auto cfg = write("s.json", R"({"fading_case": "CaseIII", "variance_scenario": "strong_sr",
    "weight_scheme": ["SemiOpt1", "SemiOpt2"], "snr_grid_db": [5, 15], "block_size": 20, "master_seed": 8})");
  ASSERT_EQ(run("simulate --workers 1 --config '" + cfg.string() + "' --out '" + (dir_ / "w1").string() + "'"), 0);
  ASSERT_EQ(run("simulate --workers 4 --config '" + cfg.string() + "' --out '" + (dir_ / "w4").string() + "'"), 0);
  ASSERT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + (dir_ / "env").string() + "'",
                "DAF_WORKERS=3"),
            0);
  const auto w1 = slurp(dir_ / "w1" / "simulate.csv");
  EXPECT_EQ(w1, slurp(dir_ / "w4" / "simulate.csv"));
  EXPECT_EQ(w1, slurp(dir_ / "env" / "simulate.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "env" / "manifest.json"));
  EXPECT_EQ(manifest["runs"][0]["workers"], 3);
}

TEST_F(CliTest, BadWorkerSettingsExitTwo) {
  const auto cfg = write("s.json", kSmoke);
  EXPECT_EQ(run("simulate --workers 0 --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 2);
  EXPECT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + dir_.string() + "'", "DAF_WORKERS=zero"), 2);
}

TEST_F(CliTest, TruncationExitsThreeUnlessAllowed) {
  const auto cfg = write("t.json", R"({"fading_case": "CaseI", "variance_scenario": "symmetric",
    "weight_scheme": "SemiOpt1", "snr_grid_db": [40], "stopping": {"max_symbols": 1000}, "block_size": 100})");
  EXPECT_EQ(run("simulate --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 3);
  EXPECT_EQ(column(slurp(dir_ / "simulate.csv"), 12), std::vector<std::string>{"1"});
  EXPECT_EQ(run("simulate --allow-truncation --config '" + cfg.string() + "' --out '" + dir_.string() + "'"), 0);
}

TEST_F(CliTest, ManifestReferencesEachCsvOnce) {
  const auto cfg = write("s.json", kSmoke);
  const std::string o = "--out '" + dir_.string() + "'";
  ASSERT_EQ(run("analyze --config '" + cfg.string() + "' " + o), 0);
  ASSERT_EQ(run("simulate --config '" + cfg.string() + "' " + o), 0);
  ASSERT_EQ(run("analyze --config '" + cfg.string() + "' " + o), 0);
  const auto m = nlohmann::json::parse(slurp(dir_ / "manifest.json"));
  ASSERT_EQ(m["runs"].size(), 2u);
  std::multiset<std::string> csvs;
  for (const auto& r : m["runs"]) {
    csvs.insert(r["csv"].get<std::string>());
    EXPECT_TRUE(r.contains("started"));
    EXPECT_TRUE(r.contains("finished"));
    EXPECT_EQ(r["config_path"], fs::absolute(cfg).string());
  }
  EXPECT_EQ(csvs.count("analyze.csv"), 1u);
  EXPECT_EQ(csvs.count("simulate.csv"), 1u);
  EXPECT_TRUE(m["versions"].contains("daf"));
}

TEST_F(CliTest, ValidateChannelPasses) {
  EXPECT_EQ(run("validate-channel --dopplers 0.001 0.001 --length 2000000 --seed 7"), 0) << out();
  EXPECT_NE(out().find("PASS"), std::string::npos);
  EXPECT_EQ(lines(out()).size(), 2u + 21u + 1u);
}

TEST_F(CliTest, ValidateChannelStaticLink) {
  EXPECT_EQ(run("validate-channel --dopplers 0 0 --variance 2 --length 100000"), 0) << out();
  EXPECT_NE(out().find("PASS"), std::string::npos);
  EXPECT_NE(out().find("  20     2.00000000     1.00000000     1.00000000"), std::string::npos) << out();
}

TEST_F(CliTest, ValidateChannelFailsOnImpossibleTolerance) {
  EXPECT_EQ(run("validate-channel --case CaseIII --link SR --tolerance 1e-6 --length 100000"), 4);
  EXPECT_NE(out().find("FAIL"), std::string::npos);
}

TEST_F(CliTest, ValidateChannelRejectsShortLength) {
  EXPECT_EQ(run("validate-channel --length 1000"), 2);
  EXPECT_EQ(run("validate-channel --link XY"), 2);
}

TEST_F(CliTest, ValidateChannelDump) {
  const auto dump = dir_ / "h.bin";
  ASSERT_EQ(run("validate-channel --case CaseII --link SD --length 100000 --dump '" + dump.string() + "'"), 0);
  EXPECT_EQ(fs::file_size(dump), 1u + 40u + 100000u * 16u);
}
