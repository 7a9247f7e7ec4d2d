#include "cli.hpp"

#include <coherekit/state_io.hpp>
#include <coherekit/states.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coherekit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("coherekit_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, BellCorrelatedCoherenceIsOne) {
  const std::string bell = write("bell.json", state_to_json(bell_state()));
  const Outcome o = call({"measure", "--state", bell, "--measure", "correlated-coherence"});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["command"], "measure");
  EXPECT_EQ(j["values"][0]["value"].get<double>(), 1.0);
  EXPECT_FALSE(j.contains("wall_time"));
}

TEST_F(CliTest, TimingFlagAddsWallTime) {
  const std::string bell = write("bell.json", state_to_json(bell_state()));
  const Outcome o = call({"measure", "--state", bell, "--measure", "coherence", "--timing"});
  ASSERT_EQ(o.code, cli::kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(o.out).contains("wall_time"));
}

TEST_F(CliTest, CsvHeader) {
  const std::string bell = write("bell.json", state_to_json(bell_state()));
  const Outcome o = call({"measure", "--state", bell, "--measure", "discord-sym", "--format", "csv"});
  ASSERT_EQ(o.code, cli::kExitOk);
  EXPECT_EQ(o.out.rfind("command,section,name,value,converged,spread,passed,cases,failures\n", 0), 0u);
  EXPECT_NE(o.out.find("measure,value,"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(call({}).code, cli::kExitParse);
  EXPECT_EQ(call({"measure", "--measure", "coherence"}).code, cli::kExitParse);
  EXPECT_EQ(call({"measure", "--state", path("missing.json"), "--measure", "coherence"}).code, cli::kExitParse);
  const std::string junk = write("junk.json", "{oops");
  EXPECT_EQ(call({"measure", "--state", junk, "--measure", "coherence"}).code, cli::kExitParse);
  const std::string bad = write("bad.json", R"({"dims": [2], "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]})");
  EXPECT_EQ(call({"measure", "--state", bad, "--measure", "coherence"}).code, cli::kExitValidation);
  const std::string wrong = write("wrong.json", R"({"dims": [3], "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]})");
  EXPECT_EQ(call({"measure", "--state", wrong, "--measure", "coherence"}).code, cli::kExitValidation);
  const std::string bell = write("bell.json", state_to_json(bell_state()));
  EXPECT_EQ(call({"measure", "--state", bell, "--measure", "no-such"}).code, cli::kExitParse);
  EXPECT_EQ(call({"verify", "--suite", "no-such"}).code, cli::kExitParse);
  EXPECT_EQ(call({"verify", "--suite", "superadditivity", "--n", "0"}).code, cli::kExitParse);
  EXPECT_EQ(call({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, GenRoundTripsThroughMeasure) {
  const std::string out = path("mixed.json");
  ASSERT_EQ(call({"gen", "--family", "random-mixed", "--dims", "2,3", "--seed", "5", "--out", out}).code, cli::kExitOk);
  const DensityMatrix rho = read_state_file(out);
  EXPECT_EQ(rho.dims(), (Dims{2, 3}));
  const Outcome again = call({"gen", "--family", "random-mixed", "--dims", "2,3", "--seed", "5"});
  ASSERT_EQ(again.code, cli::kExitOk);
  EXPECT_EQ(again.out, read_text_file(out));
  EXPECT_EQ(call({"measure", "--state", out, "--measure", "correlated-coherence"}).code, cli::kExitOk);
}

TEST_F(CliTest, GenMaxCorrFromRhoStar) {
  const std::string star = write("star.json", R"({"dims": [2], "matrix": [[[0.5, 0], [0.25, 0]], [[0.25, 0], [0.5, 0]]]})");
  const std::string mc = path("mc.json");
  ASSERT_EQ(call({"gen", "--family", "max-corr", "--rho-star", star, "--out", mc}).code, cli::kExitOk);
  const Outcome o = call({"measure", "--state", mc, "--measure", "ere"});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  bool found = false;
  for (const auto& v : j["values"]) {
    if (v["name"] == "ere_max_corr") {
      EXPECT_NEAR(v["value"].get<double>(), 0.188722, 1e-6);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, MeasureIsDeterministic) {
  const std::string s = path("s.json");
  ASSERT_EQ(call({"gen", "--family", "random-mixed", "--dims", "2,2", "--seed", "9", "--out", s}).code, cli::kExitOk);
  const std::vector<std::string> args{"measure", "--state", s, "--measure", "discord-min", "--seed", "3", "--restarts", "3"};
  const Outcome a = call(args);
  const Outcome b = call(args);
  ASSERT_EQ(a.code, cli::kExitOk);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, VerifySuitePasses) {
  const Outcome o = call({"verify", "--suite", "identity-sym", "--n", "20", "--seed", "4"});
  ASSERT_EQ(o.code, cli::kExitOk) << o.out;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_FALSE(j["suite_results"].empty());
}

TEST_F(CliTest, VerifyTightToleranceFails) {
  // Round-off alone exceeds 1e-300, so the suite must report failure with exit 1.
  const Outcome o = call({"verify", "--suite", "identity-consumption", "--n", "20", "--seed", "4", "--tol", "1e-300"});
  EXPECT_EQ(o.code, cli::kExitFailure);
  EXPECT_FALSE(nlohmann::json::parse(o.out)["passed"].get<bool>());
}

TEST_F(CliTest, BasisFilesChangeTheFrame) {
  const std::string bell = write("bell.json", state_to_json(bell_state()));
  const double s = 1.0 / std::sqrt(2.0);
  nlohmann::json h;
  h["matrix"] = {{{s, 0.0}, {s, 0.0}}, {{s, 0.0}, {-s, 0.0}}};
  const std::string hb = write("h.json", h.dump());
  const Outcome o = call({"measure", "--state", bell, "--basis", hb, "--basis", hb, "--measure", "correlated-coherence"});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_NEAR(nlohmann::json::parse(o.out)["values"][0]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(call({"measure", "--state", bell, "--basis", hb, "--measure", "coherence"}).code, cli::kExitValidation);
}
