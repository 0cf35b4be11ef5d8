#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "homeo/cli.hpp"
#include "homeo/io.hpp"
#include "homeo/presets.hpp"

using namespace homeo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path data_dir() {
  const char* env = std::getenv("HOMEO_DATA_DIR");
  return env ? fs::path(env) : fs::path("data");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("homeo_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

std::string weights(const std::string& name) { return (data_dir() / "weights" / name).string(); }
std::string protocol(const std::string& name) { return (data_dir() / "protocols" / name).string(); }

}  // namespace

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kUsage);
  EXPECT_EQ(run({"moduli"}).code, cli::kUsage);
  EXPECT_EQ(run({"moduli", "--weights", weights("stripe_l2.json"), "--nope"}).code, cli::kUsage);
  EXPECT_EQ(run({"verify", "--seed", "abc"}).code, cli::kUsage);
}

TEST_F(CliTest, HelpSucceeds) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kSuccess);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, ModuliOfStripeL2) {
  const auto r = run({"moduli", "--weights", weights("stripe_l2.json")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_NE(r.out.find("E     = 1.79504907"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("nu    = -0.21890489"), std::string::npos) << r.out;
}

TEST_F(CliTest, ModuliWarnsOnZeroShear) {
  const auto r = run({"moduli", "--weights", weights("stripe_l1.json")});
  ASSERT_EQ(r.code, cli::kSuccess);
  EXPECT_NE(r.out.find("mu    = 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("warning: shear modulus is zero"), std::string::npos);
}

TEST_F(CliTest, ModuliReportsDegenerateMaterial) {
  io::WeightsDocument zero{};
  write("zero.json", io::format_weights(zero));
  const auto r = run({"moduli", "--weights", path("zero.json")});
  EXPECT_EQ(r.code, cli::kNumerical);
  EXPECT_NE(r.err.find("degenerate material"), std::string::npos);
}

TEST_F(CliTest, SimulateStripeWritesPredictionCsv) {
  const auto r = run({"simulate", "--weights", weights("stripe_l2.json"), "--data", protocol("stripe_compression.csv"),
                      "--out", path("pred.csv")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  std::ifstream in(path("pred.csv"));
  const auto rows = io::parse_prediction(in);
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_GT(rows[170].s[0], 10.0);
  EXPECT_LT(rows[171].s[0], rows[170].s[0]);
  EXPECT_EQ(rows[200].s[1], 0.0);
}

TEST_F(CliTest, SimulateToStdoutWithEps) {
  const auto r = run({"simulate", "--weights", weights("stripe_l2.json"), "--data", protocol("stripe_stretch.csv"),
                      "--eps", "1e-10"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  std::istringstream in(r.out);
  const auto rows = io::parse_prediction(in);
  EXPECT_EQ(rows.size(), 401u);
  EXPECT_GT(rows[171].s[0], rows[170].s[0]);
}

TEST_F(CliTest, SimulateZeroPotentialScalesGivesZeroStress) {
  auto w = presets::stripe_l2();
  w.potential = PotentialWeights{};
  w.potential.eta_hat = 0.3;
  write("w.json", io::format_weights({w.energy, w.potential}));
  // Without a potential nothing grows, so only an unloaded history is stress free.
  write("rest.csv", "time_h,C11,C22,C33,mask1,mask2,mask3\n0,1,1,1,M,Z,Z\n1,1,1,1,M,Z,Z\n2,1,1,1,M,Z,Z\n");
  const auto r = run({"simulate", "--weights", path("w.json"), "--data", path("rest.csv")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  std::istringstream in(r.out);
  const auto rows = io::parse_prediction(in);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    for (double s : row.s) EXPECT_EQ(s, 0.0);
    EXPECT_EQ(row.det_cg, 1.0);
  }
}

TEST_F(CliTest, SimulateCrossBiaxialGivesTwoStressDirections) {
  const auto r = run({"simulate", "--weights", weights("cross_l2.json"), "--data", protocol("cross_biaxial_stretch.csv")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  std::istringstream in(r.out);
  const auto rows = io::parse_prediction(in);
  EXPECT_GT(rows.back().s[0], 0.0);
  EXPECT_GT(rows.back().s[1], 0.0);
  EXPECT_EQ(rows.back().s[2], 0.0);
}

TEST_F(CliTest, SimulateMalformedCsvIsParseError) {
  write("bad.csv", "time_h,C11,C22,C33,mask1,mask2,mask3\n0,1,1,1,M,Z,Z\n1,1,oops,1,M,Z,Z\n");
  const auto r = run({"simulate", "--weights", weights("stripe_l2.json"), "--data", path("bad.csv")});
  EXPECT_EQ(r.code, cli::kParse);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulateMissingWeightsFileIsParseError) {
  EXPECT_EQ(run({"simulate", "--weights", path("nope.json"), "--data", protocol("stripe_stretch.csv")}).code,
            cli::kParse);
}

TEST_F(CliTest, SimulationFailureIsNumerical) {
  write("w.json", io::format_weights({presets::stripe_l2().energy, PotentialWeights{}}));
  const auto r = run({"simulate", "--weights", path("w.json"), "--data", protocol("stripe_stretch.csv")});
  EXPECT_EQ(r.code, cli::kNumerical);
  EXPECT_NE(r.err.find("step 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainOnSimulatedFileReachesNearZeroLoss) {
  ASSERT_EQ(run({"simulate", "--weights", weights("stripe_l2.json"), "--data", protocol("stripe_compression.csv"),
                 "--as-experiment", "--out", path("synthetic.csv")})
                .code,
            cli::kSuccess);
  const auto w = presets::stripe_l2();
  // Adam moves every weight by about the learning rate per epoch even at the optimum.
  write("cfg.json", "{\"epochs\": 5, \"learning_rate\": 1e-7, \"reg_mode\": \"none\", \"eta_reg\": 0, "
                    "\"initial_weights\": " +
                        io::format_weights({w.energy, w.potential}) + "}");
  const auto r = run({"train", "--data", path("synthetic.csv"), "--config", path("cfg.json"), "--out",
                      path("trained.json"), "--loss", path("loss.csv")});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  const auto doc = io::read_weights(path("trained.json"));
  EXPECT_GT(doc.energy.w12, 0.0);
  std::ifstream loss(path("loss.csv"));
  std::string header, line, first, last;
  std::getline(loss, header);
  EXPECT_EQ(header, "epoch,total,data,penalty");
  int rows = 0;
  while (std::getline(loss, line)) {
    if (rows++ == 0) first = line;
    last = line;
  }
  EXPECT_EQ(rows, 5);
  const auto total = [](const std::string& row) { return std::stod(row.substr(row.find(',') + 1)); };
  EXPECT_LT(total(first), 1e-20);
  EXPECT_LT(total(last), 1e-8);
  EXPECT_NE(r.out.find("final loss"), std::string::npos);
  EXPECT_NE(r.out.find("E     ="), std::string::npos);
}

TEST_F(CliTest, TrainWritesThirteenWeightsAndDefaultLossPath) {
  ASSERT_EQ(run({"simulate", "--weights", weights("stripe_l2.json"), "--data", protocol("stripe_compression.csv"),
                 "--as-experiment", "--out", path("synthetic.csv")})
                .code,
            cli::kSuccess);
  write("cfg.json", R"({"epochs": 3})");
  const auto r = run({"train", "--data", path("synthetic.csv"), "--data", path("synthetic.csv"), "--config",
                      path("cfg.json"), "--out", path("w.json"), "--seed", "4"});
  ASSERT_EQ(r.code, cli::kSuccess) << r.err;
  EXPECT_TRUE(fs::exists(path("w.loss.csv")));
  const auto text = io::read_text(path("w.json"));
  for (auto name : kWeightNames) EXPECT_NE(text.find("\"" + std::string(name) + "\""), std::string::npos);
}

TEST_F(CliTest, TrainRejectsUnknownConfigKey) {
  write("cfg.json", R"({"epochs": 3, "momentum": 0.9})");
  const auto r = run({"train", "--data", protocol("stripe_compression.csv"), "--config", path("cfg.json"), "--out",
                      path("w.json")});
  EXPECT_EQ(r.code, cli::kParse);
}

TEST_F(CliTest, TrainRequiresExperimentFiles) {
  const auto r = run({"train", "--data", protocol("stripe_compression.csv"), "--out", path("w.json")});
  EXPECT_EQ(r.code, cli::kParse);
  EXPECT_EQ(run({"train", "--out", path("w.json")}).code, cli::kUsage);
}

TEST_F(CliTest, VerifyPassesAndWritesReport) {
  const auto r = run({"verify", "--seed", "3", "--out", path("report.txt")});
  EXPECT_EQ(r.code, cli::kSuccess) << r.out;
  const auto report = io::read_text(path("report.txt"));
  EXPECT_EQ(report, r.out);
  EXPECT_NE(report.find("max_violation"), std::string::npos);
  EXPECT_NE(report.find("determinant_preservation_shear_flow"), std::string::npos);
}

TEST_F(CliTest, CommandsAreDeterministic) {
  const std::vector<std::string> args{"simulate", "--weights", weights("cross_l1.json"), "--data",
                                      protocol("cross_semi_biaxial_compression.csv")};
  EXPECT_EQ(run(args).out, run(args).out);
}
