#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dyncp/cli.hpp"
#include "dyncp/errors.hpp"

namespace dyncp::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("dyncp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static CsvTable read(const std::string& file) {
    std::ifstream in(file);
    return CsvTable::read(in);
  }

  fs::path dir_;
};

TEST(Csv, RoundTrip) {
  CsvTable t;
  t.metadata = {"hello", "k: v"};
  t.columns = {"a", "b"};
  t.rows = {{1.0, 2.5e-300}, {-3.25, std::nan("")}};
  std::stringstream ss;
  t.write(ss);
  const CsvTable r = CsvTable::read(ss);
  EXPECT_EQ(r.metadata, t.metadata);
  EXPECT_EQ(r.columns, t.columns);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0][0], 1.0);
  EXPECT_NEAR(r.rows[0][1] / 2.5e-300, 1.0, 1e-11);
  EXPECT_EQ(r.rows[1][0], -3.25);
  EXPECT_TRUE(std::isnan(r.rows[1][1]));
}

TEST(Csv, RaggedRowsRejected) {
  std::stringstream ss("a,b\n1,2\n3\n");
  EXPECT_THROW(CsvTable::read(ss), PreconditionError);
}

TEST(Manifest, JsonRoundTrip) {
  RunManifest m;
  m.command = "dress";
  m.arguments = {"dress", "--z", "3"};
  m.parameters["z"] = 3.0;
  m.tool_version = version();
  const RunManifest back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.arguments, m.arguments);
  EXPECT_EQ(back.parameters, m.parameters);
  EXPECT_THROW(RunManifest::from_json(nlohmann::json::object()), PreconditionError);
}

TEST(Exit, UsageErrors) {
  EXPECT_EQ(invoke({"dress", "--z", "0"}).code, kUsage);
  EXPECT_EQ(invoke({"dress", "--bogus"}).code, kUsage);
  EXPECT_EQ(invoke({}).code, kUsage);
  EXPECT_EQ(invoke({"dress", "--material", "unobtainium"}).code, kUsage);
  EXPECT_EQ(invoke({"resonant", "--material", "perfect", "--z", "1"}).code, kUsage);
  EXPECT_EQ(invoke({"dress", "--closure", "sideways"}).code, kUsage);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
  EXPECT_NE(invoke({"--version"}).out.find(version()), std::string::npos);
}

TEST_F(CliTest, DressWritesCsvAndManifest) {
  const Outcome r = invoke({"dress", "--z", "0.5", "--tmax", "3", "--dt", "0.5", "-o", path("d.csv")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const CsvTable t = read(path("d.csv"));
  const std::vector<std::string> cols{"t", "u_stat", "u_dyn", "delta_u_res", "delta_u_partial", "total", "light_cone"};
  EXPECT_EQ(t.columns, cols);
  ASSERT_EQ(t.rows.size(), 7u);
  EXPECT_LE(std::abs(t.rows[0][5]), 1e-6 * std::abs(t.rows[0][1]));
  EXPECT_EQ(t.rows[2][6], 1.0);  // t = 1 = 2z
  EXPECT_TRUE(fs::exists(path("d.csv.manifest.json")));
}

TEST_F(CliTest, StaticNormalization) {
  ASSERT_EQ(invoke({"dress", "--material", "perfect", "--z", "2", "--tmax", "1", "--dt", "1", "--normalization",
                    "static", "-o", path("n.csv")})
                .code,
            kSuccess);
  EXPECT_NEAR(read(path("n.csv")).rows[0][1], -1.0, 1e-12);
}

TEST_F(CliTest, ReplayReproducesOutput) {
  ASSERT_EQ(invoke({"dispersion", "--points", "6", "-o", path("a.csv")}).code, kSuccess);
  ASSERT_EQ(invoke({"replay", path("a.csv.manifest.json"), "-o", path("b.csv")}).code, kSuccess);
  const CsvTable a = read(path("a.csv"));
  const CsvTable b = read(path("b.csv"));
  EXPECT_EQ(a.columns, b.columns);
  EXPECT_EQ(a.rows, b.rows);
}

TEST_F(CliTest, DispersionRows) {
  ASSERT_EQ(invoke({"dispersion", "--pmin", "0", "--pmax", "0.70710678118654752", "--points", "2", "-o",
                    path("p.csv")})
                .code,
            kSuccess);
  const CsvTable t = read(path("p.csv"));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][4], 0.0);
  // p = w_sp / c: w = -w_sp sqrt(2 - sqrt 2), in units of w_p.
  EXPECT_NEAR(t.rows[1][4], -std::sqrt(2.0 - std::sqrt(2.0)) / std::sqrt(2.0), 1e-9);
}

TEST_F(CliTest, SiDistanceMatchesReduced) {
  // z = 1 c/Omega at 780 nm is 780 / (2 pi) nm.
  ASSERT_EQ(invoke({"dress", "--z-nm", std::to_string(780.0 / (2.0 * M_PI)), "--tmax", "0", "-o", path("si.csv")}).code,
            kSuccess);
  ASSERT_EQ(invoke({"dress", "--z", "1", "--tmax", "0", "-o", path("red.csv")}).code, kSuccess);
  EXPECT_NEAR(read(path("si.csv")).rows[0][1] / read(path("red.csv")).rows[0][1], 1.0, 1e-5);
}

TEST_F(CliTest, ResonantOmitsRowsInsideLightCone) {
  ASSERT_EQ(invoke({"resonant", "--z", "1", "--tmin", "0", "--tmax", "4", "--dt", "0.5", "-o", path("r.csv")}).code,
            kSuccess);
  const CsvTable t = read(path("r.csv"));
  for (const auto& row : t.rows) EXPECT_GT(row[0], 2.0);
  std::ifstream in(path("r.csv.manifest.json"));
  const RunManifest m = RunManifest::from_json(nlohmann::json::parse(in));
  EXPECT_EQ(m.command, "resonant");
  EXPECT_TRUE(m.results.contains("note"));
}

TEST_F(CliTest, PartialNeedsAQuench) {
  EXPECT_EQ(invoke({"partial", "--z", "1", "-o", path("x.csv")}).code, kUsage);
  ASSERT_EQ(invoke({"partial", "--z", "1", "--ratio", "0.9", "--tmax", "1", "--dt", "1", "-o", path("x.csv")}).code,
            kSuccess);
  const CsvTable t = read(path("x.csv"));
  EXPECT_FALSE(std::isnan(t.rows[0][4]));
}

TEST_F(CliTest, DecayTimeManifestHasFittedTau) {
  ASSERT_EQ(invoke({"decay-time", "--zmin", "2", "--zmax", "4", "--nz", "2", "-o", path("t.csv")}).code, kSuccess);
  std::ifstream in(path("t.csv.manifest.json"));
  const RunManifest m = RunManifest::from_json(nlohmann::json::parse(in));
  const double tau = m.results.at("fitted_tau").get<double>();
  EXPECT_GT(tau, 0.9);
  EXPECT_LT(tau, 1.5);
}

}  // namespace
}  // namespace dyncp::cli
