#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using namespace exactpot;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const auto* info = testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() / (std::string("exactpot_cli_") + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(CliConstruct, DivHasDegreeTwo) {
  const auto r = run({"construct", "--operator", "div3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["degree"], 2);
  EXPECT_EQ(r.json()["r"], 1);
  EXPECT_TRUE(r.json()["warnings"].empty());
}

TEST(CliConstruct, WaveWarnsAndReturnsZero) {
  const auto r = run({"construct", "--operator", "wave2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["degree"], "zero matrix");
  EXPECT_EQ(matrix_from_json(r.json()["B"]), PolyMatrix(1, 1, 2));
  ASSERT_EQ(r.json()["warnings"].size(), 1u);
  EXPECT_NE(r.json()["warnings"][0].get<std::string>().find("not constant rank"), std::string::npos);
  EXPECT_NE(r.err.find("not constant rank"), std::string::npos);
}

TEST(CliConstruct, ZeroGivesIdentity) {
  const auto r = run({"construct", "--operator", "zero"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(matrix_from_json(r.json()["B"]), PolyMatrix::identity(3, 3));
}

TEST(CliConstruct, ReadsOperatorFilesAndReportsParseErrors) {
  const auto dir = scratch_dir();
  std::ofstream(dir / "op.json") << to_json(catalog::get("curl3").op, "my_curl").dump(1);
  const auto ok = run({"construct", "--operator", (dir / "op.json").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.json()["operator"], "my_curl");
  EXPECT_EQ(ok.json()["degree"], 4);

  std::ofstream(dir / "broken.json") << "{\n  \"symbol\": [1,\n  oops]\n}\n";
  const auto bad = run({"construct", "--operator", (dir / "broken.json").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("broken.json:3:"), std::string::npos) << bad.err;

  std::ofstream(dir / "inhom.json")
      << R"({"symbol":{"rows":1,"cols":1,"n":2,"entries":[[[{"c":"1","e":[1,0]},{"c":"1","e":[2,0]}]]]}})";
  const auto inhom = run({"construct", "--operator", (dir / "inhom.json").string()});
  EXPECT_EQ(inhom.code, 2);
  EXPECT_NE(inhom.err.find("not homogeneous"), std::string::npos) << inhom.err;
}

TEST(CliVerify, CurlIsExact) {
  const auto r = run({"verify", "--operator", "curl3", "--samples", "100"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["verdict"], "exact");
  EXPECT_TRUE(r.json()["failures"].empty());
}

TEST(CliVerify, WaveWitnessLiesOnTheCone) {
  const auto r = run({"verify", "--operator", "wave2"});
  ASSERT_EQ(r.code, 0);
  const auto w = r.json()["rank_drop_witness"];
  ASSERT_EQ(w.size(), 2u);
  const auto a = parse_rational(w[0].get<std::string>());
  const auto b = parse_rational(w[1].get<std::string>());
  EXPECT_EQ(abs(a), abs(b));
  EXPECT_EQ(r.json()["constant_rank"], "no");
}

TEST(CliVerify, SameSeedSameBytes) {
  const auto a = run({"verify", "--operator", "wave2", "--seed", "1"});
  const auto b = run({"verify", "--operator", "wave2", "--seed", "1"});
  const auto c = run({"verify", "--operator", "wave2", "--seed", "2"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(CliPinv, SymbolicAndEvaluated) {
  const auto r = run({"pinv", "--operator", "div2", "--at", "1,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["value"], Json::parse(R"([["1/5"],["2/5"]])"));
  const auto p = run({"pinv", "--operator", "div2", "--projector", "--at", "1,2"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(p.json()["value"], Json::parse(R"([["4/5","-2/5"],["-2/5","1/5"]])"));
  EXPECT_EQ(run({"pinv", "--operator", "div2", "--at", "1,2,3"}).code, 2);
  EXPECT_EQ(run({"pinv", "--operator", "wave2", "--at", "1,1"}).code, 3);
  EXPECT_EQ(run({"pinv"}).code, 2);
}

TEST(CliPinv, ReadsMatrixFile) {
  const auto dir = scratch_dir();
  PolyMatrix m(2, 2, 1);
  m(0, 0) = MultiPoly::constant(1, 1);
  m(0, 1) = MultiPoly::constant(1, 1);
  std::ofstream(dir / "m.json") << to_json(m).dump();
  const auto r = run({"pinv", "--matrix", (dir / "m.json").string(), "--at", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["value"], Json::parse(R"([["1/2","0"],["1/2","0"]])"));
}

TEST(CliProject, DivRandomFieldWritesFilesAndReport) {
  const auto dir = scratch_dir();
  const auto r = run({"project", "--operator", "div3", "--field", "random", "--grid", "16", "--seed", "4", "--out",
                      dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_LT(j["Av1_residual"].get<double>(), 1e-8);
  EXPECT_LT(j["reassembly_error"].get<double>(), 1e-12);
  EXPECT_LT(j["Bu_minus_v1"].get<double>(), 1e-8);
  EXPECT_EQ(j["neg_sobolev_norms"].size(), 1u);
  for (const auto* name : {"v1.field", "v2.field", "u.field"}) {
    const auto f = load_grid_field((dir / name).string());
    EXPECT_EQ(f.shape(), (std::vector<std::size_t>{16, 16, 16}));
    EXPECT_EQ(f.channels(), 3u);
  }
  EXPECT_EQ(Json::parse(slurp(dir / "report.json")), j);
}

TEST(CliProject, WaveIsRefused) {
  const auto dir = scratch_dir();
  const auto r = run({"project", "--operator", "wave2", "--grid", "8", "--out", dir.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("not of constant rank"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "v1.field"));
}

TEST(CliProject, CurlKeepsGradientFields) {
  const auto dir = scratch_dir();
  const auto r = run({"project", "--operator", "curl3", "--field", "gradient", "--grid", "16", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto norms = r.json()["norms"];
  EXPECT_NEAR(norms["v1"].get<double>() / norms["v"].get<double>(), 1.0, 1e-10);
}

TEST(CliProject, ReadsFieldFiles) {
  const auto dir = scratch_dir();
  save_grid_field((dir / "in.field").string(), random_band_limited({8, 8}, 2, 2, 5));
  const auto r = run({"project", "--operator", "div2", "--field", (dir / "in.field").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["shape"], Json::parse("[8,8]"));

  std::ofstream csv(dir / "in.csv");
  csv << "# shape=4x4 channels=2\n";
  for (int p = 0; p < 16; ++p) csv << (p % 4) << "," << (p / 4) << "\n";
  csv.close();
  const auto c = run({"project", "--operator", "div2", "--field", (dir / "in.csv").string(), "--out", dir.string()});
  ASSERT_EQ(c.code, 0) << c.err;

  const auto wrong = run({"project", "--operator", "div3", "--field", (dir / "in.field").string(), "--out",
                          dir.string()});
  EXPECT_EQ(wrong.code, 2);
}

TEST(CliProject, RejectsBadGrid) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run({"project", "--operator", "div2", "--grid", "12", "--out", dir.string()}).code, 2);
  EXPECT_EQ(run({"project", "--operator", "grad_scalar", "--field", "solenoidal", "--out", dir.string()}).code, 2);
}

TEST(CliCatalog, ListsEntries) {
  const auto r = run({"catalog"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json().size(), 7u);
  const auto one = run({"catalog", "--id", "mixed"});
  EXPECT_EQ(one.json()["expected_B_degree"], 4);
  EXPECT_EQ(run({"catalog", "--id", "laplace"}).code, 2);
}

TEST(CliUsage, BadInvocations) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify"}).code, 2);
  EXPECT_EQ(run({"verify", "--operator", "div3", "--samples", "0"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
