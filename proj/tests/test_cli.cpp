#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "willmore/cli.hpp"

using namespace willmore;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("willmore_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "willmore");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scene(const char* name) { return std::string(WILLMORE_SCENE_DIR) + "/" + name; }

}  // namespace

TEST(EnvelopeTable, DocumentedRows) {
  const auto iso = cli::emit_envelope_table(Penalty(4), {}, SymMat2::diag(1, 1), 0, 4, 5).str();
  EXPECT_NE(iso.find("t,f_raw,h_lambda,G\n0,0,0,0\n1,3,3,4\n"), std::string::npos);
  const auto flat = cli::emit_envelope_table(Penalty(4), {}, SymMat2::diag(1, 0), 0, 1, 2).str();
  EXPECT_EQ(flat, "t,f_raw,h_lambda,G\n0,0,0,0\n1,2.5,2,2\n");
  EXPECT_THROW(cli::emit_envelope_table(Penalty(4), {}, SymMat2::diag(1, 0), 0, 1, 1), ValidationError);
}

TEST(EnvelopeTable, RowwiseOrderingOnATiltedRay) {
  const auto t = cli::emit_envelope_table(Penalty(2.5), {0.7, -0.4}, {0.3, 1.1, -0.8}, 0, 6, 301);
  EXPECT_EQ(t.rows(), 301u);
}

TEST(Cli, Relax1dExample) {
  const fs::path d = fresh_dir("relax1d");
  const auto r = invoke({"relax1d", "--lambda", "4", "--range", "-8", "8", "--points", "4096", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(d / "relax1d.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kappa,f_raw,envelope_closed,envelope_numeric");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4098);
  const auto pos = r.out.find("sup_error_inner_half ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(r.out.substr(pos + 21)), 1e-2);
  EXPECT_TRUE(fs::exists(d / "relax1d.gp"));
  fs::remove_all(d);
}

TEST(Cli, LimitEnergyOfTheTent) {
  const fs::path d = fresh_dir("limit");
  const auto r = invoke({"limit-energy", scene("tent.scene"), "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bulk 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("jump 3.14159265359\n"), std::string::npos);
  EXPECT_NE(r.out.find("total 3.14159265359\n"), std::string::npos);
  EXPECT_EQ(slurp(d / "limit_energy.csv").substr(0, 16), "component,value\n");
  fs::remove_all(d);
}

TEST(Cli, SelftestPassesAndRepeatsByteForByte) {
  const fs::path d1 = fresh_dir("self1"), d2 = fresh_dir("self2");
  const auto a = invoke({"selftest", "--out", d1.string()});
  const auto b = invoke({"selftest", "--out", d2.string()});
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(slurp(d1 / "selftest.csv"), slurp(d2 / "selftest.csv"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Cli, JumpcostSeedControlsTheData) {
  const fs::path d1 = fresh_dir("jc1"), d2 = fresh_dir("jc2"), d3 = fresh_dir("jc3");
  ASSERT_EQ(invoke({"jumpcost", "--random", "4", "--seed", "9", "--points", "64", "--out", d1.string()}).code, 0);
  ASSERT_EQ(invoke({"jumpcost", "--random", "4", "--seed", "9", "--points", "64", "--out", d2.string()}).code, 0);
  ASSERT_EQ(invoke({"jumpcost", "--random", "4", "--seed", "10", "--points", "64", "--out", d3.string()}).code, 0);
  EXPECT_EQ(slurp(d1 / "jumpcost.csv"), slurp(d2 / "jumpcost.csv"));
  EXPECT_NE(slurp(d1 / "jumpcost.csv"), slurp(d3 / "jumpcost.csv"));
  for (const auto& d : {d1, d2, d3}) fs::remove_all(d);
}

TEST(Cli, JumpcostExplicitDatum) {
  const fs::path d = fresh_dir("jc");
  const auto r = invoke({"jumpcost", "--a", "0", "0", "--b", "0", "1", "--nu", "0", "1", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(d / "jumpcost.csv").find("0,0,0,1,0,1,1.57079632679,"), std::string::npos);
  EXPECT_EQ(invoke({"jumpcost", "--a", "0", "0", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"jumpcost", "--a", "0", "0", "--b", "0", "1", "--nu", "0", "2", "--out", d.string()}).code, 2);
  fs::remove_all(d);
}

TEST(Cli, LaminateWithCorrector) {
  const fs::path d = fresh_dir("lam");
  const auto r = invoke({"laminate", "--lambda", "9", "--xi", "1", "0", "1", "--refinement", "8", "--copies", "1", "2",
                         "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("predicted_value 3.33333333333\n"), std::string::npos);
  const std::string c = slurp(d / "corrector.csv");
  EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(d / "laminate_field.csv"));
  EXPECT_EQ(invoke({"laminate", "--lambda", "1", "--xi", "2", "0", "0", "--out", d.string()}).code, 2);
  fs::remove_all(d);
}

TEST(Cli, RecoveryOnACoarseGrid) {
  const fs::path d = fresh_dir("rec");
  const auto r = invoke({"recovery", scene("tent.scene"), "--lambda", "100", "1000", "--grid", "129", "--out", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(d / "recovery.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "lambda,epsilon,energy,limit,gap");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(d / "recovery_detail.csv"));
  EXPECT_EQ(invoke({"recovery", scene("tent.scene"), "--lambda", "1000", "100", "--grid", "129", "--out", d.string()}).code, 2);
  fs::remove_all(d);
}

TEST(Cli, ExitCodes) {
  const fs::path d = fresh_dir("codes");
  EXPECT_EQ(invoke({"relax1d", "--lambda", "-1", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"relax1d", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"relax1d", "--lambda", "4", "--range", "-8", "7", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"relax1d", "--lambda", "4", "--points", "4095", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"limit-energy", "/nonexistent.scene", "--out", d.string()}).code, 2);
  EXPECT_EQ(invoke({"selftest", "--out", "/proc/not_writable"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  fs::remove_all(d);
}

TEST(Cli, MalformedSceneReportsTheField) {
  const fs::path d = fresh_dir("bad");
  fs::create_directories(d);
  std::ofstream(d / "bad.scene") << "{\n  \"domain\": 3\n}\n";
  const auto r = invoke({"limit-energy", (d / "bad.scene").string(), "--out", d.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("domain"), std::string::npos);
  fs::remove_all(d);
}
