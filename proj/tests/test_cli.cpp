#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun
{
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch()
{
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("kaqgeom_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run(const std::string & args)
{
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(KAQGEOM_CLI) + " " + args + " 2>" + err.string();
  CliRun r;
  FILE * pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST(Cli, EomKillingCartan)
{
  const CliRun r = run("eom --family bp --t 0 --s 0 --gamma 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["lambda"].get<double>(), 25.0, 1e-10);
  EXPECT_TRUE(j["critical"].get<bool>());
  EXPECT_EQ(j["diagonal"].size(), 15u);
}

TEST(Cli, CurvatureKillingCartan)
{
  const CliRun r = run("curvature --family kc");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["R"].get<double>(), 15.0, 1e-9);
}

TEST(Cli, UsageErrors)
{
  const CliRun unknown = run("eom --family nope");
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("unknown family"), std::string::npos);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_TRUE(unknown.out.empty());
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("scan --family bp --steps 1").code, 2);
  EXPECT_EQ(run("contour --family bp --out x.csv --t-range 3:1").code, 2);
  EXPECT_EQ(run("kaq-verify --family ukaq_full --weights r1=abc").code, 2);
  EXPECT_EQ(run("--format yaml curvature --family kc").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, RequireChecksExitThree)
{
  EXPECT_EQ(run("eom --family bp --t 1 --s 0.1 --gamma 1 --require-critical").code, 3);
  EXPECT_EQ(run("eom --family jensen_so4 --gamma 0 --require-critical").code, 0);
  EXPECT_EQ(run("scan --family bp --a 0.1 --gamma 1 --steps 100 --require-root").code, 3);
}

TEST(Cli, FileErrorsExitFour)
{
  EXPECT_EQ(run("contour --family ab --grid 16 --out /nonexistent_dir/x.csv").code, 4);
  EXPECT_EQ(run("--config /nonexistent_dir/cfg curvature --family kc").code, 4);
}

TEST(Cli, ScanFindsNonJensenRoot)
{
  const fs::path slice = scratch() / "slice.json";
  const CliRun r = run("--quiet scan --family bp --a -2.06 --gamma 1 --slice-out " + slice.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["records"].size(), 1u);
  EXPECT_NEAR(j["records"][0]["t"].get<double>(), -1.67, 0.05);
  EXPECT_EQ(j["records"][0]["kind"], "critical");
  const json s = json::parse(slurp(slice));
  ASSERT_TRUE(s.is_array());
  EXPECT_EQ(s.size(), 601u);
  EXPECT_TRUE(s[0].contains("t"));
  EXPECT_EQ(s[0]["diagonals"].size(), 3u);
}

TEST(Cli, ContourFilesFollowTheGridFormat)
{
  const fs::path csv = scratch() / "grid.csv";
  const CliRun r = run("--quiet contour --family ab --gamma 1 --grid 24 --out " + csv.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(csv);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,s,loss,residual,lambda");
  const std::regex num(R"(-?\d\.\d{12}e[+-]\d{2,3})");
  const std::regex row(R"(-?\d\.\d{12}e[+-]\d{2,3}(,-?\d\.\d{12}e[+-]\d{2,3}){4})");
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(std::regex_match(line, row)) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 24 * 24);
  EXPECT_EQ(text.back(), '\n');

  const json markers = json::parse(slurp(csv.string() + ".critical.json"));
  ASSERT_TRUE(markers.is_array());
  int nontrivial = 0;
  for (const auto & m : markers) {
    EXPECT_TRUE(m.contains("residual"));
    EXPECT_TRUE(m.contains("threshold"));
    if (!m["trivial"].get<bool>()) ++nontrivial;
  }
  EXPECT_EQ(nontrivial, 1);
}

TEST(Cli, SeededSamplesAreByteIdentical)
{
  const fs::path a = scratch() / "a.csv", b = scratch() / "b.csv", c = scratch() / "c.csv";
  ASSERT_EQ(run("--quiet sample --family pkaq --t 1 --s -1 --count 500 --seed 42 --out " + a.string()).code, 0);
  ASSERT_EQ(run("--quiet --workers 3 sample --family pkaq --t 1 --s -1 --count 500 --seed 42 --out " + b.string()).code, 0);
  ASSERT_EQ(run("--quiet sample --family pkaq --t 1 --s -1 --count 500 --seed 43 --out " + c.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
  EXPECT_EQ(slurp(a).substr(0, 5), "draw,");
}

TEST(Cli, ConfigFileAndFlagPrecedence)
{
  const fs::path cfg = scratch() / "eom.cfg";
  std::ofstream(cfg) << "# eom at the Killing-Cartan point\nfamily = bp\ngamma = 1\nquiet = true\n";
  const CliRun from_file = run("--config " + cfg.string() + " eom");
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NEAR(json::parse(from_file.out)["lambda"].get<double>(), 25.0, 1e-10);
  const CliRun overridden = run("--config " + cfg.string() + " eom --gamma 0.5");
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_NEAR(json::parse(overridden.out)["lambda"].get<double>(), 13.0, 1e-10);
}

TEST(Cli, KaqVerifyAndCsvFormat)
{
  const CliRun r = run("kaq-verify --family ukaq --t 0.8 --s -0.3 --require-kaq");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["is_kaq"].get<bool>());
  EXPECT_EQ(j["decoded_basis"].size(), 15u);
  const CliRun csv = run("--format csv check-algebra --n 4");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.substr(0, 10), "key,value\n");
  EXPECT_NE(csv.out.find("passed,true"), std::string::npos);
}
