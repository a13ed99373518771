#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gk/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int rc;
  std::string out;
};

Run gk_run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" GK_CLI_PATH "' " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("gk_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string file(const std::string& name, const std::string& content) {
    auto p = (dir / name).string();
    std::ofstream(p) << content;
    return p;
  }
  std::string path(const std::string& name) { return (dir / name).string(); }

  fs::path dir;
};

gk::json parse(const std::string& s) { return gk::json::parse(s); }

}  // namespace

TEST_F(Cli, EvalTriple) {
  auto r = gk_run("eval --precision-bits 128");
  ASSERT_EQ(r.rc, 0);
  auto j = parse(r.out);
  EXPECT_EQ(j["triple"]["L"]["re"].get<std::string>().substr(0, 12), "1.5849625007");
  EXPECT_EQ(j["config"]["precision_bits"], 128);
  EXPECT_FALSE(j["config"].contains("jobs"));
  EXPECT_EQ(j["subcommand"], "eval");
}

TEST_F(Cli, EvalUnitPolynomialIsExact) {
  auto r = gk_run("eval --poly 1");
  ASSERT_EQ(r.rc, 0);
  auto v = parse(r.out)["values"][0]["value"];
  EXPECT_EQ(v["re"], "1");
  EXPECT_EQ(v["im"], "0");
  EXPECT_EQ(v["rad"], "0");
}

TEST_F(Cli, MalformedInputsExit2) {
  EXPECT_EQ(gk_run("eval --alpha1 " + file("bad.json", "{\"minpoly\": [1, 2")).rc, 2);
  EXPECT_EQ(gk_run("eval --alpha1 " + file("nobox.json", "{\"minpoly\": [-2, 0, 1]}")).rc, 2);
  EXPECT_EQ(gk_run("eval --poly 'x+'").rc, 2);
  EXPECT_EQ(gk_run("eval --poly w").rc, 2);
  EXPECT_EQ(gk_run("eval --no-such-flag").rc, 2);
  EXPECT_EQ(gk_run("").rc, 2);
  EXPECT_EQ(gk_run("eliminate chain --in " + file("bad.json", "[1,")).rc, 2);
  EXPECT_EQ(gk_run("eval --config " + file("c.txt", "nonsense_key = 3\n")).rc, 2);
  EXPECT_EQ(gk_run("eval --config " + file("c.txt", "precision_bits = many\n")).rc, 2);
}

TEST_F(Cli, PrecisionRange) {
  EXPECT_EQ(gk_run("eval --precision-bits 63").rc, 2);
  EXPECT_EQ(gk_run("eval --precision-bits 65537").rc, 2);
  EXPECT_EQ(gk_run("eval --precision-bits 64").rc, 0);
  EXPECT_EQ(gk_run("eval", "GK_PRECISION_BITS=10").rc, 2);
}

TEST_F(Cli, ConfigPrecedence) {
  auto cfg = file("run.cfg", "# test config\nprecision_bits = 192\neps = 0.25\n");
  auto bits = [&](const std::string& args, const std::string& env) {
    auto r = gk_run("eval " + args, env);
    EXPECT_EQ(r.rc, 0) << args;
    return r.rc == 0 ? parse(r.out)["config"]["precision_bits"].get<long>() : -1;
  };
  EXPECT_EQ(bits("", ""), 256);
  EXPECT_EQ(bits("", "GK_PRECISION_BITS=320"), 320);
  EXPECT_EQ(bits("--config " + cfg, "GK_PRECISION_BITS=320"), 192);
  EXPECT_EQ(bits("--config " + cfg + " --precision-bits 100", "GK_PRECISION_BITS=320"), 100);
  auto r = gk_run("eval --config " + cfg);
  EXPECT_DOUBLE_EQ(parse(r.out)["config"]["eps"].get<double>(), 0.25);
}

TEST_F(Cli, DeterministicJson) {
  auto a = gk_run("eval --poly 'x^2-y' --precision-bits 200"), b = gk_run("eval --poly 'x^2-y' --precision-bits 200 --jobs 3");
  EXPECT_EQ(a.rc, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(Cli, ConstructAuxDesk) {
  auto a1 = file("a1.json", "\"2\""), a2 = file("a2.json", "3"),
       b = file("b.json", R"({"minpoly": [-2, 0, 1], "box": {"re": ["1", "2"], "im": ["0", "0"]}})");
  auto r = gk_run("construct-aux --n 1 --d1 1 --d2 5 --alpha1 " + a1 + " --alpha2 " + a2 + " --beta " + b +
                  " --precision-bits 512 --out " + path("aux.json"));
  ASSERT_EQ(r.rc, 0);
  auto j = parse(gk::read_file(path("aux.json")));
  EXPECT_TRUE(j["verification"]["ok"].get<bool>());
  EXPECT_TRUE(j["verification"]["grid"]["ok"].get<bool>());
  EXPECT_TRUE(j["aux"]["verified_exact"].get<bool>());
  EXPECT_FALSE(j["aux"]["psi"].empty());
  EXPECT_EQ(j["config"]["precision_bits"], 512);
  EXPECT_EQ(gk_run("construct-aux --beta 3/2").rc, 2);
}

TEST_F(Cli, EliminateSemires) {
  auto r = gk_run("eliminate semires --p 'x*y+1' --q 'y^2+x'");
  ASSERT_EQ(r.rc, 0);
  auto c = parse(r.out)["certificate"];
  EXPECT_TRUE(c["ok"].get<bool>());
  EXPECT_EQ(c["m"], 1);
  EXPECT_EQ(c["n"], 2);
  auto in = file("pq.json", R"({"P": "y-2", "Q": "y-3"})");
  auto s = parse(gk_run("eliminate semires --in " + in).out);
  EXPECT_EQ(s["certificate"]["height_claimed"], "486");
  EXPECT_EQ(s["inputs"]["P"], "y-2");
}

TEST_F(Cli, EliminateChain) {
  auto in = file("chain.json", R"({"A1": "z-3", "P": "y^2-2", "Q": "z-7"})");
  auto r = gk_run("eliminate chain --in " + in);
  ASSERT_EQ(r.rc, 0);
  auto j = parse(r.out);
  EXPECT_EQ(j["A4"], "16");
  EXPECT_TRUE(j["certificate"]["pass"].get<bool>());
  EXPECT_EQ(j["step0"]["path"], "nearest_root");
}

TEST_F(Cli, ScanCsvByteIdenticalAcrossJobs) {
  auto base = std::string("scan --deg-cap 1 --height-cap 2 --precision-bits 256 --out ");
  ASSERT_EQ(gk_run(base + path("a.csv") + " --jobs 1").rc, 0);
  ASSERT_EQ(gk_run(base + path("b.csv") + " --jobs 8").rc, 0);
  auto a = gk::read_file(path("a.csv")), b = gk::read_file(path("b.csv"));
  EXPECT_EQ(a, b);
  std::istringstream in(a);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first.rfind("# config ", 0), 0u);
  EXPECT_EQ(second, "P,Q,log_max,log_r,fitted_exponent,status");
  EXPECT_EQ(a.find("unresolved"), std::string::npos);
}

TEST_F(Cli, Bounds) {
  auto c = gk_run("bounds corollary --p 'x*y'");
  EXPECT_EQ(c.rc, 0);
  EXPECT_DOUBLE_EQ(std::stod(c.out), -12.0);
  auto w = gk_run("bounds waldschmidt --which logratio --n 2 --height 2.718281828459045");
  EXPECT_NEAR(std::stod(w.out), -2 * 8 * (1 + 2 * std::log(2.0)) / std::pow(1 + std::log(2.0), 2), 1e-12);
  auto w2 = gk_run("bounds waldschmidt --which logratio --n 2 --height 2.718281828459045 --C3c 2");
  EXPECT_NEAR(std::stod(w2.out), 2 * std::stod(w.out), 1e-12);
  EXPECT_EQ(gk_run("bounds waldschmidt --which other").rc, 2);
  EXPECT_EQ(gk_run("bounds corollary --p 'x*z'").rc, 2);
}

TEST_F(Cli, SuiteFilterAndFault) {
  auto r = gk_run("suite --filter semires");
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("PASS [1]"), std::string::npos);
  EXPECT_NE(r.out.find("PASS [2]"), std::string::npos);
  EXPECT_EQ(r.out.find("[3]"), std::string::npos);
  auto f = gk_run("suite --filter budget --inject-fault");
  EXPECT_EQ(f.rc, 1);
  EXPECT_NE(f.out.find("FAIL [7]"), std::string::npos);
  EXPECT_EQ(gk_run("suite --filter nosuch").rc, 2);
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(gk_run("--help").rc, 0); }
