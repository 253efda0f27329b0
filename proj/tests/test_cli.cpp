#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hn/hn.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  hn::json report;
  std::string report_text;
  std::string csv;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("hn_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string data(const std::string& f) { return std::string(HN_DATA_DIR) + "/" + f; }

CliRun run(const std::string& name, const std::string& args) {
  fs::path dir = fresh_dir(name);
  const std::string cmd =
      std::string(HN_CLI) + " " + args + " --output " + (dir / "out").string() + " > " + (dir / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  if (fs::exists(dir / "out" / "report.json")) {
    r.report_text = slurp(dir / "out" / "report.json");
    r.report = hn::json::parse(r.report_text);
    r.csv = slurp(dir / "out" / "tables.csv");
  }
  return r;
}

}  // namespace

TEST(Cli, EvalThreeVariable) {
  CliRun r = run("eval", "eval --params " + data("r3.json") + " --at i,i,i");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["results"]["eval"]["value"], "0+1.25i") << r.report_text;
}

TEST(Cli, ClassifyLineMeasure) {
  CliRun r = run("classify", "classify --input " + data("mu2.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.report["results"]["nevanlinna_condition"]["outcome"], "Nevanlinna");
  EXPECT_NE(r.csv.find("nevanlinna_condition"), std::string::npos);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
  CliRun a = run("det_a", "classify --input " + data("powerlaw_half.json"));
  CliRun b = run("det_b", "classify --input " + data("powerlaw_half.json"));
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.report_text, b.report_text);
  EXPECT_EQ(a.csv, b.csv);
}

TEST(Cli, StrictExitOnNegativeVerdict) {
  CliRun loose = run("neg_loose", "classify --input " + data("dirac_dirac.json"));
  EXPECT_EQ(loose.code, 0) << loose.out;
  EXPECT_EQ(loose.report["results"]["nevanlinna_condition"]["outcome"], "NotNevanlinna");
  CliRun strict = run("neg_strict", "classify --strict --input " + data("dirac_dirac.json"));
  EXPECT_EQ(strict.code, 2) << strict.out;
  CliRun atom = run("atom_strict", "polydisc --strict --input " + data("torus_atom.json") + " --max-degree 2");
  EXPECT_EQ(atom.code, 2) << atom.out;
}

TEST(Cli, MalformedJsonIsStructuredError) {
  CliRun r = run("malformed", "classify --input " + data("malformed.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["status"], "error");
  ASSERT_TRUE(r.report["errors"].is_array());
  const std::string msg = r.report["errors"][0]["message"];
  EXPECT_NE(msg.find("malformed.json:3:"), std::string::npos) << msg;
  EXPECT_EQ(r.report["errors"][0]["code"], "Parse");
}

TEST(Cli, MissingFieldNamesThePath) {
  CliRun r = run("missing", "classify --input " + data("missing_field.json"));
  EXPECT_EQ(r.code, 1);
  const std::string msg = r.report["errors"][0]["message"];
  EXPECT_NE(msg.find("measure.terms[0]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("poly"), std::string::npos) << msg;
}

TEST(Cli, MissingFileIsIoError) {
  CliRun r = run("nofile", "classify --input " + data("does_not_exist.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["errors"][0]["code"], "Io");
}

TEST(Cli, DecomposeVerifiesSum) {
  CliRun r = run("decompose", "hyperplane --decompose " + data("p.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.report_text.find("\"sum_verified\": true"), std::string::npos) << r.report_text;
}

TEST(Cli, PolydiscBetaIsRP) {
  CliRun r = run("beta", "polydisc --input " + data("beta1.json") + " --max-degree 4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.report_text.find("\"RP\""), std::string::npos) << r.report_text;
}

TEST(Cli, FixedVariableSlice) {
  CliRun r = run("fixedvar", "fixedvar --params " + data("fixed_var2_params.json") + " --zeta i --free 1 --split i,1+i,2i");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.report["status"], "ok");
}

TEST(Cli, GrowthLine) {
  CliRun r = run("growth", "growth --input " + data("mu2.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.report_text.find("Pass"), std::string::npos) << r.report_text;
  EXPECT_EQ(r.csv.rfind("R,mass,ratio,bound_rhs", 0), 0u) << r.csv;
}

TEST(Cli, UnknownFlagRejected) {
  CliRun r = run("badflag", "classify --no-such-flag");
  EXPECT_NE(r.code, 0);
}
