#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include "json.hpp"
#include <string>

#include "hmc/pipeline.hpp"

namespace hmc {
namespace {

const std::string kSource = HMC_SOURCE_DIR;

struct Output {
  int code = -1;
  std::string out;
};

Output hmc(const std::string& args, bool merge = false) {
  const std::string cmd = std::string(HMC_EXE) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Output r;
  FILE* f = popen(cmd.c_str(), "r");
  if (f == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  const int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string sample(const std::string& name) { return kSource + "/samples/" + name; }

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(hmc("check " + sample("iteri_mask.hmc")).code, 0);
  EXPECT_EQ(hmc("check " + sample("empty.hmc")).code, 0);
  EXPECT_EQ(hmc("check " + sample("tworead.hmc")).code, 2);
  const Output unsafe = hmc("check " + sample("tworead.hmc") + " --oracle --int-range -1..1");
  EXPECT_EQ(unsafe.code, 1);
  EXPECT_NE(unsafe.out.find("r -> E"), std::string::npos);
}

TEST(Cli, InputAndSolverErrors) {
  EXPECT_EQ(hmc("check " + kSource + "/no/such.hmc").code, 3);
  EXPECT_EQ(hmc("check --bogus-flag x").code, 3);
  const Output missing = hmc("check " + sample("iteri_mask.hmc") + " --smt-cmd /nonexistent/z3", true);
  EXPECT_EQ(missing.code, 4);
  EXPECT_NE(missing.out.find("SolverUnavailable"), std::string::npos);
}

TEST(Cli, TranslateMatchesGolden) {
  const Output r = hmc("translate " + sample("iteri_mask.hmc") + " --no-clone");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_file(kSource + "/tests/golden/iteri_mask.imp"));
}

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(hmc("validate " + sample("iteri_mask.hmc") + " --solution " + sample("iteri_mask.sol")).code, 0);
  EXPECT_EQ(hmc("validate " + sample("iteri_mask.hmc") + " --solution " + sample("alltrue.sol")).code, 1);
  EXPECT_EQ(hmc("validate " + sample("empty.hmc") + " --solution " + sample("empty.sol")).code, 0);
}

TEST(Cli, JsonReports) {
  const auto check = nlohmann::json::parse(hmc("check " + sample("iteri_mask.hmc") + " --json").out);
  EXPECT_EQ(check.at("verdict"), "SAFE");
  EXPECT_TRUE(check.at("solution").contains("k1"));
  EXPECT_TRUE(check.at("solution").contains("k2"));
  const auto bad = nlohmann::json::parse(
      hmc("validate " + sample("iteri_mask.hmc") + " --solution " + sample("iteri_mask.expected.sol") + " --json").out);
  EXPECT_EQ(bad.at("status"), "VIOLATED");
  EXPECT_EQ(bad.at("constraint"), "c1");
  const auto ex = nlohmann::json::parse(
      hmc("exec " + sample("tworead.imp") + " --semantics imperative --int-range -1..1 --json").out);
  EXPECT_TRUE(ex.is_object());
}

TEST(Cli, ExecSemantics) {
  const std::string prog = sample("tworead.imp") + " --int-range -1..1";
  EXPECT_EQ(hmc("exec " + prog + " --semantics relational").code, 1);
  EXPECT_EQ(hmc("exec " + prog + " --semantics imperative").code, 0);
}

}  // namespace
}  // namespace hmc
