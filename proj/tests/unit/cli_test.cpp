#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace ct = clara::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

Run clara_cli(const std::string& args) {
  std::string cmd = std::string(CLARA_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(CLARA_CLI_PATH).empty()) GTEST_SKIP() << "clara tool not built";
    dir_ = fs::temp_directory_path() / ("clara_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    if (!dir_.empty()) fs::remove_all(dir_);
  }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateBundleScripts) {
  for (const char* f : {"parent.clara", "adolescent.clara", "forest.clara-game"}) {
    auto r = clara_cli("validate " + q(ct::bundle_dir() / f));
    EXPECT_EQ(r.rc, 0) << f << "\n" << r.out;
    EXPECT_NE(r.out.find("ok"), std::string::npos) << r.out;
  }
}

TEST_F(Cli, ValidateReportsParseErrors) {
  std::ofstream(dir_ / "broken.clara") << "script x version=1 audience=parent\nnonsense here\n";
  auto r = clara_cli("validate " + q(dir_ / "broken.clara"));
  EXPECT_EQ(r.rc, 2);
  EXPECT_NE(r.out.find(":2:"), std::string::npos) << r.out;
  auto j = clara_cli("validate --json " + q(dir_ / "broken.clara"));
  EXPECT_EQ(j.rc, 2);
  auto parsed = nlohmann::json::parse(j.out);
  EXPECT_EQ(parsed["parse_error"]["line"], 2);
}

TEST_F(Cli, AnalyzeWritesTables) {
  auto t = ct::data_dir() / "table2";
  auto out = dir_ / "out";
  auto r = clara_cli("analyze --pre " + q(t / "pre.csv") + " --post " + q(t / "post.csv") + " --arms " +
                     q(t / "arms.csv") + " --instruments " + q(t / "instruments.csv") + " --out " + q(out));
  ASSERT_EQ(r.rc, 0) << r.out;
  for (const char* f : {"table2.txt", "table2.json", "exclusions.json", "table1_reference.txt", "discrepancies.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  auto j = nlohmann::json::parse(ct::slurp(out / "discrepancies.json"));
  EXPECT_EQ(j["matched"], 23);
  EXPECT_EQ(clara_cli("analyze --pre missing.csv --post x --arms y --out z").rc, 105);
}

TEST_F(Cli, Table1ShowsDiscrepancy) {
  auto r = clara_cli("table1");
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("reproduced 23 of 24"), std::string::npos) << r.out;
  auto j = nlohmann::json::parse(clara_cli("table1 --json").out);
  EXPECT_EQ(j["reproduction"]["discrepancies"].size(), 1u);
}

TEST_F(Cli, PlayPrintsJsonLines) {
  auto r = clara_cli("--bundle " + q(ct::bundle_dir()) + " play --audience parent --seed 3 --bind child_name=Sam --choices 0,0,0");
  ASSERT_EQ(r.rc, 0) << r.out;
  std::istringstream in(r.out);
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) {
    if (l.empty() || l[0] != '{') continue;
    EXPECT_NO_THROW(nlohmann::json::parse(l)) << l;
    ++lines;
  }
  EXPECT_GT(lines, 3u);
  auto bad = clara_cli("--bundle " + q(ct::bundle_dir()) + " play --bind child_name=Sam --choices 99");
  EXPECT_EQ(bad.rc, 1);
  EXPECT_NE(bad.out.find("error"), std::string::npos);
}
