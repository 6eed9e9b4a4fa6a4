#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SCSYNTH_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (auto n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string spec(const char* name) { return std::string(SCSYNTH_SPECS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST(Cli, SimulateLiteralStreams) {
  auto r = run("simulate " + spec("multiplier.net") + " 0b11101110 0b01110010");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "0.375\n");
}

TEST(Cli, SimulateDump) {
  auto r = run("simulate " + spec("scale_half.net") + " 0.75 --N 8 --dump");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.substr(0, 6), "0.375\n");
  EXPECT_NE(r.out.find("r0 "), std::string::npos);
  EXPECT_NE(r.out.find("r2 "), std::string::npos);
}

TEST(Cli, SimulateLoopFails) {
  auto r = run("simulate " + spec("loop.net") + " 0.5");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("combinational loop"), std::string::npos) << r.out;
}

TEST(Cli, SynthWritesArtifacts) {
  const fs::path out = fs::current_path() / "cli_synth_out";
  fs::remove_all(out);
  auto r = run("synth " + spec("subtractor.spec") + " --seed 4 --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.substr(0, 12), "best_cost 0\n");
  EXPECT_NE(r.out.find("XOR"), std::string::npos);
  for (const char* f : {"best.net", "log.csv", "trajectory.csv", "config.spec"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_EQ(slurp(out / "log.csv").substr(0, 6), "chain,");
  // The recorded config reproduces the run.
  auto again = run("synth " + (out / "config.spec").string() + " --out " + (out / "again").string());
  ASSERT_EQ(again.status, 0) << again.out;
  EXPECT_EQ(slurp(out / "best.net"), slurp(out / "again" / "best.net"));

  // best.net simulates as a subtractor.
  auto sim = run("simulate " + (out / "best.net").string() + " 0.75 0.25");
  EXPECT_EQ(sim.out, "0.5\n");
}

TEST(Cli, SynthDiscoversDuplicatedInput) {
  const fs::path out = fs::current_path() / "cli_discovery_out";
  auto r = run("synth " + spec("subtractor_discovery.spec") + " --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.substr(0, 12), "best_cost 0\n") << r.out;
  EXPECT_NE(r.out.find("XOR"), std::string::npos);
}

TEST(Cli, MissingFieldIsReported) {
  auto r = run("synth " + spec("bad.spec"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("missing required field 'N'"), std::string::npos) << r.out;
}

TEST(Cli, DumpConfig) {
  auto r = run("synth " + spec("sqrt.spec") + " --dump-config --seed 7");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("seed = 7\n"), std::string::npos);
  EXPECT_NE(r.out.find("budget = 1000000\n"), std::string::npos);
}

TEST(Cli, Bench) {
  auto r = run("bench subtractor --budget 100000");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "name,I,budget,best_cost,reference_error,pass\nsubtractor,1,100000,0,0,true\n");
  auto u = run("bench subtractor nosuch --budget 1000");
  EXPECT_EQ(u.status, 1);
  EXPECT_NE(u.out.find("unknown benchmark 'nosuch'"), std::string::npos);
}

TEST(Cli, Sweep) {
  auto r = run("sweep " + spec("scale_half.net") + " " + spec("scale_half.spec") + " --lengths 1024,64");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "N,error\n64,0\n1024,0\n");
}

TEST(Cli, Enum) {
  auto r = run("enum " + spec("subtractor.spec"));
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "candidates 66\ncost 0\ninputs 2\nXOR r0 r1 -> r2\noutput r2\n");
  auto big = run("enum " + spec("subtractor.spec") + " --length 3 --limit 100");
  EXPECT_EQ(big.status, 1);
  EXPECT_NE(big.out.find("above the limit"), std::string::npos);
}
