// Golden tests for the command-line interface: spawns the built binary and
// checks stdout prefixes and exit codes, including the distinction between
// finite failure (1) and bound exhaustion (2).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <string>

namespace {

struct RunResult {
  int exitCode;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(UCTT_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 512> buf;
  while (fgets(buf.data(), (int)buf.size(), pipe)) out += buf.data();
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

std::string prog(const char* name) { return std::string(UCTT_PROGRAMS) + "/" + name; }

bool startsWith(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("ntf solve outcomes and exit codes") {
    RunResult yes = run("solve " + prog("ntf.uctt") + " -g \"f p\"");
    CHECK(yes.exitCode == 0);
    CHECK(startsWith(yes.out, "yes."));

    RunResult no = run("solve " + prog("ntf.uctt") + " -g \"f q\"");
    CHECK(no.exitCode == 1);
    CHECK(startsWith(no.out, "no."));

    RunResult conj = run("solve " + prog("ntf.uctt") + " -g \"f (p , p)\"");
    CHECK(conj.exitCode == 1);
    CHECK(startsWith(conj.out, "no."));

    RunResult amp = run("solve " + prog("ntf.uctt") + " -g \"f (p & p)\" --system resy");
    CHECK(amp.exitCode == 1);
  }

  TEST_CASE("the variable-indexing counterexample fails from the empty program") {
    for (const char* sys : {"rest", "resy"}) {
      RunResult r = run("solve " + prog("appendix.uctt") +
                        " -g \"(pi x\\\\ q x x) => sigma y\\\\ pi z\\\\ q y z\" --depth 10 --system " + sys);
      CHECK(r.exitCode == 1);
      CHECK(startsWith(r.out, "no."));
    }
  }

  TEST_CASE("bound exhaustion is exit code 2") {
    RunResult r = run("solve " + prog("exhaust.uctt") + " -g \"sigma X\\\\ q X\" --depth 6");
    CHECK(r.exitCode == 2);
    RunResult fin = run("solve " + prog("exhaust.uctt") + " -g \"q z\" --depth 6");
    CHECK(fin.exitCode == 1);
  }

  TEST_CASE("tk and ictt") {
    RunResult top = run("tk " + prog("ntf.uctt") + " -g \"f p\" --fuel 8");
    CHECK(top.exitCode == 0);
    CHECK(top.out.find("top") == 0);

    RunResult bot = run("tk " + prog("ntf.uctt") + " -g \"f q\" --fuel 8");
    CHECK(bot.exitCode == 1);

    RunResult proof = run("ictt " + prog("ntf.uctt") + " -g \"f p\" --depth 8");
    CHECK(proof.exitCode == 0);
    CHECK(startsWith(proof.out, "(ax)"));

    RunResult noproof = run("ictt " + prog("ntf.uctt") + " -g \"f q\" --depth 8");
    CHECK(noproof.exitCode == 1);
  }

  TEST_CASE("member") {
    RunResult in = run("member " + prog("pairs.uctt") + " -g \"bin Y aa\" --bind Y=aa");
    CHECK(in.exitCode == 0);
    RunResult outr = run("member " + prog("pairs.uctt") + " -g \"bin Y aa\" --bind Y=bb");
    CHECK(outr.exitCode == 1);
  }

  TEST_CASE("compare agrees across the bundled corpus") {
    RunResult r = run("compare " + prog("corpus_demo.uctt") + " --depth 8 --fuel 8");
    CHECK(r.exitCode == 0);
    CHECK(r.out.find("0 disagreement(s)") != std::string::npos);
  }

  TEST_CASE("usage errors are exit code 3") {
    RunResult r = run("solve " + prog("missing-file.uctt") + " -g \"x\"");
    CHECK(r.exitCode == 3);
    RunResult badGoal = run("solve " + prog("ntf.uctt") + " -g \"f (\"");
    CHECK(badGoal.exitCode == 3);
  }

  TEST_CASE("traces are stable") {
    RunResult r = run("solve " + prog("ntf.uctt") + " -g \"f p\" --trace");
    CHECK(r.exitCode == 0);
    CHECK(r.out.find("1  axiom  0  {}  0\n") != std::string::npos);
  }
}
