// uctt: interpreter and semantic toolkit for the UCTT fragment of
// higher-order hereditarily Harrop logic.
//
// Exit codes: 0 success, 1 finite failure, 2 bound exhausted, 3 usage or
// parse error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uctt/uctt.hpp"

namespace {

using namespace uctt;

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitBound = 2;
constexpr int kExitUsage = 3;

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SyntaxError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonOpts {
  std::string file;
  std::string goal;
  std::string system = "rest";
  int depth = 8;
  int witnessSize = 4;
  int fuel = 8;
  int maxSolutions = 1;
  bool trace = false;
};

System systemOf(const std::string& s) {
  if (s == "rest") return System::ResT;
  if (s == "resy") return System::ResY;
  if (s == "star") return System::Star;
  throw SyntaxError("unknown system '" + s + "' (rest|resy|star)");
}

SearchConfig configOf(const CommonOpts& o) {
  SearchConfig cfg;
  cfg.system = systemOf(o.system);
  cfg.depthBound = o.depth;
  cfg.witnessSizeBound = o.witnessSize;
  cfg.maxSolutions = o.maxSolutions;
  return cfg;
}

int runSolve(const CommonOpts& o) {
  SourceFile src = parseFile(readFile(o.file));
  std::map<std::string, Sym> vars;
  TermPtr goal = parseGoalAuto(o.goal, src.level, &vars);
  SolveOutcome out = solveState(src.level, src.program, goal, configOf(o));
  if (out.succeeded()) {
    std::cout << "yes.\n";
    for (const auto& sol : out.solutions) {
      if (!vars.empty()) {
        for (const auto& [name, sym] : vars)
          std::cout << "  " << name << " = " << printTerm(sol.answer.lookup(sym)) << "\n";
      }
      if (o.trace) std::cout << traceDerivation(sol.deriv);
    }
    return kExitYes;
  }
  if (out.finiteFailure()) {
    std::cout << "no.\n";
    return kExitNo;
  }
  std::cout << "no (bound exhausted).\n";
  return kExitBound;
}

int runTk(const CommonOpts& o) {
  SourceFile src = parseFile(readFile(o.file));
  TermPtr goal = parseGoalAuto(o.goal, src.level);
  ValuationTable vt(SemBounds{o.witnessSize, 0});
  auto r = vt.ifixQuery(src.level, src.program, goal, o.fuel);
  if (r.value.top) {
    std::cout << "top (fuel " << r.fuelUsed << ").\n";
    return kExitYes;
  }
  if (r.stabilized || r.value.exactBottom()) {
    std::cout << "bottom (stabilized at fuel " << r.fuelUsed << ").\n";
    return kExitNo;
  }
  std::cout << "bottom within bounds (fuel " << o.fuel << ").\n";
  return kExitBound;
}

int runIctt(const CommonOpts& o) {
  SourceFile src = parseFile(readFile(o.file));
  TermPtr goal = parseGoalAuto(o.goal, src.level);
  ProverConfig cfg;
  cfg.witnessSizeBound = o.witnessSize;
  ProveResult r = proveCutFree(sequentOf(src.level, src.program, goal), o.depth, cfg);
  switch (r.status) {
    case ProveStatus::Proved:
      std::cout << serializeProof(*r.tree) << "\n";
      return kExitYes;
    case ProveStatus::Refuted:
      std::cout << "no.\n";
      return kExitNo;
    case ProveStatus::Exhausted:
      std::cout << "no (depth exhausted).\n";
      return kExitBound;
  }
  return kExitUsage;
}

int runMember(const CommonOpts& o, const std::vector<std::string>& binds) {
  SourceFile src = parseFile(readFile(o.file));
  std::map<std::string, Sym> vars;
  TermPtr goal = parseGoalAuto(o.goal, src.level, &vars);
  Subst theta;
  for (const auto& b : binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw SyntaxError("--bind expects Name=term");
    std::string name = b.substr(0, eq);
    auto it = vars.find(name);
    if (it == vars.end()) throw UnknownSymbol("variable " + name + " does not occur in the goal");
    TermPtr t = parseTermAuto(b.substr(eq + 1), src.level);
    theta.bind(it->second, t);
  }
  ValuationTable vt(SemBounds{o.witnessSize, 0});
  bool in = vt.memberIs(theta, src.level, src.program, goal, configOf(o));
  std::cout << (in ? "member.\n" : "not a member (within bounds).\n");
  return in ? kExitYes : kExitNo;
}

int runCompare(const CommonOpts& o) {
  SourceFile src = parseFile(readFile(o.file));
  if (src.queries.empty()) {
    std::cout << "no `?-` queries in " << o.file << "\n";
    return kExitUsage;
  }
  int disagreements = 0, excluded = 0, idx = 0;
  for (const auto& goal : src.queries) {
    idx++;
    SearchConfig cfg = configOf(o);
    cfg.idOnly = true;
    SolveOutcome res = solveState(src.level, src.program, goal, cfg);
    ValuationTable vt(SemBounds{o.witnessSize, 0});
    auto fix = vt.ifixQuery(src.level, src.program, goal, o.fuel);
    ProverConfig pcfg;
    pcfg.witnessSizeBound = o.witnessSize;
    ProveResult pr = proveCutFree(sequentOf(src.level, src.program, goal), o.depth, pcfg);

    bool solveKnown = res.succeeded() || res.finiteFailure();
    bool fixKnown = fix.value.top || fix.stabilized;
    bool proofKnown = pr.status != ProveStatus::Exhausted;
    std::cout << "query " << idx << ": " << printTerm(goal) << "\n";
    if (!solveKnown || !fixKnown || !proofKnown) {
      excluded++;
      std::cout << "  excluded (bound exhausted)\n";
      continue;
    }
    bool a = res.succeeded(), b = fix.value.top, c = pr.proved();
    std::cout << "  solve=" << (a ? "yes" : "no") << " tk=" << (b ? "top" : "bottom")
              << " ictt=" << (c ? "proved" : "no") << "\n";
    if (a != b || b != c) {
      disagreements++;
      std::cout << "  DISAGREEMENT\n";
    }
  }
  std::cout << disagreements << " disagreement(s), " << excluded << " excluded of " << idx << "\n";
  return disagreements == 0 ? kExitYes : kExitNo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uctt: resolution, bottom-up semantics and cut-free proofs for higher-order hereditarily Harrop programs"};
  app.require_subcommand(1);

  CommonOpts o;
  std::vector<std::string> binds;

  auto addCommon = [&](CLI::App* c, bool needGoal) {
    c->add_option("file", o.file, "program file (.uctt)")->required();
    if (needGoal) c->add_option("-g,--goal", o.goal, "goal to run")->required();
    c->add_option("--system", o.system, "rest|resy|star");
    c->add_option("--depth", o.depth, "resolution / proof depth bound");
    c->add_option("--witness-size", o.witnessSize, "instance-rule term size bound");
    c->add_option("--fuel", o.fuel, "T-operator fuel bound");
    c->add_option("--max-solutions", o.maxSolutions, "solutions to search for");
    c->add_flag("--trace", o.trace, "print the derivation trace");
  };

  CLI::App* cSolve = app.add_subcommand("solve", "run a query through the resolution engine");
  addCommon(cSolve, true);
  CLI::App* cTk = app.add_subcommand("tk", "evaluate the T operator / least fixed point");
  addCommon(cTk, true);
  CLI::App* cIctt = app.add_subcommand("ictt", "search for a cut-free sequent proof");
  addCommon(cIctt, true);
  CLI::App* cMember = app.add_subcommand("member", "check substitution-semantics membership");
  addCommon(cMember, true);
  cMember->add_option("--bind", binds, "substitution binding Name=term (repeatable)");
  CLI::App* cCompare = app.add_subcommand("compare", "run the three-way agreement over a query file");
  addCommon(cCompare, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(cSolve)) return runSolve(o);
    if (app.got_subcommand(cTk)) return runTk(o);
    if (app.got_subcommand(cIctt)) return runIctt(o);
    if (app.got_subcommand(cMember)) return runMember(o, binds);
    if (app.got_subcommand(cCompare)) return runCompare(o);
  } catch (const uctt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
