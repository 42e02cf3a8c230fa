#include "doctest.h"

#include "gen.hpp"
#include "oracles.hpp"

using namespace uctt;

namespace {

const char* kNtfSource = R"(
% the truth-functionality example module
module ntf.
type np o.
type nq o.
type nff o -> o.
np :- nq.
nq :- np.
nff np.
)";

}  // namespace

TEST_SUITE("cli-syntax") {
  TEST_CASE("the ntf module parses to a three-clause program") {
    SourceFile src = parseFile(kNtfSource);
    CHECK(src.moduleName == "ntf");
    CHECK(src.program.formulas().size() == 3);
    CHECK(src.level == 0);
    // declared with codomain o, stored as rigid-atom formers
    Sym np = sig().lookup("np", SymKind::Const);
    CHECK(typeEqual(symdata(np).type, tyR()));
    Sym nff = sig().lookup("nff", SymKind::Const);
    CHECK(typeEqual(symdata(nff).type, arrow(tyH(), tyR())));

    // the truth-functionality behavior table
    SearchConfig cfg;
    cfg.depthBound = 8;
    SolveOutcome yes = solveState(0, src.program, parseGoalAuto("nff np"), cfg);
    CHECK(yes.succeeded());
    SolveOutcome no1 = solveState(0, src.program, parseGoalAuto("nff nq"), cfg);
    CHECK(no1.finiteFailure());
    SolveOutcome no2 = solveState(0, src.program, parseGoalAuto("nff (np , np)"), cfg);
    CHECK(no2.finiteFailure());
    SolveOutcome no3 = solveState(0, src.program, parseGoalAuto("nff (np & np)"), cfg);
    CHECK(no3.finiteFailure());
  }

  TEST_CASE("abbreviations and sugar") {
    parseFile("kind pitem type.\ntype pq pitem -> pitem -> o.\ntype pu pitem -> o.\ntype pp o.\ntype pr o.\n");
    // sigma y\ pi z\ q y z parses to Sigma(\y. Pi(\z. q y z))
    TermPtr g = parseGoalAuto("sigma Y\\ pi Z\\ pq Y Z");
    REQUIRE(headLog(g) == LogOp::SigmaG);
    Spine s = spineOf(g);
    TermPtr inner = quantBodyOpenAsFormula(s.args[0]);
    CHECK(headLog(inner) == LogOp::PiG);

    // `p :- q, r` sugar: (q , r) => p with a goal-conjunction body
    SourceFile one = parseFile("pp :- pr, pr.\n");
    REQUIRE(one.program.formulas().size() == 1);
    TermPtr d = one.program.formulas()[0];
    REQUIRE(headLog(d) == LogOp::ImpP);
    Spine ds = spineOf(d);
    CHECK(headLog(ds.args[0]) == LogOp::AndG);
    CHECK(termEq(ds.args[1], mkConst(sig().lookup("pp", SymKind::Const))));

    // implicit universal closure of clause variables
    SourceFile two = parseFile("pu X :- pq X X.\n");
    REQUIRE(two.program.formulas().size() == 1);
    CHECK(headLog(two.program.formulas()[0]) == LogOp::PiP);
  }

  TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parseFile("type ; broken.\n"), SyntaxError);
    CHECK_THROWS_AS(parseGoalAuto("sigma Y\\ unknownconst Y"), UnknownSymbol);
    CHECK_THROWS_AS(parseFile("kind k1 type.\ntype tpoly k1 -> o.\ntpoly :- tpoly.\n"), Error);
  }

  TEST_CASE("print/parse round trip on corpus goals") {
    gen::Corpus corpus(109, {});
    // fixture symbols are parseable names, so printed goals re-parse
    int done = 0;
    for (int i = 0; i < 120; i++) {
      TermPtr g = corpus.closedGoal();
      std::string text = printTerm(g);
      CAPTURE(text);
      TermPtr back = parseGoalAuto(text);
      CHECK(termEq(back, g));
      done++;
    }
    CHECK(done == 120);

    // and across the appendix goal with nested binders
    TermPtr g = parseGoalAuto("(pi X\\ bin X X) => sigma Y\\ pi Z\\ bin Y Z");
    TermPtr back = parseGoalAuto(printTerm(g));
    CHECK(termEq(back, g));
  }

  TEST_CASE("exit-code style outcomes distinguish failure kinds") {
    // finite failure versus witness-bound exhaustion through the API
    SourceFile fin = parseFile("type finp o.\ntype finq o.\nfinp :- finq.\n");
    SearchConfig cfg;
    cfg.depthBound = 6;
    SolveOutcome ff = solveState(0, fin.program, parseGoalAuto("finp"), cfg);
    CHECK(ff.finiteFailure());

    // a recursive function symbol on a dedicated kind keeps this local
    SourceFile rec = parseFile(
        "kind rit type.\n"
        "type rz rit.\n"
        "type rs rit -> rit.\n"
        "type rq rit -> o.\n"
        "rq (rs X) :- rq X.\n");
    SolveOutcome bound = solveState(0, rec.program, parseGoalAuto("sigma X\\ rq X"), cfg);
    CHECK(!bound.succeeded());
    CHECK(bound.boundExhausted());
  }
}
