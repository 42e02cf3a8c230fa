#include "doctest.h"

#include "gen.hpp"
#include "oracles.hpp"

using namespace uctt;

namespace {

// random first-order terms over {a, b, u1 _, bin _ _} and a variable pool
TermPtr randFo(gen::Corpus& c, const std::vector<Sym>& vars, int depth) {
  auto& f = gen::fx();
  if (depth <= 0 || c.pick(3) == 0) {
    int k = c.pick(2 + (int)vars.size());
    if (k == 0) return mkConst(f.a);
    if (k == 1) return mkConst(f.b);
    return mkVar(vars[(size_t)(k - 2)]);
  }
  return randFo(c, vars, depth - 1);
}

TermPtr randFoAtom(gen::Corpus& c, const std::vector<Sym>& vars, int depth) {
  auto& f = gen::fx();
  switch (c.pick(3)) {
    case 0: return nfApp(mkConst(f.u1), randFo(c, vars, depth));
    case 1: return nfApp2(mkConst(f.bin), randFo(c, vars, depth), randFo(c, vars, depth));
    default: return nfApp2(mkConst(f.bin), randFo(c, vars, depth), mkConst(f.a));
  }
}

}  // namespace

TEST_SUITE("unify") {
  TEST_CASE("first-order MGU") {
    auto& f = gen::fx();
    Sym y = sig().freshVar(0, f.item);
    TermPtr lhs = nfApp2(mkConst(f.bin), mkVar(y), mkConst(f.a));
    TermPtr rhs = nfApp2(mkConst(f.bin), mkConst(f.a), mkConst(f.a));
    UnifyResult r = unify(lhs, rhs);
    REQUIRE(r.unifiers.size() == 1);
    CHECK(termEq(r.unifiers[0].lookup(y), mkConst(f.a)));
  }

  TEST_CASE("the level discipline blocks the appendix binding") {
    auto& f = gen::fx();
    Sym y0 = sig().freshVar(0, f.item);
    // bin Y0 c1 =? bin Y0 c1 : identity works
    TermPtr t1 = nfApp2(mkConst(f.bin), mkVar(y0), mkConst(f.c1));
    UnifyResult ok = unify(t1, t1);
    REQUIRE(ok.unifiers.size() == 1);
    CHECK(ok.unifiers[0].isId());
    // bin Y0 Y0 =? bin Y0 c1 : would need {c1/Y0}
    TermPtr t2 = nfApp2(mkConst(f.bin), mkVar(y0), mkVar(y0));
    UnifyResult bad = unify(t2, t1);
    CHECK(bad.unifiers.empty());
    CHECK(bad.levelViolation);
    CHECK_THROWS_AS(bad.raiseIfEmpty(), LevelViolation);
  }

  TEST_CASE("pattern flex solved against the brute-force oracle") {
    auto& f = gen::fx();
    Sym F = sig().intern("FpatTest", arrow(f.item, tyA()), 0, SymKind::FreeVar);
    TermPtr lhs = nfApp(mkVar(F), mkConst(f.a));
    TermPtr rhs = coerce(nfApp2(mkConst(f.bin), mkConst(f.a), mkConst(f.a)), tyA());
    UnifyResult r = unify(lhs, rhs);
    REQUIRE(!r.unifiers.empty());
    // {\x. bin x x / F} is among the solutions
    TermPtr want = mkAbs(f.item, coerce(mkApp(mkApp(mkConst(f.bin), mkBound(0, f.item)), mkBound(0, f.item)), tyA()));
    bool found = false;
    for (const auto& s : r.unifiers) found |= termEq(s.lookup(F), normalize(want));
    CHECK(found);

    // every engine solution is found by the brute-force enumeration, and
    // every brute solution appears among the engine's
    std::vector<TermPtr> brute =
        oracle::bruteUnaryFlexSolutions(F, mkConst(f.a), rhs, {f.a, f.b, f.bin, f.u1});
    CHECK(brute.size() == r.unifiers.size());
    for (const auto& s : r.unifiers) {
      bool inBrute = false;
      for (const auto& bsol : brute) inBrute |= termEq(bsol, s.lookup(F));
      CHECK(inBrute);
    }
  }

  TEST_CASE("strict universal parameters force abstraction") {
    auto& f = gen::fx();
    Sym F = sig().intern("FstrictTest", arrow(f.item, tyA()), 0, SymKind::FreeVar);
    // F c1 = bin c1 c1 with level(c1)=1 > level(F)=0: unique solution \x. bin x x
    TermPtr lhs = nfApp(mkVar(F), mkConst(f.c1));
    TermPtr rhs = coerce(nfApp2(mkConst(f.bin), mkConst(f.c1), mkConst(f.c1)), tyA());
    UnifyResult r = unify(lhs, rhs);
    REQUIRE(r.unifiers.size() == 1);
    TermPtr want =
        normalize(mkAbs(f.item, coerce(mkApp(mkApp(mkConst(f.bin), mkBound(0, f.item)), mkBound(0, f.item)), tyA())));
    CHECK(termEq(r.unifiers[0].lookup(F), want));

    // F c1 = u1 a cannot abstract the leftover c1-free body: fine, u1 a has
    // no c1, so it is solved by a constant function
    TermPtr rhs2 = coerce(nfApp(mkConst(f.u1), mkConst(f.a)), tyA());
    UnifyResult r2 = unify(lhs, rhs2);
    REQUIRE(r2.unifiers.size() == 1);
    CHECK(termEq(r2.unifiers[0].lookup(F), mkAbs(f.item, coerce(nfApp(mkConst(f.u1), mkConst(f.a)), tyA()))));
  }

  TEST_CASE("occurs check and non-pattern reporting") {
    auto& f = gen::fx();
    Sym F = sig().intern("FoccTest", arrow(tyH(), tyA()), 0, SymKind::FreeVar);
    // F (F p) = ... the argument is not an atom: non-pattern
    TermPtr inner = coerce(nfApp(mkVar(F), coerce(mkConst(f.p), tyH())), tyH());
    TermPtr lhs = nfApp(mkVar(F), inner);
    TermPtr rhs = coerce(mkConst(f.q), tyA());
    UnifyResult r = unify(lhs, rhs);
    CHECK(r.unifiers.empty());
    CHECK((r.nonPattern || r.occursHit));

    // a separate base type keeps the function symbol out of the shared
    // item-enumeration used by later suites
    TypePtr occT = baseType("occT");
    Sym X = sig().intern("XoccTest", occT, 0, SymKind::FreeVar);
    TermPtr ox = mkVar(X);
    TermPtr orhs = nfApp(mkConst(sig().intern("wrapTest", arrow(occT, occT), 0, SymKind::Const)), mkVar(X));
    UnifyResult r2 = unify(ox, orhs);
    CHECK(r2.unifiers.empty());
    CHECK(r2.occursHit);
  }

  TEST_CASE("emitted unifiers are legal, safe, and equalizing") {
    gen::Corpus corpus(41, {});
    int checked = 0;
    for (int i = 0; i < 1200 && checked < 1000; i++) {
      std::vector<Sym> vars;
      for (int k = 0; k < 3; k++) vars.push_back(sig().freshVar(0, gen::fx().item));
      TermPtr l = randFoAtom(corpus, vars, 2);
      TermPtr r = randFoAtom(corpus, vars, 2);
      UnifyResult u = unify(l, r);

      // textbook Robinson oracle on the same pair
      oracle::FTerm fl, fr;
      REQUIRE(oracle::toFTerm(l, fl));
      REQUIRE(oracle::toFTerm(r, fr));
      oracle::FSubst fs;
      bool oracleOk = oracle::robinson({{fl, fr}}, fs);
      CHECK(oracleOk == !u.unifiers.empty());
      checked++;
      if (u.unifiers.empty()) continue;
      REQUIRE(u.unifiers.size() == 1);
      const Subst& mgu = u.unifiers[0];
      CHECK(mgu.isLegal());
      CHECK(mgu.isSafe());
      CHECK(termEq(applySubst(mgu, l), applySubst(mgu, r)));

      // equi-generality with the oracle's answer
      Subst om;
      for (const auto& [v, t] : fs) {
        std::function<TermPtr(const oracle::FTerm&)> back = [&](const oracle::FTerm& ft) -> TermPtr {
          TermPtr h = ft.isVar ? mkVar(ft.head) : mkConst(ft.head);
          for (const auto& a : ft.args) h = nfApp(h, back(a));
          return h;
        };
        om.bind(v, back(oracle::fapply(fs, fs.at(v))));
      }
      std::set<Sym> vs(vars.begin(), vars.end());
      CHECK(oracle::instanceOf(mgu, om, vs));
      CHECK(oracle::instanceOf(om, mgu, vs));
    }
    CHECK(checked >= 1000);
  }

  TEST_CASE("solveFlexTop") {
    auto& f = gen::fx();
    Sym x0 = sig().intern("XftTest", tyA(), 0, SymKind::FreeVar);
    Subst s0 = solveFlexTop(mkVar(x0));
    CHECK(isTop(s0.lookup(x0)));

    Sym x2 = sig().intern("Xft2Test", arrow(f.item, arrow(f.item, tyA())), 0, SymKind::FreeVar);
    TermPtr atom = nfApp2(mkVar(x2), mkConst(f.a), mkConst(f.b));
    Subst s2 = solveFlexTop(atom);
    TermPtr bound = s2.lookup(x2);
    CHECK(bound->kind == TermKind::Abs);
    CHECK(isTop(applySubst(s2, atom)));

    TermPtr rigid = nfApp2(mkConst(f.bin), mkConst(f.a), mkConst(f.a));
    CHECK_THROWS_AS(solveFlexTop(rigid), NotFlex);
  }
}
