#pragma once

// Shared test signature and the random program/goal corpus generator used by
// the property suites and the acceptance run.

#include <random>

#include "uctt/uctt.hpp"

namespace gen {

using namespace uctt;

struct Fixture {
  TypePtr item = baseType("item");
  Sym a, b, c1;
  Sym p, q, r0;     // propositions (type r)
  Sym u1, u2;       // item -> r
  Sym bin;          // item -> item -> r
  Sym fh;           // h -> r (higher-order flavour)

  Fixture() {
    sig().intern("ty$item", tyO(), 0, SymKind::Const);  // kind marker for the parser
    a = sig().intern("a", item, 0, SymKind::Const);
    b = sig().intern("b", item, 0, SymKind::Const);
    c1 = sig().intern("c1", item, 1, SymKind::Const);
    p = sig().intern("p", tyR(), 0, SymKind::Const);
    q = sig().intern("q", tyR(), 0, SymKind::Const);
    r0 = sig().intern("r0", tyR(), 0, SymKind::Const);
    u1 = sig().intern("u1", arrow(item, tyR()), 0, SymKind::Const);
    u2 = sig().intern("u2", arrow(item, tyR()), 0, SymKind::Const);
    bin = sig().intern("bin", arrow(item, arrow(item, tyR())), 0, SymKind::Const);
    fh = sig().intern("fh", arrow(tyH(), tyR()), 0, SymKind::Const);
  }
};

inline Fixture& fx() {
  static Fixture f;
  return f;
}

struct GenCfg {
  int goalSize = 8;
  int clauseSize = 6;
  int maxClauses = 3;
  bool higherOrder = false;  // allow fh-atoms with composite h arguments
};

class Corpus {
 public:
  Corpus(uint64_t seed, GenCfg cfg = {}) : rng_(seed), cfg_(cfg) {}

  std::mt19937_64& rng() { return rng_; }

  int pick(int n) { return (int)(rng_() % (uint64_t)n); }

  TermPtr itemTerm(const std::vector<TermPtr>& pool) {
    if (pool.empty() || pick(3) == 0) return mkConst(pick(2) ? fx().a : fx().b);
    return pool[(size_t)pick((int)pool.size())];
  }

  // a positive h-argument for fh
  TermPtr hArg(const std::vector<TermPtr>& pool, int size) {
    if (size <= 1 || pick(2) == 0) return coerce(atom(pool, 1), tyH());
    int l = 1 + pick(size - 1);
    TermPtr x = hArg(pool, l);
    TermPtr y = hArg(pool, size - l);
    return mkBin(pick(2) ? LogOp::AndH : LogOp::OrH, x, y);
  }

  TermPtr atom(const std::vector<TermPtr>& pool, int size) {
    int choice = pick(cfg_.higherOrder ? 6 : 5);
    switch (choice) {
      case 0: return mkConst(fx().p);
      case 1: return mkConst(fx().q);
      case 2: return mkConst(fx().r0);
      case 3: return nfApp(mkConst(pick(2) ? fx().u1 : fx().u2), itemTerm(pool));
      case 4: return nfApp2(mkConst(fx().bin), itemTerm(pool), itemTerm(pool));
      default: return nfApp(mkConst(fx().fh), hArg(pool, std::max(1, size - 1)));
    }
  }

  TermPtr goal(int size, std::vector<TermPtr>& pool) {
    if (size <= 1) return coerce(atom(pool, 1), tyG());
    switch (pick(12)) {
      case 0:
        return topG();
      case 1:
      case 2: {
        int l = 1 + pick(size - 1);
        return mkBin(LogOp::AndG, goal(l, pool), goal(size - l, pool));
      }
      case 3:
      case 4: {
        int l = 1 + pick(size - 1);
        return mkBin(LogOp::OrG, goal(l, pool), goal(size - l, pool));
      }
      case 5:
      case 6: {
        int l = 1 + pick(size - 1);
        TermPtr d = clause(l, pool);
        return mkBin(LogOp::ImpG, d, goal(size - l, pool));
      }
      case 7:
      case 8: {
        Sym v = sig().freshVar(0, fx().item);
        pool.push_back(mkVar(v));
        TermPtr body = goal(size - 1, pool);
        pool.pop_back();
        return mkQuant(LogOp::SigmaG, fx().item, mkAbs(fx().item, abstractVar(body, v)));
      }
      case 9: {
        Sym v = sig().freshVar(0, fx().item);
        pool.push_back(mkVar(v));
        TermPtr body = goal(size - 1, pool);
        pool.pop_back();
        return mkQuant(LogOp::PiG, fx().item, mkAbs(fx().item, abstractVar(body, v)));
      }
      default:
        return coerce(atom(pool, size), tyG());
    }
  }

  TermPtr clause(int size, std::vector<TermPtr>& pool) {
    if (size <= 1) return coerce(atom(pool, 1), tyP());
    switch (pick(8)) {
      case 0:
      case 1: {
        int l = 1 + pick(size - 1);
        return mkBin(LogOp::AndP, clause(l, pool), clause(size - l, pool));
      }
      case 2:
      case 3: {
        Sym v = sig().freshVar(0, fx().item);
        pool.push_back(mkVar(v));
        TermPtr body = clause(size - 1, pool);
        pool.pop_back();
        return mkQuant(LogOp::PiP, fx().item, mkAbs(fx().item, abstractVar(body, v)));
      }
      case 4:
      case 5:
      case 6: {
        int l = 1 + pick(size - 1);
        TermPtr g = goal(l, pool);
        TermPtr h = atom(pool, size - l);
        if (!isRigidAtom(h)) h = mkConst(fx().p);
        return mkBin(LogOp::ImpP, g, coerce(h, tyR()));
      }
      default: {
        TermPtr h = atom(pool, size);
        if (!isRigidAtom(h)) h = mkConst(fx().q);
        return coerce(h, tyP());
      }
    }
  }

  // abstract a free variable into a de Bruijn binder
  static TermPtr abstractVar(const TermPtr& t, Sym v) {
    struct Walk {
      Sym v;
      TermPtr go(const TermPtr& t, int depth) {
        switch (t->kind) {
          case TermKind::Var:
            if (t->sym == v) return mkBound(depth, symdata(v).type);
            return t;
          case TermKind::App: return mkApp(go(t->c0, depth), go(t->c1, depth));
          case TermKind::Abs: return mkAbs(t->bty, go(t->c0, depth + 1));
          default: return t;
        }
      }
    } w{v};
    return w.go(t, 0);
  }

  Program program() {
    std::vector<TermPtr> ds;
    int n = pick(cfg_.maxClauses + 1);
    std::vector<TermPtr> pool;
    for (int i = 0; i < n; i++) ds.push_back(normalize(clause(1 + pick(cfg_.clauseSize), pool)));
    return Program::of(std::move(ds));
  }

  TermPtr closedGoal() {
    std::vector<TermPtr> pool;
    return coerce(normalize(goal(1 + pick(cfg_.goalSize), pool)), tyG());
  }

 private:
  std::mt19937_64 rng_;
  GenCfg cfg_;
};

}  // namespace gen
