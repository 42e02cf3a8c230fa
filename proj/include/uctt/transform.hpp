#pragma once

#include <functional>

#include "solve.hpp"

namespace uctt {

// Executable forms of the derivation lemmas. Every transformation rebuilds
// its output through replaySteps, so applyRule re-validates each step; the
// test suites additionally run checkDerivation on everything produced here.

namespace detail_tf {

inline std::set<Sym> allSymbols(const Derivation& d) {
  std::set<Sym> s = vectorSymbols(d.initial);
  for (const auto& v : d.after)
    for (Sym x : vectorSymbols(v)) s.insert(x);
  for (const auto& st : d.steps) {
    for (Sym w : st.deltaVars) s.insert(w);
    if (st.genConst) s.insert(st.genConst);
    if (st.witness) scanSyms(st.witness, [&](Sym x, TermKind) { s.insert(x); });
    if (st.clause.term) scanSyms(st.clause.term, [&](Sym x, TermKind) { s.insert(x); });
    for (const auto& [x, t] : st.sub.bindings()) {
      s.insert(x);
      scanSyms(t, [&](Sym y, TermKind) { s.insert(y); });
    }
  }
  return s;
}

// Rewrites step payloads with a term map plus symbol maps and replays.
struct PayloadMap {
  std::function<TermPtr(const TermPtr&)> term = [](const TermPtr& t) { return t; };
  std::function<Sym(Sym)> var = [](Sym s) { return s; };
  std::function<Sym(Sym)> cnst = [](Sym s) { return s; };
};

inline StateVector mapVector(const StateVector& v, const PayloadMap& m, int indexDelta = 0) {
  StateVector out;
  out.reserve(v.size());
  for (const auto& s : v) {
    std::vector<TermPtr> ds;
    for (const auto& d : s.program.formulas()) ds.push_back(m.term(d));
    out.push_back(State{s.index + indexDelta, Program::of(std::move(ds)), coerce(m.term(s.goal), tyG())});
  }
  return out;
}

inline Derivation mapReplay(const Derivation& d, const PayloadMap& m, int indexDelta = 0) {
  StateVector init = mapVector(d.initial, m, indexDelta);
  std::vector<Step> steps;
  steps.reserve(d.steps.size());
  for (const auto& st : d.steps) {
    Step n;
    n.rule = st.rule;
    n.pos = st.pos;
    n.orBranch = st.orBranch;
    if (st.clause.term) n.clause = makeClause(m.term(st.clause.term));
    for (Sym w : st.deltaVars) n.deltaVars.push_back(m.var(w));
    if (st.witness) n.witness = m.term(st.witness);
    if (st.genConst) n.genConst = m.cnst(st.genConst);
    for (const auto& [x, t] : st.sub.bindings()) n.sub.bind(m.var(x), m.term(t));
    steps.push_back(std::move(n));
  }
  return replaySteps(std::move(init), std::move(steps));
}

inline TermPtr replaceConstTerm(const TermPtr& t, Sym c, const TermPtr& repl) {
  struct Walk {
    Sym c;
    const TermPtr& repl;
    TermPtr go(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::Const: return t->sym == c ? repl : t;
        case TermKind::App: {
          TermPtr f = go(t->c0), a = go(t->c1);
          if (f.get() == t->c0.get() && a.get() == t->c1.get()) return t;
          return mkApp(f, a);
        }
        case TermKind::Abs: {
          TermPtr b = go(t->c0);
          if (b.get() == t->c0.get()) return t;
          return mkAbs(t->bty, b);
        }
        default: return t;
      }
    }
  } w{c, repl};
  return normalizeOpen(w.go(t));
}

}  // namespace detail_tf

// Lemma: derivation renaming under a neutral renaming rho.
inline Derivation renameVars(const Derivation& d, const Subst& rho) {
  if (!rho.isNeutralRenaming()) throw HypothesisUnmet("renameVars needs a neutral renaming");
  detail_tf::PayloadMap m;
  m.term = [&rho](const TermPtr& t) { return applySubstOpen(rho, t); };
  m.var = [&rho](Sym x) {
    TermPtr t = rho.lookup(x);
    return t->sym;
  };
  return detail_tf::mapReplay(d, m);
}

// Lemma: constant renaming under a neutral constant renamer xi.
inline Derivation renameConsts(const Derivation& d, const ConstReplacer& xi) {
  if (!xi.isNeutral() || !xi.isRenamer()) throw HypothesisUnmet("renameConsts needs a neutral constant renamer");
  detail_tf::PayloadMap m;
  m.term = [&xi](const TermPtr& t) { return applyReplacer(xi, t); };
  m.cnst = [&xi](Sym c) { return xi.apply(c); };
  return detail_tf::mapReplay(d, m);
}

// Lemma: choice of variables — produce a variant avoiding the set X.
inline Derivation avoidVars(const Derivation& d, const std::set<Sym>& x) {
  std::set<Sym> frontier = vectorFreeVars(d.initial);
  for (Sym v : vectorFreeVars(d.last())) frontier.insert(v);
  for (const auto& [v, t] : d.computedAnswer.bindings()) {
    frontier.insert(v);
    scanSyms(t, [&](Sym y, TermKind k) { if (k == TermKind::Var) frontier.insert(y); });
  }
  for (Sym v : x)
    if (frontier.count(v)) throw HypothesisUnmet("avoidVars set meets the derivation endpoints");
  std::set<Sym> present = detail_tf::allSymbols(d);
  Subst rho;
  for (Sym v : x) {
    if (!present.count(v) || symdata(v).kind != SymKind::FreeVar) continue;
    Sym w = sig().freshVar(symLevel(v), symdata(v).type);
    rho.bind(v, mkVar(w));
    rho.bind(w, mkVar(v));
  }
  if (rho.isId()) return d;
  return renameVars(d, rho);
}

// Lemma: choice of constants.
inline Derivation avoidConsts(const Derivation& d, const std::set<Sym>& x) {
  std::set<Sym> frontier = vectorSymbols(d.initial);
  for (Sym v : vectorSymbols(d.last())) frontier.insert(v);
  for (const auto& [v, t] : d.computedAnswer.bindings()) scanSyms(t, [&](Sym y, TermKind) { frontier.insert(y); });
  for (Sym v : x)
    if (frontier.count(v)) throw HypothesisUnmet("avoidConsts set meets the derivation endpoints");
  std::set<Sym> present = detail_tf::allSymbols(d);
  ConstReplacer xi;
  for (Sym c : x) {
    if (!present.count(c) || symdata(c).kind != SymKind::Const) continue;
    Sym w = sig().freshConst(symLevel(c), symdata(c).type);
    xi.map(c, w);
    xi.map(w, c);
  }
  if (xi.isId()) return d;
  return renameConsts(d, xi);
}

// Lemma: fresh derivation — rename all internal variables and constants of a
// successful identity-answer derivation to brand-new symbols.
inline Derivation freshDerivation(const Derivation& d) {
  if (!d.successful() || !d.computedAnswer.isId())
    throw HypothesisUnmet("freshDerivation needs a successful identity-answer derivation");
  std::set<Sym> keep = vectorSymbols(d.initial);
  Subst rho;
  ConstReplacer xi;
  for (Sym s : detail_tf::allSymbols(d)) {
    if (keep.count(s) || isLogical(s)) continue;
    const SymbolData& sd = symdata(s);
    if (sd.kind == SymKind::FreeVar) {
      Sym w = sig().freshVar(sd.level, sd.type);
      rho.bind(s, mkVar(w));
      rho.bind(w, mkVar(s));
    } else {
      Sym w = sig().freshConst(sd.level, sd.type);
      xi.map(s, w);
      xi.map(w, s);
    }
  }
  Derivation out = rho.isId() ? d : renameVars(d, rho);
  if (!xi.isId()) out = renameConsts(out, xi);
  return out;
}

// Instantiation Lemma: from a successful derivation with computed answer
// theta, a flat derivation of the instantiated vector, no longer than the
// input. true and sub steps vanish; backchain steps are re-pointed at fresh
// renaming-apart variables.
namespace detail_tf {

inline Derivation flattenOnce(const Derivation& d) {
  size_t n = d.steps.size();
  std::vector<Subst> tau(n + 1);
  for (size_t k = n; k-- > 0;) tau[k] = compose(d.steps[k].sub, tau[k + 1]);
  StateVector init = applySubst(tau[0], d.initial);
  std::vector<Step> steps;
  for (size_t k = 0; k < n; k++) {
    const Step& st = d.steps[k];
    switch (st.rule) {
      case Rule::True:
      case Rule::Sub:
        continue;  // the full composition already performed these
      case Rule::Backchain:
      case Rule::Axiom: {
        Step ns;
        ns.rule = st.rule;
        ns.pos = st.pos;
        ns.clause = makeClause(applySubst(tau[k], st.clause.term));
        for (size_t j = 0; j < st.deltaVars.size(); j++) {
          Sym w = st.deltaVars[j];
          Sym w2 = sig().freshVar(symLevel(w), symdata(w).type);
          ns.deltaVars.push_back(w2);
          TermPtr val = applySubst(tau[k + 1], applySubst(st.sub, mkVar(w)));
          ns.sub.bind(w2, val);
        }
        steps.push_back(std::move(ns));
        break;
      }
      case Rule::Instance: {
        Step ns;
        ns.rule = st.rule;
        ns.pos = st.pos;
        ns.witness = applySubst(tau[k + 1], st.witness);
        steps.push_back(std::move(ns));
        break;
      }
      default: {
        Step ns;
        ns.rule = st.rule;
        ns.pos = st.pos;
        ns.orBranch = st.orBranch;
        ns.genConst = st.genConst;
        steps.push_back(std::move(ns));
        break;
      }
    }
  }
  return replaySteps(std::move(init), std::move(steps));
}

}  // namespace detail_tf

inline Derivation instantiate(const Derivation& d) {
  if (!d.successful()) throw HypothesisUnmet("instantiate needs a successful derivation");
  Derivation out = detail_tf::flattenOnce(d);
  if (auto v = checkDerivation(out)) {
    // cross-state constant leakage can force re-chosen generic constants
    ConstReplacer xi;
    for (const auto& st : d.steps)
      if (st.rule == Rule::Generic) xi.map(st.genConst, sig().freshConst(symLevel(st.genConst), symdata(st.genConst).type));
    if (!xi.isId()) {
      Derivation renamed = renameConsts(d, xi);
      out = detail_tf::flattenOnce(renamed);
      if (auto v2 = checkDerivation(out))
        throw HypothesisUnmet("instantiate produced an invalid derivation: " + v2->condition);
      return out;
    }
    throw HypothesisUnmet("instantiate produced an invalid derivation: " + v->condition);
  }
  return out;
}

inline Derivation instantiate(const Derivation& d, const Subst& theta) {
  if (!(theta == d.computedAnswer)) throw HypothesisUnmet("theta must be the computed answer of d");
  return instantiate(d);
}

// Specialization lemma: flat identity derivation of A gives one of A[t/x].
inline Derivation specialize(const Derivation& d0, const TermPtr& t, Sym x) {
  if (!d0.successful() || !d0.computedAnswer.isId() || !isFlat(d0))
    throw HypothesisUnmet("specialize needs a flat successful identity-answer derivation");
  if (symdata(x).kind != SymKind::FreeVar) throw HypothesisUnmet("specialize target must be a variable");
  if (t->level > symLevel(x)) throw HypothesisUnmet("witness level above the variable level");
  if (!isPositive(t) || !subtype(t->type, symdata(x).type))
    throw HypothesisUnmet("witness must be a positive term of the variable's type");
  if (!vectorFreeVars(d0.initial).count(x)) return d0;
  std::set<Sym> avoid;
  for (Sym v : freeVars(t))
    if (!vectorFreeVars(d0.initial).count(v)) avoid.insert(v);
  Derivation d = avoid.empty() ? d0 : avoidVars(d0, avoid);
  Subst inst = Subst::single(x, t);
  detail_tf::PayloadMap m;
  m.term = [&inst](const TermPtr& u) { return applySubstOpen(inst, u); };
  return detail_tf::mapReplay(d, m);
}

// Substitution corollary: iterate specialization over an arbitrary legal
// substitution, splitting an unsafe one through fresh intermediates.
inline Derivation specializeBy(const Derivation& d, const Subst& theta) {
  std::string why;
  if (!theta.isLegal(&why)) throw HypothesisUnmet("specializeBy needs a legal substitution: " + why);
  if (theta.isId()) return d;
  if (theta.isSafe()) {
    Derivation cur = d;
    for (const auto& [x, t] : theta.bindings()) cur = specialize(cur, t, x);
    return cur;
  }
  Subst swap;  // x_i -> w_i inside the ranges
  Subst back;  // w_i -> x_i afterwards
  for (const auto& [x, t] : theta.bindings()) {
    Sym w = sig().freshVar(symLevel(x), symdata(x).type);
    swap.bind(x, mkVar(w));
    back.bind(w, mkVar(x));
  }
  Subst safe1;
  for (const auto& [x, t] : theta.bindings()) safe1.bind(x, applySubst(swap, t));
  Derivation cur = specializeBy(d, safe1);
  return specializeBy(cur, back);
}

// Left weakening: swap the program of the state at `pos` in the initial
// vector for P' with elab(P') containing elab(P).
inline Derivation weakenProgram(const Derivation& d0, const Program& pprime, int pos = 0) {
  if (!d0.successful() || !d0.computedAnswer.isId() || !isFlat(d0))
    throw HypothesisUnmet("weakenProgram needs a flat successful identity-answer derivation");
  if (pos < 0 || pos >= (int)d0.initial.size()) throw HypothesisUnmet("weakenProgram position out of range");
  const State& s = d0.initial[(size_t)pos];
  if (pprime.level() > s.index) throw HypothesisUnmet("P' level above the state index");
  if (!pprime.elabIncludes(s.program)) throw HypothesisUnmet("elab(P') must include elab(P)");
  Derivation d = d0;
  {
    std::set<Sym> extraV, extraC;
    std::set<Sym> have = vectorSymbols(d0.initial);
    for (Sym x : pprime.symbols())
      if (!have.count(x)) (symdata(x).kind == SymKind::FreeVar ? extraV : extraC).insert(x);
    if (!extraV.empty()) d = avoidVars(d, extraV);
    if (!extraC.empty()) d = avoidConsts(d, extraC);
  }
  StateVector init = d.initial;
  init[(size_t)pos].program = pprime;
  return replaySteps(std::move(init), d.steps);
}

// Constant replacement: an identity derivation of A[c/x] yields one of A.
inline Derivation replaceConstByVar(const Derivation& d0, Sym c, Sym x) {
  if (!d0.successful() || !d0.computedAnswer.isId() || !isFlat(d0))
    throw HypothesisUnmet("replaceConstByVar needs a flat successful identity-answer derivation");
  if (symdata(c).kind != SymKind::Const || symdata(x).kind != SymKind::FreeVar)
    throw HypothesisUnmet("replaceConstByVar maps a constant to a variable");
  if (symLevel(c) > symLevel(x)) throw HypothesisUnmet("constant level above the variable level");
  if (!typeEqual(symdata(c).type, symdata(x).type)) throw HypothesisUnmet("type mismatch");
  if (detail_tf::allSymbols(d0).count(x)) throw HypothesisUnmet("the variable must not occur in the derivation");
  for (const auto& st : d0.steps)
    if (st.genConst == c) throw HypothesisUnmet("the constant is introduced by a generic step");
  TermPtr xv = mkVar(x);
  detail_tf::PayloadMap m;
  m.term = [&](const TermPtr& u) { return detail_tf::replaceConstTerm(u, c, xv); };
  return detail_tf::mapReplay(d0, m);
}

// --- level shifts -----------------------------------------------------------

namespace detail_tf {

struct LevelShift {
  int pivot;                       // i
  int delta;                       // -1 or +1
  std::map<Sym, TermPtr> varMap;   // variables
  std::map<Sym, Sym> constMap;     // constants
  bool autoExtend = false;         // allow on-the-fly mapping of internals

  TermPtr mapTerm(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Const: {
        auto it = constMap.find(t->sym);
        if (it != constMap.end()) return mkConst(it->second);
        if (delta < 0 && symLevel(t->sym) >= pivot) {
          if (!autoExtend) throw HypothesisUnmet("constant of level >= i not covered by xi");
          Sym c2 = sig().freshConst(symLevel(t->sym) + delta, symdata(t->sym).type);
          constMap.emplace(t->sym, c2);
          return mkConst(c2);
        }
        return t;
      }
      case TermKind::Var: {
        auto it = varMap.find(t->sym);
        if (it != varMap.end()) return it->second;
        if (delta < 0 && symLevel(t->sym) >= pivot) {
          if (!autoExtend) throw HypothesisUnmet("variable of level >= i not covered by theta");
          Sym v2 = sig().freshVar(symLevel(t->sym) + delta, symdata(t->sym).type);
          varMap.emplace(t->sym, mkVar(v2));
          return mkVar(v2);
        }
        return t;
      }
      case TermKind::App: return mkApp(mapTerm(t->c0), mapTerm(t->c1));
      case TermKind::Abs: return mkAbs(t->bty, mapTerm(t->c0));
      default: return t;
    }
  }

  TermPtr mapTermN(const TermPtr& t) { return normalizeOpen(mapTerm(t)); }
};

inline Derivation levelShift(const Derivation& d, LevelShift& sh) {
  StateVector init;
  for (const auto& s : d.initial) {
    std::vector<TermPtr> ds;
    for (const auto& f : s.program.formulas()) ds.push_back(sh.mapTermN(f));
    init.push_back(State{s.index + sh.delta, Program::of(std::move(ds)), coerce(sh.mapTermN(s.goal), tyG())});
  }
  sh.autoExtend = true;  // internals may be remapped freely
  std::vector<Step> steps;
  for (const auto& st : d.steps) {
    Step ns;
    ns.rule = st.rule;
    ns.pos = st.pos;
    ns.orBranch = st.orBranch;
    if (st.clause.term) ns.clause = makeClause(sh.mapTermN(st.clause.term));
    for (Sym w : st.deltaVars) {
      int lw = symLevel(w);
      int nl = sh.delta > 0 ? lw + 1 : (lw >= sh.pivot ? lw - 1 : lw);
      Sym w2 = sig().freshVar(nl, symdata(w).type);
      sh.varMap.emplace(w, mkVar(w2));
      ns.deltaVars.push_back(w2);
    }
    if (st.witness) ns.witness = sh.mapTermN(st.witness);
    if (st.genConst) {
      Sym c2 = sig().freshConst(symLevel(st.genConst) + sh.delta, symdata(st.genConst).type);
      sh.constMap.emplace(st.genConst, c2);
      ns.genConst = c2;
    }
    for (const auto& [x, t] : st.sub.bindings()) {
      TermPtr xv = sh.mapTerm(mkVar(x));
      if (xv->kind != TermKind::Var) throw HypothesisUnmet("substitution domain collapsed by the shift");
      ns.sub.bind(xv->sym, sh.mapTermN(t));
    }
    steps.push_back(std::move(ns));
  }
  return replaySteps(std::move(init), std::move(steps));
}

}  // namespace detail_tf

// Level reduction: all states at level >= i > 0; xi lowers constants of
// level >= i, theta lowers variables of level >= i; indices drop by one.
inline Derivation levelReduce(const Derivation& d, const ConstReplacer& xi, const Subst& theta, int pivot) {
  if (!d.successful() || !d.computedAnswer.isId() || !isFlat(d))
    throw HypothesisUnmet("levelReduce needs a flat successful identity-answer derivation");
  if (pivot <= 0 || vectorMinIndex(d.initial) < pivot)
    throw HypothesisUnmet("all states must be at level >= i > 0");
  detail_tf::LevelShift sh;
  sh.pivot = pivot;
  sh.delta = -1;
  for (const auto& [c, c2] : xi.pairs()) {
    int lc = symLevel(c);
    int want = lc >= pivot ? lc - 1 : lc;
    if (symLevel(c2) > want) throw HypothesisUnmet("xi must lower levels as stated");
    sh.constMap.emplace(c, c2);
  }
  for (const auto& [x, t] : theta.bindings()) {
    int lx = symLevel(x);
    int want = lx >= pivot ? lx - 1 : lx;
    if (t->level > want || !isPositive(t) || !subtype(t->type, symdata(x).type))
      throw HypothesisUnmet("theta must lower levels as stated");
    sh.varMap.emplace(x, t);
  }
  return detail_tf::levelShift(d, sh);
}

// Level increase: indices rise by one; xi raises selected constants one
// level (identity is allowed, matching the corollary's use).
inline Derivation levelIncrease(const Derivation& d, const ConstReplacer& xi, int pivot) {
  if (!d.successful() || !d.computedAnswer.isId() || !isFlat(d))
    throw HypothesisUnmet("levelIncrease needs a flat successful identity-answer derivation");
  if (vectorMinIndex(d.initial) < pivot) throw HypothesisUnmet("states below the pivot level");
  detail_tf::LevelShift sh;
  sh.pivot = pivot;
  sh.delta = +1;
  for (const auto& [c, c2] : xi.pairs()) {
    if (symLevel(c2) != symLevel(c) + 1) throw HypothesisUnmet("xi must raise levels by one");
    sh.constMap.emplace(c, c2);
  }
  return detail_tf::levelShift(d, sh);
}

inline Derivation levelIncrease(const Derivation& d) { return levelIncrease(d, ConstReplacer{}, 0); }

// Product lemma: two identity-answer successes combine into one over the
// concatenated vector; both sides are flattened and the right side renamed
// apart first.
inline Derivation product(const Derivation& da, const Derivation& db) {
  if (!da.successful() || !db.successful() || !da.computedAnswer.isId() || !db.computedAnswer.isId())
    throw HypothesisUnmet("product needs two successful identity-answer derivations");
  Derivation a = freshDerivation(isFlat(da) ? da : instantiate(da));
  Derivation b = freshDerivation(isFlat(db) ? db : instantiate(db));
  StateVector init = a.initial;
  for (const auto& s : b.initial) init.push_back(s);
  std::vector<Step> steps = a.steps;
  for (const auto& st : b.steps) steps.push_back(st);
  return replaySteps(std::move(init), std::move(steps));
}

// Frame embedding used by the translations: run a flat identity derivation
// of V inside prefix (x) V (x) suffix.
inline Derivation embedDerivation(const Derivation& d, const StateVector& prefix, const StateVector& suffix) {
  if (!d.successful() || !d.computedAnswer.isId() || !isFlat(d))
    throw HypothesisUnmet("embed needs a flat successful identity-answer derivation");
  Derivation f = freshDerivation(d);
  StateVector init = prefix;
  for (const auto& s : f.initial) init.push_back(s);
  for (const auto& s : suffix) init.push_back(s);
  std::vector<Step> steps = f.steps;
  for (auto& st : steps) st.pos += (int)prefix.size();
  return replaySteps(std::move(init), std::move(steps));
}

// Generic constants corollary, forward direction: from an identity success
// of <i+1, P ?- G[c/x]> (c fresh of level i+1) to one of <i, P ?- G[t/x]>.
inline Derivation genericToInstance(const Derivation& d0, Sym c, const TermPtr& t) {
  if (d0.initial.size() != 1) throw HypothesisUnmet("genericToInstance expects a single-state derivation");
  const State& s0 = d0.initial[0];
  if (symLevel(c) != s0.index) throw HypothesisUnmet("constant must have the initial state's level");
  if (s0.index < 1) throw HypothesisUnmet("initial index must be at least 1");
  Derivation d = isFlat(d0) ? d0 : instantiate(d0);
  int i = s0.index - 1;
  // step 1: lower the level, sending c to a fresh constant of level i
  Sym cLow = sig().freshConst(i, symdata(c).type);
  ConstReplacer xi;
  xi.map(c, cLow);
  Derivation low = levelReduce(d, xi, Subst{}, s0.index);
  // step 2: generalize the constant to a fresh variable of level i
  Sym x = sig().freshVar(i, symdata(c).type);
  Derivation gen = replaceConstByVar(low, cLow, x);
  // step 3: specialize at the witness
  return specialize(gen, t, x);
}

// Generic constants corollary, converse: from an identity success of
// <i, P ?- G[c'/x]> with c' a fresh constant of level i, one of
// <i+1, P ?- G[c/x]> with c fresh of level i+1.
inline Derivation instanceToGeneric(const Derivation& d0, Sym cPrime, Sym c) {
  if (d0.initial.size() != 1) throw HypothesisUnmet("instanceToGeneric expects a single-state derivation");
  if (symLevel(c) != symLevel(cPrime) + 1)
    throw HypothesisUnmet("target constant must live one level up");
  Derivation d = isFlat(d0) ? d0 : instantiate(d0);
  ConstReplacer xi;
  xi.map(cPrime, c);
  return levelIncrease(d, xi, 0);
}

}  // namespace uctt
