#pragma once

#include <optional>
#include <sstream>

#include "print.hpp"

namespace uctt {

enum class Rule : uint8_t { Null, True, Backchain, Axiom, Or, And, Instance, Augment, Generic, Sub };

inline const char* ruleName(Rule r, int orBranch = 0) {
  switch (r) {
    case Rule::Null: return "null";
    case Rule::True: return "true";
    case Rule::Backchain: return "backchain";
    case Rule::Axiom: return "axiom";
    case Rule::Or: return orBranch == 2 ? "or2" : "or1";
    case Rule::And: return "and";
    case Rule::Instance: return "instance";
    case Rule::Augment: return "augment";
    case Rule::Generic: return "generic";
    case Rule::Sub: return "sub";
  }
  return "?";
}

struct Step {
  Rule rule = Rule::Null;
  int pos = 0;
  Subst sub;                   // identity for the non-substitution rules
  Clause clause;               // backchain / axiom
  std::vector<Sym> deltaVars;  // renaming-apart variables of the clause
  int orBranch = 1;
  TermPtr witness;             // instance (a fresh variable in RES(Y) mode)
  Sym genConst = 0;            // generic
};

// Applies one resolution rule at the selected position. Validates the rule's
// local side conditions; derivation-level freshness is the checker's job.
inline StateVector applyRule(const StateVector& v, const Step& st) {
  if (st.pos < 0 || st.pos >= (int)v.size()) throw RuleShapeMismatch("selected position out of range");
  const State& s = v[(size_t)st.pos];
  const TermPtr& g = s.goal;
  Spine sp = spineOf(g);
  LogOp op = headLog(g);

  auto replaceSelected = [&](const std::vector<State>& repl, const Subst& th) {
    StateVector out;
    out.reserve(v.size() + repl.size());
    for (int k = 0; k < (int)v.size(); k++) {
      if (k == st.pos) {
        for (const auto& r : repl) out.push_back(r);
        continue;
      }
      const State& x = v[(size_t)k];
      out.push_back(th.isId() ? x : State{x.index, applySubst(th, x.program), coerce(applySubst(th, x.goal), tyG())});
    }
    return out;
  };

  auto checkLevels = [](const StateVector& out) {
    for (const auto& x : out)
      if (x.program.level() > x.index || x.goal->level > x.index)
        throw LevelViolation("state term level exceeds its index");
    return out;
  };

  switch (st.rule) {
    case Rule::Null: {
      if (!isTop(g)) throw RuleShapeMismatch("null needs a top goal");
      if (!st.sub.isId()) throw RuleShapeMismatch("null carries a substitution");
      return replaceSelected({}, Subst{});
    }
    case Rule::True: {
      if (!isFlexAtom(g)) throw RuleShapeMismatch("true needs a flex atom");
      if (st.sub.isId()) throw RuleShapeMismatch("true with identity substitution makes no progress");
      std::string why;
      if (!st.sub.isLegal(&why)) throw LevelViolation(why);
      if (!isTop(applySubst(st.sub, g))) throw RuleShapeMismatch("substitution does not send the atom to top");
      State ns{s.index, applySubst(st.sub, s.program), topG()};
      return checkLevels(replaceSelected({ns}, st.sub));
    }
    case Rule::Backchain:
    case Rule::Axiom: {
      if (!isRigidAtom(g)) throw RuleShapeMismatch("backchain needs a rigid atom");
      if (!s.program.hasClause(st.clause)) throw RuleShapeMismatch("clause is not in elab(P)");
      if (st.clause.bare != (st.rule == Rule::Axiom))
        throw RuleShapeMismatch("axiom is backchain for clauses without body");
      if ((int)st.deltaVars.size() != st.clause.arity) throw RuleShapeMismatch("delta arity mismatch");
      std::vector<TermPtr> ws;
      std::set<Sym> seen;
      for (size_t k = 0; k < st.deltaVars.size(); k++) {
        const SymbolData& d = symdata(st.deltaVars[k]);
        if (d.kind != SymKind::FreeVar) throw RuleShapeMismatch("delta range must be variables");
        if (d.level > s.index) throw LevelViolation("delta variable above the state index");
        if (!typeEqual(d.type, st.clause.binderTys[k])) throw RuleShapeMismatch("delta variable type mismatch");
        if (!seen.insert(st.deltaVars[k]).second) throw RuleShapeMismatch("delta variables must be distinct");
        ws.push_back(mkVar(st.deltaVars[k]));
      }
      std::string why;
      if (!st.sub.isLegal(&why)) throw LevelViolation(why);
      auto [head, body] = instantiateClause(st.clause, ws);
      if (!termEq(applySubst(st.sub, g), applySubst(st.sub, head)))
        throw NoUnifier("substitution does not unify the goal with the clause head");
      if (st.rule == Rule::Axiom) return checkLevels(replaceSelected({}, st.sub));
      State ns{s.index, applySubst(st.sub, s.program), coerce(applySubst(st.sub, body), tyG())};
      return checkLevels(replaceSelected({ns}, st.sub));
    }
    case Rule::Or: {
      if ((op != LogOp::OrG && op != LogOp::OrH) || sp.args.size() != 2)
        throw RuleShapeMismatch("or needs a disjunctive goal");
      if (st.orBranch != 1 && st.orBranch != 2) throw RuleShapeMismatch("or branch must be 1 or 2");
      State ns{s.index, s.program, coerce(sp.args[(size_t)st.orBranch - 1], tyG())};
      return replaceSelected({ns}, Subst{});
    }
    case Rule::And: {
      if ((op != LogOp::AndG && op != LogOp::AndH) || sp.args.size() != 2)
        throw RuleShapeMismatch("and needs a conjunctive goal");
      State l{s.index, s.program, coerce(sp.args[0], tyG())};
      State r{s.index, s.program, coerce(sp.args[1], tyG())};
      return replaceSelected({l, r}, Subst{});
    }
    case Rule::Instance: {
      if ((op != LogOp::SigmaG && op != LogOp::SigmaH) || sp.args.size() != 1)
        throw RuleShapeMismatch("instance needs an existential goal");
      if (!st.witness) throw RuleShapeMismatch("instance needs a witness");
      if (st.witness->level > s.index) throw LevelViolation("witness level above the state index");
      if (!isPositive(st.witness)) throw RuleShapeMismatch("witness must be a positive term");
      if (!subtype(st.witness->type, sp.args[0]->type->dom))
        throw RuleShapeMismatch("witness type mismatch");
      State ns{s.index, s.program, coerce(quantInstantiate(sp.args[0], st.witness), tyG())};
      return replaceSelected({ns}, Subst{});
    }
    case Rule::Augment: {
      if (op != LogOp::ImpG || sp.args.size() != 2) throw RuleShapeMismatch("augment needs an implication goal");
      State ns{s.index, s.program.extend(sp.args[0]), coerce(sp.args[1], tyG())};
      return replaceSelected({ns}, Subst{});
    }
    case Rule::Generic: {
      if (op != LogOp::PiG || sp.args.size() != 1) throw RuleShapeMismatch("generic needs a universal goal");
      const SymbolData& d = symdata(st.genConst);
      if (d.kind != SymKind::Const) throw RuleShapeMismatch("generic constant must be a constant");
      if (d.level != s.index + 1) throw LevelViolation("generic constant must have label i+1");
      if (!typeEqual(d.type, sp.args[0]->type->dom)) throw RuleShapeMismatch("generic constant type mismatch");
      State ns{s.index + 1, s.program, coerce(quantInstantiate(sp.args[0], mkConst(st.genConst)), tyG())};
      return checkLevels(replaceSelected({ns}, Subst{}));
    }
    case Rule::Sub: {
      std::string why;
      if (!st.sub.isLegal(&why)) throw LevelViolation(why);
      StateVector out = applySubst(st.sub, v);
      return checkLevels(out);
    }
  }
  throw RuleShapeMismatch("unknown rule");
}

struct Derivation {
  StateVector initial;
  std::vector<Step> steps;
  std::vector<StateVector> after;
  Subst computedAnswer;

  const StateVector& last() const { return steps.empty() ? initial : after.back(); }
  bool successful() const { return last().empty(); }
  size_t length() const { return steps.size(); }
};

inline Subst recomputeAnswer(const StateVector& initial, const std::vector<Step>& steps) {
  Subst acc;
  for (const auto& st : steps) acc = compose(acc, st.sub);
  return acc.restrict(vectorFreeVars(initial));
}

// Builds a derivation by replaying steps from an initial vector; the
// computed answer is recomputed from scratch.
inline Derivation replaySteps(StateVector initial, std::vector<Step> steps) {
  Derivation d;
  d.initial = std::move(initial);
  StateVector cur = d.initial;
  for (auto& st : steps) {
    cur = applyRule(cur, st);
    d.after.push_back(cur);
    d.steps.push_back(std::move(st));
  }
  d.computedAnswer = recomputeAnswer(d.initial, d.steps);
  return d;
}

// Flat: no true steps, and each backchain/axiom substitution is safe with
// domain inside its own renaming-apart variables.
inline bool isFlat(const Derivation& d) {
  for (const auto& st : d.steps) {
    if (st.rule == Rule::True) return false;
    if (st.rule == Rule::Backchain || st.rule == Rule::Axiom) {
      if (!st.sub.isSafe()) return false;
      std::set<Sym> dv(st.deltaVars.begin(), st.deltaVars.end());
      for (const auto& [x, t] : st.sub.bindings())
        if (!dv.count(x)) return false;
    } else if (st.rule == Rule::Sub) {
      continue;
    } else if (!st.sub.isId()) {
      return false;
    }
  }
  return true;
}

struct CheckViolation {
  int stepIndex;
  std::string condition;
};

// Re-validates every step independently of how the derivation was produced:
// the freshness ledger is replayed, elab membership re-derived, unifier
// equations re-checked by normalize-and-compare, and the computed answer
// recomputed.
inline std::optional<CheckViolation> checkDerivation(const Derivation& d, bool allowSub = true) {
  std::set<Sym> ledger = vectorSymbols(d.initial);
  auto note = [&](const TermPtr& t) { scanSyms(t, [&](Sym x, TermKind) { ledger.insert(x); }); };

  StateVector cur = d.initial;
  for (size_t i = 0; i < d.steps.size(); i++) {
    const Step& st = d.steps[i];
    if (st.rule == Rule::Sub && !allowSub)
      return CheckViolation{(int)i, "SubRuleForbidden"};
    if (st.rule == Rule::Backchain || st.rule == Rule::Axiom) {
      for (Sym w : st.deltaVars)
        if (ledger.count(w)) return CheckViolation{(int)i, "FreshnessViolation"};
    }
    if (st.rule == Rule::Generic && ledger.count(st.genConst))
      return CheckViolation{(int)i, "FreshnessViolation"};
    StateVector next;
    try {
      next = applyRule(cur, st);
    } catch (const LevelViolation& e) {
      return CheckViolation{(int)i, std::string("LevelViolation")};
    } catch (const NoUnifier& e) {
      return CheckViolation{(int)i, std::string("NoUnifier")};
    } catch (const Error& e) {
      return CheckViolation{(int)i, std::string(e.what())};
    }
    if (i < d.after.size() && !vectorEq(next, d.after[i]))
      return CheckViolation{(int)i, "RecordedVectorMismatch"};
    for (Sym w : st.deltaVars) ledger.insert(w);
    if (st.genConst) ledger.insert(st.genConst);
    if (st.witness) note(st.witness);
    for (const auto& [x, t] : st.sub.bindings()) {
      ledger.insert(x);
      note(t);
    }
    if (st.clause.term) note(st.clause.term);
    for (Sym x : vectorSymbols(next)) ledger.insert(x);
    cur = std::move(next);
  }
  if (d.after.size() != d.steps.size())
    return CheckViolation{(int)d.steps.size(), "MissingRecordedVectors"};
  Subst want = recomputeAnswer(d.initial, d.steps);
  if (!(want == d.computedAnswer))
    return CheckViolation{(int)d.steps.size(), "ComputedAnswerMismatch"};
  return std::nullopt;
}

// Stable one-line-per-step trace: `step#  rule  pos  substitution  |vector|`.
inline std::string traceDerivation(const Derivation& d) {
  std::ostringstream os;
  for (size_t i = 0; i < d.steps.size(); i++) {
    const Step& st = d.steps[i];
    os << (i + 1) << "  " << ruleName(st.rule, st.orBranch) << "  " << st.pos << "  "
       << printSubst(st.sub) << "  " << d.after[i].size() << "\n";
  }
  return os.str();
}

}  // namespace uctt
