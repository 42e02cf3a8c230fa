#pragma once

#include "derivation.hpp"

namespace uctt {

enum class System : uint8_t { ResT, ResY, Star };

struct SearchConfig {
  System system = System::ResT;
  int depthBound = 8;
  int witnessSizeBound = 4;
  int maxSolutions = 1;
  bool idOnly = false;  // only emit identity computed answers
};

struct Solution {
  Subst answer;
  Derivation deriv;
};

// Outcome of a bounded search. `exhaustedSpace` means the whole search tree
// was explored without hitting the depth bound or a truncated enumeration,
// so an empty solution list is a certified finite failure rather than a
// bound report.
struct SolveOutcome {
  std::vector<Solution> solutions;
  bool exhaustedSpace = false;
  bool depthLimited = false;
  bool enumTruncated = false;
  bool nonPatternHit = false;

  bool succeeded() const { return !solutions.empty(); }
  bool finiteFailure() const { return solutions.empty() && exhaustedSpace; }
  bool boundExhausted() const { return solutions.empty() && !exhaustedSpace; }
};

namespace detail_solve {

class Searcher {
 public:
  Searcher(StateVector initial, SearchConfig cfg)
      : cfg_(cfg), initial_(std::move(initial)), initVars_(vectorFreeVars(initial_)) {}

  SolveOutcome run() {
    SolveOutcome out;
    for (int depth = 1; depth <= cfg_.depthBound; depth++) {
      cutoff_ = false;
      truncated_ = false;
      nonPattern_ = false;
      path_.clear();
      vectors_.clear();
      dfs(initial_, depth, out);
      out.enumTruncated |= truncated_;
      out.nonPatternHit |= nonPattern_;
      if ((int)out.solutions.size() >= cfg_.maxSolutions) return out;
      if (!cutoff_ && !truncated_ && !nonPattern_) {
        // the tree below depthBound is fully explored and nothing was cut
        out.exhaustedSpace = true;
        return out;
      }
    }
    out.depthLimited = cutoff_;
    return out;
  }

 private:
  SearchConfig cfg_;
  StateVector initial_;
  std::set<Sym> initVars_;
  std::vector<Step> path_;
  std::vector<StateVector> vectors_;
  bool cutoff_ = false;
  bool truncated_ = false;
  bool nonPattern_ = false;

  void emit(SolveOutcome& out) {
    Subst answer = recomputeAnswer(initial_, path_);
    if (cfg_.idOnly && !answer.isId()) return;
    Derivation d;
    d.initial = initial_;
    d.steps = path_;
    d.after = vectors_;
    d.computedAnswer = answer;
    out.solutions.push_back(Solution{std::move(answer), std::move(d)});
  }

  bool done(const SolveOutcome& out) const { return (int)out.solutions.size() >= cfg_.maxSolutions; }

  void tryStep(const StateVector& v, Step st, int budget, SolveOutcome& out) {
    StateVector next;
    try {
      next = applyRule(v, st);
    } catch (const Error&) {
      return;
    }
    path_.push_back(std::move(st));
    vectors_.push_back(next);
    dfs(next, budget - 1, out);
    path_.pop_back();
    vectors_.pop_back();
  }

  // Exact-length discipline: solutions are only emitted when the budget is
  // spent, so iterative deepening never reports duplicates.
  void dfs(const StateVector& v, int budget, SolveOutcome& out) {
    if (done(out)) return;
    if (v.empty()) {
      if (budget == 0) emit(out);
      return;
    }
    if (budget == 0) {
      cutoff_ = true;
      return;
    }

    const int pos = 0;  // leftmost selection
    const State& s = v[pos];
    const TermPtr& g = s.goal;
    Spine sp = spineOf(g);
    LogOp op = headLog(g);

    if (isTop(g)) {
      Step st;
      st.rule = Rule::Null;
      st.pos = pos;
      tryStep(v, std::move(st), budget, out);
      return;
    }
    switch (op) {
      case LogOp::AndG:
      case LogOp::AndH: {
        Step st;
        st.rule = Rule::And;
        st.pos = pos;
        tryStep(v, std::move(st), budget, out);
        return;
      }
      case LogOp::OrG:
      case LogOp::OrH: {
        for (int j = 1; j <= 2 && !done(out); j++) {
          Step st;
          st.rule = Rule::Or;
          st.pos = pos;
          st.orBranch = j;
          tryStep(v, std::move(st), budget, out);
        }
        return;
      }
      case LogOp::ImpG: {
        Step st;
        st.rule = Rule::Augment;
        st.pos = pos;
        tryStep(v, std::move(st), budget, out);
        return;
      }
      case LogOp::PiG: {
        Step st;
        st.rule = Rule::Generic;
        st.pos = pos;
        st.genConst = sig().freshConst(s.index + 1, sp.args[0]->type->dom);
        tryStep(v, std::move(st), budget, out);
        return;
      }
      case LogOp::SigmaG:
      case LogOp::SigmaH: {
        TypePtr alpha = sp.args[0]->type->dom;
        if (cfg_.system == System::ResY) {
          Step st;
          st.rule = Rule::Instance;
          st.pos = pos;
          st.witness = mkVar(sig().freshVar(s.index, alpha));
          tryStep(v, std::move(st), budget, out);
          return;
        }
        PositiveEnumerator en(s.index, cfg_.witnessSizeBound, vectorSymbols(v));
        EnumResult ts = en.enumerate(alpha);
        truncated_ |= ts.truncated;
        for (const auto& t : ts.terms) {
          if (done(out)) return;
          Step st;
          st.rule = Rule::Instance;
          st.pos = pos;
          st.witness = t;
          tryStep(v, std::move(st), budget, out);
        }
        return;
      }
      default: break;
    }

    if (isRigidAtom(g)) {
      Spine gs = spineOf(g);
      for (const auto& c : s.program.clauses()) {
        if (done(out)) return;
        if (c.headSym != gs.head->sym) continue;
        Step st;
        st.rule = c.bare ? Rule::Axiom : Rule::Backchain;
        st.pos = pos;
        st.clause = c;
        std::vector<TermPtr> ws;
        for (const auto& ty : c.binderTys) {
          Sym w = sig().freshVar(s.index, ty);
          st.deltaVars.push_back(w);
          ws.push_back(mkVar(w));
        }
        auto [head, body] = instantiateClause(c, ws);
        (void)body;  // the successor goal comes from applyRule
        UnifyResult u = unify(g, head);
        nonPattern_ |= u.nonPattern;
        for (const auto& gamma : u.unifiers) {
          if (done(out)) return;
          Step bs = st;
          bs.sub = gamma;
          tryStep(v, std::move(bs), budget, out);
        }
      }
      return;
    }

    if (isFlexAtom(g)) {
      // the true rule; its main utility is dispatching flex goals
      Step st;
      st.rule = Rule::True;
      st.pos = pos;
      st.sub = solveFlexTop(g);
      tryStep(v, std::move(st), budget, out);
      return;
    }
    // no rule applies to this goal shape: dead branch
  }
};

}  // namespace detail_solve

inline SolveOutcome solve(const StateVector& v, const SearchConfig& cfg) {
  for (const auto& s : v)
    if (!s.wellFormed()) throw RuleShapeMismatch("ill-formed initial state: " + printState(s));
  return detail_solve::Searcher(v, cfg).run();
}

inline SolveOutcome solveState(int index, const Program& p, const TermPtr& goal, const SearchConfig& cfg) {
  return solve({mkState(index, p, goal)}, cfg);
}

// Identity-answer success: some solution's computed answer is the identity
// on the free variables of the initial vector.
inline bool hasIdSolution(const SolveOutcome& out) {
  for (const auto& s : out.solutions)
    if (s.answer.isId()) return true;
  return false;
}

}  // namespace uctt
