#pragma once

#include <vector>

#include "unify.hpp"

namespace uctt {

// A state <i, P ?- G>: program and goal over the signature U_i.
struct State {
  int index = 0;
  Program program;
  TermPtr goal;

  bool wellFormed() const {
    return program.level() <= index && goal->level <= index && isGoalFormula(goal);
  }

  bool operator==(const State& o) const {
    return index == o.index && program == o.program && termEq(goal, o.goal);
  }
};

using StateVector = std::vector<State>;

inline State mkState(int i, Program p, TermPtr g) {
  return State{i, std::move(p), coerce(normalize(g), tyG())};
}

inline bool vectorEq(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++)
    if (!(a[i] == b[i])) return false;
  return true;
}

inline StateVector applySubst(const Subst& th, const StateVector& v) {
  if (th.isId()) return v;
  StateVector out;
  out.reserve(v.size());
  for (const auto& s : v)
    out.push_back(State{s.index, applySubst(th, s.program), coerce(applySubst(th, s.goal), tyG())});
  return out;
}

inline StateVector applyReplacer(const ConstReplacer& xi, const StateVector& v) {
  if (xi.isId()) return v;
  StateVector out;
  out.reserve(v.size());
  for (const auto& s : v)
    out.push_back(State{s.index, applyReplacer(xi, s.program), coerce(applyReplacer(xi, s.goal), tyG())});
  return out;
}

inline std::set<Sym> vectorSymbols(const StateVector& v) {
  std::set<Sym> out;
  for (const auto& s : v) {
    for (Sym x : s.program.symbols()) out.insert(x);
    scanSyms(s.goal, [&](Sym x, TermKind) { out.insert(x); });
  }
  return out;
}

inline std::set<Sym> vectorFreeVars(const StateVector& v) {
  std::set<Sym> out;
  for (const auto& s : v) {
    for (Sym x : s.program.freeVarSet()) out.insert(x);
    collectFreeVars(s.goal, out);
  }
  return out;
}

inline int vectorMinIndex(const StateVector& v) {
  int m = 1 << 30;
  for (const auto& s : v) m = std::min(m, s.index);
  return m;
}

}  // namespace uctt
