#pragma once

#include <set>
#include <vector>

#include "subst.hpp"

namespace uctt {

// Bounded enumeration of positive terms of a given (target) type and level.
// Used by the instance rule in RES(t), the T operator's joins, and the
// sequent prover's witness search. Terms are generated from:
//   - user constants of level <= maxLevel, fully applied,
//   - the positive logical constructors (top/and/or at h) when the target
//     admits h-typed terms,
//   - the supplied context variables plus one designated enumeration
//     variable per (type, level).
// Lambda-witnesses (in particular Sigma_h-formulas) are never generated, so
// enumerations whose target admits h are always reported truncated. For the
// remaining targets completeness relative to the bound is decided by a
// constructor-graph analysis: if no constructor with arguments applies, the
// ground fragment is finite and the enumeration is exact. Variables other
// than the designated one are redundant up to derivation renaming.
struct EnumResult {
  std::vector<TermPtr> terms;
  bool truncated = false;
};

namespace detail_enum {

struct Ctor {
  TermPtr head;
  std::vector<TypePtr> args;
};

inline void ctorFromConst(Sym s, const TypePtr& target, std::vector<Ctor>& out) {
  TypePtr t = symdata(s).type;
  std::vector<TypePtr> args;
  while (true) {
    if (subtype(t, target)) {
      out.push_back({mkConst(s), args});
      break;
    }
    if (!t->isArrow()) break;
    args.push_back(t->dom);
    t = t->cod;
  }
}

inline void ctorsFor(const TypePtr& target, int maxLevel, const std::vector<Sym>& contextConsts,
                     std::vector<Ctor>& out) {
  for (Sym s : sig().userConsts(maxLevel)) ctorFromConst(s, target, out);
  // constants in scope (eigenconstants of the derivation or sequent) also
  // inhabit the universe
  for (Sym s : contextConsts)
    if (symLevel(s) <= maxLevel) ctorFromConst(s, target, out);
  if (baseSubtype("h", target->isArrow() ? "?" : target->base)) {
    out.push_back({topH(), {}});
    out.push_back({mkConst(sig().logical(LogOp::AndH)), {tyH(), tyH()}});
    out.push_back({mkConst(sig().logical(LogOp::OrH)), {tyH(), tyH()}});
  }
}

inline int termSize(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::App: return termSize(t->c0) + termSize(t->c1);
    case TermKind::Abs: return 1 + termSize(t->c0);
    default: return 1;
  }
}

}  // namespace detail_enum

class PositiveEnumerator {
 public:
  // contextSyms may mix variables and constants in scope; variables become
  // witness candidates directly, constants extend the constructor set.
  PositiveEnumerator(int maxLevel, int sizeBound, const std::set<Sym>& contextSyms = {})
      : maxLevel_(maxLevel), sizeBound_(sizeBound) {
    for (Sym s : contextSyms) {
      if (isLogical(s)) continue;
      if (symdata(s).kind == SymKind::FreeVar)
        contextVars_.insert(s);
      else
        contextConsts_.push_back(s);
    }
    std::sort(contextConsts_.begin(), contextConsts_.end());
    contextConsts_.erase(std::unique(contextConsts_.begin(), contextConsts_.end()), contextConsts_.end());
  }

  EnumResult enumerate(const TypePtr& target) const {
    EnumResult r;
    if (target->isArrow()) {
      // only symbols of exactly that (sub)type; lambdas are out of scope
      for (Sym s : sig().userConsts(maxLevel_))
        if (subtype(symdata(s).type, target)) r.terms.push_back(mkConst(s));
      addVars(target, r.terms);
      r.truncated = true;
      return r;
    }
    std::vector<detail_enum::Ctor> cs;
    detail_enum::ctorsFor(target, maxLevel_, contextConsts_, cs);
    for (int size = 1; size <= sizeBound_; size++) gen(target, cs, size, r.terms);
    addVars(target, r.terms);
    dedupe(r.terms);
    r.truncated = !complete(target, cs);
    return r;
  }

 private:
  void addVars(const TypePtr& target, std::vector<TermPtr>& out) const {
    for (Sym v : contextVars_) {
      const SymbolData& d = symdata(v);
      if (d.kind == SymKind::FreeVar && d.level <= maxLevel_ && subtype(d.type, target))
        out.push_back(mkVar(v));
    }
    out.push_back(mkVar(sig().enumVar(maxLevel_, target)));
  }

  static void dedupe(std::vector<TermPtr>& ts) {
    std::vector<TermPtr> out;
    for (const auto& t : ts) {
      bool seen = false;
      for (const auto& u : out)
        if (termEq(t, u)) { seen = true; break; }
      if (!seen) out.push_back(t);
    }
    ts.swap(out);
  }

  void gen(const TypePtr&, const std::vector<detail_enum::Ctor>& cs, int size,
           std::vector<TermPtr>& out) const {
    for (const auto& c : cs) {
      if (c.args.empty()) {
        if (size == 1) out.push_back(c.head);
        continue;
      }
      std::vector<TermPtr> argv;
      genArgs(c, 0, size - 1, argv, out);
    }
  }

  void genArgs(const detail_enum::Ctor& c, size_t i, int budget, std::vector<TermPtr>& acc,
               std::vector<TermPtr>& out) const {
    if (i == c.args.size()) {
      if (budget == 0) {
        TermPtr t = c.head;
        for (const auto& a : acc) t = nfApp(t, a);
        out.push_back(t);
      }
      return;
    }
    int remainingMin = (int)(c.args.size() - i - 1);
    std::vector<detail_enum::Ctor> cs;
    detail_enum::ctorsFor(c.args[i], maxLevel_, contextConsts_, cs);
    for (int sz = 1; sz <= budget - remainingMin; sz++) {
      std::vector<TermPtr> sub;
      gen(c.args[i], cs, sz, sub);
      if (sz == 1) {
        for (Sym v : contextVars_) {
          const SymbolData& d = symdata(v);
          if (d.kind == SymKind::FreeVar && d.level <= maxLevel_ && subtype(d.type, c.args[i]))
            sub.push_back(mkVar(v));
        }
        sub.push_back(mkVar(sig().enumVar(maxLevel_, c.args[i])));
      }
      for (const auto& t : sub) {
        acc.push_back(t);
        genArgs(c, i + 1, budget - sz, acc, out);
        acc.pop_back();
      }
    }
  }

  // Exactness analysis: the ground fragment is finite iff the constructor
  // reachability graph from the target is acyclic; with a finite fragment the
  // bound suffices when it reaches the maximal term size.
  bool complete(const TypePtr& target, const std::vector<detail_enum::Ctor>&) const {
    if (!target->isArrow() && baseSubtype("h", target->base)) return false;
    int maxSize = 0;
    std::set<std::string> onPath;
    if (!maxTermSize(target, onPath, maxSize)) return false;
    return maxSize <= sizeBound_;
  }

  bool maxTermSize(const TypePtr& target, std::set<std::string>& onPath, int& out) const {
    if (target->isArrow()) return false;
    if (baseSubtype("h", target->base)) return false;
    if (!onPath.insert(target->base).second) return false;  // cycle
    std::vector<detail_enum::Ctor> cs;
    detail_enum::ctorsFor(target, maxLevel_, contextConsts_, cs);
    int best = 1;  // the enumeration variable
    for (const auto& c : cs) {
      int total = 1;
      bool ok = true;
      for (const auto& a : c.args) {
        int sub = 0;
        if (!maxTermSize(a, onPath, sub)) { ok = false; break; }
        total += sub;
      }
      if (!ok) { onPath.erase(target->base); return false; }
      best = std::max(best, total);
    }
    onPath.erase(target->base);
    out = best;
    return true;
  }

  int maxLevel_;
  int sizeBound_;
  std::set<Sym> contextVars_;
  std::vector<Sym> contextConsts_;
};

}  // namespace uctt
