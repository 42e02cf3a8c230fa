#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "clause.hpp"

namespace uctt {

// Level-disciplined unification over normal terms, complete for the
// higher-order pattern fragment, with first-order subproblems handled by
// ordinary MGU decomposition. A flex atom F u1..um is treated as a pattern
// when the ui are pairwise distinct atoms, each either a locally bound
// variable or a parameter constant. Parameters of level strictly above
// level(F) must be abstracted (the level discipline forces it); parameters
// at or below level(F) give a finite imitation/projection choice per
// occurrence, enumerated up to a cap. Anything else is reported as a
// non-pattern problem rather than guessed at.
struct UnifyProblem {
  std::vector<std::pair<TermPtr, TermPtr>> pairs;
};

struct UnifyResult {
  std::vector<Subst> unifiers;
  bool nonPattern = false;
  bool levelViolation = false;
  bool occursHit = false;

  void raiseIfEmpty() const {
    if (!unifiers.empty()) return;
    if (levelViolation) throw LevelViolation("unification blocked by the level discipline");
    if (occursHit) throw OccursCheck("occurs check");
    if (nonPattern) throw NonPatternProblem("problem outside the pattern fragment");
    throw NoUnifier("no unifier");
  }
};

namespace detail_unify {

constexpr int kChoiceCap = 64;
constexpr int kMaxSolutions = 128;

struct AtomArg {
  // A pattern argument: a loose bound index (outer scope) or a parameter
  // symbol (constant, or frozen variable acting as one).
  bool isBound = false;
  int outerIdx = 0;
  Sym sym = 0;
  int level = 0;
  TypePtr ty;
};

struct Ctx {
  const std::set<Sym>* flexibles = nullptr;  // null = all free vars flexible
  UnifyResult* out = nullptr;

  bool isFlexible(Sym v) const {
    return symdata(v).kind == SymKind::FreeVar && (!flexibles || flexibles->count(v));
  }
};

inline bool sameAtomHead(const TermPtr& a, const AtomArg& g, int depth) {
  if (g.isBound)
    return a->kind == TermKind::Bound && a->idx >= depth && a->idx - depth == g.outerIdx;
  return (a->kind == TermKind::Const || a->kind == TermKind::Var) && a->sym == g.sym;
}

// Enumerate the bodies obtained by abstracting pattern-argument occurrences
// under m new binders. Occurrences of strict parameters (level above the
// flex variable) and of bound arguments must be abstracted; occurrences of
// low-level parameters give an imitation/projection choice per occurrence.
// The alternative count is capped; overflow is reported as non-pattern.
inline void enumBodies(const TermPtr& u, const std::vector<AtomArg>& args, int flexLevel, int depth,
                       std::vector<TermPtr>& out, bool& levelBad, bool& overflow) {
  int m = (int)args.size();
  for (int i = 0; i < m; i++) {
    if (!sameAtomHead(u, args[i], depth)) continue;
    TermPtr proj = mkBound(depth + (m - 1 - i), args[i].ty);
    bool mustAbstract = args[i].isBound || args[i].level > flexLevel;
    out.push_back(proj);
    if (!mustAbstract) out.push_back(u);  // a pattern argument is an atom
    return;
  }
  switch (u->kind) {
    case TermKind::Bound:
      if (u->idx >= depth) return;  // uncaptured loose index: no alternative
      out.push_back(u);
      return;
    case TermKind::Const:
    case TermKind::Var:
      if (symdata(u->sym).level > flexLevel) { levelBad = true; return; }
      out.push_back(u);
      return;
    case TermKind::App: {
      std::vector<TermPtr> fs, as;
      enumBodies(u->c0, args, flexLevel, depth, fs, levelBad, overflow);
      enumBodies(u->c1, args, flexLevel, depth, as, levelBad, overflow);
      for (const auto& f : fs)
        for (const auto& a : as) {
          if ((int)out.size() >= kChoiceCap) { overflow = true; return; }
          out.push_back(mkApp(f, a));
        }
      return;
    }
    case TermKind::Abs: {
      std::vector<TermPtr> bs;
      enumBodies(u->c0, args, flexLevel, depth + 1, bs, levelBad, overflow);
      for (const auto& b : bs) {
        if ((int)out.size() >= kChoiceCap) { overflow = true; return; }
        out.push_back(mkAbs(u->bty, b));
      }
      return;
    }
  }
}

class Engine {
 public:
  Engine(Ctx c) : ctx_(c) {}

  void run(std::vector<std::pair<TermPtr, TermPtr>> pairs) {
    solve(std::move(pairs), Subst{});
  }

 private:
  Ctx ctx_;

  void emit(const Subst& s) {
    if ((int)ctx_.out->unifiers.size() >= kMaxSolutions) return;
    std::string why;
    if (!s.isLegal(&why)) return;
    for (const auto& known : ctx_.out->unifiers)
      if (known == s) return;
    ctx_.out->unifiers.push_back(s);
  }

  bool flexHead(const TermPtr& t) const {
    Spine s = spineOf(t);
    return s.head->kind == TermKind::Var && ctx_.isFlexible(s.head->sym);
  }

  void solve(std::vector<std::pair<TermPtr, TermPtr>> pairs, Subst sigma) {
    if ((int)ctx_.out->unifiers.size() >= kMaxSolutions) return;
    while (!pairs.empty()) {
      auto [t, u] = pairs.front();
      pairs.erase(pairs.begin());
      t = normalizeOpen(applySubstOpen(sigma, t));
      u = normalizeOpen(applySubstOpen(sigma, u));
      if (termEq(t, u)) continue;

      // eta: align abstractions
      if (t->kind == TermKind::Abs || u->kind == TermKind::Abs) {
        if (t->kind != TermKind::Abs) t = etaExpand(t);
        if (u->kind != TermKind::Abs) u = etaExpand(u);
        if (!typeEqual(t->bty, u->bty)) return;  // fail
        pairs.insert(pairs.begin(), {t->c0, u->c0});
        continue;
      }

      bool tf = flexHead(t), uf = flexHead(u);
      if (!tf && !uf) {
        Spine a = spineOf(t), b = spineOf(u);
        bool sameHead =
            (a.head->kind == b.head->kind) &&
            ((a.head->kind == TermKind::Bound && a.head->idx == b.head->idx) ||
             ((a.head->kind == TermKind::Const || a.head->kind == TermKind::Var) && a.head->sym == b.head->sym));
        if (!sameHead || a.args.size() != b.args.size()) return;  // clash
        for (size_t i = 0; i < a.args.size(); i++) pairs.push_back({a.args[i], b.args[i]});
        continue;
      }

      if (tf && uf) {
        Spine a = spineOf(t), b = spineOf(u);
        if (a.head->sym == b.head->sym) {
          // identical heads; identical spines were handled by termEq above
          ctx_.out->nonPattern = true;
          return;
        }
        if (a.args.empty() && b.args.empty()) {
          Sym x = a.head->sym, y = b.head->sym;
          // bind a variable that can legally hold the other; prefer binding
          // the younger (fresher) one to keep answers general
          bool xy = symLevel(y) <= symLevel(x) && subtype(symdata(y).type, symdata(x).type);
          bool yx = symLevel(x) <= symLevel(y) && subtype(symdata(x).type, symdata(y).type);
          Subst bind;
          if (xy && yx)
            bind = x > y ? Subst::single(x, mkVar(y)) : Subst::single(y, mkVar(x));
          else if (xy)
            bind = Subst::single(x, mkVar(y));
          else if (yx)
            bind = Subst::single(y, mkVar(x));
          else {
            ctx_.out->levelViolation = true;
            return;
          }
          solve(std::move(pairs), compose(sigma, bind));
          return;
        }
        // flex-flex with arguments: out of the supported fragment
        ctx_.out->nonPattern = true;
        return;
      }

      // flex-rigid
      if (!tf) std::swap(t, u);
      flexRigid(t, u, pairs, sigma);
      return;
    }
    emit(sigma);
  }

  static TermPtr etaExpand(const TermPtr& t) {
    TypePtr dom = t->type->dom;
    return mkAbs(dom, normalizeOpen(mkApp(shift(t, 1), mkBound(0, dom))));
  }

  void flexRigid(const TermPtr& t, const TermPtr& u, std::vector<std::pair<TermPtr, TermPtr>>& rest,
                 const Subst& sigma) {
    Spine a = spineOf(t);
    Sym F = a.head->sym;
    int flexLevel = symLevel(F);

    if (freeVars(u).count(F)) { ctx_.out->occursHit = true; return; }

    // collect pattern arguments
    std::vector<AtomArg> args;
    for (size_t i = 0; i < a.args.size(); i++) {
      const TermPtr& ai = a.args[i];
      AtomArg g;
      g.ty = ai->type;
      if (ai->kind == TermKind::Bound) {
        g.isBound = true;
        g.outerIdx = ai->idx;
      } else if (ai->kind == TermKind::Const ||
                 (ai->kind == TermKind::Var && !ctx_.isFlexible(ai->sym))) {
        g.sym = ai->sym;
        g.level = symLevel(ai->sym);
      } else {
        ctx_.out->nonPattern = true;
        return;
      }
      for (const auto& prev : args) {
        bool same = prev.isBound == g.isBound &&
                    (g.isBound ? prev.outerIdx == g.outerIdx : prev.sym == g.sym);
        if (same) { ctx_.out->nonPattern = true; return; }
      }
      args.push_back(g);
    }

    // binder types for the solution lambda, from the flex head's type
    std::vector<TypePtr> btys;
    {
      TypePtr ft = symdata(F).type;
      for (size_t i = 0; i < args.size(); i++) {
        btys.push_back(ft->dom);
        ft = ft->cod;
      }
    }

    bool levelBad = false, overflow = false;
    std::vector<TermPtr> bodies;
    enumBodies(u, args, flexLevel, 0, bodies, levelBad, overflow);
    if (overflow) ctx_.out->nonPattern = true;
    bool anyLevelBad = levelBad;
    for (const auto& body : bodies) {
      TermPtr sol = body;
      for (int i = (int)args.size() - 1; i >= 0; i--) sol = mkAbs(btys[i], sol);
      sol = normalizeOpen(sol);
      if (sol->loose != 0) continue;
      if (!isPositive(sol)) continue;
      Subst bind = Subst::single(F, sol);
      std::string why;
      if (!bind.isLegal(&why)) { anyLevelBad = true; continue; }
      solve(rest, compose(sigma, bind));
    }
    if (anyLevelBad && ctx_.out->unifiers.empty()) ctx_.out->levelViolation = true;
  }
};

}  // namespace detail_unify

// All free variables flexible.
inline UnifyResult unify(const UnifyProblem& p) {
  UnifyResult r;
  detail_unify::Ctx c;
  c.out = &r;
  detail_unify::Engine(c).run(p.pairs);
  return r;
}

inline UnifyResult unify(const TermPtr& t, const TermPtr& u) {
  return unify(UnifyProblem{{{t, u}}});
}

// Match mode: only `flexibles` may be bound; everything else is frozen.
inline UnifyResult matchTerms(const std::vector<std::pair<TermPtr, TermPtr>>& pairs,
                              const std::set<Sym>& flexibles) {
  UnifyResult r;
  detail_unify::Ctx c;
  c.flexibles = &flexibles;
  c.out = &r;
  detail_unify::Engine(c).run(pairs);
  return r;
}

// The true-rule substitution {\u1..um. top / X} for a flex atom.
inline Subst solveFlexTop(const TermPtr& atom) {
  Spine s = spineOf(atom);
  if (s.head->kind != TermKind::Var || !isFlexAtom(atom)) throw NotFlex(dump(atom));
  TypePtr ft = symdata(s.head->sym).type;
  std::vector<TypePtr> doms;
  while (ft->isArrow()) { doms.push_back(ft->dom); ft = ft->cod; }
  TermPtr body = ft->base == "h" ? topH() : topG();
  for (int i = (int)doms.size() - 1; i >= 0; i--) body = mkAbs(doms[i], body);
  return Subst::single(s.head->sym, body);
}

// --- program extensions [j;P] -------------------------------------------------

// Decides membership of (head <- body) in [j;P] by matching against elab(P)
// with a legal positive instantiation of the clause binders.
inline bool extensionMember(int j, const Program& p, const TermPtr& head, const TermPtr& body) {
  if (p.level() > j) return false;
  Spine hs = spineOf(head);
  if (hs.head->kind != TermKind::Const) return false;
  for (const auto& c : p.clauses()) {
    if (c.headSym != hs.head->sym) continue;
    std::vector<TermPtr> ws;
    std::set<Sym> flex;
    for (const auto& ty : c.binderTys) {
      Sym w = sig().freshVar(j, ty);
      ws.push_back(mkVar(w));
      flex.insert(w);
    }
    auto [ch, cb] = instantiateClause(c, ws);
    UnifyResult m = matchTerms({{ch, head}, {cb, body}}, flex);
    for (const auto& gamma : m.unifiers) {
      // leftover binders are unconstrained; any positive witness works, and
      // the designated enumeration variable is one
      Subst full = gamma;
      for (size_t i = 0; i < ws.size(); i++) {
        Sym w = ws[i]->sym;
        if (!full.hasBinding(w)) full.bind(w, mkVar(sig().enumVar(j, c.binderTys[i])));
      }
      if (full.level() > j) continue;
      if (termEq(applySubst(full, ch), head) && termEq(applySubst(full, cb), body)) return true;
    }
  }
  return false;
}

// Exhaustive (up to the size bound) enumeration of [j;P].
struct ExtensionItem {
  TermPtr head, body;
  const Clause* clause;
  std::vector<TermPtr> witnesses;
};

struct ExtensionEnum {
  std::vector<ExtensionItem> items;
  bool truncated = false;
};

inline ExtensionEnum extensionEnumerate(int j, const Program& p, int sizeBound,
                                        const std::set<Sym>& contextVars = {}) {
  ExtensionEnum out;
  PositiveEnumerator en(j, sizeBound, contextVars);
  for (const auto& c : p.clauses()) {
    std::vector<std::vector<TermPtr>> choices;
    for (const auto& ty : c.binderTys) {
      EnumResult r = en.enumerate(ty);
      out.truncated |= r.truncated;
      choices.push_back(std::move(r.terms));
    }
    std::vector<TermPtr> pick(c.binderTys.size());
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == choices.size()) {
        auto [h, b] = instantiateClause(c, pick);
        out.items.push_back({h, b, &c, pick});
        return;
      }
      for (const auto& t : choices[i]) {
        pick[i] = t;
        rec(i + 1);
      }
    };
    rec(0);
  }
  return out;
}

}  // namespace uctt
