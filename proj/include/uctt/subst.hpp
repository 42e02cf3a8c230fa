#pragma once

#include <map>
#include <set>
#include <string>

#include "term.hpp"

namespace uctt {

// Finite-support map from free variables to terms. Bindings are stored
// normalized; identity bindings are dropped.
class Subst {
 public:
  Subst() = default;

  static Subst single(Sym x, TermPtr t) {
    Subst s;
    s.bind(x, std::move(t));
    return s;
  }

  void bind(Sym x, TermPtr t) {
    if (symdata(x).kind != SymKind::FreeVar) throw IllegalSubstitution("domain must be free variables");
    t = normalize(t);
    if (t->kind == TermKind::Var && t->sym == x) { m_.erase(x); return; }
    m_[x] = std::move(t);
  }

  bool isId() const { return m_.empty(); }
  size_t size() const { return m_.size(); }
  const std::map<Sym, TermPtr>& bindings() const { return m_; }

  bool hasBinding(Sym x) const { return m_.count(x) != 0; }

  TermPtr lookup(Sym x) const {
    auto it = m_.find(x);
    if (it != m_.end()) return it->second;
    return mkVar(x);
  }

  std::set<Sym> domain() const {
    std::set<Sym> d;
    for (const auto& [x, t] : m_) d.insert(x);
    return d;
  }

  std::set<Sym> rangeFreeVars() const {
    std::set<Sym> r;
    for (const auto& [x, t] : m_) collectFreeVars(t, r);
    return r;
  }

  int level() const {
    int l = 0;
    for (const auto& [x, t] : m_) l = std::max(l, t->level);
    return l;
  }

  // safe <=> idempotent: domain disjoint from range free variables.
  bool isSafe() const {
    std::set<Sym> r = rangeFreeVars();
    for (const auto& [x, t] : m_)
      if (r.count(x)) return false;
    return true;
  }

  // legal: type-preserving (up to inclusion), positive range, level-preserving.
  // The flex-top binding X |-> \u...u. top is the one sanctioned exception to
  // strict type preservation (the true rule instantiates a predicate variable
  // at top, whose type is g rather than a).
  bool isLegal(std::string* why = nullptr) const {
    for (const auto& [x, t] : m_) {
      const SymbolData& d = symdata(x);
      if (t->level > d.level) {
        if (why) *why = "LevelViolation: level " + std::to_string(t->level) + " term for level " +
                        std::to_string(d.level) + " variable " + d.name;
        return false;
      }
      if (!isPositive(t)) {
        if (why) *why = "non-positive term bound to " + d.name;
        return false;
      }
      if (!subtype(t->type, d.type) && !isFlexTopBinding(d.type, t)) {
        if (why) *why = "type " + typeName(t->type) + " not included in " + typeName(d.type);
        return false;
      }
    }
    return true;
  }

  static bool isFlexTopBinding(const TypePtr& varTy, const TermPtr& t) {
    // \u1...um. top against a variable of type a1->...->am->{a,r,o,h,g}.
    TermPtr body = t;
    TypePtr vt = varTy;
    while (body->kind == TermKind::Abs && vt->isArrow() && typeEqual(body->bty, vt->dom)) {
      body = body->c0;
      vt = vt->cod;
    }
    return isTop(body) && isFormulaBase(vt);
  }

  bool isRenaming() const {
    std::set<Sym> range;
    for (const auto& [x, t] : m_) {
      if (t->kind != TermKind::Var) return false;
      if (!range.insert(t->sym).second) return false;
    }
    return true;
  }

  bool isNeutralRenaming() const {
    if (!isRenaming()) return false;
    for (const auto& [x, t] : m_)
      if (symdata(x).level != t->level || !typeEqual(symdata(x).type, t->type)) return false;
    return true;
  }

  Subst inverse() const {
    if (!isRenaming()) throw NotARenaming("inverse of a non-renaming");
    Subst inv;
    for (const auto& [x, t] : m_) inv.bind(t->sym, mkVar(x));
    return inv;
  }

  Subst restrict(const std::set<Sym>& vars) const {
    Subst r;
    for (const auto& [x, t] : m_)
      if (vars.count(x)) r.m_[x] = t;
    return r;
  }

  bool operator==(const Subst& o) const {
    if (m_.size() != o.m_.size()) return false;
    for (const auto& [x, t] : m_) {
      auto it = o.m_.find(x);
      if (it == o.m_.end() || !termEq(t, it->second)) return false;
    }
    return true;
  }

 private:
  std::map<Sym, TermPtr> m_;
};

// Simultaneous capture-free application followed by normalization.
inline TermPtr applySubstOpen(const Subst& th, const TermPtr& t) {
  if (th.isId()) return t;
  struct Walk {
    const Subst& th;
    TermPtr go(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::Var: {
          if (th.hasBinding(t->sym)) return th.lookup(t->sym);
          return t;
        }
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
  } w{th};
  return normalizeOpen(w.go(t));
}

inline TermPtr applySubst(const Subst& th, const TermPtr& t) {
  TermPtr r = applySubstOpen(th, t);
  if (r->loose != 0) throw UnboundIndex("substitution produced loose indices");
  return r;
}

// Diagrammatic composition: x |-> th2(th1(x)).
inline Subst compose(const Subst& th1, const Subst& th2) {
  Subst r;
  for (const auto& [x, t] : th1.bindings()) r.bind(x, applySubstOpen(th2, t));
  for (const auto& [x, t] : th2.bindings())
    if (!th1.hasBinding(x)) r.bind(x, t);
  return r;
}

// Lemma formula rho^-1 . theta . rho = { t_i rho / x_i rho }.
inline Subst renameSubst(const Subst& rho, const Subst& th) {
  if (!rho.isNeutralRenaming()) throw NotARenaming("renameSubst needs a neutral renaming");
  Subst r;
  for (const auto& [x, t] : th.bindings()) {
    TermPtr xr = rho.lookup(x);
    r.bind(xr->sym, applySubstOpen(rho, t));
  }
  return r;
}

// Type-preserving map on constants with finite domain.
class ConstReplacer {
 public:
  ConstReplacer() = default;

  void map(Sym from, Sym to) {
    const SymbolData& f = symdata(from);
    const SymbolData& t = symdata(to);
    if (f.kind != SymKind::Const || t.kind != SymKind::Const)
      throw IllegalSubstitution("constant replacer domain/range must be constants");
    if (!typeEqual(f.type, t.type)) throw TypeMismatch("constant replacer must preserve type");
    if (from == to) { m_.erase(from); return; }
    m_[from] = to;
  }

  bool isId() const { return m_.empty(); }
  const std::map<Sym, Sym>& pairs() const { return m_; }

  Sym apply(Sym c) const {
    auto it = m_.find(c);
    return it == m_.end() ? c : it->second;
  }

  bool isNeutral() const {
    for (const auto& [f, t] : m_)
      if (symLevel(f) != symLevel(t)) return false;
    return true;
  }

  bool isRenamer() const {
    std::set<Sym> range;
    for (const auto& [f, t] : m_)
      if (!range.insert(t).second) return false;
    return true;
  }

  std::set<Sym> occurring() const {
    std::set<Sym> s;
    for (const auto& [f, t] : m_) { s.insert(f); s.insert(t); }
    return s;
  }

 private:
  std::map<Sym, Sym> m_;
};

inline TermPtr applyReplacer(const ConstReplacer& xi, const TermPtr& t) {
  if (xi.isId()) return t;
  struct Walk {
    const ConstReplacer& xi;
    TermPtr go(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::Const: {
          Sym s = xi.apply(t->sym);
          return s == t->sym ? t : mkConst(s);
        }
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
  } w{xi};
  return normalizeOpen(w.go(t));
}

// xi applied to a substitution: { t_i xi / x_i }.
inline Subst applyReplacer(const ConstReplacer& xi, const Subst& th) {
  Subst r;
  for (const auto& [x, t] : th.bindings()) r.bind(x, applyReplacer(xi, t));
  return r;
}

}  // namespace uctt
