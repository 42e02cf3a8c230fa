#pragma once

#include <algorithm>
#include <memory>
#include <set>
#include <vector>

#include "symbols.hpp"

namespace uctt {

// Typed lambda terms. Bound variables are de Bruijn indices, free (logic)
// variables and constants are session symbols, so substitution can never
// capture. Stored terms are beta-normal and eta-contracted unless built
// through the raw constructors; normalize() produces the canonical form.
enum class TermKind : uint8_t { Const, Var, Bound, App, Abs };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  Sym sym = 0;            // Const / Var
  int idx = 0;            // Bound
  TypePtr bty;            // Abs binder type, Bound variable type
  TermPtr c0, c1;         // App: fun/arg; Abs: body in c0

  TypePtr type;           // cached; may be an up-cast view (see coerce)
  int level = 0;          // max symbol label occurring in the term
  int loose = 0;          // number of loose bound indices (0 = locally closed)
  size_t hash = 0;
  bool normal = false;
};

namespace detail {

inline size_t mix(size_t a, size_t b) { return a * 1000003u ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)); }

inline TermPtr make(Term&& t) { return std::make_shared<const Term>(std::move(t)); }

}  // namespace detail

inline TermPtr mkConst(Sym s) {
  const SymbolData& d = symdata(s);
  Term t;
  t.kind = TermKind::Const;
  t.sym = s;
  t.type = d.type;
  t.level = d.level;
  t.hash = detail::mix(1, s);
  t.normal = true;
  return detail::make(std::move(t));
}

inline TermPtr mkVar(Sym s) {
  const SymbolData& d = symdata(s);
  Term t;
  t.kind = TermKind::Var;
  t.sym = s;
  t.type = d.type;
  t.level = d.level;
  t.hash = detail::mix(2, s);
  t.normal = true;
  return detail::make(std::move(t));
}

inline TermPtr mkBound(int idx, TypePtr ty) {
  Term t;
  t.kind = TermKind::Bound;
  t.idx = idx;
  t.bty = ty;
  t.type = std::move(ty);
  t.loose = idx + 1;
  t.hash = detail::mix(3, (size_t)idx);
  t.normal = true;
  return detail::make(std::move(t));
}

// Raw application; checks typing (argument coercible to the domain) but does
// not reduce. Use normalize() or nfApp() to restore the canonical form.
inline TermPtr mkApp(TermPtr f, TermPtr a) {
  if (!f->type->isArrow()) throw TypeMismatch("application of a non-function");
  if (!subtype(a->type, f->type->dom))
    throw TypeMismatch("argument type " + typeName(a->type) + " not included in " + typeName(f->type->dom));
  Term t;
  t.kind = TermKind::App;
  t.type = f->type->cod;
  t.level = std::max(f->level, a->level);
  t.loose = std::max(f->loose, a->loose);
  t.hash = detail::mix(4, detail::mix(f->hash, a->hash));
  t.normal = f->normal && a->normal && f->kind != TermKind::Abs;
  t.c0 = std::move(f);
  t.c1 = std::move(a);
  return detail::make(std::move(t));
}

inline bool etaRedex(const TermPtr& body);

inline TermPtr mkAbs(TypePtr bty, TermPtr body) {
  Term t;
  t.kind = TermKind::Abs;
  t.type = arrow(bty, body->type);
  t.level = body->level;
  t.loose = std::max(0, body->loose - 1);
  t.hash = detail::mix(5, detail::mix(typeHash(bty), body->hash));
  t.normal = body->normal && !etaRedex(body);
  t.bty = std::move(bty);
  t.c0 = std::move(body);
  return detail::make(std::move(t));
}

// Structural equality; ignores the cached (possibly coerced) type of the
// root, so a term and its up-cast compare equal.
inline bool termEq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->hash != b->hash) return false;
  switch (a->kind) {
    case TermKind::Const:
    case TermKind::Var: return a->sym == b->sym;
    case TermKind::Bound: return a->idx == b->idx;
    case TermKind::App: return termEq(a->c0, b->c0) && termEq(a->c1, b->c1);
    case TermKind::Abs: return typeEqual(a->bty, b->bty) && termEq(a->c0, b->c0);
  }
  return false;
}

// Total order used for canonical keys (program multisets, memo tables).
inline int termCmp(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return (int)a->kind < (int)b->kind ? -1 : 1;
  switch (a->kind) {
    case TermKind::Const:
    case TermKind::Var: return a->sym < b->sym ? -1 : a->sym > b->sym ? 1 : 0;
    case TermKind::Bound: return a->idx < b->idx ? -1 : a->idx > b->idx ? 1 : 0;
    case TermKind::App: {
      int c = termCmp(a->c0, b->c0);
      return c ? c : termCmp(a->c1, b->c1);
    }
    case TermKind::Abs: {
      std::string x = typeName(a->bty), y = typeName(b->bty);
      if (x != y) return x < y ? -1 : 1;
      return termCmp(a->c0, b->c0);
    }
  }
  return 0;
}

// --- de Bruijn machinery -------------------------------------------------

// Shift loose indices >= cutoff by d.
inline TermPtr shift(const TermPtr& t, int d, int cutoff = 0) {
  if (t->loose <= cutoff || d == 0) return t;
  switch (t->kind) {
    case TermKind::Bound:
      if (t->idx >= cutoff) {
        if (t->idx + d < 0) throw UnboundIndex("negative index after shift");
        return mkBound(t->idx + d, t->bty);
      }
      return t;
    case TermKind::App: return mkApp(shift(t->c0, d, cutoff), shift(t->c1, d, cutoff));
    case TermKind::Abs: return mkAbs(t->bty, shift(t->c0, d, cutoff + 1));
    default: return t;
  }
}

// Replace loose index j by s (which is shifted on the way down).
inline TermPtr substIndex(const TermPtr& t, int j, const TermPtr& s) {
  if (t->loose <= j) return t;
  switch (t->kind) {
    case TermKind::Bound:
      if (t->idx == j) return shift(s, j);
      if (t->idx > j) return mkBound(t->idx - 1, t->bty);
      return t;
    case TermKind::App: return mkApp(substIndex(t->c0, j, s), substIndex(t->c1, j, s));
    case TermKind::Abs: return mkAbs(t->bty, substIndex(t->c0, j + 1, s));
    default: return t;
  }
}

inline bool usesIndex(const TermPtr& t, int j) {
  if (t->loose <= j) return false;
  switch (t->kind) {
    case TermKind::Bound: return t->idx == j;
    case TermKind::App: return usesIndex(t->c0, j) || usesIndex(t->c1, j);
    case TermKind::Abs: return usesIndex(t->c0, j + 1);
    default: return false;
  }
}

inline bool etaRedex(const TermPtr& body) {
  return body->kind == TermKind::App && body->c1->kind == TermKind::Bound &&
         body->c1->idx == 0 && !usesIndex(body->c0, 0);
}

// Full beta-eta normalization. Terminates on simply typed terms.
inline TermPtr normalizeOpen(const TermPtr& t) {
  if (t->normal) return t;
  switch (t->kind) {
    case TermKind::App: {
      TermPtr f = normalizeOpen(t->c0);
      TermPtr a = normalizeOpen(t->c1);
      if (f->kind == TermKind::Abs) return normalizeOpen(substIndex(f->c0, 0, a));
      return mkApp(f, a);
    }
    case TermKind::Abs: {
      TermPtr b = normalizeOpen(t->c0);
      if (etaRedex(b)) return shift(b->c0, -1);
      return mkAbs(t->bty, b);
    }
    default: return t;
  }
}

// Public normalization: rejects terms with loose indices.
inline TermPtr normalize(const TermPtr& t) {
  if (t->loose != 0) throw UnboundIndex("term has loose de Bruijn indices");
  return normalizeOpen(t);
}

// Normalizing application helpers.
inline TermPtr nfApp(const TermPtr& f, const TermPtr& a) { return normalizeOpen(mkApp(f, a)); }
inline TermPtr nfApp2(const TermPtr& f, const TermPtr& a, const TermPtr& b) { return nfApp(nfApp(f, a), b); }

// --- symbol scans ---------------------------------------------------------

template <typename F>
inline void scanSyms(const TermPtr& t, F&& f) {
  switch (t->kind) {
    case TermKind::Const:
    case TermKind::Var: f(t->sym, t->kind); break;
    case TermKind::App: scanSyms(t->c0, f); scanSyms(t->c1, f); break;
    case TermKind::Abs: scanSyms(t->c0, f); break;
    default: break;
  }
}

inline void collectFreeVars(const TermPtr& t, std::set<Sym>& out) {
  scanSyms(t, [&](Sym s, TermKind k) { if (k == TermKind::Var) out.insert(s); });
}

inline std::set<Sym> freeVars(const TermPtr& t) {
  std::set<Sym> s;
  collectFreeVars(t, s);
  return s;
}

inline void collectConsts(const TermPtr& t, std::set<Sym>& out) {
  scanSyms(t, [&](Sym s, TermKind k) { if (k == TermKind::Const) out.insert(s); });
}

inline bool occursSym(const TermPtr& t, Sym s) {
  bool found = false;
  scanSyms(t, [&](Sym x, TermKind) { found |= (x == s); });
  return found;
}

// --- spine view -----------------------------------------------------------

struct Spine {
  TermPtr head;
  std::vector<TermPtr> args;
};

inline Spine spineOf(TermPtr t) {
  Spine s;
  while (t->kind == TermKind::App) {
    s.args.push_back(t->c1);
    t = t->c0;
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = t;
  return s;
}

inline TermPtr applySpine(TermPtr head, const std::vector<TermPtr>& args) {
  for (const auto& a : args) head = mkApp(std::move(head), a);
  return head;
}

inline LogOp headLog(const TermPtr& t) {
  Spine s = spineOf(t);
  if (s.head->kind == TermKind::Const) return symLog(s.head->sym);
  return LogOp::None;
}

// Quantifier view: for Sigma/Pi applied to f of type alpha->beta, the body
// with the binder opened as index 0. Stored terms are eta-contracted, so f
// need not be a literal lambda.
inline TermPtr quantBodyOpen(const TermPtr& f) {
  if (f->kind == TermKind::Abs) return f->c0;
  TermPtr shifted = shift(f, 1);
  return normalizeOpen(mkApp(shifted, mkBound(0, f->type->dom)));
}

// Instantiate a quantifier argument f at witness w.
inline TermPtr quantInstantiate(const TermPtr& f, const TermPtr& w) {
  if (f->kind == TermKind::Abs) return normalizeOpen(substIndex(f->c0, 0, w));
  return normalizeOpen(mkApp(f, w));
}

// --- logical construction convenience --------------------------------------

inline TermPtr topG() { return mkConst(sig().logical(LogOp::TopG)); }
inline TermPtr topH() { return mkConst(sig().logical(LogOp::TopH)); }

inline TermPtr mkBin(LogOp op, const TermPtr& l, const TermPtr& r) {
  return nfApp2(mkConst(sig().logical(op)), l, r);
}

inline TermPtr mkQuant(LogOp op, const TypePtr& alpha, const TermPtr& lam) {
  return normalizeOpen(mkApp(mkConst(sig().logical(op, alpha)), lam));
}

inline bool isTop(const TermPtr& t) {
  LogOp h = headLog(t);
  return (h == LogOp::TopG || h == LogOp::TopH) && t->kind == TermKind::Const;
}

// --- classification --------------------------------------------------------

struct ClassFlags {
  bool rigidAtom = false;
  bool flexAtom = false;
  bool goal = false;
  bool program = false;
  bool positive = false;
};

enum class FormulaClass { RigidAtom, FlexAtom, Goal, ProgramFormula, Positive, Other };

// Positive terms contain no implication and no Pi constant.
inline bool isPositive(const TermPtr& t) {
  bool bad = false;
  scanSyms(t, [&](Sym s, TermKind k) {
    if (k != TermKind::Const) return;
    LogOp op = symLog(s);
    if (op == LogOp::ImpG || op == LogOp::ImpP || op == LogOp::PiG || op == LogOp::PiP || op == LogOp::PiH)
      bad = true;
  });
  return !bad;
}

inline bool isAtomTerm(const TermPtr& t, bool* flex = nullptr) {
  if (!isFormulaBase(t->type)) return false;
  Spine s = spineOf(t);
  if (s.head->kind == TermKind::Const) {
    if (isLogical(s.head->sym)) return false;
    if (flex) *flex = false;
    return true;
  }
  if (s.head->kind == TermKind::Var) {
    if (flex) *flex = true;
    return true;
  }
  return false;
}

inline bool isRigidAtom(const TermPtr& t) {
  bool flex = false;
  return isAtomTerm(t, &flex) && !flex;
}

inline bool isFlexAtom(const TermPtr& t) {
  bool flex = false;
  return isAtomTerm(t, &flex) && flex;
}

inline bool isGoalFormula(const TermPtr& t);
inline TermPtr quantBodyOpenAsFormula(const TermPtr& f);

inline bool isProgramFormula(const TermPtr& t) {
  if (isRigidAtom(t)) return isPositive(t);
  Spine s = spineOf(t);
  if (s.head->kind != TermKind::Const) return false;
  switch (symLog(s.head->sym)) {
    case LogOp::ImpP:
      return s.args.size() == 2 && isGoalFormula(s.args[0]) && isRigidAtom(s.args[1]) && isPositive(s.args[1]);
    case LogOp::AndP:
      return s.args.size() == 2 && isProgramFormula(s.args[0]) && isProgramFormula(s.args[1]);
    case LogOp::PiP:
      return s.args.size() == 1 && isProgramFormula(quantBodyOpenAsFormula(s.args[0]));
    default: return false;
  }
}

// Opening a quantifier body leaves index 0 loose; the grammar predicates
// only inspect heads and recurse, so a placeholder constant is spliced in
// to keep terms locally closed during classification.
inline TermPtr quantBodyOpenAsFormula(const TermPtr& f) {
  TypePtr alpha = f->type->dom;
  static std::map<std::string, Sym> cache;
  static std::mutex mu;
  Sym hole;
  {
    std::lock_guard<std::mutex> g(mu);
    std::string k = typeName(alpha);
    auto it = cache.find(k);
    if (it == cache.end()) {
      hole = sig().freshConst(0, alpha);
      cache.emplace(k, hole);
    } else
      hole = it->second;
  }
  return quantInstantiate(f, mkConst(hole));
}

inline bool isGoalFormula(const TermPtr& t) {
  if (isTop(t)) return true;
  bool flex = false;
  if (isAtomTerm(t, &flex)) return isPositive(t);
  Spine s = spineOf(t);
  if (s.head->kind != TermKind::Const) return false;
  switch (symLog(s.head->sym)) {
    case LogOp::AndG:
    case LogOp::AndH:
      return s.args.size() == 2 && isGoalFormula(s.args[0]) && isGoalFormula(s.args[1]);
    case LogOp::OrG:
    case LogOp::OrH:
      return s.args.size() == 2 && isGoalFormula(s.args[0]) && isGoalFormula(s.args[1]);
    case LogOp::ImpG:
      return s.args.size() == 2 && isProgramFormula(s.args[0]) && isGoalFormula(s.args[1]);
    case LogOp::SigmaG:
    case LogOp::SigmaH:
    case LogOp::PiG:
      return s.args.size() == 1 && isGoalFormula(quantBodyOpenAsFormula(s.args[0]));
    default: return false;
  }
}

inline ClassFlags classifyFlags(const TermPtr& t) {
  ClassFlags f;
  bool flex = false;
  if (isAtomTerm(t, &flex)) {
    f.rigidAtom = !flex;
    f.flexAtom = flex;
  }
  f.positive = isPositive(t) && isFormulaBase(t->type);
  f.goal = isGoalFormula(t);
  f.program = isProgramFormula(t);
  return f;
}

inline FormulaClass classify(const TermPtr& t) {
  ClassFlags f = classifyFlags(t);
  if (f.rigidAtom) return FormulaClass::RigidAtom;
  if (f.flexAtom) return FormulaClass::FlexAtom;
  if (f.goal && !f.program) return FormulaClass::Goal;
  if (f.program) return FormulaClass::ProgramFormula;
  if (f.positive) return FormulaClass::Positive;
  return FormulaClass::Other;
}

// Rebuild a term so every node carries its principal (natural) type,
// discarding any coerced views picked up along the way.
inline TermPtr rePrincipal(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Const: return mkConst(t->sym);
    case TermKind::Var: return mkVar(t->sym);
    case TermKind::Bound: return mkBound(t->idx, t->bty);
    case TermKind::App: return mkApp(rePrincipal(t->c0), rePrincipal(t->c1));
    case TermKind::Abs: return mkAbs(t->bty, rePrincipal(t->c0));
  }
  return t;
}

// Identity on structure, retags the view type. Injective by construction.
inline TermPtr coerce(const TermPtr& t, const TypePtr& target) {
  if (!subtype(t->type, target)) throw NotASubtype(typeName(t->type) + " into " + typeName(target));
  if (typeEqual(t->type, target)) return t;
  Term copy = *t;
  copy.type = target;
  return detail::make(std::move(copy));
}

// Debug-level printer; the CLI owns the real concrete syntax.
inline std::string dump(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Const: return symdata(t->sym).name;
    case TermKind::Var: return symdata(t->sym).name;
    case TermKind::Bound: return "#" + std::to_string(t->idx);
    case TermKind::App: return "(" + dump(t->c0) + " " + dump(t->c1) + ")";
    case TermKind::Abs: return "(\\:" + typeName(t->bty) + ". " + dump(t->c0) + ")";
  }
  return "?";
}

}  // namespace uctt
