#pragma once

#include <optional>
#include <algorithm>
#include <vector>

#include "enumerate.hpp"

namespace uctt {

// A clause of elab(P): a canonical p-type term of the shape
// forall x1..xn (G => A_r) or forall x1..xn A_r, with peel metadata cached.
struct Clause {
  TermPtr term;
  int arity = 0;
  std::vector<TypePtr> binderTys;
  Sym headSym = 0;
  bool bare = true;

  bool operator==(const Clause& o) const { return termEq(term, o.term); }
};

inline Clause makeClause(const TermPtr& t) {
  Clause c;
  c.term = t;
  TermPtr cur = t;
  // Metadata walk; opened bodies may be loose, heads are spine-visible anyway.
  while (headLog(cur) == LogOp::PiP) {
    Spine s = spineOf(cur);
    if (s.args.size() != 1) break;
    c.binderTys.push_back(s.args[0]->type->dom);
    c.arity++;
    cur = quantBodyOpen(s.args[0]);
  }
  TermPtr head = cur;
  if (headLog(cur) == LogOp::ImpP) {
    Spine s = spineOf(cur);
    c.bare = false;
    head = s.args[1];
  }
  Spine hs = spineOf(head);
  if (hs.head->kind != TermKind::Const || isLogical(hs.head->sym))
    throw NotAProgramFormula("clause head is not a rigid atom: " + dump(t));
  c.headSym = hs.head->sym;
  return c;
}

// Strips the n binders, substituting args; returns (head, body) with body
// = top_g for bare clauses.
inline std::pair<TermPtr, TermPtr> instantiateClause(const Clause& c, const std::vector<TermPtr>& args) {
  if ((int)args.size() != c.arity) throw Error("clause arity mismatch");
  TermPtr cur = c.term;
  for (const auto& a : args) {
    Spine s = spineOf(cur);  // Pi_p f
    cur = quantInstantiate(s.args[0], a);
  }
  if (headLog(cur) == LogOp::ImpP) {
    Spine s = spineOf(cur);
    return {s.args[1], s.args[0]};
  }
  // a bare head carries the p-view of the source clause; restore its
  // principal (atom) type so callers can coerce it into goal position
  return {rePrincipal(cur), topG()};
}

// --- delta measure ---------------------------------------------------------

inline int delta(const TermPtr& d) {
  if (isRigidAtom(d)) return 0;
  Spine s = spineOf(d);
  if (s.head->kind == TermKind::Const) {
    switch (symLog(s.head->sym)) {
      case LogOp::ImpP: return 0;
      case LogOp::AndP:
        return 1 + std::max(delta(s.args[0]), delta(s.args[1]));
      case LogOp::PiP:
        return 1 + delta(quantBodyOpenAsFormula(s.args[0]));
      default: break;
    }
  }
  throw NotAProgramFormula(dump(d));
}

// --- elaboration -----------------------------------------------------------

namespace detail_elab {

// Works on possibly-open terms; only heads are inspected and binders are
// re-wrapped, so loose indices stay consistent.
inline void elabOpen(const TermPtr& d, std::vector<TermPtr>& out) {
  Spine s = spineOf(d);
  if (s.head->kind == TermKind::Const) {
    switch (symLog(s.head->sym)) {
      case LogOp::AndP:
        elabOpen(s.args[0], out);
        elabOpen(s.args[1], out);
        return;
      case LogOp::PiP: {
        const TermPtr& f = s.args[0];
        TypePtr alpha = f->type->dom;
        TermPtr body = f->kind == TermKind::Abs
                           ? f->c0
                           : normalizeOpen(mkApp(shift(f, 1), mkBound(0, alpha)));
        std::vector<TermPtr> sub;
        elabOpen(body, sub);
        for (const auto& k : sub)
          out.push_back(normalizeOpen(mkApp(mkConst(sig().logical(LogOp::PiP, alpha)), mkAbs(alpha, k))));
        return;
      }
      case LogOp::ImpP:
        out.push_back(d);
        return;
      default: break;
    }
  }
  out.push_back(d);  // bare atom (validated by makeClause)
}

}  // namespace detail_elab

inline std::vector<Clause> elab(const TermPtr& d) {
  if (!isProgramFormula(coerce(d, tyP())))
    throw NotAProgramFormula(dump(d));
  std::vector<TermPtr> raw;
  detail_elab::elabOpen(d, raw);
  std::vector<Clause> out;
  out.reserve(raw.size());
  for (const auto& k : raw) out.push_back(makeClause(k));
  return out;
}

// Lemma elab-shift, constructively: given K in elab(D[t/x]), find a clause
// forall x K' in elab(forall x D) with K'[t/x] = K.
inline std::optional<Clause> shiftWitness(const TermPtr& forallD, const TermPtr& t, const Clause& k) {
  for (const Clause& cand : elab(forallD)) {
    if (cand.arity < 1) continue;
    Spine s = spineOf(cand.term);
    if (s.args.size() != 1) continue;
    TermPtr inst = normalizeOpen(quantInstantiate(s.args[0], t));
    if (termEq(inst, k.term)) return cand;
  }
  return std::nullopt;
}

// Lemma clause-generalization, constructively: given K in elab(D[c/x]), find
// K-hat in elab(D) with K-hat[c/x] = K.
inline std::optional<Clause> generalizeWitness(const TermPtr& d, Sym x, Sym c, const Clause& k) {
  Subst inst = Subst::single(x, mkConst(c));
  for (const Clause& cand : elab(d)) {
    if (termEq(applySubst(inst, cand.term), k.term)) return cand;
  }
  return std::nullopt;
}

// --- programs ---------------------------------------------------------------

// Finite multiset of program formulas, kept sorted for canonical keys.
// elab is computed eagerly; programs are small in this artifact.
class Program {
 public:
  Program() : ds_(std::make_shared<std::vector<TermPtr>>()) { finish(); }

  static Program of(std::vector<TermPtr> ds) {
    Program p;
    auto v = std::make_shared<std::vector<TermPtr>>(std::move(ds));
    std::sort(v->begin(), v->end(), [](const TermPtr& a, const TermPtr& b) { return termCmp(a, b) < 0; });
    p.ds_ = std::move(v);
    p.finish();
    return p;
  }

  Program extend(const TermPtr& d) const {
    std::vector<TermPtr> v = *ds_;
    v.push_back(d);
    return of(std::move(v));
  }

  const std::vector<TermPtr>& formulas() const { return *ds_; }
  bool empty() const { return ds_->empty(); }
  int level() const { return level_; }
  size_t key() const { return key_; }
  const std::vector<Clause>& clauses() const { return *elab_; }

  bool operator==(const Program& o) const {
    if (key_ != o.key_ || ds_->size() != o.ds_->size()) return false;
    for (size_t i = 0; i < ds_->size(); i++)
      if (!termEq((*ds_)[i], (*o.ds_)[i])) return false;
    return true;
  }

  int compare(const Program& o) const {
    if (ds_->size() != o.ds_->size()) return ds_->size() < o.ds_->size() ? -1 : 1;
    for (size_t i = 0; i < ds_->size(); i++)
      if (int c = termCmp((*ds_)[i], (*o.ds_)[i])) return c;
    return 0;
  }

  bool hasClause(const Clause& c) const {
    for (const auto& k : *elab_)
      if (k == c) return true;
    return false;
  }

  // elab(P') superset of elab(P)
  bool elabIncludes(const Program& p) const {
    for (const auto& k : p.clauses())
      if (!hasClause(k)) return false;
    return true;
  }

  std::set<Sym> symbols() const {
    std::set<Sym> s;
    for (const auto& d : *ds_) scanSyms(d, [&](Sym x, TermKind) { s.insert(x); });
    return s;
  }

  std::set<Sym> freeVarSet() const {
    std::set<Sym> s;
    for (const auto& d : *ds_) collectFreeVars(d, s);
    return s;
  }

 private:
  void finish() {
    level_ = 0;
    key_ = 0x12345;
    auto e = std::make_shared<std::vector<Clause>>();
    for (const auto& d : *ds_) {
      level_ = std::max(level_, d->level);
      key_ = detail::mix(key_, d->hash);
      for (auto& k : elab(d)) e->push_back(std::move(k));
    }
    elab_ = std::move(e);
  }

  std::shared_ptr<const std::vector<TermPtr>> ds_;
  std::shared_ptr<const std::vector<Clause>> elab_;
  int level_ = 0;
  size_t key_ = 0;
};

inline Program applySubst(const Subst& th, const Program& p) {
  if (th.isId()) return p;
  std::vector<TermPtr> v;
  v.reserve(p.formulas().size());
  for (const auto& d : p.formulas()) v.push_back(applySubst(th, d));
  return Program::of(std::move(v));
}

inline Program applyReplacer(const ConstReplacer& xi, const Program& p) {
  if (xi.isId()) return p;
  std::vector<TermPtr> v;
  v.reserve(p.formulas().size());
  for (const auto& d : p.formulas()) v.push_back(applyReplacer(xi, d));
  return Program::of(std::move(v));
}

// --- the instantiation transition system ->_i --------------------------------

// One-step successors of D under ->_i; the forall case enumerates positive
// witnesses up to the size bound (used as an oracle for extension membership).
struct StepTransitionResult {
  std::vector<TermPtr> next;
  bool truncated = false;
};

inline StepTransitionResult stepTransition(int i, const TermPtr& d, int sizeBound,
                                           const std::set<Sym>& contextVars = {}) {
  StepTransitionResult r;
  Spine s = spineOf(d);
  if (s.head->kind == TermKind::Const) {
    switch (symLog(s.head->sym)) {
      case LogOp::AndP:
        r.next = {s.args[0], s.args[1]};
        return r;
      case LogOp::PiP: {
        PositiveEnumerator en(i, sizeBound, contextVars);
        EnumResult ts = en.enumerate(s.args[0]->type->dom);
        r.truncated = ts.truncated;
        for (const auto& t : ts.terms) r.next.push_back(quantInstantiate(s.args[0], t));
        return r;
      }
      default: break;
    }
  }
  return r;  // G => A_r and bare atoms have no successors
}

}  // namespace uctt
