#pragma once

#include <map>
#include <tuple>

#include "transform.hpp"

namespace uctt {

// The two-element lattice with its top join-irreducible, plus the honesty
// flag for bound-limited joins: certifying top is exact; bottom is only
// bound-relative unless nothing was truncated along the way.
struct Lattice2 {
  bool top = false;
  bool truncated = false;  // some join was cut by the enumeration bounds

  bool exactBottom() const { return !top && !truncated; }
};

struct SemBounds {
  int witnessSizeBound = 4;
  int canonShift = 0;  // alternative canonical-constant supply (invariance test)
};

// Fuel-indexed weak-valuation table: memoizes T^k(I_bot)_i(P, G) on the term
// structure. Isolated per evaluation task; results are deterministic given
// the bounds and the canonical fresh-constant policy.
class ValuationTable {
 public:
  explicit ValuationTable(SemBounds b = {}) : bounds_(b) {}

  // T^k(I_bot)_i(P, G), by the clauses of the operator definition.
  Lattice2 tEval(int fuel, int index, const Program& p, const TermPtr& goal) {
    TermPtr g = coerce(normalize(goal), tyG());
    if (p.level() > index || g->level > index) throw LevelViolation("tEval arguments above the index");
    return eval(fuel, index, p, g);
  }

  struct FixResult {
    Lattice2 value;
    int fuelUsed = 0;       // least fuel certifying top (when top)
    bool stabilized = false;  // memo reached a fixpoint with nothing truncated
  };

  // Least fixed point queries: least fuel <= maxFuel certifying top.
  // When the support closure of the query is finite and nothing gets
  // truncated, the iteration is run to an honest fixpoint, so bottom is
  // exact even below maxFuel; otherwise bottom is bound-relative.
  FixResult ifixQuery(int index, const Program& p, const TermPtr& goal, int maxFuel) {
    FixResult r;
    TermPtr g = coerce(normalize(goal), tyG());
    SupportSet support;
    bool supportExact = closeSupport(index, p, g, support);
    if (supportExact) {
      // iterate T on the closed support until a fixpoint or the fuel bound
      std::map<NKey, bool> cur;
      for (const auto& k : support.keys) cur[k] = isTop(k.goal);
      NKey root{index, p, g};
      int fuel = 0;
      bool fixed = false;
      while (fuel <= maxFuel && !cur[root]) {
        std::map<NKey, bool> next;
        bool changed = false;
        for (const auto& [k, v] : cur) {
          bool nv = v || stepValue(k, cur);
          next[k] = nv;
          changed |= nv != v;
        }
        if (!changed) {
          fixed = true;
          break;
        }
        cur = std::move(next);
        fuel++;
      }
      if (cur[root]) {
        // align the reported fuel with the layered evaluation
        r.value = {true, false};
        r.fuelUsed = fuel;
        for (int k = 0; k <= maxFuel; k++)
          if (tEval(k, index, p, g).top) {
            r.fuelUsed = k;
            break;
          }
        return r;
      }
      if (fixed) {
        r.value = {false, false};
        r.fuelUsed = fuel;
        r.stabilized = true;
        return r;
      }
      r.value = {false, true};  // fuel ran out before the fixpoint
      r.fuelUsed = maxFuel;
      return r;
    }
    for (int k = 0; k <= maxFuel; k++) {
      Lattice2 v = tEval(k, index, p, goal);
      if (v.top) {
        r.value = v;
        r.fuelUsed = k;
        return r;
      }
    }
    r.value = tEval(maxFuel, index, p, goal);
    r.fuelUsed = maxFuel;
    return r;
  }

  bool memberIs(const Subst& theta, int index, const Program& p, const TermPtr& goal,
                const SearchConfig& cfg) const {
    std::string why;
    if (!theta.isLegal(&why)) throw IllegalSubstitution(why);
    if (!theta.isSafe()) throw IllegalSubstitution("theta must be safe");
    if (theta.level() > index) throw IllegalSubstitution("theta level above the index");
    SearchConfig c = cfg;
    c.idOnly = true;
    SolveOutcome out = solveState(index, applySubst(theta, p), applySubst(theta, goal), c);
    return out.succeeded();
  }

  // Every memoized entry, for the law checks.
  struct Entry {
    int fuel;
    int index;
    Program program;
    TermPtr goal;
    Lattice2 value;
  };
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    for (const auto& [k, v] : memo_) out.push_back({k.fuel, k.index, k.program, k.goal, v});
    return out;
  }

  const SemBounds& bounds() const { return bounds_; }

  // Constructive completeness: rebuild a successful identity derivation of
  // <i, P ?- G> from a top certificate at the given fuel, following the
  // induction on the fuel.
  Derivation extractDerivation(int fuel, int index, const Program& p, const TermPtr& goal) {
    TermPtr g = coerce(normalize(goal), tyG());
    Lattice2 v = eval(fuel, index, p, g);
    if (!v.top) throw CertificateMismatch("no top certificate at this fuel");
    return extract(fuel, index, p, g);
  }

 private:
  struct Key {
    int fuel;
    int index;
    Program program;
    TermPtr goal;

    bool operator<(const Key& o) const {
      if (fuel != o.fuel) return fuel < o.fuel;
      if (index != o.index) return index < o.index;
      if (int c = program.compare(o.program)) return c < 0;
      return termCmp(goal, o.goal) < 0;
    }
  };

  // fuel-less key for the support iteration
  struct NKey {
    int index;
    Program program;
    TermPtr goal;

    bool operator<(const NKey& o) const {
      if (index != o.index) return index < o.index;
      if (int c = program.compare(o.program)) return c < 0;
      return termCmp(goal, o.goal) < 0;
    }
  };

  struct SupportSet {
    std::vector<NKey> keys;
  };

  // How a key's next value combines its children's previous values.
  struct ChildSpec {
    enum Comb { None, AllOf, AnyOf, Single } comb = None;
    std::vector<NKey> kids;
    bool exact = true;
  };

  SemBounds bounds_;
  std::map<Key, Lattice2> memo_;
  std::map<NKey, ChildSpec> childCache_;

  static constexpr size_t kSupportCap = 4000;

  const ChildSpec& childrenOf(const NKey& k) {
    auto it = childCache_.find(k);
    if (it != childCache_.end()) return it->second;
    ChildSpec spec;
    const TermPtr& g = k.goal;
    Spine sp = spineOf(g);
    if (isTop(g)) {
      spec.comb = ChildSpec::None;
    } else {
      switch (headLog(g)) {
        case LogOp::AndG:
        case LogOp::AndH:
          spec.comb = ChildSpec::AllOf;
          spec.kids.push_back({k.index, k.program, coerce(sp.args[0], tyG())});
          spec.kids.push_back({k.index, k.program, coerce(sp.args[1], tyG())});
          break;
        case LogOp::OrG:
        case LogOp::OrH:
          spec.comb = ChildSpec::AnyOf;
          spec.kids.push_back({k.index, k.program, coerce(sp.args[0], tyG())});
          spec.kids.push_back({k.index, k.program, coerce(sp.args[1], tyG())});
          break;
        case LogOp::ImpG:
          spec.comb = ChildSpec::Single;
          spec.kids.push_back({k.index, k.program.extend(sp.args[0]), coerce(sp.args[1], tyG())});
          break;
        case LogOp::SigmaG:
        case LogOp::SigmaH: {
          spec.comb = ChildSpec::AnyOf;
          std::set<Sym> ctx = k.program.symbols();
          scanSyms(g, [&](Sym x, TermKind) { ctx.insert(x); });
          PositiveEnumerator en(k.index, bounds_.witnessSizeBound, ctx);
          EnumResult ts = en.enumerate(sp.args[0]->type->dom);
          spec.exact = !ts.truncated;
          for (const auto& t : ts.terms)
            spec.kids.push_back({k.index, k.program, coerce(quantInstantiate(sp.args[0], t), tyG())});
          break;
        }
        case LogOp::PiG: {
          spec.comb = ChildSpec::Single;
          TermPtr c = canonConst(k.index, sp.args[0]->type->dom);
          spec.kids.push_back({k.index + 1, k.program, coerce(quantInstantiate(sp.args[0], c), tyG())});
          break;
        }
        default:
          if (isRigidAtom(g)) {
            spec.comb = ChildSpec::AnyOf;  // the self-disjunct is the caller's job
            atomBodies(k, spec);
          } else {
            spec.comb = ChildSpec::None;  // flex atoms stay bottom
          }
          break;
      }
    }
    return childCache_.emplace(k, std::move(spec)).first->second;
  }

  void atomBodies(const NKey& k, ChildSpec& spec) {
    Spine as = spineOf(k.goal);
    for (const auto& c : k.program.clauses()) {
      if (c.headSym != as.head->sym) continue;
      std::vector<TermPtr> ws;
      std::set<Sym> flex;
      std::vector<Sym> wsyms;
      for (const auto& ty : c.binderTys) {
        Sym w = sig().freshVar(k.index, ty);
        ws.push_back(mkVar(w));
        wsyms.push_back(w);
        flex.insert(w);
      }
      auto [head, body] = instantiateClause(c, ws);
      UnifyResult m = matchTerms({{head, k.goal}}, flex);
      if (m.nonPattern) spec.exact = false;
      for (const auto& gamma : m.unifiers) {
        std::vector<Sym> leftovers;
        for (Sym w : wsyms)
          if (!gamma.hasBinding(w)) leftovers.push_back(w);
        std::set<Sym> ctx = k.program.symbols();
        scanSyms(k.goal, [&](Sym x, TermKind) { ctx.insert(x); });
        PositiveEnumerator en(k.index, bounds_.witnessSizeBound, ctx);
        std::vector<std::vector<TermPtr>> choice;
        for (Sym w : leftovers) {
          EnumResult r = en.enumerate(symdata(w).type);
          if (r.truncated) spec.exact = false;
          choice.push_back(std::move(r.terms));
        }
        std::vector<TermPtr> pick(leftovers.size());
        std::function<void(size_t)> rec = [&](size_t j) {
          if (j == leftovers.size()) {
            Subst full = gamma;
            for (size_t q = 0; q < leftovers.size(); q++) full.bind(leftovers[q], pick[q]);
            if (full.level() > k.index) return;
            if (!termEq(applySubst(full, head), k.goal)) return;
            spec.kids.push_back({k.index, k.program, coerce(applySubst(full, body), tyG())});
          } else {
            for (const auto& t : choice[j]) {
              pick[j] = t;
              rec(j + 1);
            }
          }
        };
        rec(0);
      }
    }
  }

  // Transitively close the support; false when truncated or over the cap.
  bool closeSupport(int index, const Program& p, const TermPtr& g, SupportSet& out) {
    std::set<NKey> seen;
    std::vector<NKey> todo{NKey{index, p, g}};
    bool exact = true;
    while (!todo.empty()) {
      NKey k = todo.back();
      todo.pop_back();
      if (!seen.insert(k).second) continue;
      if (seen.size() > kSupportCap) return false;
      const ChildSpec& spec = childrenOf(k);
      exact &= spec.exact;
      for (const auto& kid : spec.kids) todo.push_back(kid);
    }
    out.keys.assign(seen.begin(), seen.end());
    return exact;
  }

  bool stepValue(const NKey& k, const std::map<NKey, bool>& prev) {
    const ChildSpec& spec = childrenOf(k);
    auto val = [&](const NKey& kid) {
      auto it = prev.find(kid);
      return it != prev.end() && it->second;
    };
    switch (spec.comb) {
      case ChildSpec::None: return isTop(k.goal);
      case ChildSpec::Single: return val(spec.kids[0]);
      case ChildSpec::AllOf: {
        for (const auto& kid : spec.kids)
          if (!val(kid)) return false;
        return true;
      }
      case ChildSpec::AnyOf: {
        for (const auto& kid : spec.kids)
          if (val(kid)) return true;
        return false;
      }
    }
    return false;
  }

  TermPtr canonConst(int index, const TypePtr& alpha) {
    return mkConst(sig().canonicalConst(index + 1, alpha, bounds_.canonShift));
  }

  Lattice2 eval(int fuel, int index, const Program& p, const TermPtr& g) {
    Key key{fuel, index, p, g};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Lattice2 v = compute(fuel, index, p, g);
    memo_.emplace(std::move(key), v);
    return v;
  }

  Lattice2 compute(int fuel, int index, const Program& p, const TermPtr& g) {
    if (isTop(g)) return {true, false};
    if (fuel == 0) return {false, false};  // I_bot
    const int k = fuel - 1;
    Spine sp = spineOf(g);
    switch (headLog(g)) {
      case LogOp::AndG:
      case LogOp::AndH: {
        Lattice2 a = eval(k, index, p, sp.args[0]);
        Lattice2 b = eval(k, index, p, sp.args[1]);
        return {a.top && b.top, a.truncated || b.truncated};
      }
      case LogOp::OrG:
      case LogOp::OrH: {
        Lattice2 a = eval(k, index, p, sp.args[0]);
        if (a.top) return a;
        Lattice2 b = eval(k, index, p, sp.args[1]);
        return {b.top, a.truncated || b.truncated};
      }
      case LogOp::ImpG: {
        return eval(k, index, p.extend(sp.args[0]), coerce(sp.args[1], tyG()));
      }
      case LogOp::SigmaG:
      case LogOp::SigmaH: {
        std::set<Sym> ctx = p.symbols();
        scanSyms(g, [&](Sym x, TermKind) { ctx.insert(x); });
        PositiveEnumerator en(index, bounds_.witnessSizeBound, ctx);
        EnumResult ts = en.enumerate(sp.args[0]->type->dom);
        bool trunc = ts.truncated;
        for (const auto& t : ts.terms) {
          Lattice2 a = eval(k, index, p, coerce(quantInstantiate(sp.args[0], t), tyG()));
          if (a.top) return a;
          trunc |= a.truncated;
        }
        return {false, trunc};
      }
      case LogOp::PiG: {
        TermPtr c = canonConst(index, sp.args[0]->type->dom);
        return eval(k, index + 1, p, coerce(quantInstantiate(sp.args[0], c), tyG()));
      }
      default: break;
    }
    if (isRigidAtom(g)) return atomJoin(k, index, p, g);
    // flex atoms and anything else: bottom at every iterate
    return {false, false};
  }

  // T(I)_i(P, A) = I_i(P, A) \/ join{ I_i(P, G') : A <- G' in [i;P] }.
  // Head matching picks the candidate clauses; binders the head does not fix
  // are enumerated over positive witnesses.
  Lattice2 atomJoin(int k, int index, const Program& p, const TermPtr& atom) {
    Lattice2 prev = eval(k, index, p, atom);
    if (prev.top) return prev;
    bool trunc = prev.truncated;
    Spine as = spineOf(atom);
    for (const auto& c : p.clauses()) {
      if (c.headSym != as.head->sym) continue;
      std::vector<TermPtr> ws;
      std::set<Sym> flex;
      for (const auto& ty : c.binderTys) {
        Sym w = sig().freshVar(index, ty);
        ws.push_back(mkVar(w));
        flex.insert(w);
      }
      auto [head, body] = instantiateClause(c, ws);
      UnifyResult m = matchTerms({{head, atom}}, flex);
      trunc |= m.nonPattern;
      for (const auto& gamma : m.unifiers) {
        // leftover binders: enumerate positive witnesses
        std::vector<Sym> leftovers;
        for (size_t j = 0; j < ws.size(); j++)
          if (!gamma.hasBinding(ws[j]->sym)) leftovers.push_back(ws[j]->sym);
        std::set<Sym> ctx = p.symbols();
        scanSyms(atom, [&](Sym x, TermKind) { ctx.insert(x); });
        PositiveEnumerator en(index, bounds_.witnessSizeBound, ctx);
        std::vector<std::vector<TermPtr>> choice;
        for (Sym w : leftovers) {
          EnumResult r = en.enumerate(symdata(w).type);
          trunc |= r.truncated;
          choice.push_back(std::move(r.terms));
        }
        bool top = false;
        std::vector<TermPtr> pick(leftovers.size());
        std::function<bool(size_t)> rec = [&](size_t j) {
          if (j == leftovers.size()) {
            Subst full = gamma;
            for (size_t q = 0; q < leftovers.size(); q++) full.bind(leftovers[q], pick[q]);
            if (full.level() > index) return false;
            TermPtr bodyInst = applySubst(full, body);
            TermPtr headInst = applySubst(full, head);
            if (!termEq(headInst, atom)) return false;
            Lattice2 a = eval(k, index, p, coerce(bodyInst, tyG()));
            trunc |= a.truncated;
            return a.top;
          }
          for (const auto& t : choice[j]) {
            pick[j] = t;
            if (rec(j + 1)) return true;
          }
          return false;
        };
        if (rec(0)) { top = true; }
        if (top) return {true, false};
      }
    }
    return {false, trunc};
  }

  // --- completeness-as-code ---------------------------------------------------

  Derivation extract(int fuel, int index, const Program& p, const TermPtr& g) {
    State st0 = mkState(index, p, g);
    if (isTop(g)) {
      Step s;
      s.rule = Rule::Null;
      return replaySteps({st0}, {s});
    }
    if (fuel == 0) throw CertificateMismatch("bottom certificate in extraction");
    const int k = fuel - 1;
    Spine sp = spineOf(g);
    switch (headLog(g)) {
      case LogOp::AndG:
      case LogOp::AndH: {
        Derivation d1 = extract(k, index, p, coerce(sp.args[0], tyG()));
        Derivation d2 = extract(k, index, p, coerce(sp.args[1], tyG()));
        Derivation prod = product(d1, d2);
        Step s;
        s.rule = Rule::And;
        std::vector<Step> steps{s};
        for (const auto& x : prod.steps) steps.push_back(x);
        return replaySteps({st0}, std::move(steps));
      }
      case LogOp::OrG:
      case LogOp::OrH: {
        for (int j = 0; j < 2; j++) {
          if (!eval(k, index, p, coerce(sp.args[(size_t)j], tyG())).top) continue;
          Derivation dj = extract(k, index, p, coerce(sp.args[(size_t)j], tyG()));
          Step s;
          s.rule = Rule::Or;
          s.orBranch = j + 1;
          std::vector<Step> steps{s};
          for (const auto& x : dj.steps) steps.push_back(x);
          return replaySteps({st0}, std::move(steps));
        }
        throw CertificateMismatch("or certificate lost");
      }
      case LogOp::ImpG: {
        Derivation dj = extract(k, index, p.extend(sp.args[0]), coerce(sp.args[1], tyG()));
        Step s;
        s.rule = Rule::Augment;
        std::vector<Step> steps{s};
        for (const auto& x : dj.steps) steps.push_back(x);
        return replaySteps({st0}, std::move(steps));
      }
      case LogOp::SigmaG:
      case LogOp::SigmaH: {
        std::set<Sym> ctx = p.symbols();
        scanSyms(g, [&](Sym x, TermKind) { ctx.insert(x); });
        PositiveEnumerator en(index, bounds_.witnessSizeBound, ctx);
        EnumResult ts = en.enumerate(sp.args[0]->type->dom);
        for (const auto& t : ts.terms) {
          TermPtr inst = coerce(quantInstantiate(sp.args[0], t), tyG());
          if (!eval(k, index, p, inst).top) continue;
          Derivation dj = extract(k, index, p, inst);
          Step s;
          s.rule = Rule::Instance;
          s.witness = t;
          std::vector<Step> steps{s};
          for (const auto& x : dj.steps) steps.push_back(x);
          return replaySteps({st0}, std::move(steps));
        }
        throw CertificateMismatch("exists certificate lost");
      }
      case LogOp::PiG: {
        TermPtr c = canonConst(index, sp.args[0]->type->dom);
        TermPtr inst = coerce(quantInstantiate(sp.args[0], c), tyG());
        Derivation dj = extract(k, index + 1, p, inst);
        // the generic step needs a constant fresh to the derivation; the
        // canonical one is fine, the sub-derivation is freshened around it
        Step s;
        s.rule = Rule::Generic;
        s.genConst = c->sym;
        std::vector<Step> steps{s};
        for (const auto& x : dj.steps) steps.push_back(x);
        return replaySteps({st0}, std::move(steps));
      }
      default: break;
    }
    if (isRigidAtom(g)) return extractAtom(k, index, p, g, st0);
    throw CertificateMismatch("flex atom certified top");
  }

  // Finds a certifying extension member for the atom: the clause plus a full
  // instantiation whose body is top at fuel k.
  struct AtomWitness {
    const Clause* clause;
    Subst full;
    TermPtr bodyInst;
  };

  std::optional<AtomWitness> findAtomWitness(int k, int index, const Program& p, const TermPtr& atom,
                                             std::vector<std::vector<Sym>>& wsymsOut) {
    Spine as = spineOf(atom);
    for (const auto& c : p.clauses()) {
      if (c.headSym != as.head->sym) continue;
      std::vector<TermPtr> ws;
      std::set<Sym> flex;
      std::vector<Sym> wsyms;
      for (const auto& ty : c.binderTys) {
        Sym w = sig().freshVar(index, ty);
        ws.push_back(mkVar(w));
        wsyms.push_back(w);
        flex.insert(w);
      }
      auto [head, body] = instantiateClause(c, ws);
      UnifyResult m = matchTerms({{head, atom}}, flex);
      for (const auto& gamma : m.unifiers) {
        std::vector<Sym> leftovers;
        for (Sym w : wsyms)
          if (!gamma.hasBinding(w)) leftovers.push_back(w);
        std::set<Sym> ctx = p.symbols();
        scanSyms(atom, [&](Sym x, TermKind) { ctx.insert(x); });
        PositiveEnumerator en(index, bounds_.witnessSizeBound, ctx);
        std::vector<std::vector<TermPtr>> choice;
        for (Sym w : leftovers) choice.push_back(en.enumerate(symdata(w).type).terms);
        std::vector<TermPtr> pick(leftovers.size());
        std::optional<AtomWitness> found;
        std::function<bool(size_t)> rec = [&](size_t j) {
          if (j == leftovers.size()) {
            Subst full = gamma;
            for (size_t q = 0; q < leftovers.size(); q++) full.bind(leftovers[q], pick[q]);
            if (full.level() > index) return false;
            if (!termEq(applySubst(full, head), atom)) return false;
            TermPtr bodyInst = coerce(applySubst(full, body), tyG());
            if (!eval(k, index, p, bodyInst).top) return false;
            found = AtomWitness{&c, full, bodyInst};
            wsymsOut.push_back(wsyms);
            return true;
          }
          for (const auto& t : choice[j]) {
            pick[j] = t;
            if (rec(j + 1)) return true;
          }
          return false;
        };
        if (rec(0)) return found;
      }
    }
    return std::nullopt;
  }

  Derivation extractAtom(int k, int index, const Program& p, const TermPtr& atom, const State& st0) {
    if (eval(k, index, p, atom).top) return extract(k, index, p, atom);
    std::vector<std::vector<Sym>> wsymsOut;
    auto wit = findAtomWitness(k, index, p, atom, wsymsOut);
    if (!wit) throw CertificateMismatch("atomic certificate lost");
    const Clause& c = *wit->clause;
    const std::vector<Sym>& wsyms = wsymsOut.back();
    std::vector<Sym> delta;
    Subst gp;
    for (Sym w : wsyms) {
      Sym w2 = sig().freshVar(index, symdata(w).type);
      delta.push_back(w2);
      gp.bind(w2, applySubst(wit->full, mkVar(w)));
    }
    Step s;
    s.rule = c.bare ? Rule::Axiom : Rule::Backchain;
    s.clause = c;
    s.deltaVars = delta;
    s.sub = gp;
    std::vector<Step> steps{s};
    if (!c.bare) {
      Derivation dj = extract(k, index, p, wit->bodyInst);
      for (const auto& x : dj.steps) steps.push_back(x);
    }
    return replaySteps({st0}, std::move(steps));
  }
};

}  // namespace uctt
