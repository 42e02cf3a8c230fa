#pragma once

#include <optional>

#include "semantics.hpp"

namespace uctt {

// Bounded cut-free prover for the program/goal fragment of the indexed
// sequent calculus, G3-style: antecedents are sets, weakening and
// contraction are admissible, the principal formula of imp-L / forall-L
// stays available. Eigenconstants are fresh constants of level i+1.
struct Sequent {
  std::vector<TermPtr> antecedents;  // kept sorted, duplicate-free
  TermPtr consequent;
  int index = 0;
};

inline Sequent mkSequent(std::vector<TermPtr> ante, TermPtr cons, int index) {
  for (auto& a : ante) a = normalize(a);
  std::sort(ante.begin(), ante.end(), [](const TermPtr& a, const TermPtr& b) { return termCmp(a, b) < 0; });
  ante.erase(std::unique(ante.begin(), ante.end(), [](const TermPtr& a, const TermPtr& b) { return termEq(a, b); }),
             ante.end());
  return Sequent{std::move(ante), normalize(cons), index};
}

inline Sequent extendAnte(const Sequent& s, const TermPtr& d, int index) {
  std::vector<TermPtr> a = s.antecedents;
  a.push_back(d);
  return mkSequent(std::move(a), s.consequent, index);
}

inline bool anteContains(const Sequent& s, const TermPtr& t) {
  for (const auto& a : s.antecedents)
    if (termEq(a, t)) return true;
  return false;
}

enum class SeqRule : uint8_t { TopR, Ax, AndL, AndR, OrL, OrR1, OrR2, ImpL, ImpR, AllL, AllR, ExL, ExR, BotR };

inline const char* seqRuleName(SeqRule r) {
  switch (r) {
    case SeqRule::TopR: return "top_r";
    case SeqRule::Ax: return "ax";
    case SeqRule::AndL: return "and_l";
    case SeqRule::AndR: return "and_r";
    case SeqRule::OrL: return "or_l";
    case SeqRule::OrR1: return "or_r1";
    case SeqRule::OrR2: return "or_r2";
    case SeqRule::ImpL: return "imp_l";
    case SeqRule::ImpR: return "imp_r";
    case SeqRule::AllL: return "all_l";
    case SeqRule::AllR: return "all_r";
    case SeqRule::ExL: return "ex_l";
    case SeqRule::ExR: return "ex_r";
    case SeqRule::BotR: return "bot_r";
  }
  return "?";
}

struct ProofTree {
  SeqRule rule;
  Sequent conclusion;
  std::vector<ProofTree> premises;
  TermPtr principal;  // left rules: the antecedent acted on
  TermPtr witness;    // all_l / ex_r
  Sym eigen = 0;      // all_r / ex_l
};

// S-expression serialization for golden tests.
inline std::string serializeProof(const ProofTree& t) {
  std::string out = "(";
  out += seqRuleName(t.rule);
  if (t.witness) out += " [" + printTerm(t.witness) + "]";
  if (t.eigen) out += " [" + symdata(t.eigen).name + "]";
  for (const auto& p : t.premises) out += " " + serializeProof(p);
  return out + ")";
}

struct ProverConfig {
  int witnessSizeBound = 4;
  bool uniformOnly = true;   // right rules first on nonatomic consequents
  bool allowLeftSplit = false;  // or_l / ex_l behind a flag (full ICTT left rules)
};

enum class ProveStatus : uint8_t { Proved, Refuted, Exhausted };

struct ProveResult {
  ProveStatus status = ProveStatus::Refuted;
  std::optional<ProofTree> tree;

  bool proved() const { return status == ProveStatus::Proved; }
};

namespace detail_seq {

struct SeqLess {
  bool operator()(const Sequent& a, const Sequent& b) const {
    if (a.index != b.index) return a.index < b.index;
    if (a.antecedents.size() != b.antecedents.size()) return a.antecedents.size() < b.antecedents.size();
    for (size_t i = 0; i < a.antecedents.size(); i++)
      if (int c = termCmp(a.antecedents[i], b.antecedents[i])) return c < 0;
    return termCmp(a.consequent, b.consequent) < 0;
  }
};

class Prover {
 public:
  Prover(ProverConfig cfg) : cfg_(cfg) {}

  ProveResult prove(const Sequent& s, int depth) {
    hitBound_ = false;
    auto t = search(s, depth);
    ProveResult r;
    if (t) {
      r.status = ProveStatus::Proved;
      r.tree = std::move(*t);
    } else {
      r.status = hitBound_ ? ProveStatus::Exhausted : ProveStatus::Refuted;
    }
    return r;
  }

 private:
  ProverConfig cfg_;
  bool hitBound_ = false;
  std::map<Sequent, ProofTree, SeqLess> proved_;
  std::map<Sequent, int, SeqLess> failedAt_;  // pruning-free failures within the stored budget
  std::map<Sequent, int, SeqLess> path_;      // branch multiset for repeat pruning

  std::optional<ProofTree> search(const Sequent& s, int depth) {
    const TermPtr& c = s.consequent;
    if (isTop(c)) return ProofTree{SeqRule::TopR, s, {}, nullptr, nullptr, 0};
    if (isAtomTerm(c) && anteContains(s, c)) return ProofTree{SeqRule::Ax, s, {}, nullptr, nullptr, 0};
    if (auto hit = proved_.find(s); hit != proved_.end()) return hit->second;
    // a sequent repeated along the branch cannot occur in a minimal proof,
    // so pruning it does not make the failure bound-relative
    if (path_.count(s)) return std::nullopt;
    if (depth <= 0) {
      hitBound_ = true;
      return std::nullopt;
    }
    if (auto miss = failedAt_.find(s); miss != failedAt_.end() && miss->second >= depth)
      return std::nullopt;
    path_[s]++;
    auto out = searchRules(s, depth);
    if (--path_[s] == 0) path_.erase(s);
    if (out) {
      proved_.emplace(s, *out);
    } else {
      auto miss = failedAt_.find(s);
      if (miss == failedAt_.end() || miss->second < depth) failedAt_[s] = depth;
    }
    return out;
  }

  std::optional<ProofTree> searchRules(const Sequent& s, int depth) {
    const TermPtr& c = s.consequent;

    Spine sp = spineOf(c);
    LogOp op = headLog(c);
    bool tryRight = !isAtomTerm(c);

    if (tryRight) {
      switch (op) {
        case LogOp::AndG:
        case LogOp::AndH: {
          auto l = search(Sequent{s.antecedents, coerce(sp.args[0], tyG()), s.index}, depth - 1);
          if (!l) break;
          auto r = search(Sequent{s.antecedents, coerce(sp.args[1], tyG()), s.index}, depth - 1);
          if (!r) break;
          return ProofTree{SeqRule::AndR, s, {std::move(*l), std::move(*r)}, nullptr, nullptr, 0};
        }
        case LogOp::OrG:
        case LogOp::OrH: {
          if (auto l = search(Sequent{s.antecedents, coerce(sp.args[0], tyG()), s.index}, depth - 1))
            return ProofTree{SeqRule::OrR1, s, {std::move(*l)}, nullptr, nullptr, 0};
          if (auto r = search(Sequent{s.antecedents, coerce(sp.args[1], tyG()), s.index}, depth - 1))
            return ProofTree{SeqRule::OrR2, s, {std::move(*r)}, nullptr, nullptr, 0};
          break;
        }
        case LogOp::ImpG: {
          Sequent s2 = extendAnte(s, sp.args[0], s.index);
          s2.consequent = coerce(sp.args[1], tyG());
          if (auto r = search(s2, depth - 1))
            return ProofTree{SeqRule::ImpR, s, {std::move(*r)}, nullptr, nullptr, 0};
          break;
        }
        case LogOp::SigmaG:
        case LogOp::SigmaH: {
          std::set<Sym> ctx;
          for (const auto& a : s.antecedents) scanSyms(a, [&](Sym x, TermKind) { ctx.insert(x); });
          scanSyms(c, [&](Sym x, TermKind) { ctx.insert(x); });
          PositiveEnumerator en(s.index, cfg_.witnessSizeBound, ctx);
          EnumResult ts = en.enumerate(sp.args[0]->type->dom);
          if (ts.truncated) hitBound_ = true;
          for (const auto& t : ts.terms) {
            Sequent s2{s.antecedents, coerce(quantInstantiate(sp.args[0], t), tyG()), s.index};
            if (auto r = search(s2, depth - 1))
              return ProofTree{SeqRule::ExR, s, {std::move(*r)}, nullptr, t, 0};
          }
          break;
        }
        case LogOp::PiG: {
          Sym cst = sig().freshConst(s.index + 1, sp.args[0]->type->dom);
          Sequent s2{s.antecedents, coerce(quantInstantiate(sp.args[0], mkConst(cst)), tyG()), s.index + 1};
          if (auto r = search(s2, depth - 1))
            return ProofTree{SeqRule::AllR, s, {std::move(*r)}, nullptr, nullptr, cst};
          break;
        }
        default: break;
      }
      if (cfg_.uniformOnly) return std::nullopt;
    }

    // left rules (the fragment admits and_l, imp_l, all_l on programs)
    for (const auto& d : s.antecedents) {
      Spine ds = spineOf(d);
      switch (headLog(d)) {
        case LogOp::AndP: {
          std::vector<TermPtr> a;
          for (const auto& x : s.antecedents)
            if (!termEq(x, d)) a.push_back(x);
          a.push_back(ds.args[0]);
          a.push_back(ds.args[1]);
          Sequent s2 = mkSequent(std::move(a), c, s.index);
          if (auto r = search(s2, depth - 1))
            return ProofTree{SeqRule::AndL, s, {std::move(*r)}, d, nullptr, 0};
          break;
        }
        case LogOp::ImpP: {
          Sequent sg{s.antecedents, coerce(ds.args[0], tyG()), s.index};
          auto g = search(sg, depth - 1);
          if (!g) break;
          Sequent sa = extendAnte(s, ds.args[1], s.index);
          auto r = search(sa, depth - 1);
          if (!r) break;
          return ProofTree{SeqRule::ImpL, s, {std::move(*g), std::move(*r)}, d, nullptr, 0};
        }
        case LogOp::PiP: {
          std::set<Sym> ctx;
          for (const auto& a : s.antecedents) scanSyms(a, [&](Sym x, TermKind) { ctx.insert(x); });
          scanSyms(c, [&](Sym x, TermKind) { ctx.insert(x); });
          PositiveEnumerator en(s.index, cfg_.witnessSizeBound, ctx);
          EnumResult ts = en.enumerate(ds.args[0]->type->dom);
          if (ts.truncated) hitBound_ = true;
          for (const auto& t : ts.terms) {
            Sequent s2 = extendAnte(s, quantInstantiate(ds.args[0], t), s.index);
            if (auto r = search(s2, depth - 1))
              return ProofTree{SeqRule::AllL, s, {std::move(*r)}, d, t, 0};
          }
          break;
        }
        case LogOp::OrG:
        case LogOp::OrH: {
          if (!cfg_.allowLeftSplit) break;
          auto minus = [&](const TermPtr& x) {
            std::vector<TermPtr> a;
            for (const auto& y : s.antecedents)
              if (!termEq(y, x)) a.push_back(y);
            return a;
          };
          std::vector<TermPtr> a1 = minus(d), a2 = minus(d);
          a1.push_back(ds.args[0]);
          a2.push_back(ds.args[1]);
          auto l = search(mkSequent(std::move(a1), c, s.index), depth - 1);
          if (!l) break;
          auto r = search(mkSequent(std::move(a2), c, s.index), depth - 1);
          if (!r) break;
          return ProofTree{SeqRule::OrL, s, {std::move(*l), std::move(*r)}, d, nullptr, 0};
        }
        case LogOp::SigmaG:
        case LogOp::SigmaH: {
          if (!cfg_.allowLeftSplit) break;
          Sym cst = sig().freshConst(s.index + 1, ds.args[0]->type->dom);
          std::vector<TermPtr> a;
          for (const auto& y : s.antecedents)
            if (!termEq(y, d)) a.push_back(y);
          a.push_back(quantInstantiate(ds.args[0], mkConst(cst)));
          if (auto r = search(mkSequent(std::move(a), c, s.index + 1), depth - 1))
            return ProofTree{SeqRule::ExL, s, {std::move(*r)}, d, nullptr, cst};
          break;
        }
        default: break;
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail_seq

inline ProveResult proveCutFree(const Sequent& s, int depth, ProverConfig cfg = {}) {
  return detail_seq::Prover(cfg).prove(s, depth);
}

inline Sequent sequentOf(int index, const Program& p, const TermPtr& goal) {
  return mkSequent(p.formulas(), coerce(normalize(goal), tyG()), index);
}

// --- tree validation and uniformity -------------------------------------------

// G3-style validation: each node must instantiate its rule schema; premises
// may carry antecedent supersets (weakening/contraction are admissible).
inline bool validProof(const ProofTree& t, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const Sequent& s = t.conclusion;
  auto anteSuperset = [&](const ProofTree& p, const std::vector<TermPtr>& extra) {
    for (const auto& a : s.antecedents) {
      bool drop = false;
      if (t.rule == SeqRule::AndL && t.principal && termEq(a, t.principal)) drop = true;
      if (!drop && !anteContains(p.conclusion, a)) return false;
    }
    for (const auto& e : extra)
      if (!anteContains(p.conclusion, e)) return false;
    return true;
  };
  switch (t.rule) {
    case SeqRule::TopR: return isTop(s.consequent) || fail("top_r needs a top consequent");
    case SeqRule::Ax:
      return (isAtomTerm(s.consequent) && anteContains(s, s.consequent)) || fail("ax needs an antecedent atom");
    case SeqRule::AndR: {
      Spine sp = spineOf(s.consequent);
      LogOp op = headLog(s.consequent);
      if ((op != LogOp::AndG && op != LogOp::AndH) || t.premises.size() != 2) return fail("and_r shape");
      if (!termEq(t.premises[0].conclusion.consequent, sp.args[0]) ||
          !termEq(t.premises[1].conclusion.consequent, sp.args[1]))
        return fail("and_r premises");
      if (!anteSuperset(t.premises[0], {}) || !anteSuperset(t.premises[1], {})) return fail("and_r antecedents");
      return validProof(t.premises[0], why) && validProof(t.premises[1], why);
    }
    case SeqRule::OrR1:
    case SeqRule::OrR2: {
      Spine sp = spineOf(s.consequent);
      LogOp op = headLog(s.consequent);
      if ((op != LogOp::OrG && op != LogOp::OrH) || t.premises.size() != 1) return fail("or_r shape");
      const TermPtr& want = sp.args[t.rule == SeqRule::OrR1 ? 0 : 1];
      if (!termEq(t.premises[0].conclusion.consequent, want)) return fail("or_r premise");
      if (!anteSuperset(t.premises[0], {})) return fail("or_r antecedents");
      return validProof(t.premises[0], why);
    }
    case SeqRule::ImpR: {
      Spine sp = spineOf(s.consequent);
      if (headLog(s.consequent) != LogOp::ImpG || t.premises.size() != 1) return fail("imp_r shape");
      if (!termEq(t.premises[0].conclusion.consequent, sp.args[1])) return fail("imp_r premise");
      if (!anteSuperset(t.premises[0], {sp.args[0]})) return fail("imp_r antecedents");
      return validProof(t.premises[0], why);
    }
    case SeqRule::ExR: {
      Spine sp = spineOf(s.consequent);
      LogOp op = headLog(s.consequent);
      if ((op != LogOp::SigmaG && op != LogOp::SigmaH) || t.premises.size() != 1 || !t.witness)
        return fail("ex_r shape");
      if (t.witness->level > s.index) return fail("ex_r witness level");
      if (!termEq(t.premises[0].conclusion.consequent, quantInstantiate(sp.args[0], t.witness)))
        return fail("ex_r premise");
      if (!anteSuperset(t.premises[0], {})) return fail("ex_r antecedents");
      return validProof(t.premises[0], why);
    }
    case SeqRule::AllR: {
      Spine sp = spineOf(s.consequent);
      if (headLog(s.consequent) != LogOp::PiG || t.premises.size() != 1 || !t.eigen) return fail("all_r shape");
      if (symLevel(t.eigen) != s.index + 1) return fail("all_r eigenconstant level");
      for (const auto& a : s.antecedents)
        if (occursSym(a, t.eigen)) return fail("all_r eigenconstant not fresh");
      if (occursSym(s.consequent, t.eigen)) return fail("all_r eigenconstant not fresh");
      if (!termEq(t.premises[0].conclusion.consequent, quantInstantiate(sp.args[0], mkConst(t.eigen))))
        return fail("all_r premise");
      if (t.premises[0].conclusion.index != s.index + 1) return fail("all_r index");
      if (!anteSuperset(t.premises[0], {})) return fail("all_r antecedents");
      return validProof(t.premises[0], why);
    }
    case SeqRule::AndL: {
      if (!t.principal || t.premises.size() != 1) return fail("and_l shape");
      Spine dp = spineOf(t.principal);
      if (headLog(t.principal) != LogOp::AndP || !anteContains(s, t.principal)) return fail("and_l principal");
      if (!termEq(t.premises[0].conclusion.consequent, s.consequent)) return fail("and_l consequent");
      if (!anteSuperset(t.premises[0], {dp.args[0], dp.args[1]})) return fail("and_l antecedents");
      return validProof(t.premises[0], why);
    }
    case SeqRule::ImpL: {
      if (!t.principal || t.premises.size() != 2) return fail("imp_l shape");
      Spine dp = spineOf(t.principal);
      if (headLog(t.principal) != LogOp::ImpP || !anteContains(s, t.principal)) return fail("imp_l principal");
      if (!termEq(t.premises[0].conclusion.consequent, coerce(dp.args[0], tyG()))) return fail("imp_l left premise");
      if (!termEq(t.premises[1].conclusion.consequent, s.consequent)) return fail("imp_l right premise");
      if (!anteSuperset(t.premises[0], {}) || !anteSuperset(t.premises[1], {dp.args[1]}))
        return fail("imp_l antecedents");
      return validProof(t.premises[0], why) && validProof(t.premises[1], why);
    }
    case SeqRule::AllL: {
      if (!t.principal || t.premises.size() != 1 || !t.witness) return fail("all_l shape");
      Spine dp = spineOf(t.principal);
      if (headLog(t.principal) != LogOp::PiP || !anteContains(s, t.principal)) return fail("all_l principal");
      if (t.witness->level > s.index) return fail("all_l witness level");
      if (!termEq(t.premises[0].conclusion.consequent, s.consequent)) return fail("all_l consequent");
      if (!anteSuperset(t.premises[0], {quantInstantiate(dp.args[0], t.witness)})) return fail("all_l antecedents");
      return validProof(t.premises[0], why);
    }
    default: return fail("rule outside the fragment");
  }
}

// Uniformity: program antecedents / goal consequents everywhere, positive
// witnesses at all_l / ex_r, and right rules at every nonatomic consequent.
inline bool isUniform(const ProofTree& t) {
  for (const auto& a : t.conclusion.antecedents)
    if (!isProgramFormula(coerce(a, tyP()))) return false;
  if (!isGoalFormula(t.conclusion.consequent)) return false;
  bool nonatomic = !isAtomTerm(t.conclusion.consequent) && !isTop(t.conclusion.consequent);
  switch (t.rule) {
    case SeqRule::AndL:
    case SeqRule::ImpL:
    case SeqRule::AllL:
      if (nonatomic) return false;
      break;
    default: break;
  }
  if ((t.rule == SeqRule::AllL || t.rule == SeqRule::ExR) && t.witness && !isPositive(t.witness)) return false;
  for (const auto& p : t.premises)
    if (!isUniform(p)) return false;
  return true;
}

// Bounded Lindenbaum comparison: provability of s1 implies provability of
// s2, decided within the depth bound.
enum class LeqT : uint8_t { HoldsWithinBounds, FailsWithinBounds, Unknown };

inline LeqT leqT(const Sequent& s1, const Sequent& s2, int depth, ProverConfig cfg = {}) {
  ProveResult a = proveCutFree(s1, depth, cfg);
  if (a.status == ProveStatus::Refuted) return LeqT::HoldsWithinBounds;  // vacuous
  if (a.status == ProveStatus::Exhausted) return LeqT::Unknown;
  ProveResult b = proveCutFree(s2, depth, cfg);
  if (b.status == ProveStatus::Proved) return LeqT::HoldsWithinBounds;
  if (b.status == ProveStatus::Refuted) return LeqT::FailsWithinBounds;
  return LeqT::Unknown;
}

}  // namespace uctt
