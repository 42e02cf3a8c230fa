#pragma once

#include "sequent.hpp"

namespace uctt {

// Mutual translations between flat identity-answer resolution derivations of
// a single state and uniform cut-free proofs, following the equivalence
// theorem's two directions: backchain corresponds to a left segment ending
// in imp-L, generic to all-R with the level-(i+1) constant, and so on.

namespace detail_tr {

inline ProofTree weakenTree(const ProofTree& t, const std::vector<TermPtr>& extras) {
  ProofTree out = t;
  std::vector<TermPtr> a = out.conclusion.antecedents;
  for (const auto& e : extras) a.push_back(e);
  out.conclusion = mkSequent(std::move(a), out.conclusion.consequent, out.conclusion.index);
  out.premises.clear();
  for (const auto& p : t.premises) out.premises.push_back(weakenTree(p, extras));
  return out;
}

// Per-state actions recorded while replaying a flat derivation.
struct NodeAction {
  Rule rule;
  const Step* step = nullptr;
  State state;                 // the state when the step fired
  std::vector<int> children;   // tags of spawned states
};

struct TagReplay {
  std::vector<NodeAction> actions;  // indexed by tag

  // returns root tags in vector order
  std::vector<int> run(const Derivation& d) {
    std::vector<int> tags;
    StateVector cur = d.initial;
    for (const auto& s : d.initial) {
      tags.push_back((int)actions.size());
      actions.push_back(NodeAction{Rule::Null, nullptr, s, {}});
    }
    std::vector<int> roots = tags;
    for (size_t i = 0; i < d.steps.size(); i++) {
      const Step& st = d.steps[i];
      int tag = tags[(size_t)st.pos];
      State snapshot = cur[(size_t)st.pos];
      const StateVector& next = d.after[i];
      // splice children tags per rule arity; note push_back may reallocate,
      // so the action entry is only written afterwards
      int spawned = (int)next.size() - (int)cur.size() + 1;  // states replacing the selected one
      std::vector<int> childTags;
      for (int k = 0; k < spawned; k++) {
        childTags.push_back((int)actions.size());
        actions.push_back(NodeAction{Rule::Null, nullptr, next[(size_t)(st.pos + k)], {}});
      }
      NodeAction& act = actions[(size_t)tag];
      act.rule = st.rule;
      act.step = &st;
      act.state = snapshot;
      act.children = childTags;
      std::vector<int> ntags;
      for (int k = 0; k < st.pos; k++) ntags.push_back(tags[(size_t)k]);
      for (int c : childTags) ntags.push_back(c);
      for (size_t k = (size_t)st.pos + 1; k < tags.size(); k++) ntags.push_back(tags[k]);
      tags = std::move(ntags);
      cur = next;
    }
    return roots;
  }
};

}  // namespace detail_tr

// --- derivation -> uniform proof ----------------------------------------------

namespace detail_tr {

struct D2P {
  const TagReplay& tr;

  ProofTree build(int tag) {
    const NodeAction& act = tr.actions[(size_t)tag];
    const State& s = act.state;
    Sequent seq = mkSequent(s.program.formulas(), s.goal, s.index);
    if (act.step == nullptr) throw NotSingleState("derivation leaves an unfinished state");
    Spine sp = spineOf(s.goal);
    switch (act.rule) {
      case Rule::Null:
        return ProofTree{SeqRule::TopR, seq, {}, nullptr, nullptr, 0};
      case Rule::Or: {
        ProofTree sub = build(act.children[0]);
        return ProofTree{act.step->orBranch == 1 ? SeqRule::OrR1 : SeqRule::OrR2, seq, {std::move(sub)},
                         nullptr, nullptr, 0};
      }
      case Rule::And: {
        ProofTree l = build(act.children[0]);
        ProofTree r = build(act.children[1]);
        return ProofTree{SeqRule::AndR, seq, {std::move(l), std::move(r)}, nullptr, nullptr, 0};
      }
      case Rule::Augment: {
        ProofTree sub = build(act.children[0]);
        return ProofTree{SeqRule::ImpR, seq, {std::move(sub)}, nullptr, nullptr, 0};
      }
      case Rule::Instance: {
        ProofTree sub = build(act.children[0]);
        return ProofTree{SeqRule::ExR, seq, {std::move(sub)}, nullptr, act.step->witness, 0};
      }
      case Rule::Generic: {
        ProofTree sub = build(act.children[0]);
        return ProofTree{SeqRule::AllR, seq, {std::move(sub)}, nullptr, nullptr, act.step->genConst};
      }
      case Rule::Backchain:
      case Rule::Axiom:
        return leftSegment(act, seq);
      default:
        throw NotUniform("true/sub steps have no uniform counterpart");
    }
  }

  // Decompose the program formula owning the clause with and_l / all_l down
  // to the used instance, then close with ax (axiom) or imp_l (backchain).
  ProofTree leftSegment(const NodeAction& act, const Sequent& seq) {
    const Step& st = *act.step;
    const State& s = act.state;
    // witnesses: delta variables' values under gamma, in binder order
    std::vector<TermPtr> witnesses;
    for (Sym w : st.deltaVars) witnesses.push_back(st.sub.lookup(w));
    // locate the program formula whose elab contains the clause
    TermPtr owner;
    for (const auto& d : s.program.formulas()) {
      for (const auto& k : elab(d))
        if (k == st.clause) { owner = d; break; }
      if (owner) break;
    }
    if (!owner) throw NotUniform("clause has no owner in the program");
    return descend(seq, owner, st.clause.term, witnesses, 0, act);
  }

  ProofTree descend(const Sequent& seq, const TermPtr& cur, const TermPtr& clauseRest,
                    std::vector<TermPtr>& wit, size_t wi, const NodeAction& act) {
    Spine cs = spineOf(cur);
    switch (headLog(cur)) {
      case LogOp::PiP: {
        // the outermost forall of the path is the next clause binder
        TermPtr t = wit[wi];
        Spine rs = spineOf(clauseRest);
        TermPtr curInst = quantInstantiate(cs.args[0], t);
        TermPtr restInst = quantInstantiate(rs.args[0], t);
        Sequent sub = extendAnte(seq, curInst, seq.index);
        ProofTree below = descend(sub, curInst, restInst, wit, wi + 1, act);
        return ProofTree{SeqRule::AllL, seq, {std::move(below)}, cur, t, 0};
      }
      case LogOp::AndP: {
        // follow the side whose elaboration contains the remaining clause
        Clause want = makeClause(clauseRest);
        TermPtr next;
        for (int side = 0; side < 2 && !next; side++)
          for (const auto& k : elabOfSide(cs.args[(size_t)side], wit, wi))
            if (termEq(k, clauseRest)) { next = cs.args[(size_t)side]; break; }
        if (!next) throw NotUniform("clause path lost in a conjunction");
        Sequent sub = seq;
        sub = extendAnte(sub, cs.args[0], seq.index);
        sub = extendAnte(sub, cs.args[1], seq.index);
        ProofTree below = descend(sub, next, clauseRest, wit, wi, act);
        return ProofTree{SeqRule::AndL, seq, {std::move(below)}, cur, nullptr, 0};
      }
      default: {
        // fully instantiated: bare atom -> ax; implication -> imp_l
        const Step& st = *act.step;
        if (st.rule == Rule::Axiom) {
          if (!anteContains(seq, act.state.goal))
            throw NotUniform("instantiated head missing from the antecedents");
          return ProofTree{SeqRule::Ax, seq, {}, nullptr, nullptr, 0};
        }
        Spine is = spineOf(cur);
        if (headLog(cur) != LogOp::ImpP) throw NotUniform("expected a clause instance");
        TermPtr goalG = coerce(is.args[0], tyG());
        TermPtr headA = is.args[1];
        ProofTree leftSub = build(act.children[0]);
        // the recursive proof is over the bare program; weaken it to this
        // sequent's (decomposed) antecedents
        std::vector<TermPtr> extras;
        for (const auto& a : seq.antecedents)
          if (!anteContains(leftSub.conclusion, a)) extras.push_back(a);
        if (!extras.empty()) leftSub = weakenTree(leftSub, extras);
        Sequent axSeq = extendAnte(seq, headA, seq.index);
        ProofTree axTree{SeqRule::Ax, axSeq, {}, nullptr, nullptr, 0};
        return ProofTree{SeqRule::ImpL, seq, {std::move(leftSub), std::move(axTree)}, cur, nullptr, 0};
      }
    }
  }

  static std::vector<TermPtr> elabOfSide(const TermPtr& side, const std::vector<TermPtr>&, size_t) {
    std::vector<TermPtr> out;
    for (const auto& k : elab(side)) out.push_back(k.term);
    return out;
  }
};

}  // namespace detail_tr

// Part (i) direction input: a successful identity-answer derivation of one
// initial state. Non-flat inputs are flattened first.
inline ProofTree derivationToProof(const Derivation& d0) {
  if (d0.initial.size() != 1) throw NotSingleState("derivationToProof expects one initial state");
  if (!d0.successful() || !d0.computedAnswer.isId())
    throw HypothesisUnmet("derivationToProof needs an identity-answer success");
  Derivation d = isFlat(d0) ? d0 : instantiate(d0);
  detail_tr::TagReplay tr;
  std::vector<int> roots = tr.run(d);
  detail_tr::D2P builder{tr};
  return builder.build(roots[0]);
}

// --- uniform proof -> derivation ----------------------------------------------

namespace detail_tr {

inline Program programOf(const Sequent& s) { return Program::of(s.antecedents); }

inline Derivation prepend(const State& st0, Rule rule, const Derivation& rest, int orBranch = 1,
                          TermPtr witness = nullptr, Sym gen = 0) {
  Step s;
  s.rule = rule;
  s.orBranch = orBranch;
  s.witness = witness;
  s.genConst = gen;
  std::vector<Step> steps{s};
  for (const auto& x : rest.steps) steps.push_back(x);
  return replaySteps({st0}, std::move(steps));
}

inline Derivation p2d(const ProofTree& t);

// Rewrites every backchain/axiom step citing a clause of elab(dtx) that is
// not already justified by `target` so that it cites the shifted clause of
// forall x D instead, then drops dtx from the initial program.
inline Derivation absorbAllL(const Derivation& d, const TermPtr& forallD, const TermPtr& dtx,
                             const TermPtr& witness, const Program& target) {
  std::vector<Step> steps = d.steps;
  for (auto& st : steps) {
    if (st.rule != Rule::Backchain && st.rule != Rule::Axiom) continue;
    bool inDtx = false;
    for (const auto& k : elab(dtx))
      if (k == st.clause) { inDtx = true; break; }
    if (!inDtx || target.hasClause(st.clause)) continue;
    auto shifted = shiftWitness(forallD, witness, st.clause);
    if (!shifted) throw NotUniform("elab-shift witness not found");
    st.clause = *shifted;
    Sym wNew = sig().freshVar(witness->level, shifted->binderTys[0]);
    std::vector<Sym> dv{wNew};
    for (Sym x : st.deltaVars) dv.push_back(x);
    st.deltaVars = std::move(dv);
    st.sub.bind(wNew, witness);
  }
  StateVector init = d.initial;
  std::vector<TermPtr> ds;
  bool dropped = false;
  for (const auto& f : init[0].program.formulas()) {
    if (!dropped && termEq(f, dtx)) { dropped = true; continue; }
    ds.push_back(f);
  }
  init[0].program = Program::of(std::move(ds));
  return replaySteps(std::move(init), std::move(steps));
}

// imp_l absorption: replace every axiom citing the bare clause A by a
// backchain against G => A followed by the (adjusted) derivation of G.
inline Derivation absorbImpL(Derivation d, const TermPtr& impClause, const Derivation& dG,
                             const Program& target) {
  Spine is = spineOf(impClause);
  TermPtr goalG = coerce(is.args[0], tyG());
  TermPtr atomA = is.args[1];
  Clause bareA = makeClause(normalize(atomA));
  Clause impC = makeClause(impClause);
  for (;;) {
    int hit = -1;
    for (size_t i = 0; i < d.steps.size(); i++) {
      const Step& st = d.steps[i];
      if ((st.rule == Rule::Axiom || st.rule == Rule::Backchain) && st.clause == bareA &&
          !target.hasClause(bareA)) {
        hit = (int)i;
        break;
      }
    }
    if (hit < 0) break;
    const Step& ax = d.steps[(size_t)hit];
    const StateVector& before = hit == 0 ? d.initial : d.after[(size_t)hit - 1];
    const State& site = before[(size_t)ax.pos];
    // backchain against G => A at the site
    Step bc;
    bc.rule = Rule::Backchain;
    bc.pos = ax.pos;
    bc.clause = impC;
    // adjust the G derivation to the site's index and program
    Derivation g = dG;
    for (int k = site.index - vectorMinIndex(g.initial); k > 0; k--) g = levelIncrease(g);
    g = weakenProgram(g, site.program, 0);
    StateVector prefixStates(before.begin(), before.begin() + ax.pos);
    StateVector suffixStates(before.begin() + ax.pos + 1, before.end());
    Derivation emb = embedDerivation(g, prefixStates, suffixStates);
    std::vector<Step> steps(d.steps.begin(), d.steps.begin() + hit);
    steps.push_back(bc);
    for (const auto& x : emb.steps) {
      Step y = x;
      steps.push_back(y);
    }
    for (size_t i = (size_t)hit + 1; i < d.steps.size(); i++) steps.push_back(d.steps[i]);
    d = replaySteps(d.initial, std::move(steps));
  }
  // drop the bare A from the initial program
  StateVector init = d.initial;
  std::vector<TermPtr> ds;
  bool dropped = false;
  for (const auto& f : init[0].program.formulas()) {
    if (!dropped && termEq(f, normalize(atomA))) { dropped = true; continue; }
    ds.push_back(f);
  }
  init[0].program = Program::of(std::move(ds));
  return replaySteps(std::move(init), d.steps);
}

inline Derivation p2d(const ProofTree& t) {
  const Sequent& s = t.conclusion;
  Program p = programOf(s);
  State st0 = mkState(s.index, p, s.consequent);
  Spine sp = spineOf(s.consequent);
  switch (t.rule) {
    case SeqRule::TopR: {
      Step n;
      n.rule = Rule::Null;
      return replaySteps({st0}, {n});
    }
    case SeqRule::Ax: {
      Step n;
      n.rule = Rule::Axiom;
      n.clause = makeClause(normalize(s.consequent));
      return replaySteps({st0}, {n});
    }
    case SeqRule::AndR: {
      Derivation l = p2d(t.premises[0]);
      Derivation r = p2d(t.premises[1]);
      Derivation prod = product(l, r);
      Step n;
      n.rule = Rule::And;
      std::vector<Step> steps{n};
      for (const auto& x : prod.steps) steps.push_back(x);
      return replaySteps({st0}, std::move(steps));
    }
    case SeqRule::OrR1:
    case SeqRule::OrR2:
      return prepend(st0, Rule::Or, p2d(t.premises[0]), t.rule == SeqRule::OrR1 ? 1 : 2);
    case SeqRule::ImpR:
      return prepend(st0, Rule::Augment, p2d(t.premises[0]));
    case SeqRule::ExR:
      return prepend(st0, Rule::Instance, p2d(t.premises[0]), 1, t.witness);
    case SeqRule::AllR:
      return prepend(st0, Rule::Generic, p2d(t.premises[0]), 1, nullptr, t.eigen);
    case SeqRule::AndL: {
      Derivation sub = p2d(t.premises[0]);
      return weakenProgram(sub, p, 0);
    }
    case SeqRule::AllL: {
      Spine dp = spineOf(t.principal);
      TermPtr dtx = normalize(quantInstantiate(dp.args[0], t.witness));
      // instances already among the antecedents make the rule a no-op
      if (anteContains(s, dtx)) return p2d(t.premises[0]);
      Derivation sub = p2d(t.premises[0]);
      return absorbAllL(sub, t.principal, dtx, t.witness, p);
    }
    case SeqRule::ImpL: {
      Spine dp = spineOf(t.principal);
      Derivation dG = p2d(t.premises[0]);
      Derivation dC = p2d(t.premises[1]);
      Clause bareA = makeClause(normalize(dp.args[1]));
      if (p.hasClause(bareA)) return weakenProgram(dC, p, 0);
      return absorbImpL(dC, t.principal, dG, p);
    }
    default:
      throw NotUniform("rule outside the uniform fragment");
  }
}

}  // namespace detail_tr

inline Derivation proofToDerivation(const ProofTree& t, int index) {
  if (!isUniform(t)) throw NotUniform("proofToDerivation expects a uniform proof");
  if (t.conclusion.index > index) throw HypothesisUnmet("proof index above the requested level");
  Derivation d = detail_tr::p2d(t);
  for (int k = index - vectorMinIndex(d.initial); k > 0; k--) d = levelIncrease(d);
  return d;
}

}  // namespace uctt
