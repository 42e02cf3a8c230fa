#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "state.hpp"

namespace uctt {

// Concrete-syntax printer matching the CLI grammar; parseGoal(print(g))
// round-trips on formulas. Bound variables get depth-indexed names.
namespace detail_print {

inline std::string boundName(int depthFromRoot) { return "X" + std::to_string(depthFromRoot + 1); }

struct Printer {
  std::vector<std::string> binders;  // innermost last

  std::string atomArg(const TermPtr& t) {
    std::string s = go(t);
    if (t->kind == TermKind::App || t->kind == TermKind::Abs) return "(" + s + ")";
    return s;
  }

  std::string go(const TermPtr& t) {
    Spine sp = spineOf(t);
    if (sp.head->kind == TermKind::Const && isLogical(sp.head->sym)) {
      LogOp op = symLog(sp.head->sym);
      switch (op) {
        case LogOp::TopG:
        case LogOp::TopH:
          if (sp.args.empty()) return "true";
          break;
        case LogOp::AndP:
        case LogOp::AndG:
        case LogOp::AndH:
          if (sp.args.size() == 2) return "(" + go(sp.args[0]) + " , " + go(sp.args[1]) + ")";
          break;
        case LogOp::OrG:
        case LogOp::OrH:
          if (sp.args.size() == 2) return "(" + go(sp.args[0]) + " ; " + go(sp.args[1]) + ")";
          break;
        case LogOp::ImpG:
          if (sp.args.size() == 2) return "(" + go(sp.args[0]) + " => " + go(sp.args[1]) + ")";
          break;
        case LogOp::ImpP:
          if (sp.args.size() == 2) return "(" + go(sp.args[1]) + " :- " + go(sp.args[0]) + ")";
          break;
        case LogOp::SigmaG:
        case LogOp::SigmaH:
          if (sp.args.size() == 1) return quant("sigma", sp.args[0]);
          break;
        case LogOp::PiG:
        case LogOp::PiP:
        case LogOp::PiH:
          if (sp.args.size() == 1) return quant("pi", sp.args[0]);
          break;
        default: break;
      }
    }
    switch (t->kind) {
      case TermKind::Const:
      case TermKind::Var: return symdata(t->sym).name;
      case TermKind::Bound: {
        int k = (int)binders.size() - 1 - t->idx;
        if (k < 0) return "#" + std::to_string(t->idx);
        return binders[k];
      }
      case TermKind::App: {
        std::string s = go(sp.head);
        for (const auto& a : sp.args) s += " " + atomArg(a);
        return s;
      }
      case TermKind::Abs: {
        std::string x = detail_print::boundName((int)binders.size());
        binders.push_back(x);
        std::string body = go(t->c0);
        binders.pop_back();
        return x + "\\ " + body;
      }
    }
    return "?";
  }

  std::string quant(const char* kw, const TermPtr& f) {
    std::string x = detail_print::boundName((int)binders.size());
    TermPtr body = f->kind == TermKind::Abs
                       ? f->c0
                       : normalizeOpen(mkApp(shift(f, 1), mkBound(0, f->type->dom)));
    binders.push_back(x);
    std::string b = go(body);
    binders.pop_back();
    // the annotation keeps vacuous binders parseable
    return "(" + std::string(kw) + " " + x + ":" + typeName(f->type->dom) + "\\ " + b + ")";
  }
};

}  // namespace detail_print

inline std::string printTerm(const TermPtr& t) {
  detail_print::Printer p;
  return p.go(t);
}

inline std::string printSubst(const Subst& s) {
  if (s.isId()) return "{}";
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += printTerm(t) + "/" + symdata(x).name;
  }
  return out + "}";
}

inline std::string printProgram(const Program& p) {
  std::string out = "{";
  bool first = true;
  for (const auto& d : p.formulas()) {
    if (!first) out += ", ";
    first = false;
    out += printTerm(d);
  }
  return out + "}";
}

inline std::string printState(const State& s) {
  std::ostringstream os;
  os << "<" << s.index << ", " << printProgram(s.program) << " ?- " << printTerm(s.goal) << ">";
  return os.str();
}

inline std::string printVector(const StateVector& v) {
  if (v.empty()) return "[]";
  std::string out;
  for (size_t i = 0; i < v.size(); i++) {
    if (i) out += " (x) ";
    out += printState(v[i]);
  }
  return out;
}

}  // namespace uctt
