#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "types.hpp"

namespace uctt {

using Sym = uint32_t;

enum class SymKind : uint8_t { Const, FreeVar };

// The built-in logical constants of UCTT. Sigma/Pi are type-indexed families.
enum class LogOp : uint8_t {
  None, TopG, TopH, AndP, AndG, AndH, OrG, OrH,
  ImpG,  // p -> g -> g  (D => G in goals)
  ImpP,  // g -> r -> p  (G :- A_r clauses)
  SigmaG, SigmaH, PiG, PiP, PiH
};

struct SymbolData {
  Sym id;
  std::string name;
  TypePtr type;
  int level;
  SymKind kind;
  LogOp log = LogOp::None;
};

// Session-scoped symbol table. Levels are immutable, (name, kind) unique.
// The fresh counter is the only mutable state in the kernel; it is held
// behind a mutex so concurrent solves stay safe.
class Signature {
 public:
  Signature() { installLogical(); }

  const SymbolData& operator[](Sym s) const {
    std::lock_guard<std::mutex> g(mu_);
    return syms_[s];
  }

  Sym intern(const std::string& name, const TypePtr& type, int level, SymKind kind) {
    std::lock_guard<std::mutex> g(mu_);
    auto it = byName_.find({name, kind});
    if (it != byName_.end()) {
      const SymbolData& d = syms_[it->second];
      if (!typeEqual(d.type, type) || d.level != level)
        throw TypeError("symbol '" + name + "' redeclared with a different type or level");
      return it->second;
    }
    return add(name, type, level, kind, LogOp::None);
  }

  Sym lookup(const std::string& name, SymKind kind) const {
    std::lock_guard<std::mutex> g(mu_);
    auto it = byName_.find({name, kind});
    if (it == byName_.end()) throw UnknownSymbol(name);
    return it->second;
  }

  bool known(const std::string& name, SymKind kind) const {
    std::lock_guard<std::mutex> g(mu_);
    return byName_.count({name, kind}) != 0;
  }

  Sym freshVar(int level, const TypePtr& type) {
    std::lock_guard<std::mutex> g(mu_);
    return add("_V" + std::to_string(syms_.size()), type, level, SymKind::FreeVar, LogOp::None);
  }

  Sym freshConst(int level, const TypePtr& type) {
    std::lock_guard<std::mutex> g(mu_);
    return add("_c" + std::to_string(syms_.size()), type, level, SymKind::Const, LogOp::None);
  }

  Sym logical(LogOp op, const TypePtr& alpha = nullptr) {
    std::lock_guard<std::mutex> g(mu_);
    return logicalLocked(op, alpha);
  }

  // Canonical fresh constant of level i used by the T operator's forall
  // clause. `shift` selects an alternative supply for the invariance test.
  Sym canonicalConst(int level, const TypePtr& alpha, int shift = 0) {
    std::lock_guard<std::mutex> g(mu_);
    CanonKey k{level, typeHash(alpha) ^ (size_t)shift * 0x85ebca6bu, typeName(alpha), shift};
    auto it = canon_.find(k);
    if (it != canon_.end()) return it->second;
    Sym s = add("_k" + std::to_string(level) + "s" + std::to_string(shift) + "n" + std::to_string(syms_.size()),
                alpha, level, SymKind::Const, LogOp::None);
    canon_.emplace(k, s);
    return s;
  }

  // Designated free variable used when bounded enumerations include an
  // open witness of a given type and level.
  Sym enumVar(int level, const TypePtr& alpha) {
    std::lock_guard<std::mutex> g(mu_);
    CanonKey k{level, typeHash(alpha), typeName(alpha), -1};
    auto it = canon_.find(k);
    if (it != canon_.end()) return it->second;
    Sym s = add("_E" + std::to_string(level) + "n" + std::to_string(syms_.size()),
                alpha, level, SymKind::FreeVar, LogOp::None);
    canon_.emplace(k, s);
    return s;
  }

  // Constants declared by the user (level <= bound), for term enumeration.
  std::vector<Sym> userConsts(int maxLevel) const {
    std::lock_guard<std::mutex> g(mu_);
    std::vector<Sym> out;
    for (const auto& d : syms_)
      if (d.kind == SymKind::Const && d.log == LogOp::None && d.level <= maxLevel &&
          !d.name.empty() && d.name[0] != '_' && d.name.find('$') == std::string::npos)
        out.push_back(d.id);
    return out;
  }

  size_t size() const {
    std::lock_guard<std::mutex> g(mu_);
    return syms_.size();
  }

 private:
  struct CanonKey {
    int level;
    size_t tyHash;
    std::string tyName;
    int shift;
    bool operator<(const CanonKey& o) const {
      return std::tie(level, tyHash, tyName, shift) < std::tie(o.level, o.tyHash, o.tyName, o.shift);
    }
  };

  Sym add(const std::string& name, const TypePtr& type, int level, SymKind kind, LogOp op) {
    Sym id = (Sym)syms_.size();
    syms_.push_back(SymbolData{id, name, type, level, kind, op});
    byName_.emplace(std::make_pair(name, kind), id);
    return id;
  }

  Sym logicalLocked(LogOp op, const TypePtr& alpha) {
    LogKey k{op, alpha ? typeName(alpha) : std::string()};
    auto it = logical_.find(k);
    if (it != logical_.end()) return it->second;
    TypePtr ty;
    std::string nm;
    switch (op) {
      case LogOp::TopG: ty = tyG(); nm = "top@g"; break;
      case LogOp::TopH: ty = tyH(); nm = "top@h"; break;
      case LogOp::AndP: ty = arrow(tyP(), arrow(tyP(), tyP())); nm = "and@p"; break;
      case LogOp::AndG: ty = arrow(tyG(), arrow(tyG(), tyG())); nm = "and@g"; break;
      case LogOp::AndH: ty = arrow(tyH(), arrow(tyH(), tyH())); nm = "and@h"; break;
      case LogOp::OrG: ty = arrow(tyG(), arrow(tyG(), tyG())); nm = "or@g"; break;
      case LogOp::OrH: ty = arrow(tyH(), arrow(tyH(), tyH())); nm = "or@h"; break;
      case LogOp::ImpG: ty = arrow(tyP(), arrow(tyG(), tyG())); nm = "imp@g"; break;
      case LogOp::ImpP: ty = arrow(tyG(), arrow(tyR(), tyP())); nm = "imp@p"; break;
      case LogOp::SigmaG: ty = arrow(arrow(alpha, tyG()), tyG()); nm = "sigma@g<" + typeName(alpha) + ">"; break;
      case LogOp::SigmaH: ty = arrow(arrow(alpha, tyH()), tyH()); nm = "sigma@h<" + typeName(alpha) + ">"; break;
      case LogOp::PiG: ty = arrow(arrow(alpha, tyG()), tyG()); nm = "pi@g<" + typeName(alpha) + ">"; break;
      case LogOp::PiP: ty = arrow(arrow(alpha, tyP()), tyP()); nm = "pi@p<" + typeName(alpha) + ">"; break;
      case LogOp::PiH: ty = arrow(arrow(alpha, tyH()), tyH()); nm = "pi@h<" + typeName(alpha) + ">"; break;
      default: throw Error("bad logical op");
    }
    Sym s = add(nm, ty, 0, SymKind::Const, op);
    logical_.emplace(k, s);
    return s;
  }

  void installLogical() {
    std::lock_guard<std::mutex> g(mu_);
    for (LogOp op : {LogOp::TopG, LogOp::TopH, LogOp::AndP, LogOp::AndG, LogOp::AndH,
                     LogOp::OrG, LogOp::OrH, LogOp::ImpG, LogOp::ImpP})
      logicalLocked(op, nullptr);
  }

  struct LogKey {
    LogOp op;
    std::string ty;
    bool operator<(const LogKey& o) const { return std::tie(op, ty) < std::tie(o.op, o.ty); }
  };

  mutable std::mutex mu_;
  std::deque<SymbolData> syms_;
  std::map<std::pair<std::string, SymKind>, Sym> byName_;
  std::map<LogKey, Sym> logical_;
  std::map<CanonKey, Sym> canon_;
};

inline Signature& sig() {
  static Signature s;
  return s;
}

inline const SymbolData& symdata(Sym s) { return sig()[s]; }
inline int symLevel(Sym s) { return symdata(s).level; }
inline LogOp symLog(Sym s) { return symdata(s).log; }
inline bool isLogical(Sym s) { return symdata(s).log != LogOp::None; }

}  // namespace uctt
