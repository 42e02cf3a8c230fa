#pragma once

#include <memory>
#include <string>
#include <utility>

#include "error.hpp"

namespace uctt {

// Simple types over a set of base names. The formula bases carry the UCTT
// subtype structure r ⊑ a, a ⊑ h, a ⊑ g, a ⊑ p, h ⊑ g; everything else is
// a plain simply-typed lambda calculus type.
struct SimpleType;
using TypePtr = std::shared_ptr<const SimpleType>;

struct SimpleType {
  std::string base;  // nonempty for base types
  TypePtr dom, cod;  // set for arrow types

  bool isArrow() const { return base.empty(); }
};

inline TypePtr baseType(std::string name) {
  auto t = std::make_shared<SimpleType>();
  t->base = std::move(name);
  return t;
}

inline TypePtr arrow(TypePtr dom, TypePtr cod) {
  auto t = std::make_shared<SimpleType>();
  t->dom = std::move(dom);
  t->cod = std::move(cod);
  return t;
}

// Fixed formula bases.
inline const TypePtr& tyO() { static TypePtr t = baseType("o"); return t; }
inline const TypePtr& tyH() { static TypePtr t = baseType("h"); return t; }
inline const TypePtr& tyA() { static TypePtr t = baseType("a"); return t; }
inline const TypePtr& tyR() { static TypePtr t = baseType("r"); return t; }
inline const TypePtr& tyP() { static TypePtr t = baseType("p"); return t; }
inline const TypePtr& tyG() { static TypePtr t = baseType("g"); return t; }
inline const TypePtr& tyIota() { static TypePtr t = baseType("iota"); return t; }

inline bool typeEqual(const TypePtr& x, const TypePtr& y) {
  if (x.get() == y.get()) return true;
  if (x->isArrow() != y->isArrow()) return false;
  if (!x->isArrow()) return x->base == y->base;
  return typeEqual(x->dom, y->dom) && typeEqual(x->cod, y->cod);
}

// Base-level inclusion table (reflexive-transitive closure of the UCTT diagram).
inline bool baseSubtype(const std::string& s, const std::string& t) {
  if (s == t) return true;
  if (s == "r") return t == "a" || t == "h" || t == "g" || t == "p";
  if (s == "a") return t == "h" || t == "g" || t == "p";
  if (s == "h") return t == "g";
  return false;
}

// Decidable subtype order. Arrows are invariant in the domain and covariant
// in the codomain, which is all the tacit formula inclusions need.
inline bool subtype(const TypePtr& s, const TypePtr& t) {
  if (s->isArrow() != t->isArrow()) return false;
  if (!s->isArrow()) return baseSubtype(s->base, t->base);
  return typeEqual(s->dom, t->dom) && subtype(s->cod, t->cod);
}

inline bool isFormulaBase(const TypePtr& t) {
  if (t->isArrow()) return false;
  const std::string& b = t->base;
  return b == "o" || b == "h" || b == "a" || b == "r" || b == "p" || b == "g";
}

inline size_t typeHash(const TypePtr& t) {
  if (!t->isArrow()) return std::hash<std::string>{}(t->base);
  return typeHash(t->dom) * 1000003u ^ (typeHash(t->cod) + 0x9e3779b9u);
}

inline std::string typeName(const TypePtr& t) {
  if (!t->isArrow()) return t->base;
  std::string d = typeName(t->dom);
  if (t->dom->isArrow()) d = "(" + d + ")";
  return d + " -> " + typeName(t->cod);
}

inline int typeArity(const TypePtr& t) {
  int n = 0;
  const SimpleType* p = t.get();
  while (p->isArrow()) { n++; p = p->cod.get(); }
  return n;
}

inline TypePtr typeTarget(TypePtr t) {
  while (t->isArrow()) t = t->cod;
  return t;
}

}  // namespace uctt
