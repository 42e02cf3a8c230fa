#pragma once

#include <cctype>
#include <optional>

#include "translate.hpp"

namespace uctt {

// lambda-Prolog-flavoured concrete syntax:
//
//   kind item type.                   base type declaration
//   type q item -> item -> o.         constant declaration (o = proposition)
//   type c1 item @ 1.                 optional level annotation
//   p :- q, r.                        clause sugar for (q , r) => p
//   f p.                              bare atom clause
//   pi x\ d.                          universally quantified clause
//   ?- g.                             query directive (used by `compare`)
//
// Goals use `,` `;` `=>` `pi x\` `sigma x\` `true`. `&` is accepted as a
// synonym for `,`. Precedence, loosest first: `:-`, `;`, `,`/`&`, `=>`
// (right associative); application binds tightest; a binder's body extends
// as far right as possible. Capitalized identifiers are logic variables;
// clause-level variables are implicitly universally quantified. `o` maps to
// the rigid-atom type in constant codomains and to the positive-formula
// type in argument positions.

struct SourceLoc {
  int line = 1;
  int col = 1;
};

namespace detail_parse {

enum class Tok : uint8_t {
  Ident, Var, Kind, Type, Module, Pi, Sigma, True,
  Dot, Comma, Semi, Amp, Turnstile, Arrow, FatArrow, LParen, RParen,
  Backslash, Colon, At, Query, Num, End
};

struct Token {
  Tok kind;
  std::string text;
  SourceLoc loc;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  SourceLoc loc;
  size_t i = 0;
  auto push = [&](Tok k, std::string t) { out.push_back({k, std::move(t), loc}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { loc.line++; loc.col = 1; i++; continue; }
    if (std::isspace((unsigned char)c)) { loc.col++; i++; continue; }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') i++;
      continue;
    }
    SourceLoc start = loc;
    auto two = [&](const char* s) { return src.compare(i, 2, s) == 0; };
    if (two(":-")) { push(Tok::Turnstile, ":-"); i += 2; loc.col += 2; continue; }
    if (two("?-")) { push(Tok::Query, "?-"); i += 2; loc.col += 2; continue; }
    if (two("->")) { push(Tok::Arrow, "->"); i += 2; loc.col += 2; continue; }
    if (two("=>")) { push(Tok::FatArrow, "=>"); i += 2; loc.col += 2; continue; }
    switch (c) {
      case '.': push(Tok::Dot, "."); i++; loc.col++; continue;
      case ',': push(Tok::Comma, ","); i++; loc.col++; continue;
      case ';': push(Tok::Semi, ";"); i++; loc.col++; continue;
      case '&': push(Tok::Amp, "&"); i++; loc.col++; continue;
      case '(': push(Tok::LParen, "("); i++; loc.col++; continue;
      case ')': push(Tok::RParen, ")"); i++; loc.col++; continue;
      case '\\': push(Tok::Backslash, "\\"); i++; loc.col++; continue;
      case ':': push(Tok::Colon, ":"); i++; loc.col++; continue;
      case '@': push(Tok::At, "@"); i++; loc.col++; continue;
      default: break;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) j++;
      push(Tok::Num, src.substr(i, j - i));
      loc.col += (int)(j - i);
      i = j;
      continue;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum((unsigned char)src[j]) || src[j] == '_' || src[j] == '\'')) j++;
      std::string w = src.substr(i, j - i);
      loc.col += (int)(j - i);
      i = j;
      Tok k = Tok::Ident;
      if (w == "kind") k = Tok::Kind;
      else if (w == "type") k = Tok::Type;
      else if (w == "module") k = Tok::Module;
      else if (w == "pi") k = Tok::Pi;
      else if (w == "sigma") k = Tok::Sigma;
      else if (w == "true") k = Tok::True;
      else if (std::isupper((unsigned char)w[0])) k = Tok::Var;
      out.push_back({k, std::move(w), start});
      continue;
    }
    throw SyntaxError("unexpected character '" + std::string(1, c) + "' at line " + std::to_string(loc.line) +
                      ", column " + std::to_string(loc.col));
  }
  push(Tok::End, "");
  return out;
}

// Untyped surface AST; elaboration assigns constants by context.
struct Ast;
using AstPtr = std::shared_ptr<Ast>;

struct Ast {
  enum K { Name, VarName, TrueLit, BinOp, Quant, Apply, Lam } k;
  std::string text;   // Name/VarName; BinOp: ","/";"/"=>"/":-"; Quant: "pi"/"sigma"
  AstPtr a, b;
  std::string bound;  // Quant / Lam binder name
  TypePtr ann;        // optional binder annotation
  SourceLoc loc;
};

inline AstPtr ast(Ast::K k, SourceLoc loc) {
  auto p = std::make_shared<Ast>();
  p->k = k;
  p->loc = loc;
  return p;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, Signature& sg) : toks_(std::move(toks)), sig_(sg) {}

  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  bool at(Tok k) const { return peek().kind == k; }

  Token expect(Tok k, const char* what) {
    if (!at(k)) throw SyntaxError(std::string("expected ") + what + " at line " + std::to_string(peek().loc.line) +
                                  ", column " + std::to_string(peek().loc.col) + " (got '" + peek().text + "')");
    return take();
  }

  // type expressions: base { -> type }
  TypePtr parseType() {
    TypePtr base;
    if (at(Tok::LParen)) {
      take();
      base = parseType();
      expect(Tok::RParen, "')'");
    } else {
      Token t = expect(Tok::Ident, "a type name");
      if (t.text == "o") base = tyO();
      else if (t.text == "h") base = tyH();
      else {
        if (!sig_.known("ty$" + t.text, SymKind::Const)) throw UnknownSymbol("kind " + t.text);
        base = baseType(t.text);
      }
    }
    if (at(Tok::Arrow)) {
      take();
      return arrow(base, parseType());
    }
    return base;
  }

  // expression parsing, loosest first
  AstPtr parseExpr() { return parseTurnstile(); }

  AstPtr parseTurnstile() {
    AstPtr l = parseSemi();
    if (at(Tok::Turnstile)) {
      SourceLoc loc = take().loc;
      AstPtr r = parseSemi();
      AstPtr n = ast(Ast::BinOp, loc);
      n->text = ":-";
      n->a = l;
      n->b = r;
      return n;
    }
    return l;
  }

  AstPtr parseSemi() {
    AstPtr l = parseComma();
    while (at(Tok::Semi)) {
      SourceLoc loc = take().loc;
      AstPtr r = parseComma();
      AstPtr n = ast(Ast::BinOp, loc);
      n->text = ";";
      n->a = l;
      n->b = r;
      l = n;
    }
    return l;
  }

  AstPtr parseComma() {
    AstPtr l = parseImp();
    while (at(Tok::Comma) || at(Tok::Amp)) {
      SourceLoc loc = take().loc;
      AstPtr r = parseImp();
      AstPtr n = ast(Ast::BinOp, loc);
      n->text = ",";
      n->a = l;
      n->b = r;
      l = n;
    }
    return l;
  }

  AstPtr parseImp() {
    AstPtr l = parseApp();
    if (at(Tok::FatArrow)) {
      SourceLoc loc = take().loc;
      AstPtr r = parseImp();  // right associative
      AstPtr n = ast(Ast::BinOp, loc);
      n->text = "=>";
      n->a = l;
      n->b = r;
      return n;
    }
    return l;
  }

  AstPtr parseApp() {
    AstPtr head = parseAtomic();
    while (at(Tok::Ident) || at(Tok::Var) || at(Tok::LParen) || at(Tok::True)) {
      AstPtr arg = parseAtomic();
      AstPtr n = ast(Ast::Apply, head->loc);
      n->a = head;
      n->b = arg;
      head = n;
    }
    return head;
  }

  AstPtr parseAtomic() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::True: {
        take();
        return ast(Ast::TrueLit, t.loc);
      }
      case Tok::Pi:
      case Tok::Sigma: {
        take();
        Token v = peek().kind == Tok::Var ? take() : expect(Tok::Ident, "a binder name");
        TypePtr ann;
        if (at(Tok::Colon)) {
          take();
          ann = parseType();
        }
        expect(Tok::Backslash, "'\\'");
        AstPtr body = parseSemi();
        AstPtr n = ast(Ast::Quant, t.loc);
        n->text = t.kind == Tok::Pi ? "pi" : "sigma";
        n->bound = v.text;
        n->ann = ann;
        n->a = body;
        return n;
      }
      case Tok::Ident: {
        take();
        // lambda `x\ body` (lowercase binder)
        if (at(Tok::Backslash)) {
          take();
          AstPtr body = parseSemi();
          AstPtr n = ast(Ast::Lam, t.loc);
          n->bound = t.text;
          n->a = body;
          return n;
        }
        AstPtr n = ast(Ast::Name, t.loc);
        n->text = t.text;
        return n;
      }
      case Tok::Var: {
        take();
        if (at(Tok::Backslash)) {
          take();
          AstPtr body = parseSemi();
          AstPtr n = ast(Ast::Lam, t.loc);
          n->bound = t.text;
          n->a = body;
          return n;
        }
        AstPtr n = ast(Ast::VarName, t.loc);
        n->text = t.text;
        return n;
      }
      case Tok::LParen: {
        take();
        AstPtr inner = parseExpr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        throw SyntaxError("unexpected token '" + t.text + "' at line " + std::to_string(t.loc.line) + ", column " +
                          std::to_string(t.loc.col));
    }
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  Signature& sig_;
};

}  // namespace detail_parse

// --- elaboration to typed terms ------------------------------------------------

// A parsed program file.
struct SourceFile {
  std::string moduleName;
  Program program;
  std::vector<TermPtr> queries;  // `?- g.` directives
  int level = 0;
};

namespace detail_parse {

// Context kinds steering which logical constants `,` / `;` / quantifiers
// elaborate to.
enum class Mode { ProgramD, Goal, PositiveH };

struct Scope {
  std::string name;
  TypePtr type;  // resolved lazily
  int depth;     // binder depth at introduction
};

class Elab {
 public:
  Elab(Signature& sg, int level) : sig_(sg), level_(level) {}

  std::map<std::string, Sym> freeVars;  // capitalized names in scope

  TermPtr term(const AstPtr& n, Mode mode) {
    resolveTypes(n, mode);
    return build(n, mode);
  }

 private:
  Signature& sig_;
  int level_;
  std::vector<Scope> scopes_;

  std::optional<size_t> findScope(const std::string& name) {
    for (size_t i = scopes_.size(); i-- > 0;)
      if (scopes_[i].name == name) return i;
    return std::nullopt;
  }

  // First pass: infer binder and variable types from application positions.
  void resolveTypes(const AstPtr& n, Mode mode) {
    switch (n->k) {
      case Ast::Apply: {
        // walk the spine, matching declared argument types
        std::vector<AstPtr> args;
        AstPtr head = n;
        while (head->k == Ast::Apply) {
          args.push_back(head->b);
          head = head->a;
        }
        std::reverse(args.begin(), args.end());
        TypePtr ht = headType(head, (int)args.size());
        if (!ht && head->k == Ast::VarName && !findScope(head->text)) {
          // a flexible predicate head defaults to h -> ... -> a
          TypePtr t = tyA();
          for (size_t k = args.size(); k-- > 0;) t = arrow(tyH(), t);
          varTypes_[head->text] = t;
          ht = t;
        }
        if (!ht) {
          // an unresolved scoped head; type the arguments independently
          for (const auto& a : args) resolveTypes(a, Mode::PositiveH);
          return;
        }
        for (const auto& a : args) {
          if (!ht->isArrow())
            throw TypeError("too many arguments at line " + std::to_string(n->loc.line));
          noteType(a, ht->dom);
          resolveTypes(a, subMode(ht->dom, mode));
          ht = ht->cod;
        }
        return;
      }
      case Ast::BinOp: {
        if (n->text == ":-") {
          resolveTypes(n->a, Mode::ProgramD);  // head
          resolveTypes(n->b, Mode::Goal);      // body
        } else if (n->text == "=>") {
          if (mode == Mode::Goal) {
            resolveTypes(n->a, Mode::ProgramD);
            resolveTypes(n->b, Mode::Goal);
          } else {
            throw SyntaxError("'=>' is only a goal connective; use ':-' in clauses (line " +
                              std::to_string(n->loc.line) + ")");
          }
        } else {
          resolveTypes(n->a, mode);
          resolveTypes(n->b, mode);
        }
        return;
      }
      case Ast::Quant: {
        scopes_.push_back(Scope{n->bound, n->ann, (int)scopes_.size()});
        resolveTypes(n->a, n->text == "pi" && mode == Mode::ProgramD ? Mode::ProgramD : mode);
        Scope sc = scopes_.back();
        scopes_.pop_back();
        if (!sc.type) throw TypeError("cannot infer the type of binder '" + n->bound + "' at line " +
                                      std::to_string(n->loc.line) + "; annotate with pi " + n->bound + ":ty\\");
        n->ann = sc.type;
        return;
      }
      case Ast::Lam: {
        scopes_.push_back(Scope{n->bound, n->ann, (int)scopes_.size()});
        resolveTypes(n->a, mode);
        Scope sc = scopes_.back();
        scopes_.pop_back();
        if (!sc.type) throw TypeError("cannot infer the type of binder '" + n->bound + "'");
        n->ann = sc.type;
        return;
      }
      default: return;
    }
  }

  static Mode subMode(const TypePtr& expected, Mode) {
    if (!expected->isArrow() && expected->base == "h") return Mode::PositiveH;
    return Mode::PositiveH;  // arguments are positive positions
  }

  void noteType(const AstPtr& a, const TypePtr& want) {
    TypePtr t = want;
    // `o` in argument position means a positive formula
    if (!t->isArrow() && t->base == "o") t = tyH();
    if (a->k == Ast::Name || a->k == Ast::VarName) {
      if (auto i = findScope(a->text)) {
        Scope& sc = scopes_[*i];
        if (!sc.type) sc.type = t;
        return;
      }
      if (a->k == Ast::VarName && !varTypes_.count(a->text)) varTypes_[a->text] = t;
    }
  }

  TypePtr headType(const AstPtr& head, int argc) {
    if (head->k == Ast::Name) {
      if (auto i = findScope(head->text)) {
        Scope& sc = scopes_[*i];
        if (!sc.type) return nullptr;
        return sc.type;
      }
      if (sig_.known(head->text, SymKind::Const)) return symdata(sig_.lookup(head->text, SymKind::Const)).type;
      throw UnknownSymbol(head->text + " at line " + std::to_string(head->loc.line));
    }
    if (head->k == Ast::VarName) {
      if (auto i = findScope(head->text)) {
        Scope& sc = scopes_[*i];
        return sc.type;
      }
      auto it = varTypes_.find(head->text);
      if (it != varTypes_.end()) return it->second;
      if (argc == 0) return nullptr;  // settled by noteType when used as an argument
      return nullptr;
    }
    return nullptr;
  }

  std::map<std::string, TypePtr> varTypes_;

 public:
  // Second pass: build the typed term.
  TermPtr build(const AstPtr& n, Mode mode) {
    switch (n->k) {
      case Ast::TrueLit:
        return mode == Mode::PositiveH ? topH() : topG();
      case Ast::Name: {
        if (auto i = findScope(n->text)) return mkBound((int)(scopes_.size() - 1 - *i), scopes_[*i].type);
        Sym s = sig_.lookup(n->text, SymKind::Const);
        return mkConst(s);
      }
      case Ast::VarName: {
        if (auto i = findScope(n->text)) return mkBound((int)(scopes_.size() - 1 - *i), scopes_[*i].type);
        auto it = freeVars.find(n->text);
        if (it != freeVars.end()) return mkVar(it->second);
        auto ty = varTypes_.find(n->text);
        if (ty == varTypes_.end())
          throw TypeError("cannot infer the type of variable " + n->text + " at line " +
                          std::to_string(n->loc.line));
        Sym s = sig_.intern(n->text + "#" + std::to_string(sig_.size()), ty->second, level_, SymKind::FreeVar);
        freeVars.emplace(n->text, s);
        return mkVar(s);
      }
      case Ast::Apply: {
        std::vector<AstPtr> args;
        AstPtr head = n;
        while (head->k == Ast::Apply) {
          args.push_back(head->b);
          head = head->a;
        }
        std::reverse(args.begin(), args.end());
        TermPtr h = buildHead(head, args);
        TypePtr ht = h->type;
        for (const auto& a : args) {
          TermPtr at = build(a, subMode(ht->dom, mode));
          h = nfApp(h, coerceArg(at, ht->dom));
          ht = ht->cod;
        }
        return h;
      }
      case Ast::BinOp: {
        if (n->text == ":-") {
          TermPtr head = build(n->a, Mode::ProgramD);
          TermPtr body = build(n->b, Mode::Goal);
          return mkBin(LogOp::ImpP, coerceArg(body, tyG()), coerceArg(head, tyR()));
        }
        if (n->text == "=>") {
          TermPtr d = build(n->a, Mode::ProgramD);
          TermPtr g = build(n->b, Mode::Goal);
          return mkBin(LogOp::ImpG, coerceArg(d, tyP()), coerceArg(g, tyG()));
        }
        LogOp op;
        TypePtr carrier;
        if (mode == Mode::PositiveH) {
          op = n->text == ";" ? LogOp::OrH : LogOp::AndH;
          carrier = tyH();
        } else if (mode == Mode::ProgramD && n->text == ",") {
          op = LogOp::AndP;
          carrier = tyP();
        } else if (mode == Mode::ProgramD) {
          throw SyntaxError("';' cannot occur in a program formula (line " + std::to_string(n->loc.line) + ")");
        } else {
          op = n->text == ";" ? LogOp::OrG : LogOp::AndG;
          carrier = tyG();
        }
        TermPtr l = build(n->a, mode);
        TermPtr r = build(n->b, mode);
        return mkBin(op, coerceArg(l, carrier), coerceArg(r, carrier));
      }
      case Ast::Quant: {
        scopes_.push_back(Scope{n->bound, n->ann, (int)scopes_.size()});
        Mode inner = mode;
        TermPtr body = build(n->a, inner);
        scopes_.pop_back();
        LogOp op;
        TypePtr carrier;
        if (n->text == "sigma") {
          op = mode == Mode::PositiveH ? LogOp::SigmaH : LogOp::SigmaG;
          carrier = mode == Mode::PositiveH ? tyH() : tyG();
        } else {
          if (mode == Mode::ProgramD) { op = LogOp::PiP; carrier = tyP(); }
          else if (mode == Mode::PositiveH) throw SyntaxError("pi cannot occur inside positive terms");
          else { op = LogOp::PiG; carrier = tyG(); }
        }
        return mkQuant(op, n->ann, mkAbs(n->ann, coerceArg(body, carrier)));
      }
      case Ast::Lam: {
        scopes_.push_back(Scope{n->bound, n->ann, (int)scopes_.size()});
        TermPtr body = build(n->a, mode);
        scopes_.pop_back();
        return mkAbs(n->ann, body);
      }
    }
    throw SyntaxError("unreachable");
  }

 private:
  TermPtr buildHead(const AstPtr& head, const std::vector<AstPtr>& args) {
    if (head->k == Ast::Name || head->k == Ast::VarName) {
      if (auto i = findScope(head->text)) return mkBound((int)(scopes_.size() - 1 - *i), scopes_[*i].type);
    }
    if (head->k == Ast::Name) return mkConst(sig_.lookup(head->text, SymKind::Const));
    if (head->k == Ast::VarName) {
      auto it = freeVars.find(head->text);
      if (it != freeVars.end()) return mkVar(it->second);
      // a flexible predicate head: give it codomain `a`
      auto ty = varTypes_.find(head->text);
      TypePtr t;
      if (ty != varTypes_.end()) t = ty->second;
      else {
        t = tyA();
        for (size_t k = args.size(); k-- > 0;) {
          // infer argument types by a mini pre-pass: default to h
          (void)k;
          t = arrow(tyH(), t);
        }
        varTypes_[head->text] = t;
      }
      Sym s = sig_.intern(head->text + "#" + std::to_string(sig_.size()), t, level_, SymKind::FreeVar);
      freeVars.emplace(head->text, s);
      return mkVar(s);
    }
    throw SyntaxError("unsupported application head at line " + std::to_string(head->loc.line));
  }

  static TermPtr coerceArg(const TermPtr& t, const TypePtr& want) {
    TypePtr w = want;
    if (!w->isArrow() && w->base == "o") w = tyH();
    if (subtype(t->type, w)) return coerce(t, w);
    throw TypeError("term " + printTerm(t) + " of type " + typeName(t->type) + " where " + typeName(w) +
                    " is required");
  }
};

}  // namespace detail_parse

// Parse a goal against an existing signature; free capitalized variables
// become logic variables of the given level.
inline TermPtr parseGoal(const std::string& text, int level = 0,
                         std::map<std::string, Sym>* varsOut = nullptr) {
  auto toks = detail_parse::lex(text);
  detail_parse::Parser p(std::move(toks), sig());
  auto ast = p.parseExpr();
  p.expect(detail_parse::Tok::Dot, "'.'");
  detail_parse::Elab el(sig(), level);
  TermPtr g = el.term(ast, detail_parse::Mode::Goal);
  if (varsOut) *varsOut = el.freeVars;
  return coerce(normalize(g), tyG());
}

inline TermPtr parseGoalAuto(std::string text, int level = 0,
                             std::map<std::string, Sym>* varsOut = nullptr) {
  while (!text.empty() && std::isspace((unsigned char)text.back())) text.pop_back();
  if (text.empty() || text.back() != '.') text += ".";
  return parseGoal(text, level, varsOut);
}

// A positive term (substitution binding values and the like); no goal cast.
inline TermPtr parseTermAuto(std::string text, int level = 0) {
  while (!text.empty() && std::isspace((unsigned char)text.back())) text.pop_back();
  if (text.empty() || text.back() != '.') text += ".";
  auto toks = detail_parse::lex(text);
  detail_parse::Parser p(std::move(toks), sig());
  auto ast = p.parseExpr();
  p.expect(detail_parse::Tok::Dot, "'.'");
  detail_parse::Elab el(sig(), level);
  return normalize(el.term(ast, detail_parse::Mode::PositiveH));
}

// Parse a full source file: declarations, clauses, queries.
inline SourceFile parseFile(const std::string& text) {
  using namespace detail_parse;
  SourceFile out;
  auto toks = lex(text);
  Parser p(std::move(toks), sig());
  while (!p.at(Tok::End)) {
    if (p.at(Tok::Module)) {
      p.take();
      out.moduleName = p.expect(Tok::Ident, "a module name").text;
      p.expect(Tok::Dot, "'.'");
      continue;
    }
    if (p.at(Tok::Kind)) {
      p.take();
      Token name = p.expect(Tok::Ident, "a kind name");
      p.expect(Tok::Type, "'type'");
      p.expect(Tok::Dot, "'.'");
      // base types are recorded as marker symbols so parseType can check them
      sig().intern("ty$" + name.text, tyO(), 0, SymKind::Const);
      continue;
    }
    if (p.at(Tok::Type)) {
      p.take();
      Token name = p.expect(Tok::Ident, "a constant name");
      TypePtr ty = p.parseType();
      int level = 0;
      if (p.at(Tok::At)) {
        p.take();
        level = std::stoi(p.expect(Tok::Num, "a level").text);
      }
      p.expect(Tok::Dot, "'.'");
      // `o` codomain means a rigid-atom former
      std::vector<TypePtr> doms;
      TypePtr t = ty;
      while (t->isArrow()) { doms.push_back(t->dom); t = t->cod; }
      TypePtr cod = (!t->isArrow() && t->base == "o") ? tyR() : t;
      TypePtr full = cod;
      for (size_t i = doms.size(); i-- > 0;) {
        TypePtr d = doms[i];
        if (!d->isArrow() && d->base == "o") d = tyH();
        full = arrow(d, full);
      }
      sig().intern(name.text, full, level, SymKind::Const);
      out.level = std::max(out.level, level);
      continue;
    }
    if (p.at(Tok::Query)) {
      p.take();
      auto ast = p.parseExpr();
      p.expect(Tok::Dot, "'.'");
      Elab el(sig(), out.level);
      out.queries.push_back(coerce(normalize(el.term(ast, Mode::Goal)), tyG()));
      continue;
    }
    // a clause
    auto ast = p.parseExpr();
    p.expect(Tok::Dot, "'.'");
    Elab el(sig(), out.level);
    TermPtr d = el.term(ast, Mode::ProgramD);
    // implicit universal closure of clause-level variables
    TermPtr closed = coerce(d, tyP());
    for (auto it = el.freeVars.rbegin(); it != el.freeVars.rend(); ++it) {
      Sym v = it->second;
      const SymbolData& vd = symdata(v);
      Subst toIdx;
      TermPtr lam;
      {
        // abstract the variable: replace it by index 0 under a new binder
        struct Walk {
          Sym v;
          TermPtr go(const TermPtr& t, int depth) {
            switch (t->kind) {
              case TermKind::Var:
                if (t->sym == v) return mkBound(depth, symdata(v).type);
                return t;
              case TermKind::App: return mkApp(go(t->c0, depth), go(t->c1, depth));
              case TermKind::Abs: return mkAbs(t->bty, go(t->c0, depth + 1));
              default: return t;
            }
          }
        } w{v};
        lam = mkAbs(vd.type, w.go(closed, 0));
      }
      closed = mkQuant(LogOp::PiP, vd.type, lam);
    }
    std::vector<TermPtr> ds = out.program.formulas();
    ds.push_back(normalize(closed));
    out.program = Program::of(std::move(ds));
  }
  if (out.program.level() > out.level) out.level = out.program.level();
  return out;
}

}  // namespace uctt
