/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/parse.hpp"

#include <cctype>
#include <functional>

namespace cac {

namespace {

enum class Tok {
  Ident, Number, LParen, RParen, LBracket, RBracket, Box, Star, Colon, Dot,
  Comma, Semi, Bar, Arrow, RewArrow, Assign, Plus, Minus, LBrace, RBrace, End
};

struct Token {
  Tok type;
  std::string text;
  long num = 0;
  int line = 1;
};

struct Lexer {
  const std::string& src;
  std::size_t pos = 0;
  int line = 1;
  std::vector<Token> tokens;

  explicit Lexer(const std::string& s) : src(s) { run(); }

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(line, msg); }

  char peek(std::size_t k = 0) const {
    return pos + k < src.size() ? src[pos + k] : '\0';
  }

  void skip_comment() {
    // `(*` ... `*)`, nested
    int depth = 1;
    pos += 2;
    while (depth > 0) {
      if (pos >= src.size()) fail("unterminated comment");
      if (peek() == '(' && peek(1) == '*') { depth++; pos += 2; continue; }
      if (peek() == '*' && peek(1) == ')') { depth--; pos += 2; continue; }
      if (peek() == '\n') line++;
      pos++;
    }
  }

  void push(Tok t, std::string text = "", long num = 0) {
    tokens.push_back(Token{t, std::move(text), num, line});
  }

  void run() {
    while (pos < src.size()) {
      char c = peek();
      if (c == '\n') { line++; pos++; continue; }
      if (std::isspace((unsigned char)c)) { pos++; continue; }
      if (c == '(' && peek(1) == '*') { skip_comment(); continue; }
      if (std::isalpha((unsigned char)c) || c == '_') {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum((unsigned char)peek()) || peek() == '_' || peek() == '\''))
          pos++;
        push(Tok::Ident, src.substr(start, pos - start));
        continue;
      }
      if (std::isdigit((unsigned char)c)) {
        std::size_t start = pos;
        while (pos < src.size() && std::isdigit((unsigned char)peek())) pos++;
        push(Tok::Number, src.substr(start, pos - start),
             std::stol(src.substr(start, pos - start)));
        continue;
      }
      switch (c) {
        case '(': push(Tok::LParen); pos++; break;
        case ')': push(Tok::RParen); pos++; break;
        case '[':
          if (peek(1) == ']') { push(Tok::Box); pos += 2; }
          else { push(Tok::LBracket); pos++; }
          break;
        case ']': push(Tok::RBracket); pos++; break;
        case '{': push(Tok::LBrace); pos++; break;
        case '}': push(Tok::RBrace); pos++; break;
        case '*': push(Tok::Star); pos++; break;
        case ':':
          if (peek(1) == '=') { push(Tok::Assign); pos += 2; }
          else { push(Tok::Colon); pos++; }
          break;
        case '.': push(Tok::Dot); pos++; break;
        case ',': push(Tok::Comma); pos++; break;
        case ';': push(Tok::Semi); pos++; break;
        case '|': push(Tok::Bar); pos++; break;
        case '+': push(Tok::Plus); pos++; break;
        case '-':
          if (peek(1) == '-' && peek(2) == '>') { push(Tok::RewArrow); pos += 3; }
          else if (peek(1) == '>') { push(Tok::Arrow); pos += 2; }
          else { push(Tok::Minus); pos++; }
          break;
        default:
          fail(std::string("unexpected character '") + c + "'");
      }
    }
    push(Tok::End);
  }
};

// Recursive-descent term parser shared by both dialects.
struct Parser {
  std::vector<Token> toks;
  std::size_t at = 0;
  // Symbol table built as declarations are parsed: name -> sort.
  std::map<std::string, SortTag> sym_sorts;
  std::map<std::string, SortTag> var_sorts;  // free variables with known sorts

  const Token& cur() const { return toks[at]; }
  const Token& ahead(std::size_t k) const {
    return toks[std::min(at + k, toks.size() - 1)];
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(cur().line, msg);
  }

  bool accept(Tok t) {
    if (cur().type == t) { at++; return true; }
    return false;
  }

  Token expect(Tok t, const std::string& what) {
    if (cur().type != t) fail("expected " + what);
    return toks[at++];
  }

  bool accept_kw(const std::string& kw) {
    if (cur().type == Tok::Ident && cur().text == kw) { at++; return true; }
    return false;
  }

  void expect_kw(const std::string& kw) {
    if (!accept_kw(kw)) fail("expected '" + kw + "'");
  }

  bool starts_atom() const {
    switch (cur().type) {
      case Tok::Ident: case Tok::Star: case Tok::Box: case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  // Binder stack entries: surface name -> fresh stand-in variable. Bodies
  // are parsed with free stand-ins and closed with abstract_fvar, so no raw
  // de Bruijn bookkeeping is needed.
  TermPtr resolve(const std::string& name, const std::vector<std::pair<std::string, TermPtr>>& bound) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->first == name) return it->second;
    auto it = sym_sorts.find(name);
    if (it != sym_sorts.end()) return mk_sym(name, it->second);
    auto iv = var_sorts.find(name);
    return mk_fvar(name, iv != var_sorts.end() ? iv->second : SortTag::Star);
  }

  TermPtr parse_term(std::vector<std::pair<std::string, TermPtr>>& bound) {
    // binder chains: (x:T)U and [x:T]u
    if (cur().type == Tok::LParen && ahead(1).type == Tok::Ident &&
        ahead(2).type == Tok::Colon) {
      at += 2;
      std::string x = toks[at - 1].text;
      expect(Tok::Colon, "':'");
      TermPtr dom = parse_term(bound);
      expect(Tok::RParen, "')'");
      std::string stand_in = fresh_internal();
      bound.emplace_back(x, mk_fvar(stand_in, binder_sort(dom)));
      TermPtr cod = parse_term(bound);
      bound.pop_back();
      return mk_prod(x, dom, abstract_fvar(cod, stand_in));
    }
    if (cur().type == Tok::LBracket) {
      at++;
      std::string x = expect(Tok::Ident, "binder name").text;
      expect(Tok::Colon, "':'");
      TermPtr annot = parse_term(bound);
      expect(Tok::RBracket, "']'");
      std::string stand_in = fresh_internal();
      bound.emplace_back(x, mk_fvar(stand_in, binder_sort(annot)));
      TermPtr body = parse_term(bound);
      bound.pop_back();
      return mk_abs(x, annot, abstract_fvar(body, stand_in));
    }
    TermPtr t = parse_app(bound);
    if (accept(Tok::Arrow)) {
      TermPtr u = parse_term(bound);
      return mk_arrow(t, u);
    }
    return t;
  }

  TermPtr parse_app(std::vector<std::pair<std::string, TermPtr>>& bound) {
    TermPtr t = parse_atom(bound);
    while (starts_atom()) t = mk_app(t, parse_atom(bound));
    return t;
  }

  TermPtr parse_atom(std::vector<std::pair<std::string, TermPtr>>& bound) {
    if (accept(Tok::Star)) return star();
    if (accept(Tok::Box)) return box();
    if (cur().type == Tok::Ident) {
      std::string name = toks[at++].text;
      return resolve(name, bound);
    }
    if (cur().type == Tok::LParen) {
      // Either a binder (handled by parse_term) or grouping.
      if (ahead(1).type == Tok::Ident && ahead(2).type == Tok::Colon)
        return parse_term(bound);
      at++;
      TermPtr t = parse_term(bound);
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected a term");
  }

  // Symbol sort from its declared type: Box when the type is a kind.
  static SortTag symbol_sort(const TermPtr& type) {
    TermClass c = classify(type);
    if (c == TermClass::Kind || (c == TermClass::Sort && is_sort(type, SortTag::Star)))
      return SortTag::Box;
    return SortTag::Star;
  }

  void declare(const std::string& name, const TermPtr& type) {
    sym_sorts[name] = symbol_sort(type);
  }
};

// Re-tags free variables with the sorts resolved from a rule environment.
TermPtr retag_fvars(const TermPtr& t, const std::map<std::string, SortTag>& sorts) {
  switch (t->kind) {
    case TermKind::FVar: {
      auto it = sorts.find(t->name);
      if (it != sorts.end() && it->second != t->vsort) return mk_fvar(t->name, it->second);
      return t;
    }
    case TermKind::Abs: {
      auto l = retag_fvars(t->left, sorts), r = retag_fvars(t->right, sorts);
      return l == t->left && r == t->right ? t : mk_abs(t->name, l, r);
    }
    case TermKind::Prod: {
      auto l = retag_fvars(t->left, sorts), r = retag_fvars(t->right, sorts);
      return l == t->left && r == t->right ? t : mk_prod(t->name, l, r);
    }
    case TermKind::App: {
      auto l = retag_fvars(t->left, sorts), r = retag_fvars(t->right, sorts);
      return l == t->left && r == t->right ? t : mk_app(l, r);
    }
    default:
      return t;
  }
}

struct CacFileParser : Parser {
  SourceFile out;
  std::map<std::string, int> rule_counts;

  Binders parse_binder_group() {
    // Zero or more (x:T); later types reference earlier binders as free
    // variables, re-abstracted when the telescope is assembled.
    Binders bs;
    std::vector<std::pair<std::string, TermPtr>> bound;
    while (cur().type == Tok::LParen && ahead(1).type == Tok::Ident &&
           ahead(2).type == Tok::Colon) {
      at += 2;
      std::string x = toks[at - 1].text;
      expect(Tok::Colon, "':'");
      TermPtr ty = parse_term(bound);
      expect(Tok::RParen, "')'");
      bs.emplace_back(x, ty);
    }
    return bs;
  }

  void finalize_rule_sorts(SurfaceRule& r) {
    // Resolve variable sorts left-to-right through the environment, then
    // re-tag lhs/rhs/rho. A variable's sort is the sort of its type's type.
    std::map<std::string, SortTag> sorts;
    for (auto& [x, ty] : r.env) {
      TermPtr ty2 = retag_fvars(ty, sorts);
      sorts[x] = binder_sort(ty2);
      ty = ty2;
    }
    for (auto& [x, img] : r.rho) {
      TermPtr img2 = retag_fvars(img, sorts);
      TermClass c = classify(img2);
      sorts[x] = (c == TermClass::Predicate || c == TermClass::Kind) ? SortTag::Box
                                                                     : SortTag::Star;
      img = img2;
    }
    for (auto& a : r.lhs_args) a = retag_fvars(a, sorts);
    r.rhs = retag_fvars(r.rhs, sorts);
  }

  void parse_file() {
    while (cur().type != Tok::End) {
      int line = cur().line;
      if (cur().type == Tok::Ident &&
          (cur().text == "symbol" || cur().text == "constant")) {
        bool constant = cur().text == "constant";
        at++;
        SurfaceSymbol s;
        s.constant = constant;
        s.line = line;
        s.name = expect(Tok::Ident, "symbol name").text;
        expect(Tok::Colon, "':'");
        std::vector<std::pair<std::string, TermPtr>> bound;
        s.type = parse_term(bound);
        expect(Tok::Dot, "'.'");
        declare(s.name, s.type);
        out.decls.push_back(s);
        continue;
      }
      if (accept_kw("rule")) {
        SurfaceRule r;
        r.line = line;
        std::vector<std::pair<std::string, TermPtr>> bound;
        TermPtr lhs = parse_term(bound);
        Spine sp = spine(lhs);
        if (sp.head->kind != TermKind::Sym)
          fail("rule left-hand side must be headed by a declared symbol");
        r.head = sp.head->name;
        r.lhs_args = sp.args;
        expect(Tok::RewArrow, "'-->'");
        r.rhs = parse_term(bound);
        if (accept(Tok::LBracket)) {
          expect_kw("env");
          expect(Tok::Colon, "':'");
          while (cur().type == Tok::Ident) {
            std::string x = toks[at++].text;
            expect(Tok::Colon, "':'");
            r.env.emplace_back(x, parse_term(bound));
            if (!accept(Tok::Comma)) break;
          }
          if (accept(Tok::Semi)) {
            expect_kw("rho");
            expect(Tok::Colon, "':'");
            while (cur().type == Tok::Ident) {
              std::string x = toks[at++].text;
              expect(Tok::Assign, "':='");
              r.rho.emplace_back(x, parse_term(bound));
              if (!accept(Tok::Comma)) break;
            }
          }
          expect(Tok::RBracket, "']'");
        }
        expect(Tok::Dot, "'.'");
        r.label = r.head + "#" + std::to_string(++rule_counts[r.head]);
        finalize_rule_sorts(r);
        out.decls.push_back(r);
        continue;
      }
      if (accept_kw("inductive")) {
        SurfaceInductive ind;
        ind.line = line;
        ind.name = expect(Tok::Ident, "inductive name").text;
        expect_kw("params");
        ind.params = parse_binder_group();
        expect_kw("indices");
        ind.indices = parse_binder_group();
        expect(Tok::Assign, "':='");
        // Register the type symbol before parsing constructor types.
        Binders all = ind.params;
        all.insert(all.end(), ind.indices.begin(), ind.indices.end());
        TermPtr ctype = build_binders_type(all);
        declare(ind.name, ctype);
        while (cur().type == Tok::Ident) {
          std::string cname = toks[at++].text;
          expect(Tok::Colon, "':'");
          std::vector<std::pair<std::string, TermPtr>> bound;
          TermPtr cty = parse_term(bound);
          declare(cname, cty);
          ind.ctors.emplace_back(cname, cty);
          if (!accept(Tok::Bar)) break;
        }
        expect(Tok::Dot, "'.'");
        out.decls.push_back(ind);
        continue;
      }
      if (accept_kw("monotone")) {
        SurfaceMonotone m;
        m.line = line;
        m.name = expect(Tok::Ident, "symbol name").text;
        while (accept(Tok::LParen)) {
          bool plus = true;
          if (accept(Tok::Plus)) plus = true;
          else if (accept(Tok::Minus)) plus = false;
          else fail("expected '+' or '-'");
          long n = expect(Tok::Number, "argument index").num;
          expect(Tok::RParen, "')'");
          (plus ? m.plus : m.minus).insert((int)n);
        }
        expect(Tok::Dot, "'.'");
        out.decls.push_back(m);
        continue;
      }
      if (accept_kw("recursor")) {
        if (accept_kw("strong")) {
          SurfaceStrongRecursor s;
          s.line = line;
          s.name = expect(Tok::Ident, "recursor name").text;
          expect_kw("for");
          s.target = expect(Tok::Ident, "target type").text;
          expect_kw("motive");
          std::vector<std::pair<std::string, TermPtr>> bound;
          s.motive = parse_term(bound);
          expect(Tok::Dot, "'.'");
          out.decls.push_back(s);
          continue;
        }
        SurfaceRecursor r;
        r.line = line;
        r.name = expect(Tok::Ident, "recursor name").text;
        expect_kw("for");
        r.target = expect(Tok::Ident, "target type").text;
        expect(Tok::Colon, "':'");
        std::vector<std::pair<std::string, TermPtr>> bound;
        r.type = parse_term(bound);
        expect(Tok::Dot, "'.'");
        declare(r.name, r.type);
        out.decls.push_back(r);
        continue;
      }
      fail("expected a declaration");
    }
  }

  TermPtr build_binders_type(const Binders& bs) {
    // (x1:T1)...(xn:Tn)* built from already-parsed binder types; the binder
    // types may reference earlier binder names, which parse as free vars.
    TermPtr core = star();
    TermPtr cur = core;
    for (auto it = bs.rbegin(); it != bs.rend(); ++it)
      cur = mk_prod(it->first, it->second, abstract_fvar(cur, it->first));
    return cur;
  }
};

}  // namespace

SourceFile parse_cac_file(const std::string& text, const std::string& path) {
  Lexer lex(text);
  CacFileParser p;
  p.toks = std::move(lex.tokens);
  p.out.path = path;
  p.parse_file();
  return p.out;
}

TermPtr parse_term_text(const std::string& text,
                        const std::map<std::string, SortTag>& symbol_sorts,
                        const std::map<std::string, SortTag>& var_sorts) {
  Lexer lex(text);
  Parser p;
  p.toks = std::move(lex.tokens);
  p.sym_sorts = symbol_sorts;
  p.var_sorts = var_sorts;
  std::vector<std::pair<std::string, TermPtr>> bound;
  TermPtr t = p.parse_term(bound);
  if (p.cur().type != Tok::End) p.fail("trailing input after term");
  return t;
}

namespace {

struct CicParser {
  std::vector<Token> toks;
  std::size_t at = 0;
  std::vector<std::pair<std::string, CicPtr>> lets;

  const Token& cur() const { return toks[at]; }
  const Token& ahead(std::size_t k) const {
    return toks[std::min(at + k, toks.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(cur().line, msg);
  }
  bool accept(Tok t) {
    if (cur().type == t) { at++; return true; }
    return false;
  }
  Token expect(Tok t, const std::string& what) {
    if (cur().type != t) fail("expected " + what);
    return toks[at++];
  }
  bool accept_kw(const std::string& kw) {
    if (cur().type == Tok::Ident && cur().text == kw) { at++; return true; }
    return false;
  }

  CicPtr resolve(const std::string& name, const std::vector<std::pair<std::string, CicPtr>>& bound) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (it->first == name) return it->second;
    for (auto& [n, t] : lets)
      if (n == name) return t;
    return cic_fvar(name);
  }

  static SortTag cic_annot_sort(const CicPtr& annot) {
    CicPtr cur = annot;
    while (cur->kind == CicKind::Prod) cur = cur->b;
    return cur->kind == CicKind::Sort ? SortTag::Box : SortTag::Star;
  }

  CicPtr parse_term(std::vector<std::pair<std::string, CicPtr>>& bound) {
    if (cur().type == Tok::LParen && ahead(1).type == Tok::Ident &&
        ahead(2).type == Tok::Colon) {
      at += 2;
      std::string x = toks[at - 1].text;
      expect(Tok::Colon, "':'");
      CicPtr dom = parse_term(bound);
      expect(Tok::RParen, "')'");
      std::string stand_in = fresh_internal();
      bound.emplace_back(x, cic_fvar(stand_in, cic_annot_sort(dom)));
      CicPtr cod = parse_term(bound);
      bound.pop_back();
      return cic_prod(x, dom, cic_abstract(cod, stand_in));
    }
    if (cur().type == Tok::LBracket) {
      at++;
      std::string x = expect(Tok::Ident, "binder name").text;
      expect(Tok::Colon, "':'");
      CicPtr annot = parse_term(bound);
      expect(Tok::RBracket, "']'");
      std::string stand_in = fresh_internal();
      bound.emplace_back(x, cic_fvar(stand_in, cic_annot_sort(annot)));
      CicPtr body = parse_term(bound);
      bound.pop_back();
      return cic_abs(x, annot, cic_abstract(body, stand_in));
    }
    CicPtr t = parse_app(bound);
    if (accept(Tok::Arrow)) return cic_arrow(t, parse_term(bound));
    return t;
  }

  bool starts_atom() const {
    switch (cur().type) {
      case Tok::Ident: case Tok::Star: case Tok::Box: case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  CicPtr parse_app(std::vector<std::pair<std::string, CicPtr>>& bound) {
    CicPtr t = parse_atom(bound);
    while (starts_atom()) t = cic_app(t, parse_atom(bound));
    return t;
  }

  CicPtr parse_atom(std::vector<std::pair<std::string, CicPtr>>& bound) {
    if (accept(Tok::Star)) return cic_star();
    if (accept(Tok::Box)) return cic_box();
    if (cur().type == Tok::Ident) {
      std::string name = toks[at++].text;
      if (name == "Ind") return parse_ind(bound);
      if (name == "Constr") return parse_constr(bound);
      if (name == "Elim") return parse_elim(bound);
      return resolve(name, bound);
    }
    if (cur().type == Tok::LParen) {
      if (ahead(1).type == Tok::Ident && ahead(2).type == Tok::Colon)
        return parse_term(bound);
      at++;
      CicPtr t = parse_term(bound);
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected a term");
  }

  CicPtr parse_ind(std::vector<std::pair<std::string, CicPtr>>& bound) {
    expect(Tok::LParen, "'('");
    std::string x = expect(Tok::Ident, "inductive binder").text;
    expect(Tok::Colon, "':'");
    CicPtr arity = parse_term(bound);
    expect(Tok::RParen, "')'");
    expect(Tok::LBrace, "'{'");
    std::vector<CicPtr> ctors;
    if (cur().type != Tok::RBrace) {
      std::string stand_in = fresh_internal();
      bound.emplace_back(x, cic_fvar(stand_in, SortTag::Box));
      while (true) {
        ctors.push_back(cic_abstract(parse_term(bound), stand_in));
        if (!accept(Tok::Bar)) break;
      }
      bound.pop_back();
    }
    expect(Tok::RBrace, "'}'");
    return cic_ind(x, arity, std::move(ctors));
  }

  CicPtr parse_constr(std::vector<std::pair<std::string, CicPtr>>& bound) {
    expect(Tok::LParen, "'('");
    long i = expect(Tok::Number, "constructor index").num;
    expect(Tok::Comma, "','");
    CicPtr ind = parse_term(bound);
    expect(Tok::RParen, "')'");
    return cic_constr((int)i, ind);
  }

  CicPtr parse_elim(std::vector<std::pair<std::string, CicPtr>>& bound) {
    expect(Tok::LParen, "'('");
    CicPtr ind = parse_term(bound);
    expect(Tok::Comma, "','");
    CicPtr motive = parse_term(bound);
    expect(Tok::Comma, "','");
    expect(Tok::LParen, "'('");
    std::vector<CicPtr> indices;
    if (cur().type != Tok::RParen) {
      while (true) {
        indices.push_back(parse_term(bound));
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Comma, "','");
    CicPtr scrut = parse_term(bound);
    expect(Tok::RParen, "')'");
    expect(Tok::LBrace, "'{'");
    std::vector<CicPtr> branches;
    if (cur().type != Tok::RBrace) {
      while (true) {
        branches.push_back(parse_term(bound));
        if (!accept(Tok::Bar)) break;
      }
    }
    expect(Tok::RBrace, "'}'");
    return cic_elim(ind, motive, std::move(indices), scrut, std::move(branches));
  }

  CicPtr main_term;

  void parse_file() {
    while (cur().type != Tok::End) {
      if (accept_kw("let")) {
        std::string name = expect(Tok::Ident, "name").text;
        expect(Tok::Assign, "':='");
        std::vector<std::pair<std::string, CicPtr>> bound;
        CicPtr t = parse_term(bound);
        expect(Tok::Dot, "'.'");
        lets.emplace_back(name, t);
        continue;
      }
      if (accept_kw("main")) {
        std::vector<std::pair<std::string, CicPtr>> bound;
        main_term = parse_term(bound);
        expect(Tok::Dot, "'.'");
        continue;
      }
      fail("expected 'let' or 'main'");
    }
  }
};

}  // namespace

CicSourceFile parse_cic_file(const std::string& text, const std::string& path) {
  Lexer lex(text);
  CicParser p;
  p.toks = std::move(lex.tokens);
  p.parse_file();
  CicSourceFile out;
  out.path = path;
  out.lets = std::move(p.lets);
  out.main = p.main_term;
  return out;
}

}  // namespace cac
