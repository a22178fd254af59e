/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/term.hpp"

#include <atomic>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace cac {

const TermPtr* Environment::lookup(const std::string& x) const {
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

std::string position_to_string(const Position& p) {
  if (p.empty()) return "ε";
  std::ostringstream os;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << '.';
    os << p[i];
  }
  return os.str();
}

TermPtr mk_sort(SortTag s) {
  auto t = std::make_shared<Term>(TermKind::Sort);
  const_cast<Term&>(*t).sort = s;
  return t;
}

TermPtr star() {
  static TermPtr t = mk_sort(SortTag::Star);
  return t;
}

TermPtr box() {
  static TermPtr t = mk_sort(SortTag::Box);
  return t;
}

TermPtr mk_bvar(int index) {
  auto t = std::make_shared<Term>(TermKind::BVar);
  const_cast<Term&>(*t).index = index;
  return t;
}

TermPtr mk_fvar(const std::string& name, SortTag vsort) {
  auto t = std::make_shared<Term>(TermKind::FVar);
  auto& m = const_cast<Term&>(*t);
  m.name = name;
  m.vsort = vsort;
  return t;
}

TermPtr mk_sym(const std::string& name, SortTag vsort) {
  auto t = std::make_shared<Term>(TermKind::Sym);
  auto& m = const_cast<Term&>(*t);
  m.name = name;
  m.vsort = vsort;
  return t;
}

TermPtr mk_abs(const std::string& hint, const TermPtr& annot, const TermPtr& body) {
  auto t = std::make_shared<Term>(TermKind::Abs);
  auto& m = const_cast<Term&>(*t);
  m.name = hint;
  m.left = annot;
  m.right = body;
  return t;
}

TermPtr mk_prod(const std::string& hint, const TermPtr& dom, const TermPtr& cod) {
  auto t = std::make_shared<Term>(TermKind::Prod);
  auto& m = const_cast<Term&>(*t);
  m.name = hint;
  m.left = dom;
  m.right = cod;
  return t;
}

TermPtr mk_arrow(const TermPtr& dom, const TermPtr& cod) {
  return mk_prod("_", dom, cod);
}

TermPtr mk_app(const TermPtr& f, const TermPtr& a) {
  auto t = std::make_shared<Term>(TermKind::App);
  auto& m = const_cast<Term&>(*t);
  m.left = f;
  m.right = a;
  return t;
}

TermPtr mk_app(const TermPtr& f, const std::vector<TermPtr>& args) {
  TermPtr t = f;
  for (auto& a : args) t = mk_app(t, a);
  return t;
}

bool is_sort(const TermPtr& t, SortTag s) {
  return t->kind == TermKind::Sort && t->sort == s;
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Sort: return a->sort == b->sort;
    case TermKind::BVar: return a->index == b->index;
    case TermKind::FVar: return a->name == b->name;
    case TermKind::Sym: return a->name == b->name;
    case TermKind::Abs:
    case TermKind::App:
    case TermKind::Prod:
      return alpha_eq(a->left, b->left) && alpha_eq(a->right, b->right);
  }
  return false;
}

namespace {

TermPtr instantiate_at(const TermPtr& t, int depth, const TermPtr& arg) {
  switch (t->kind) {
    case TermKind::Sort:
    case TermKind::FVar:
    case TermKind::Sym:
      return t;
    case TermKind::BVar:
      return t->index == depth ? arg : t;
    case TermKind::App: {
      auto l = instantiate_at(t->left, depth, arg);
      auto r = instantiate_at(t->right, depth, arg);
      if (l == t->left && r == t->right) return t;
      return mk_app(l, r);
    }
    case TermKind::Abs: {
      auto l = instantiate_at(t->left, depth, arg);
      auto r = instantiate_at(t->right, depth + 1, arg);
      if (l == t->left && r == t->right) return t;
      return mk_abs(t->name, l, r);
    }
    case TermKind::Prod: {
      auto l = instantiate_at(t->left, depth, arg);
      auto r = instantiate_at(t->right, depth + 1, arg);
      if (l == t->left && r == t->right) return t;
      return mk_prod(t->name, l, r);
    }
  }
  return t;
}

TermPtr abstract_at(const TermPtr& t, int depth, const std::string& x) {
  switch (t->kind) {
    case TermKind::Sort:
    case TermKind::BVar:
    case TermKind::Sym:
      return t;
    case TermKind::FVar:
      return t->name == x ? mk_bvar(depth) : t;
    case TermKind::App: {
      auto l = abstract_at(t->left, depth, x);
      auto r = abstract_at(t->right, depth, x);
      if (l == t->left && r == t->right) return t;
      return mk_app(l, r);
    }
    case TermKind::Abs: {
      auto l = abstract_at(t->left, depth, x);
      auto r = abstract_at(t->right, depth + 1, x);
      if (l == t->left && r == t->right) return t;
      return mk_abs(t->name, l, r);
    }
    case TermKind::Prod: {
      auto l = abstract_at(t->left, depth, x);
      auto r = abstract_at(t->right, depth + 1, x);
      if (l == t->left && r == t->right) return t;
      return mk_prod(t->name, l, r);
    }
  }
  return t;
}

}  // namespace

TermPtr instantiate(const TermPtr& body, const TermPtr& arg) {
  return instantiate_at(body, 0, arg);
}

TermPtr abstract_fvar(const TermPtr& t, const std::string& x) {
  return abstract_at(t, 0, x);
}

TermPtr subst(const TermPtr& t, const Substitution& theta) {
  if (theta.empty()) return t;
  switch (t->kind) {
    case TermKind::Sort:
    case TermKind::BVar:
    case TermKind::Sym:
      return t;
    case TermKind::FVar: {
      auto it = theta.find(t->name);
      return it == theta.end() ? t : it->second;
    }
    case TermKind::App: {
      auto l = subst(t->left, theta);
      auto r = subst(t->right, theta);
      if (l == t->left && r == t->right) return t;
      return mk_app(l, r);
    }
    case TermKind::Abs: {
      auto l = subst(t->left, theta);
      auto r = subst(t->right, theta);
      if (l == t->left && r == t->right) return t;
      return mk_abs(t->name, l, r);
    }
    case TermKind::Prod: {
      auto l = subst(t->left, theta);
      auto r = subst(t->right, theta);
      if (l == t->left && r == t->right) return t;
      return mk_prod(t->name, l, r);
    }
  }
  return t;
}

TermPtr subst1(const TermPtr& t, const std::string& x, const TermPtr& u) {
  Substitution s;
  s[x] = u;
  return subst(t, s);
}

namespace {

void collect_fvars(const TermPtr& t, std::map<std::string, SortTag>& out) {
  switch (t->kind) {
    case TermKind::FVar:
      out.emplace(t->name, t->vsort);
      return;
    case TermKind::Abs:
    case TermKind::App:
    case TermKind::Prod:
      collect_fvars(t->left, out);
      collect_fvars(t->right, out);
      return;
    default:
      return;
  }
}

void collect_syms(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Sym:
      out.insert(t->name);
      return;
    case TermKind::Abs:
    case TermKind::App:
    case TermKind::Prod:
      collect_syms(t->left, out);
      collect_syms(t->right, out);
      return;
    default:
      return;
  }
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::map<std::string, SortTag> m;
  collect_fvars(t, m);
  std::set<std::string> out;
  for (auto& [k, v] : m) out.insert(k);
  return out;
}

std::map<std::string, SortTag> free_vars_sorted(const TermPtr& t) {
  std::map<std::string, SortTag> m;
  collect_fvars(t, m);
  return m;
}

bool occurs_free(const std::string& x, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::FVar: return t->name == x;
    case TermKind::Abs:
    case TermKind::App:
    case TermKind::Prod:
      return occurs_free(x, t->left) || occurs_free(x, t->right);
    default:
      return false;
  }
}

std::set<std::string> symbols_of(const TermPtr& t) {
  std::set<std::string> out;
  collect_syms(t, out);
  return out;
}

namespace {

void walk_positions(const TermPtr& t, Position& here, std::set<Position>& out) {
  out.insert(here);
  if (t->kind == TermKind::Abs || t->kind == TermKind::App || t->kind == TermKind::Prod) {
    here.push_back(1);
    walk_positions(t->left, here, out);
    here.back() = 2;
    walk_positions(t->right, here, out);
    here.pop_back();
  }
}

void walk_occurrences(const TermPtr& t, const std::string& x, Position& here,
                      std::set<Position>& out) {
  if ((t->kind == TermKind::FVar || t->kind == TermKind::Sym) && t->name == x)
    out.insert(here);
  if (t->kind == TermKind::Abs || t->kind == TermKind::App || t->kind == TermKind::Prod) {
    here.push_back(1);
    walk_occurrences(t->left, x, here, out);
    here.back() = 2;
    walk_occurrences(t->right, x, here, out);
    here.pop_back();
  }
}

}  // namespace

std::set<Position> all_positions(const TermPtr& t) {
  std::set<Position> out;
  Position here;
  walk_positions(t, here, out);
  return out;
}

std::set<Position> positions_of(const std::string& x, const TermPtr& t) {
  std::set<Position> out;
  Position here;
  walk_occurrences(t, x, here, out);
  return out;
}

TermPtr subterm_at(const TermPtr& t, const Position& p) {
  TermPtr cur = t;
  for (int step : p) {
    if (cur->kind != TermKind::Abs && cur->kind != TermKind::App &&
        cur->kind != TermKind::Prod)
      throw std::out_of_range("position does not address a subterm");
    cur = step == 1 ? cur->left : cur->right;
  }
  return cur;
}

TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& u) {
  if (p.empty()) return u;
  Position rest(p.begin() + 1, p.end());
  switch (t->kind) {
    case TermKind::Abs:
      return p[0] == 1 ? mk_abs(t->name, replace_at(t->left, rest, u), t->right)
                       : mk_abs(t->name, t->left, replace_at(t->right, rest, u));
    case TermKind::Prod:
      return p[0] == 1 ? mk_prod(t->name, replace_at(t->left, rest, u), t->right)
                       : mk_prod(t->name, t->left, replace_at(t->right, rest, u));
    case TermKind::App:
      return p[0] == 1 ? mk_app(replace_at(t->left, rest, u), t->right)
                       : mk_app(t->left, replace_at(t->right, rest, u));
    default:
      throw std::out_of_range("position does not address a subterm");
  }
}

SortTag binder_sort(const TermPtr& annot) {
  TermClass c = classify(annot);
  if (c == TermClass::Kind) return SortTag::Box;
  if (c == TermClass::Sort) return SortTag::Box;
  return SortTag::Star;
}

TermClass classify(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Sort:
      return TermClass::Sort;
    case TermKind::BVar:
      // Dangling index: callers classify opened bodies, so this is ill-formed.
      return TermClass::IllFormed;
    case TermKind::FVar:
    case TermKind::Sym:
      return t->vsort == SortTag::Star ? TermClass::Object : TermClass::Predicate;
    case TermKind::App: {
      TermClass f = classify(t->left);
      if (f == TermClass::Object || f == TermClass::Predicate) return f;
      return TermClass::IllFormed;
    }
    case TermKind::Abs: {
      auto v = mk_fvar(fresh_internal(), binder_sort(t->left));
      TermClass b = classify(instantiate(t->right, v));
      if (b == TermClass::Object || b == TermClass::Predicate) return b;
      return TermClass::IllFormed;
    }
    case TermKind::Prod: {
      auto v = mk_fvar(fresh_internal(), binder_sort(t->left));
      TermPtr cod = instantiate(t->right, v);
      if (is_sort(cod, SortTag::Star)) return TermClass::Kind;
      TermClass b = classify(cod);
      if (b == TermClass::Kind || b == TermClass::Predicate) return b;
      return TermClass::IllFormed;
    }
  }
  return TermClass::IllFormed;
}

const char* term_class_name(TermClass c) {
  switch (c) {
    case TermClass::Object: return "object";
    case TermClass::Predicate: return "predicate";
    case TermClass::Kind: return "kind";
    case TermClass::Sort: return "sort";
    case TermClass::IllFormed: return "ill-formed";
  }
  return "?";
}

Spine spine(const TermPtr& t) {
  Spine s;
  TermPtr cur = t;
  std::vector<TermPtr> rev;
  while (cur->kind == TermKind::App) {
    rev.push_back(cur->right);
    cur = cur->left;
  }
  s.head = cur;
  s.args.assign(rev.rbegin(), rev.rend());
  return s;
}

Telescope split_telescope(const TermPtr& t, int max_binders) {
  Telescope tel;
  TermPtr cur = t;
  while (cur->kind == TermKind::Prod &&
         (max_binders < 0 || (int)tel.binders.size() < max_binders)) {
    SortTag s = binder_sort(cur->left);
    std::string x = fresh_internal();
    tel.binders.emplace_back(x, cur->left);
    tel.sorts.push_back(s);
    tel.hints.push_back(cur->name);
    cur = instantiate(cur->right, mk_fvar(x, s));
  }
  tel.core = cur;
  return tel;
}

TermPtr build_telescope(const std::vector<std::pair<std::string, TermPtr>>& binders,
                        const TermPtr& core) {
  TermPtr cur = core;
  for (auto it = binders.rbegin(); it != binders.rend(); ++it)
    cur = mk_prod(it->first, it->second, abstract_fvar(cur, it->first));
  return cur;
}

TermPtr build_telescope(const Telescope& tel) {
  return build_telescope(tel.binders, tel.core);
}

TermPtr build_abstractions(const std::vector<std::pair<std::string, TermPtr>>& binders,
                           const TermPtr& core) {
  TermPtr cur = core;
  for (auto it = binders.rbegin(); it != binders.rend(); ++it)
    cur = mk_abs(it->first, it->second, abstract_fvar(cur, it->first));
  return cur;
}

std::string fresh_internal() {
  static std::atomic<unsigned long> counter{0};
  return "#" + std::to_string(counter.fetch_add(1));
}

std::string fresh_named(const std::string& hint, const std::set<std::string>& avoid) {
  std::string base = hint;
  if (base.empty() || base == "_" || base[0] == '#') base = "x";
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + std::string(i, '\'');
    if (!avoid.count(cand)) return cand;
    if (i > 8) break;
  }
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

namespace {

bool occurs_bvar_at(const TermPtr& t, int depth) {
  switch (t->kind) {
    case TermKind::BVar: return t->index == depth;
    case TermKind::App:
      return occurs_bvar_at(t->left, depth) || occurs_bvar_at(t->right, depth);
    case TermKind::Abs:
    case TermKind::Prod:
      return occurs_bvar_at(t->left, depth) || occurs_bvar_at(t->right, depth + 1);
    default:
      return false;
  }
}

bool occurs_free_bvar0(const TermPtr& body) { return occurs_bvar_at(body, 0); }

// "(*" starts a comment, so grouped terms beginning with a sort need a space.
void open_paren(std::ostringstream& os) { os << '('; }
void close_group(std::ostringstream& os, const std::string& inner) {
  if (!inner.empty() && inner[0] == '*') os << ' ';
  os << inner << ')';
}

// Precedence levels for printing: 0 = term (binders, arrows), 1 = application,
// 2 = atom.
void print_term(std::ostringstream& os, const TermPtr& t,
                std::vector<std::string>& bound, int level) {
  switch (t->kind) {
    case TermKind::Sort:
      os << (t->sort == SortTag::Star ? "*" : "[]");
      return;
    case TermKind::BVar: {
      int i = (int)bound.size() - 1 - t->index;
      if (i >= 0)
        os << bound[i];
      else
        os << "_" << t->index;
      return;
    }
    case TermKind::FVar:
    case TermKind::Sym:
      os << t->name;
      return;
    case TermKind::App: {
      std::ostringstream inner;
      print_term(inner, t->left, bound, 1);
      inner << ' ';
      print_term(inner, t->right, bound, 2);
      if (level > 1) {
        open_paren(os);
        close_group(os, inner.str());
      } else {
        os << inner.str();
      }
      return;
    }
    case TermKind::Abs:
    case TermKind::Prod: {
      std::ostringstream inner;
      bool dependent = occurs_free_bvar0(t->right);
      if (t->kind == TermKind::Prod && !dependent) {
        print_term(inner, t->left, bound, 1);
        inner << " -> ";
        bound.push_back("?");
        print_term(inner, t->right, bound, 0);
        bound.pop_back();
      } else {
        std::set<std::string> avoid;
        for (auto& n : free_vars(t->right)) avoid.insert(n);
        for (auto& n : bound) avoid.insert(n);
        std::string x = fresh_named(t->name, avoid);
        inner << (t->kind == TermKind::Abs ? '[' : '(') << x << ':';
        print_term(inner, t->left, bound, 0);
        inner << (t->kind == TermKind::Abs ? ']' : ')');
        bound.push_back(x);
        print_term(inner, t->right, bound, 0);
        bound.pop_back();
      }
      if (level > 0) {
        open_paren(os);
        close_group(os, inner.str());
      } else {
        os << inner.str();
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const TermPtr& t) {
  std::ostringstream os;
  std::vector<std::string> bound;
  print_term(os, t, bound, 0);
  return os.str();
}

}  // namespace cac
