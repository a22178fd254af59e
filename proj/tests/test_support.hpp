/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cac/cic.hpp"
#include "cac/cli.hpp"
#include "cac/parse.hpp"
#include "cac/positivity.hpp"
#include "cac/recursor.hpp"
#include "cac/typecheck.hpp"

namespace cactest {

using namespace cac;

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(std::string(CAC_CORPUS_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Signature elaborate_text(const std::string& text, ElaborateOptions opts = {}) {
  return elaborate_signature(parse_cac_file(text), opts);
}

inline Signature elaborate_corpus(const std::string& name, ElaborateOptions opts = {}) {
  return elaborate_signature(parse_cac_file(read_corpus(name), name), opts);
}

inline std::map<std::string, SortTag> symbol_sorts(const Signature& sig) {
  std::map<std::string, SortTag> out;
  for (auto& d : sig.decls) out[d.name] = d.sort;
  return out;
}

// Parses a term over a signature; unknown identifiers become free variables
// with the sorts given in vars.
inline TermPtr tparse(const Signature& sig, const std::string& text,
                      const std::map<std::string, SortTag>& vars = {}) {
  return parse_term_text(text, symbol_sorts(sig), vars);
}

// Deterministic xorshift generator for property tests.
struct Rng {
  unsigned long long s;
  explicit Rng(unsigned long long seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  unsigned long long next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  int pick(int n) { return n <= 0 ? 0 : (int)(next() % (unsigned)n); }
  bool flip() { return next() & 1; }
};

// ---------------------------------------------------------------------------
// Named-term reference implementation: the oracle for capture-avoiding
// substitution. Binders carry explicit names; substitution renames a binder
// whenever it would capture a free variable of an image.
struct NTerm {
  enum Kind { Sort, Var, Sym, Abs, App, Prod } kind = Var;
  SortTag sort = SortTag::Star;
  std::string name;
  std::shared_ptr<NTerm> a, b;
};
using NPtr = std::shared_ptr<NTerm>;

inline NPtr nmk(NTerm::Kind k, std::string name, NPtr a = nullptr, NPtr b = nullptr) {
  auto t = std::make_shared<NTerm>();
  t->kind = k;
  t->name = std::move(name);
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

inline void nfree(const NPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case NTerm::Var: out.insert(t->name); return;
    case NTerm::Abs:
    case NTerm::Prod: {
      nfree(t->a, out);
      std::set<std::string> body;
      nfree(t->b, body);
      body.erase(t->name);
      out.insert(body.begin(), body.end());
      return;
    }
    case NTerm::App:
      nfree(t->a, out);
      nfree(t->b, out);
      return;
    default:
      return;
  }
}

inline NPtr nrename(const NPtr& t, const std::string& from, const std::string& to);

inline NPtr nsubst(const NPtr& t, const std::map<std::string, NPtr>& theta) {
  switch (t->kind) {
    case NTerm::Sort:
    case NTerm::Sym:
      return t;
    case NTerm::Var: {
      auto it = theta.find(t->name);
      return it == theta.end() ? t : it->second;
    }
    case NTerm::App:
      return nmk(NTerm::App, "", nsubst(t->a, theta), nsubst(t->b, theta));
    case NTerm::Abs:
    case NTerm::Prod: {
      std::map<std::string, NPtr> inner = theta;
      inner.erase(t->name);
      std::set<std::string> image_free;
      for (auto& [k, v] : inner) nfree(v, image_free);
      std::string binder = t->name;
      NPtr body = t->b;
      if (image_free.count(binder)) {
        std::set<std::string> avoid = image_free;
        nfree(body, avoid);
        binder = fresh_named(t->name, avoid);
        body = nrename(body, t->name, binder);
      }
      auto out = nmk(t->kind, binder, nsubst(t->a, theta), nsubst(body, inner));
      out->sort = t->sort;
      return out;
    }
  }
  return t;
}

inline NPtr nrename(const NPtr& t, const std::string& from, const std::string& to) {
  std::map<std::string, NPtr> m;
  m[from] = nmk(NTerm::Var, to);
  return nsubst(t, m);
}

// Conversions between the reference representation and the kernel one.
inline NPtr to_named(const TermPtr& t, std::vector<std::string>& binders) {
  switch (t->kind) {
    case TermKind::Sort: {
      auto s = nmk(NTerm::Sort, "");
      s->sort = t->sort;
      return s;
    }
    case TermKind::BVar:
      return nmk(NTerm::Var, binders[binders.size() - 1 - t->index]);
    case TermKind::FVar:
      return nmk(NTerm::Var, t->name);
    case TermKind::Sym:
      return nmk(NTerm::Sym, t->name);
    case TermKind::App:
      return nmk(NTerm::App, "", to_named(t->left, binders), to_named(t->right, binders));
    case TermKind::Abs:
    case TermKind::Prod: {
      std::set<std::string> avoid(binders.begin(), binders.end());
      for (auto& v : free_vars(t->right)) avoid.insert(v);
      std::string x = fresh_named(t->name, avoid) + "#b" + std::to_string(binders.size());
      NPtr a = to_named(t->left, binders);
      binders.push_back(x);
      NPtr b = to_named(t->right, binders);
      binders.pop_back();
      return nmk(t->kind == TermKind::Abs ? NTerm::Abs : NTerm::Prod, x, a, b);
    }
  }
  return nullptr;
}

inline NPtr to_named(const TermPtr& t) {
  std::vector<std::string> binders;
  return to_named(t, binders);
}

inline TermPtr from_named(const NPtr& t) {
  switch (t->kind) {
    case NTerm::Sort: return mk_sort(t->sort);
    case NTerm::Var: return mk_fvar(t->name);
    case NTerm::Sym: return mk_sym(t->name);
    case NTerm::App: return mk_app(from_named(t->a), from_named(t->b));
    case NTerm::Abs:
      return mk_abs(t->name, from_named(t->a),
                    abstract_fvar(from_named(t->b), t->name));
    case NTerm::Prod:
      return mk_prod(t->name, from_named(t->a),
                     abstract_fvar(from_named(t->b), t->name));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Brute-force all-redex enumerator: the oracle for step soundness.
struct Redex {
  Position pos;
  TermPtr result;
  std::string rule;
};

inline void all_redexes_at(const TermPtr& whole, const TermPtr& t, Position& here,
                           const Signature& sig, std::vector<Redex>& out) {
  if (t->kind == TermKind::App && t->left->kind == TermKind::Abs)
    out.push_back({here, replace_at(whole, here, instantiate(t->left->right, t->right)),
                   "beta"});
  Spine s = spine(t);
  if (s.head->kind == TermKind::Sym) {
    for (const RewriteRule* r : sig.rules_of(s.head->name)) {
      if (r->lhs_args.size() != s.args.size()) continue;
      if (auto m = match_lhs(r->lhs_term(), t))
        out.push_back({here, replace_at(whole, here, subst(r->rhs, *m)), r->label});
    }
  }
  if (t->kind == TermKind::Abs || t->kind == TermKind::App || t->kind == TermKind::Prod) {
    here.push_back(1);
    all_redexes_at(whole, t->left, here, sig, out);
    here.back() = 2;
    all_redexes_at(whole, t->right, here, sig, out);
    here.pop_back();
  }
}

inline std::vector<Redex> all_redexes(const TermPtr& t, const Signature& sig) {
  std::vector<Redex> out;
  Position here;
  all_redexes_at(t, t, here, sig, out);
  return out;
}

// ---------------------------------------------------------------------------
// Base signed-position computation ignoring monotone-argument declarations:
// the differential oracle for the extended definition.
inline void base_signed_walk(const TermPtr& t, Polarity d, Position& here,
                             std::map<Polarity, std::set<Position>>& out) {
  switch (t->kind) {
    case TermKind::Sort:
    case TermKind::FVar:
    case TermKind::Sym:
    case TermKind::BVar:
      out[d].insert(here);
      return;
    case TermKind::Prod:
      here.push_back(1);
      base_signed_walk(t->left, d * Polarity::Minus, here, out);
      here.back() = 2;
      base_signed_walk(t->right, d, here, out);
      here.pop_back();
      return;
    case TermKind::Abs:
      here.push_back(2);
      base_signed_walk(t->right, d, here, out);
      here.pop_back();
      return;
    case TermKind::App:
      here.push_back(1);
      base_signed_walk(t->left, d, here, out);
      here.pop_back();
      return;
  }
}

inline std::map<Polarity, std::set<Position>> base_signed_positions(const TermPtr& t,
                                                                    Polarity d) {
  std::map<Polarity, std::set<Position>> out;
  out[Polarity::Plus];
  out[Polarity::Minus];
  Position here;
  base_signed_walk(t, d, here, out);
  return out;
}

// Per-path sign oracle: multiplies the per-step signs along a path. Returns
// nullopt when the path crosses an unsigned edge.
inline std::optional<Polarity> sign_along_path(const TermPtr& t, const Position& p,
                                               const Signature& sig) {
  TermPtr cur = t;
  Polarity d = Polarity::Plus;
  std::size_t i = 0;
  while (i < p.size()) {
    switch (cur->kind) {
      case TermKind::Prod:
        if (p[i] == 1) d = d * Polarity::Minus;
        cur = p[i] == 1 ? cur->left : cur->right;
        ++i;
        break;
      case TermKind::Abs:
        if (p[i] == 1) return std::nullopt;  // annotations are unsigned
        cur = cur->right;
        ++i;
        break;
      case TermKind::App: {
        Spine s = spine(cur);
        std::size_t n = s.args.size();
        // Count leading 1s to find whether the path descends into the head
        // or into one of the arguments.
        std::size_t ones = 0;
        while (ones < n && i + ones < p.size() && p[i + ones] == 1) ++ones;
        if (ones == n && i + ones == p.size()) {
          // Path ends at the spine head.
          return s.head->kind == TermKind::Sym || s.head->kind == TermKind::FVar ||
                         s.head->kind == TermKind::Sort || s.head->kind == TermKind::BVar
                     ? std::optional<Polarity>(d)
                     : std::nullopt;
        }
        if (s.head->kind != TermKind::Sym) {
          // Non-symbol spine: only the function side is signed.
          if (p[i] != 1) return std::nullopt;
          cur = cur->left;
          ++i;
          break;
        }
        if (i + ones >= p.size() || p[i + ones] != 2) {
          if (ones == n) {  // descending below the head atom is impossible
            return std::nullopt;
          }
          // Path stops inside the spine skeleton.
          return std::nullopt;
        }
        std::size_t arg_index = n - ones;  // 1-based argument number
        const SymbolDecl* f = sig.find(s.head->name);
        Polarity eps;
        if (f && f->mon_plus.count((int)arg_index)) eps = Polarity::Plus;
        else if (f && f->mon_minus.count((int)arg_index)) eps = Polarity::Minus;
        else return std::nullopt;
        d = d * eps;
        cur = s.args[arg_index - 1];
        i += ones + 1;
        break;
      }
      default:
        return std::nullopt;
    }
  }
  switch (cur->kind) {
    case TermKind::Sort:
    case TermKind::FVar:
    case TermKind::Sym:
    case TermKind::BVar:
      return d;
    default:
      return std::nullopt;  // the sets only address atoms
  }
}

// ---------------------------------------------------------------------------
// Random raw terms over a small vocabulary (used for normalization and
// substitution properties).
inline TermPtr random_term(Rng& rng, const Signature& sig, int depth,
                           std::vector<std::pair<std::string, SortTag>>& scope) {
  if (depth <= 0 || rng.pick(6) == 0) {
    int which = rng.pick(3);
    if (which == 0 && !sig.decls.empty()) {
      const SymbolDecl& d = sig.decls[rng.pick((int)sig.decls.size())];
      return mk_sym(d.name, d.sort);
    }
    if (which == 1 && !scope.empty()) {
      auto& [n, s] = scope[rng.pick((int)scope.size())];
      return mk_fvar(n, s);
    }
    return rng.flip() ? star() : mk_fvar("u" + std::to_string(rng.pick(3)));
  }
  switch (rng.pick(4)) {
    case 0:
      return mk_app(random_term(rng, sig, depth - 1, scope),
                    random_term(rng, sig, depth - 1, scope));
    case 1: {
      TermPtr annot = random_term(rng, sig, depth - 1, scope);
      std::string x = "b" + std::to_string(rng.pick(1000));
      scope.push_back({x, binder_sort(annot)});
      TermPtr body = random_term(rng, sig, depth - 1, scope);
      scope.pop_back();
      return mk_abs(x, annot, abstract_fvar(body, x));
    }
    case 2: {
      TermPtr dom = random_term(rng, sig, depth - 1, scope);
      std::string x = "b" + std::to_string(rng.pick(1000));
      scope.push_back({x, binder_sort(dom)});
      TermPtr body = random_term(rng, sig, depth - 1, scope);
      scope.pop_back();
      return mk_prod(x, dom, abstract_fvar(body, x));
    }
    default:
      return mk_app(random_term(rng, sig, depth - 1, scope),
                    random_term(rng, sig, depth - 1, scope));
  }
}

inline TermPtr random_term(Rng& rng, const Signature& sig, int depth) {
  std::vector<std::pair<std::string, SortTag>> scope;
  return random_term(rng, sig, depth, scope);
}

// ---------------------------------------------------------------------------
// Type-directed generator of closed well-typed terms over a signature.
// First-order matching of a symbol's result type against the target chooses
// instantiations, remaining arguments are generated recursively.
struct TypedGen {
  const Signature& sig;
  Rng& rng;
  FuelBudget fuel{200000};

  TypedGen(const Signature& s, Rng& r) : sig(s), rng(r) {}

  // Generic first-order matching with pattern variables `vars`.
  static bool gmatch(const TermPtr& pat, const TermPtr& t,
                     const std::set<std::string>& vars, Substitution& out) {
    if (pat->kind == TermKind::FVar && vars.count(pat->name)) {
      auto it = out.find(pat->name);
      if (it != out.end()) return alpha_eq(it->second, t);
      out[pat->name] = t;
      return true;
    }
    if (pat->kind != t->kind) return false;
    switch (pat->kind) {
      case TermKind::Sort: return pat->sort == t->sort;
      case TermKind::BVar: return pat->index == t->index;
      case TermKind::FVar: return pat->name == t->name;
      case TermKind::Sym: return pat->name == t->name;
      default:
        return gmatch(pat->left, t->left, vars, out) &&
               gmatch(pat->right, t->right, vars, out);
    }
  }

  std::optional<TermPtr> gen(const Environment& env, const TermPtr& target, int depth) {
    TermPtr goal = target;
    try {
      goal = normalize(goal, sig, fuel).term;
    } catch (const fuel_error&) {
      return std::nullopt;
    }
    if (goal->kind == TermKind::Prod) {
      std::string x = fresh_named("v", [&] {
        std::set<std::string> avoid;
        for (auto& [n, t] : env.bindings) avoid.insert(n);
        return avoid;
      }());
      Environment env2 = env;
      env2.push(x, goal->left);
      SortTag sx = binder_sort(goal->left);
      auto body = gen(env2, instantiate(goal->right, mk_fvar(x, sx)), depth - 1);
      if (!body) return std::nullopt;
      return mk_abs(x, goal->left, abstract_fvar(*body, x));
    }
    // Collect candidate heads: environment variables and symbols whose
    // telescope core matches the goal.
    struct Cand {
      TermPtr head;
      Telescope tel;
      Substitution inst;
    };
    std::vector<Cand> cands;
    auto consider = [&](const TermPtr& head, const TermPtr& type) {
      Telescope tel = split_telescope(type);
      std::set<std::string> vars;
      for (auto& [n, ty] : tel.binders) vars.insert(n);
      Substitution inst;
      if (gmatch(tel.core, goal, vars, inst)) cands.push_back({head, tel, inst});
    };
    for (auto& d : sig.decls) consider(mk_sym(d.name, d.sort), d.type);
    for (auto& [n, ty] : env.bindings)
      consider(mk_fvar(n, binder_sort(ty)), ty);
    if (cands.empty()) return std::nullopt;
    // Prefer small terms near the depth limit: try candidates with fewer
    // unresolved arguments first when depth is low.
    for (int attempt = 0; attempt < 6; ++attempt) {
      Cand& c = cands[rng.pick((int)cands.size())];
      int unresolved = 0;
      for (auto& [n, ty] : c.tel.binders)
        if (!c.inst.count(n)) ++unresolved;
      if (depth <= 0 && unresolved > 0) continue;
      Substitution inst = c.inst;
      std::vector<TermPtr> args;
      bool ok = true;
      for (auto& [n, ty] : c.tel.binders) {
        TermPtr want = subst(ty, inst);
        auto it = inst.find(n);
        if (it != inst.end()) {
          args.push_back(it->second);
          continue;
        }
        auto a = gen(env, want, depth - 1);
        if (!a) { ok = false; break; }
        inst[n] = *a;
        args.push_back(*a);
      }
      if (!ok) continue;
      // The output match can bind variables at the wrong types; validate and
      // resample on failure.
      TermPtr candidate = mk_app(c.head, args);
      try {
        FuelBudget f(50000);
        TermPtr ty = infer(env, candidate, sig, f);
        if (!convertible(ty, goal, sig, f)) continue;
      } catch (...) {
        continue;
      }
      return candidate;
    }
    return std::nullopt;
  }
};

}  // namespace cactest
