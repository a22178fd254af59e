/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/rewriting.hpp"

#include <cassert>

#include "cac/signature.hpp"

namespace cac {

TermPtr RewriteRule::lhs_term() const {
  return mk_app(mk_sym(head), lhs_args);
}

namespace {

bool match_rec(const TermPtr& pat, const TermPtr& t, Substitution& out) {
  switch (pat->kind) {
    case TermKind::FVar: {
      auto it = out.find(pat->name);
      if (it != out.end()) return alpha_eq(it->second, t);
      out[pat->name] = t;
      return true;
    }
    case TermKind::Sym:
      return t->kind == TermKind::Sym && t->name == pat->name;
    case TermKind::App:
      return t->kind == TermKind::App && match_rec(pat->left, t->left, out) &&
             match_rec(pat->right, t->right, out);
    default:
      // lhs are algebraic; anything else never matches.
      return false;
  }
}

}  // namespace

std::optional<Substitution> match_lhs(const TermPtr& lhs, const TermPtr& t) {
  Substitution out;
  if (!match_rec(lhs, t, out)) return std::nullopt;
  return out;
}

namespace {

// Try a redex at the root of t only.
std::optional<StepInfo> step_here(const TermPtr& t, const Signature& sig) {
  if (t->kind == TermKind::App && t->left->kind == TermKind::Abs) {
    StepInfo info;
    info.result = instantiate(t->left->right, t->right);
    info.rule = "beta";
    return info;
  }
  if (t->kind == TermKind::App || t->kind == TermKind::Sym) {
    Spine s = spine(t);
    if (s.head->kind == TermKind::Sym) {
      for (const RewriteRule* r : sig.rules_of(s.head->name)) {
        if (r->lhs_args.size() != s.args.size()) continue;
        if (auto m = match_lhs(r->lhs_term(), t)) {
          StepInfo info;
          info.result = subst(r->rhs, *m);
          info.rule = r->label;
          return info;
        }
      }
    }
  }
  return std::nullopt;
}

TermPtr rebuild_node(const TermPtr& t, const TermPtr& l, const TermPtr& r) {
  switch (t->kind) {
    case TermKind::Abs: return mk_abs(t->name, l, r);
    case TermKind::Prod: return mk_prod(t->name, l, r);
    default: return mk_app(l, r);
  }
}

std::optional<StepInfo> step_rec(const TermPtr& t, const Signature& sig, Position& here) {
  if (auto s = step_here(t, sig)) {
    s->pos = here;
    return s;
  }
  if (t->kind == TermKind::Abs || t->kind == TermKind::App || t->kind == TermKind::Prod) {
    here.push_back(1);
    if (auto s = step_rec(t->left, sig, here)) {
      here.pop_back();
      s->result = rebuild_node(t, s->result, t->right);
      return s;
    }
    here.back() = 2;
    if (auto s = step_rec(t->right, sig, here)) {
      here.pop_back();
      s->result = rebuild_node(t, t->left, s->result);
      return s;
    }
    here.pop_back();
  }
  return std::nullopt;
}

}  // namespace

std::optional<StepInfo> step(const TermPtr& t, const Signature& sig) {
  Position here;
  return step_rec(t, sig, here);
}

NormalizeResult normalize(const TermPtr& t, const Signature& sig, FuelBudget& fuel,
                          bool keep_trace) {
  NormalizeResult res;
  res.term = t;
  while (auto s = step(res.term, sig)) {
    fuel.take();
    res.term = s->result;
    ++res.steps;
    if (keep_trace) res.trace.push_back(*s);
  }
  return res;
}

bool convertible(const TermPtr& t, const TermPtr& u, const Signature& sig,
                 FuelBudget& fuel) {
  if (alpha_eq(t, u)) return true;
  NormalizeResult a = normalize(t, sig, fuel);
  NormalizeResult b = normalize(u, sig, fuel);
  return alpha_eq(a.term, b.term);
}

namespace {

TermPtr walk(const TermPtr& t, const Substitution& s) {
  TermPtr cur = t;
  while (cur->kind == TermKind::FVar) {
    auto it = s.find(cur->name);
    if (it == s.end()) break;
    cur = it->second;
  }
  return cur;
}

bool occurs_in(const std::string& x, const TermPtr& t, const Substitution& s) {
  TermPtr w = walk(t, s);
  switch (w->kind) {
    case TermKind::FVar: return w->name == x;
    case TermKind::App:
      return occurs_in(x, w->left, s) || occurs_in(x, w->right, s);
    default:
      return false;
  }
}

bool unify_rec(const TermPtr& a0, const TermPtr& b0, Substitution& s) {
  TermPtr a = walk(a0, s), b = walk(b0, s);
  if (a->kind == TermKind::FVar && b->kind == TermKind::FVar && a->name == b->name)
    return true;
  if (a->kind == TermKind::FVar) {
    if (occurs_in(a->name, b, s)) return false;
    s[a->name] = b;
    return true;
  }
  if (b->kind == TermKind::FVar) {
    if (occurs_in(b->name, a, s)) return false;
    s[b->name] = a;
    return true;
  }
  if (a->kind == TermKind::Sym && b->kind == TermKind::Sym) return a->name == b->name;
  if (a->kind == TermKind::App && b->kind == TermKind::App)
    return unify_rec(a->left, b->left, s) && unify_rec(a->right, b->right, s);
  // Non-algebraic subterms only unify when alpha-equal.
  return alpha_eq(a, b);
}

TermPtr resolve(const TermPtr& t, const Substitution& s) {
  TermPtr w = walk(t, s);
  switch (w->kind) {
    case TermKind::App: {
      return mk_app(resolve(w->left, s), resolve(w->right, s));
    }
    case TermKind::Abs:
      return mk_abs(w->name, resolve(w->left, s), resolve(w->right, s));
    case TermKind::Prod:
      return mk_prod(w->name, resolve(w->left, s), resolve(w->right, s));
    default:
      return w;
  }
}

TermPtr rename_apart(const TermPtr& t, const std::string& suffix) {
  switch (t->kind) {
    case TermKind::FVar: return mk_fvar(t->name + suffix, t->vsort);
    case TermKind::App: return mk_app(rename_apart(t->left, suffix), rename_apart(t->right, suffix));
    case TermKind::Abs:
      return mk_abs(t->name, rename_apart(t->left, suffix), rename_apart(t->right, suffix));
    case TermKind::Prod:
      return mk_prod(t->name, rename_apart(t->left, suffix), rename_apart(t->right, suffix));
    default: return t;
  }
}

void nonvar_positions(const TermPtr& t, Position& here, std::vector<Position>& out) {
  if (t->kind == TermKind::FVar) return;
  out.push_back(here);
  if (t->kind == TermKind::App) {
    here.push_back(1);
    nonvar_positions(t->left, here, out);
    here.back() = 2;
    nonvar_positions(t->right, here, out);
    here.pop_back();
  }
}

}  // namespace

std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b) {
  Substitution s;
  if (!unify_rec(a, b, s)) return std::nullopt;
  // Resolve to an idempotent substitution.
  Substitution out;
  for (auto& [k, v] : s) out[k] = resolve(v, s);
  return out;
}

std::vector<CriticalPair> critical_pairs(const std::vector<RewriteRule>& rules) {
  std::vector<CriticalPair> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    TermPtr lhs1 = rules[i].lhs_term();
    std::vector<Position> positions;
    Position here;
    nonvar_positions(lhs1, here, positions);
    for (std::size_t j = 0; j < rules.size(); ++j) {
      TermPtr lhs2 = rename_apart(rules[j].lhs_term(), "$r");
      TermPtr rhs2 = rename_apart(rules[j].rhs, "$r");
      for (const Position& p : positions) {
        if (p.empty() && i == j) continue;  // trivial self-root overlap
        TermPtr sub = subterm_at(lhs1, p);
        auto u = unify(sub, lhs2);
        if (!u) continue;
        CriticalPair cp;
        cp.rule1 = i;
        cp.rule2 = j;
        cp.position = p;
        cp.unifier = *u;
        cp.peak = subst(lhs1, *u);
        cp.reduct_inner = replace_at(cp.peak, p, subst(rhs2, *u));
        cp.reduct_root = subst(rules[i].rhs, *u);
        cp.joinable = alpha_eq(cp.reduct_inner, cp.reduct_root);
        out.push_back(std::move(cp));
      }
    }
  }
  return out;
}

}  // namespace cac
