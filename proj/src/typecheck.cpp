/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/typecheck.hpp"

#include <algorithm>
#include <functional>

#include "cac/positivity.hpp"
#include "cac/recursor.hpp"

namespace cac {

namespace {

[[noreturn]] void type_fail(std::string code, std::string pointer, std::string msg,
                            std::string symbol = "", std::string rule = "") {
  throw type_error(make_diag(Severity::Error, std::move(code), std::move(pointer),
                             std::move(msg), std::move(symbol), std::move(rule)));
}

TermPtr infer_sort(const Environment& env, const TermPtr& t, const Signature& sig,
                   FuelBudget& fuel, const Visibility* vis) {
  TermPtr s = infer(env, t, sig, fuel, vis);
  if (s->kind != TermKind::Sort) {
    NormalizeResult n = normalize(s, sig, fuel);
    s = n.term;
  }
  if (s->kind != TermKind::Sort)
    type_fail("E_SORT_EXPECTED", "symbol-typing",
              "expected a sort, found " + to_string(s) + " as the type of " + to_string(t));
  return s;
}

}  // namespace

TermPtr infer(const Environment& env, const TermPtr& t, const Signature& sig,
              FuelBudget& fuel, const Visibility* vis) {
  switch (t->kind) {
    case TermKind::Sort:
      if (t->sort == SortTag::Star) return box();
      type_fail("E_TYPE", "symbol-typing", "the sort [] has no type");
    case TermKind::BVar:
      type_fail("E_TYPE", "symbol-typing", "dangling bound variable");
    case TermKind::FVar: {
      const TermPtr* ty = env.lookup(t->name);
      if (!ty) type_fail("E_UNBOUND_VAR", "symbol-typing", "unbound variable " + t->name);
      return *ty;
    }
    case TermKind::Sym: {
      const SymbolDecl* d = sig.find(t->name);
      if (!d) type_fail("E_UNKNOWN_SYMBOL", "symbol-typing", "unknown symbol " + t->name);
      if (vis && !vis->visible(t->name))
        type_fail("E_TYPE", "precedence",
                  "symbol " + t->name + " is not visible at this point of the elaboration");
      return d->type;
    }
    case TermKind::App: {
      TermPtr tf = infer(env, t->left, sig, fuel, vis);
      if (tf->kind != TermKind::Prod) tf = normalize(tf, sig, fuel).term;
      if (tf->kind != TermKind::Prod)
        type_fail("E_NOT_FUNCTION", "symbol-typing",
                  "applied term of non-product type " + to_string(tf));
      TermPtr ta = infer(env, t->right, sig, fuel, vis);
      if (!convertible(ta, tf->left, sig, fuel))
        type_fail("E_NOT_CONVERTIBLE", "conversion",
                  "argument type " + to_string(ta) + " is not convertible to " +
                      to_string(tf->left));
      return instantiate(tf->right, t->right);
    }
    case TermKind::Abs: {
      TermPtr su = infer_sort(env, t->left, sig, fuel, vis);
      std::set<std::string> avoid;
      for (auto& [n, ty] : env.bindings) avoid.insert(n);
      for (auto& n : free_vars(t->right)) avoid.insert(n);
      std::string x = fresh_named(t->name, avoid);
      Environment env2 = env;
      env2.push(x, t->left);
      TermPtr body = instantiate(t->right, mk_fvar(x, su->sort));
      TermPtr tv = infer(env2, body, sig, fuel, vis);
      // (abs) requires the product itself to be typable.
      infer_sort(env2, tv, sig, fuel, vis);
      return mk_prod(t->name, t->left, abstract_fvar(tv, x));
    }
    case TermKind::Prod: {
      TermPtr su = infer_sort(env, t->left, sig, fuel, vis);
      std::set<std::string> avoid;
      for (auto& [n, ty] : env.bindings) avoid.insert(n);
      for (auto& n : free_vars(t->right)) avoid.insert(n);
      std::string x = fresh_named(t->name, avoid);
      Environment env2 = env;
      env2.push(x, t->left);
      TermPtr body = instantiate(t->right, mk_fvar(x, su->sort));
      return infer_sort(env2, body, sig, fuel, vis);
    }
  }
  type_fail("E_TYPE", "symbol-typing", "unreachable term former");
}

void check(const Environment& env, const TermPtr& t, const TermPtr& type,
           const Signature& sig, FuelBudget& fuel, const Visibility* vis) {
  TermPtr ti = infer(env, t, sig, fuel, vis);
  if (is_sort(type, SortTag::Box)) {
    // Kind-level conversion is identity.
    if (!is_sort(ti, SortTag::Box))
      type_fail("E_NOT_CONVERTIBLE", "conversion",
                to_string(t) + " has type " + to_string(ti) + ", expected []");
    return;
  }
  if (!is_sort(ti, SortTag::Box)) infer_sort(env, type, sig, fuel, vis);
  if (!convertible(ti, type, sig, fuel))
    type_fail("E_NOT_CONVERTIBLE", "conversion",
              to_string(t) + " has type " + to_string(ti) + ", not convertible to " +
                  to_string(type));
}

std::map<std::string, SortTag> check_environment(const Environment& env,
                                                 const Signature& sig, FuelBudget& fuel) {
  std::map<std::string, SortTag> sorts;
  Environment prefix;
  for (auto& [x, ty] : env.bindings) {
    if (sorts.count(x))
      type_fail("E_RULE_ENV", "well-typed-rules", "duplicate environment variable " + x);
    TermPtr s = infer_sort(prefix, ty, sig, fuel, nullptr);
    sorts[x] = s->sort;
    prefix.push(x, ty);
  }
  return sorts;
}

std::optional<Precedence> infer_precedence(const PrecedenceInput& in,
                                           DiagnosticList& diags) {
  std::vector<std::string> syms = in.declaration_order;
  std::map<std::string, int> id;
  for (auto& s : syms) id.emplace(s, (int)id.size());
  auto intern = [&](const std::string& s) {
    auto it = id.find(s);
    if (it != id.end()) return it->second;
    id.emplace(s, (int)id.size());
    syms.push_back(s);
    return (int)id.size() - 1;
  };
  struct Edge { int from, to; bool strict; };
  std::vector<Edge> edges;
  for (auto& [f, occs] : in.type_occurrences) {
    int fi = intern(f);
    for (auto& g : occs) edges.push_back({intern(g), fi, true});
  }
  for (auto& [f, occs] : in.rhs_occurrences) {
    int fi = intern(f);
    for (auto& g : occs) edges.push_back({intern(g), fi, false});
  }
  for (auto& [a, b] : in.same_class) {
    int ai = intern(a), bi = intern(b);
    edges.push_back({ai, bi, false});
    edges.push_back({bi, ai, false});
  }
  int n = (int)syms.size();
  std::vector<std::vector<int>> adj(n);
  for (auto& e : edges)
    if (e.from != e.to) adj[e.from].push_back(e.to);

  // Tarjan SCC, iterative.
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stk;
  int next_index = 0, next_comp = 0;
  for (int start = 0; start < n; ++start) {
    if (idx[start] != -1) continue;
    std::vector<std::pair<int, std::size_t>> call;
    call.push_back({start, 0});
    idx[start] = low[start] = next_index++;
    stk.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (idx[w] == -1) {
          idx[w] = low[w] = next_index++;
          stk.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        if (low[v] == idx[v]) {
          while (true) {
            int w = stk.back();
            stk.pop_back();
            on_stack[w] = false;
            comp[w] = next_comp;
            if (w == v) break;
          }
          next_comp++;
        }
        call.pop_back();
        if (!call.empty()) {
          int parent = call.back().first;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }

  for (auto& e : edges) {
    if (e.strict && (comp[e.from] == comp[e.to])) {
      diags.add(make_diag(Severity::Error, "E_PRECEDENCE_CYCLE", "precedence",
                          "symbol " + syms[e.from] + " must be strictly smaller than " +
                              syms[e.to] + " but both sit in one equivalence class",
                          syms[e.to]));
      return std::nullopt;
    }
  }

  Precedence prec;
  prec.members.resize(next_comp);
  for (int v = 0; v < n; ++v) {
    prec.cls[syms[v]] = comp[v];
    prec.members[comp[v]].push_back(syms[v]);
  }
  // Condensation reachability (smaller -> larger).
  std::vector<std::set<int>> cadj(next_comp);
  for (auto& e : edges)
    if (comp[e.from] != comp[e.to]) cadj[comp[e.from]].insert(comp[e.to]);
  prec.reach.assign(next_comp, std::vector<bool>(next_comp, false));
  for (int c = 0; c < next_comp; ++c) {
    std::vector<int> work(cadj[c].begin(), cadj[c].end());
    while (!work.empty()) {
      int w = work.back();
      work.pop_back();
      if (prec.reach[c][w]) continue;
      prec.reach[c][w] = true;
      for (int x : cadj[w]) work.push_back(x);
    }
  }
  // Topological order with declaration-order tie breaking.
  std::map<int, int> first_decl;
  for (int v = n - 1; v >= 0; --v) first_decl[comp[v]] = v;
  std::vector<int> indeg(next_comp, 0);
  for (int c = 0; c < next_comp; ++c)
    for (int d : cadj[c]) indeg[d]++;
  std::vector<int> ready;
  for (int c = 0; c < next_comp; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  auto by_decl = [&](int a, int b) { return first_decl[a] > first_decl[b]; };
  std::make_heap(ready.begin(), ready.end(), by_decl);
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), by_decl);
    int c = ready.back();
    ready.pop_back();
    prec.order.push_back(c);
    for (int d : cadj[c]) {
      if (--indeg[d] == 0) {
        ready.push_back(d);
        std::push_heap(ready.begin(), ready.end(), by_decl);
      }
    }
  }
  return prec;
}

namespace {

bool is_algebraic(const TermPtr& t) {
  if (t->kind == TermKind::FVar) return true;
  Spine s = spine(t);
  if (s.head->kind != TermKind::Sym) return false;
  for (auto& a : s.args)
    if (!is_algebraic(a)) return false;
  return true;
}

// Occurrence of x in an lhs argument reachable only through accessible
// constructor positions.
bool accessible_occurrence(const TermPtr& pat, const std::string& x, const Signature& sig) {
  if (pat->kind == TermKind::FVar) return pat->name == x;
  Spine s = spine(pat);
  if (s.head->kind != TermKind::Sym) return false;
  const SymbolDecl* c = sig.find(s.head->name);
  if (!c) return false;
  for (std::size_t j = 0; j < s.args.size(); ++j) {
    if (!c->acc.count((int)j + 1)) continue;
    if (accessible_occurrence(s.args[j], x, sig)) return true;
  }
  return false;
}

}  // namespace

void check_rule(const RewriteRule& rule, Signature& sig, FuelBudget& fuel,
                bool assume_valid_rules) {
  const SymbolDecl* head = sig.find(rule.head);
  if (!head)
    type_fail("E_UNKNOWN_SYMBOL", "rewrite-rule-format",
              "rule head " + rule.head + " is not declared", rule.head, rule.label);

  for (auto& l : rule.lhs_args)
    if (!is_algebraic(l))
      type_fail("E_RULE_FORMAT", "rewrite-rule-format",
                "lhs argument " + to_string(l) + " is not algebraic", rule.head,
                rule.label);

  std::set<std::string> lhs_vars;
  for (auto& l : rule.lhs_args)
    for (auto& v : free_vars(l)) lhs_vars.insert(v);
  for (auto& v : free_vars(rule.rhs))
    if (!lhs_vars.count(v))
      type_fail("E_RULE_FV", "rewrite-rule-format",
                "rhs variable " + v + " does not occur in the lhs", rule.head, rule.label);

  Telescope tel = split_telescope(head->type);
  if (rule.lhs_args.size() > tel.binders.size())
    type_fail("E_RULE_FORMAT", "rewrite-rule-format",
              "rule has more arguments than the head symbol's type", rule.head,
              rule.label);

  for (auto& g : symbols_of(rule.rhs))
    if (g != rule.head && !sig.prec.leq(g, rule.head))
      type_fail("E_RULE_SYMBOL_ORDER", "rewrite-rule-format",
                "rhs symbol " + g + " is not smaller than " + rule.head, rule.head,
                rule.label);

  // (a) rule environment well-formed.
  std::map<std::string, SortTag> env_sorts = check_environment(rule.rule_env, sig, fuel);

  // (d) conservative soundness of rho.
  for (auto& [x, img] : rule.rho) {
    if (env_sorts.count(x))
      type_fail("E_RHO", "well-typed-rules",
                "rho domain variable " + x + " also appears in the rule environment",
                rule.head, rule.label);
    if (!lhs_vars.count(x))
      type_fail("E_RHO", "well-typed-rules",
                "rho domain variable " + x + " does not occur in the lhs", rule.head,
                rule.label);
    for (auto& v : free_vars(img))
      if (!env_sorts.count(v))
        type_fail("E_RHO", "well-typed-rules",
                  "rho image of " + x + " uses " + v + " outside the rule environment",
                  rule.head, rule.label);
  }

  // (b) Gamma |- r : U gamma rho.
  Substitution gamma;
  for (std::size_t i = 0; i < rule.lhs_args.size(); ++i)
    gamma[tel.binders[i].first] = rule.lhs_args[i];
  std::vector<std::pair<std::string, TermPtr>> rest(tel.binders.begin() + rule.lhs_args.size(),
                                                    tel.binders.end());
  TermPtr u = build_telescope(rest, tel.core);
  TermPtr expected = subst(subst(u, gamma), rule.rho);
  check(rule.rule_env, rule.rhs, expected, sig, fuel);

  // Conservative matchability: every environment variable must be reachable
  // at an accessible position of some lhs argument.
  for (auto& [x, ty] : rule.rule_env.bindings) {
    bool found = false;
    for (auto& l : rule.lhs_args)
      if (accessible_occurrence(l, x, sig)) { found = true; break; }
    if (!found) {
      Diagnostic d = make_diag(
          assume_valid_rules ? Severity::Warning : Severity::Error,
          "E_RULE_VAR_NOT_ACCESSIBLE", "accessibility",
          "variable " + x + " is not matched at an accessible position of the lhs",
          rule.head, rule.label);
      if (assume_valid_rules)
        sig.gate_report.add(d);
      else
        throw type_error(d);
    }
  }
}

namespace {

struct InductiveRequest {
  std::string name;
  std::vector<std::string> ctors;
  int declared_params = 0;
};

struct StrongRequest {
  std::string name;
  std::string target;
  TermPtr motive;
};

SortTag symbol_sort_of_type(const TermPtr& type) {
  TermClass c = classify(type);
  if (c == TermClass::Kind || is_sort(type, SortTag::Star)) return SortTag::Box;
  return SortTag::Star;
}

TermPtr assemble_binder_type(const Binders& binders, const TermPtr& core) {
  TermPtr cur = core;
  for (auto it = binders.rbegin(); it != binders.rend(); ++it)
    cur = mk_prod(it->first, it->second, abstract_fvar(cur, it->first));
  return cur;
}

}  // namespace

Signature elaborate_signature(const SourceFile& src, const ElaborateOptions& opts) {
  Signature sig;
  sig.default_fuel = opts.fuel;
  std::vector<InductiveRequest> inductives;
  std::vector<StrongRequest> strong_requests;
  std::vector<SurfaceMonotone> monotones;
  std::vector<SurfaceRule> surface_rules;

  auto add_symbol = [&](const std::string& name, const TermPtr& type, bool constant,
                        std::optional<RecursorInfo> rec = std::nullopt) {
    if (sig.find(name)) {
      sig.gate_report.add(make_diag(Severity::Error, "E_DUPLICATE_SYMBOL", "symbol-typing",
                                    "duplicate declaration of " + name, name));
      return;
    }
    SymbolDecl d;
    d.name = name;
    d.type = type;
    d.sort = symbol_sort_of_type(type);
    d.declared_constant = constant;
    d.recursor = std::move(rec);
    sig.add_decl(std::move(d));
  };

  // A. Collect declarations and rules.
  for (auto& decl : src.decls) {
    if (auto* s = std::get_if<SurfaceSymbol>(&decl)) {
      add_symbol(s->name, s->type, s->constant);
    } else if (auto* ind = std::get_if<SurfaceInductive>(&decl)) {
      Binders all = ind->params;
      all.insert(all.end(), ind->indices.begin(), ind->indices.end());
      add_symbol(ind->name, assemble_binder_type(all, star()), true);
      InductiveRequest req;
      req.name = ind->name;
      req.declared_params = (int)ind->params.size();
      for (auto& [cname, ctype] : ind->ctors) {
        add_symbol(cname, ctype, true);
        req.ctors.push_back(cname);
      }
      inductives.push_back(std::move(req));
    } else if (auto* r = std::get_if<SurfaceRecursor>(&decl)) {
      RecursorInfo info;
      info.target = r->target;
      add_symbol(r->name, r->type, false, info);
    } else if (auto* s = std::get_if<SurfaceStrongRecursor>(&decl)) {
      strong_requests.push_back({s->name, s->target, s->motive});
    } else if (auto* m = std::get_if<SurfaceMonotone>(&decl)) {
      monotones.push_back(*m);
    } else if (auto* r = std::get_if<SurfaceRule>(&decl)) {
      surface_rules.push_back(*r);
    }
  }

  // Monotone declarations.
  for (auto& m : monotones) {
    SymbolDecl* d = sig.find_mut(m.name);
    if (!d) {
      sig.gate_report.add(make_diag(Severity::Error, "E_UNKNOWN_SYMBOL",
                                    "monotone-arguments",
                                    "monotone declaration for unknown symbol " + m.name,
                                    m.name));
      continue;
    }
    Telescope tel = split_telescope(d->type);
    auto valid_index = [&](int i) {
      return i >= 1 && i <= (int)tel.binders.size() && tel.sorts[i - 1] == SortTag::Box;
    };
    bool ok = d->sort == SortTag::Box;
    for (int i : m.plus) ok = ok && valid_index(i);
    for (int i : m.minus) ok = ok && valid_index(i) && !m.plus.count(i);
    if (!ok) {
      sig.gate_report.add(make_diag(
          Severity::Error, "E_MON_DECL", "monotone-arguments",
          "monotone argument sets of " + m.name +
              " must be disjoint predicate argument positions of a predicate symbol",
          m.name));
      continue;
    }
    d->mon_plus = m.plus;
    d->mon_minus = m.minus;
  }

  // Rules.
  for (auto& r : surface_rules) {
    if (!sig.find(r.head)) {
      sig.gate_report.add(make_diag(Severity::Error, "E_UNKNOWN_SYMBOL",
                                    "rewrite-rule-format",
                                    "rule head " + r.head + " is not declared", r.head,
                                    r.label));
      continue;
    }
    RewriteRule rule;
    rule.head = r.head;
    rule.lhs_args = r.lhs_args;
    rule.rhs = r.rhs;
    for (auto& [x, ty] : r.env) rule.rule_env.push(x, ty);
    for (auto& [x, img] : r.rho) rule.rho[x] = img;
    rule.label = r.label;
    sig.add_rule(std::move(rule));
  }

  auto refresh_flags = [&]() {
    for (auto& d : sig.decls) {
      d.defined = sig.is_defined(d.name);
      Telescope tel = split_telescope(d.type);
      Spine core = spine(tel.core);
      d.constructor = false;
      if (core.head->kind == TermKind::Sym) {
        const SymbolDecl* c = sig.find(core.head->name);
        if (c && c->sort == SortTag::Box && !sig.is_defined(c->name)) {
          d.constructor = true;
          d.output_head = c->name;
        }
      }
      if (d.declared_constant && d.defined)
        sig.gate_report.add(make_diag(Severity::Error, "E_CONSTANT_DEFINED",
                                      "rewrite-rule-format",
                                      d.name + " is declared constant but has rules",
                                      d.name));
    }
  };
  refresh_flags();

  // Interpretation classes: elim iff some recursor targets the symbol.
  auto refresh_interp = [&]() {
    std::set<std::string> elim;
    for (auto& d : sig.decls)
      if (d.recursor) elim.insert(d.recursor->target);
    for (auto& req : inductives) elim.insert(req.name);
    for (auto& req : strong_requests) elim.insert(req.target);
    for (auto& d : sig.decls)
      d.interp = elim.count(d.name) ? InterpClass::Elim : InterpClass::Intro;
  };
  refresh_interp();

  // C. Precedence.
  auto build_precedence = [&]() -> bool {
    PrecedenceInput in;
    for (auto& d : sig.decls) {
      in.declaration_order.push_back(d.name);
      in.type_occurrences[d.name] = symbols_of(d.type);
    }
    for (auto& r : sig.rules) {
      auto& s = in.rhs_occurrences[r.head];
      for (auto& g : symbols_of(r.rhs)) s.insert(g);
    }
    // Inductive-recursive coupling: a defined predicate F whose type mentions
    // a constant predicate C and that occurs in the type of a constructor of
    // C is defined simultaneously with C.
    for (auto& f : sig.decls) {
      if (f.sort != SortTag::Box || !f.defined) continue;
      std::set<std::string> in_type = symbols_of(f.type);
      for (auto& cname : in_type) {
        const SymbolDecl* c = sig.find(cname);
        if (!c || c->sort != SortTag::Box || c->defined) continue;
        bool coupled = false;
        for (auto& ctor : sig.decls)
          if (ctor.constructor && ctor.output_head == cname &&
              symbols_of(ctor.type).count(f.name)) {
            coupled = true;
            break;
          }
        if (coupled) {
          in.same_class.push_back({f.name, cname});
          in.type_occurrences[f.name].erase(cname);
        }
      }
    }
    auto prec = infer_precedence(in, sig.gate_report);
    if (!prec) return false;
    sig.prec = std::move(*prec);
    return true;
  };
  if (!build_precedence()) return sig;

  // D. Recursor generation.
  for (auto& req : inductives) {
    DiagnosticList local;
    check_strictly_positive(req.name, req.ctors, sig, local);
    for (auto& d : local.items) sig.gate_report.add(d);
    if (local.has_errors()) continue;
    int k = infer_parameters(req.name, req.ctors, sig);
    if (k != req.declared_params) {
      sig.gate_report.add(make_diag(
          Severity::Error, "E_PARAMETERS", "canonical-recursors",
          "declared parameter prefix of " + req.name + " has length " +
              std::to_string(req.declared_params) + " but the inferred prefix has length " +
              std::to_string(k),
          req.name));
      continue;
    }
    std::string rec_name = "rec_" + req.name;
    if (sig.find(rec_name)) {
      sig.gate_report.add(make_diag(Severity::Error, "E_DUPLICATE_SYMBOL",
                                    "canonical-recursors",
                                    "generated recursor name " + rec_name + " is taken",
                                    req.name));
      continue;
    }
    GeneratedRecursor gen = gen_weak_recursor(req.name, req.ctors, sig, rec_name, k,
                                              RecursorStyle::Appended);
    sig.add_decl(gen.decl);
    for (auto& r : gen.rules) sig.add_rule(r);
  }
  for (auto& req : strong_requests) {
    if (!sig.find(req.target)) {
      sig.gate_report.add(make_diag(Severity::Error, "E_UNKNOWN_SYMBOL",
                                    "canonical-recursors",
                                    "strong recursor target " + req.target + " is unknown",
                                    req.target));
      continue;
    }
    std::vector<std::string> ctors;
    for (auto& req2 : inductives)
      if (req2.name == req.target) ctors = req2.ctors;
    if (ctors.empty()) {
      for (auto& d : sig.decls)
        if (d.constructor && d.output_head == req.target && !d.defined)
          ctors.push_back(d.name);
    }
    DiagnosticList local;
    auto gen = gen_strong_recursor(req.target, ctors, req.motive, sig, req.name, local);
    for (auto& d : local.items) sig.gate_report.add(d);
    if (!gen) continue;
    sig.add_decl(gen->decl);
    for (auto& r : gen->rules) sig.add_rule(r);
  }
  refresh_flags();
  refresh_interp();
  if (!build_precedence()) return sig;

  // E. Symbol types in precedence order under staged visibility.
  for (int cls : sig.prec.order) {
    std::vector<std::string> names;
    for (auto& d : sig.decls)
      if (sig.prec.cls.count(d.name) && sig.prec.cls.at(d.name) == cls)
        names.push_back(d.name);
    if (names.empty()) continue;
    Visibility vis;
    for (auto& d : sig.decls)
      if (sig.prec.lt(d.name, names.front())) vis.allowed.insert(d.name);
    for (auto& name : names) {
      SymbolDecl* d = sig.find_mut(name);
      FuelBudget fuel(opts.fuel);
      try {
        Environment empty;
        TermPtr s = infer(empty, d->type, sig, fuel, &vis);
        if (s->kind != TermKind::Sort) s = normalize(s, sig, fuel).term;
        if (s->kind != TermKind::Sort)
          throw type_error(make_diag(Severity::Error, "E_SYMBOL_TYPE", "symbol-typing",
                                     "type of " + name + " is not well-sorted", name));
        d->sort = s->sort;
      } catch (const type_error& e) {
        Diagnostic diag = e.diag;
        if (diag.symbol.empty()) diag.symbol = name;
        diag.code = diag.code == "E_UNBOUND_VAR" ? diag.code : "E_SYMBOL_TYPE";
        sig.gate_report.add(diag);
      } catch (const fuel_error& e) {
        sig.gate_report.add(make_diag(Severity::Error, "E_FUEL", "fuel",
                                      std::string(e.what()) + " while checking " + name,
                                      name));
      }
      // Same-class members declared later may use this one.
      vis.allowed.insert(name);
    }
  }
  refresh_flags();

  // F. Accessibility for constructor-shaped symbols.
  for (auto& d : sig.decls) {
    if (!d.constructor) continue;
    FuelBudget fuel(opts.fuel);
    try {
      AccessReport rep = accessible_args(d, d.output_head, sig, fuel);
      sig.find_mut(d.name)->acc = rep.acc;
    } catch (const fuel_error& e) {
      sig.gate_report.add(make_diag(Severity::Error, "E_FUEL", "fuel",
                                    std::string(e.what()) + " while normalizing the type of " +
                                        d.name,
                                    d.name));
    }
  }

  // G. Rule gates in precedence class order.
  std::vector<std::size_t> rule_order;
  for (int cls : sig.prec.order)
    for (std::size_t i = 0; i < sig.rules.size(); ++i)
      if (sig.prec.cls.count(sig.rules[i].head) && sig.prec.cls.at(sig.rules[i].head) == cls)
        rule_order.push_back(i);
  for (std::size_t i : rule_order) {
    RewriteRule& rule = sig.rules[i];
    const SymbolDecl* head = sig.find(rule.head);
    FuelBudget fuel(opts.fuel);
    try {
      check_rule(rule, sig, fuel, opts.assume_valid_rules);
    } catch (const type_error& e) {
      Diagnostic d = e.diag;
      if (d.rule.empty()) d.rule = rule.label;
      if (d.symbol.empty()) d.symbol = rule.head;
      sig.gate_report.add(d);
    } catch (const fuel_error& e) {
      sig.gate_report.add(make_diag(Severity::Error, "E_FUEL", "fuel",
                                    std::string(e.what()) + " while checking rule " +
                                        rule.label,
                                    rule.head, rule.label));
    }
    // Predicate-level rules: matching on predicate arguments is forbidden;
    // every predicate variable of the rhs must be an lhs argument.
    if (head && head->sort == SortTag::Box) {
      for (auto& [v, s] : free_vars_sorted(rule.rhs)) {
        if (s != SortTag::Box) continue;
        int found = -1;
        for (std::size_t j = 0; j < rule.lhs_args.size(); ++j)
          if (rule.lhs_args[j]->kind == TermKind::FVar && rule.lhs_args[j]->name == v)
            found = (int)j;
        if (found < 0) {
          sig.gate_report.add(make_diag(
              Severity::Error, "E_KAPPA", "predicate-rule-conditions",
              "predicate variable " + v + " of the rhs is not an lhs argument",
              rule.head, rule.label));
        } else {
          rule.kappa[v] = found;
        }
      }
    }
    bool is_recursor = head && head->recursor.has_value();
    bool is_strong_recursor = is_recursor && head->recursor->strong;
    if (!is_recursor || is_strong_recursor) {
      check_safe(rule, sig, sig.gate_report);
      structural_decrease_check(rule, sig, sig.gate_report);
    }
  }

  // H. Recursor gates and admission.
  for (auto& d : sig.decls) {
    if (!d.recursor) continue;
    SymbolDecl* f = sig.find_mut(d.name);
    const std::string C = f->recursor->target;
    if (!sig.find(C)) {
      sig.gate_report.add(make_diag(Severity::Error, "E_UNKNOWN_SYMBOL", "pre-recursor",
                                    "recursor target " + C + " is unknown", d.name));
      continue;
    }
    f->recursor->strong = f->sort == SortTag::Box;
    auto view = check_pre_recursor(*f, C, sig, sig.gate_report);
    if (!view) continue;
    FuelBudget fuel(opts.fuel);
    try {
      check_recursor_positivity(*f, C, *view, sig, fuel, sig.gate_report);
    } catch (const fuel_error& e) {
      sig.gate_report.add(make_diag(Severity::Error, "E_FUEL", "fuel",
                                    std::string(e.what()) + " during positivity analysis of " +
                                        d.name,
                                    d.name));
    }
    if (f->recursor->generated) continue;  // generator output is admissible
    std::vector<std::string> ctors;
    for (auto& c : sig.decls)
      if (c.constructor && c.output_head == C && !c.defined) ctors.push_back(c.name);
    std::vector<RewriteRule> rules_of_f;
    for (auto* r : sig.rules_of(f->name)) rules_of_f.push_back(*r);
    if (matches_canonical_recursor(*f, C, *view, rules_of_f, ctors, sig)) continue;
    if (opts.trusted_recursors.count(C)) {
      f->recursor->trusted = true;
      continue;
    }
    sig.gate_report.add(make_diag(
        Severity::Error, "E_RECURSOR_NOT_CANONICAL", "admissible-recursors",
        d.name + " does not match the canonical recursor pattern for " + C +
            "; head-computability cannot be established (use a trusted-recursor "
            "annotation to assume it)",
        d.name));
  }

  // I. Global gates.
  check_mon_declarations(sig);

  for (auto& d : sig.decls) {
    if (d.sort != SortTag::Box || d.defined || d.interp != InterpClass::Intro) continue;
    bool has_ctor = false;
    for (auto& c : sig.decls)
      if (c.constructor && c.output_head == d.name) has_ctor = true;
    if (has_ctor) check_i6(d.name, sig);
  }

  bool have_pred_rules = false;
  for (auto& r : sig.rules) {
    const SymbolDecl* h = sig.find(r.head);
    if (h && h->sort == SortTag::Box) have_pred_rules = true;
  }
  std::vector<CriticalPair> cps = critical_pairs(sig.rules);
  for (auto& cp : cps) {
    const SymbolDecl* h1 = sig.find(sig.rules[cp.rule1].head);
    const SymbolDecl* h2 = sig.find(sig.rules[cp.rule2].head);
    bool pred_involved = (h1 && h1->sort == SortTag::Box) || (h2 && h2->sort == SortTag::Box);
    if (pred_involved) {
      sig.gate_report.add(make_diag(
          Severity::Error, "E_PRED_CRITICAL_PAIR", "predicate-rule-conditions",
          "predicate-level rule " + sig.rules[cp.rule1].label + " overlaps " +
              sig.rules[cp.rule2].label + " at " + position_to_string(cp.position),
          sig.rules[cp.rule1].head, sig.rules[cp.rule1].label,
          position_to_string(cp.position)));
    } else if (have_pred_rules && !cp.joinable) {
      sig.gate_report.add(make_diag(
          Severity::Error, "E_CONFLUENCE", "confluence-assumption",
          "critical pair between " + sig.rules[cp.rule1].label + " and " +
              sig.rules[cp.rule2].label + " is not trivially joinable",
          sig.rules[cp.rule1].head, sig.rules[cp.rule1].label,
          position_to_string(cp.position)));
    } else if (!cp.joinable) {
      sig.gate_report.add(make_diag(
          Severity::Info, "I_CRITICAL_PAIR", "confluence-assumption",
          "critical pair between " + sig.rules[cp.rule1].label + " and " +
              sig.rules[cp.rule2].label + " at " + position_to_string(cp.position),
          sig.rules[cp.rule1].head, sig.rules[cp.rule1].label,
          position_to_string(cp.position)));
    }
  }
  if (have_pred_rules) {
    for (auto& r : sig.rules) {
      std::map<std::string, int> counts;
      bool linear = true;
      for (auto& l : r.lhs_args)
        for (auto& v : free_vars(l)) counts[v] += (int)positions_of(v, l).size();
      for (auto& [v, n] : counts)
        if (n > 1) linear = false;
      if (!linear)
        sig.gate_report.add(make_diag(
            Severity::Error, "E_CONFLUENCE", "confluence-assumption",
            "rule " + r.label + " is not left-linear but predicate-level rules are present",
            r.head, r.label));
    }
  }

  // First-order rules must be non-duplicating when combined with
  // higher-order rules.
  bool have_ho_rule = false;
  auto is_fo_rule = [&](const RewriteRule& r) {
    if (!is_algebraic(r.rhs) && r.rhs->kind != TermKind::FVar) return false;
    for (auto& [x, ty] : r.rule_env.bindings) {
      Spine s = spine(ty);
      if (s.head->kind != TermKind::Sym) return false;
      FirstOrderReport rep = is_first_order_data_type(s.head->name, sig);
      if (!rep.first_order) return false;
    }
    return true;
  };
  std::vector<bool> fo(sig.rules.size());
  for (std::size_t i = 0; i < sig.rules.size(); ++i) {
    fo[i] = is_fo_rule(sig.rules[i]);
    if (!fo[i]) have_ho_rule = true;
  }
  if (have_ho_rule) {
    for (std::size_t i = 0; i < sig.rules.size(); ++i) {
      if (!fo[i]) continue;
      const RewriteRule& r = sig.rules[i];
      std::map<std::string, int> lhs_count, rhs_count;
      for (auto& l : r.lhs_args)
        for (auto& v : free_vars(l)) lhs_count[v] += (int)positions_of(v, l).size();
      for (auto& v : free_vars(r.rhs)) rhs_count[v] = (int)positions_of(v, r.rhs).size();
      for (auto& [v, n] : rhs_count) {
        if (n > lhs_count[v]) {
          sig.gate_report.add(make_diag(
              Severity::Error, "E_FO_DUPLICATING", "first-order-data-types",
              "first-order rule " + r.label + " duplicates variable " + v +
                  " while higher-order rules are present",
              r.head, r.label));
          break;
        }
      }
    }
  }

  return sig;
}

}  // namespace cac
