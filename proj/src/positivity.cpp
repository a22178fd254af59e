/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/positivity.hpp"

#include <algorithm>

namespace cac {

namespace {

void signed_walk(const TermPtr& t, Polarity d, const Signature& sig, Position& here,
                 std::map<Polarity, std::set<Position>>& out) {
  switch (t->kind) {
    case TermKind::Sort:
    case TermKind::FVar:
    case TermKind::Sym:
    case TermKind::BVar:
      out[d].insert(here);
      return;
    case TermKind::Prod: {
      here.push_back(1);
      signed_walk(t->left, d * Polarity::Minus, sig, here, out);
      here.back() = 2;
      signed_walk(t->right, d, sig, here, out);
      here.pop_back();
      return;
    }
    case TermKind::Abs: {
      here.push_back(2);
      signed_walk(t->right, d, sig, here, out);
      here.pop_back();
      return;
    }
    case TermKind::App: {
      Spine s = spine(t);
      if (s.head->kind == TermKind::Sym) {
        // Head position 1^n, then monotone/anti-monotone arguments.
        std::size_t n = s.args.size();
        Position head_pos = here;
        head_pos.insert(head_pos.end(), n, 1);
        out[d].insert(head_pos);
        const SymbolDecl* f = sig.find(s.head->name);
        if (f) {
          for (std::size_t i = 1; i <= n; ++i) {
            Polarity eps;
            if (f->mon_plus.count((int)i)) eps = Polarity::Plus;
            else if (f->mon_minus.count((int)i)) eps = Polarity::Minus;
            else continue;
            Position arg_pos = here;
            arg_pos.insert(arg_pos.end(), n - i, 1);
            arg_pos.push_back(2);
            signed_walk(s.args[i - 1], eps * d, sig, arg_pos, out);
          }
        }
        return;
      }
      here.push_back(1);
      signed_walk(t->left, d, sig, here, out);
      here.pop_back();
      return;
    }
  }
}

}  // namespace

std::map<Polarity, std::set<Position>> signed_positions(const TermPtr& t, Polarity delta,
                                                        const Signature& sig) {
  std::map<Polarity, std::set<Position>> out;
  out[Polarity::Plus];
  out[Polarity::Minus];
  Position here;
  signed_walk(t, delta, sig, here, out);
  return out;
}

namespace {

void object_interiors(const TermPtr& t, Position& here, std::set<Position>& out) {
  if (classify(t) == TermClass::Object) {
    for (auto& q : all_positions(t)) {
      if (q.empty()) continue;
      Position p = here;
      p.insert(p.end(), q.begin(), q.end());
      out.insert(p);
    }
    return;
  }
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::Prod: {
      here.push_back(1);
      object_interiors(t->left, here, out);
      here.back() = 2;
      // Open the binder so classification inside the body is accurate.
      TermPtr body = instantiate(t->right, mk_fvar(fresh_internal(), binder_sort(t->left)));
      object_interiors(body, here, out);
      here.pop_back();
      return;
    }
    case TermKind::App: {
      here.push_back(1);
      object_interiors(t->left, here, out);
      here.back() = 2;
      object_interiors(t->right, here, out);
      here.pop_back();
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::set<Position> object_interior_positions(const TermPtr& t) {
  std::set<Position> out;
  Position here;
  object_interiors(t, here, out);
  return out;
}

std::vector<Position> occurrences_violating(const std::string& name, const TermPtr& t,
                                            Polarity required, const Signature& sig,
                                            bool exempt_objects) {
  std::set<Position> occ = positions_of(name, t);
  if (occ.empty()) return {};
  auto signs = signed_positions(t, Polarity::Plus, sig);
  std::set<Position> exempt;
  if (exempt_objects) exempt = object_interior_positions(t);
  std::vector<Position> bad;
  for (auto& p : occ) {
    if (signs[required].count(p)) continue;
    if (exempt_objects && exempt.count(p)) continue;
    bad.push_back(p);
  }
  return bad;
}

AccessReport accessible_args(const SymbolDecl& c, const std::string& C, Signature& sig,
                             FuelBudget& fuel) {
  AccessReport rep;
  // Analyzed as written: defined predicate symbols stay folded so that their
  // declared monotone arguments supply the signs.
  (void)fuel;
  Telescope tel = split_telescope(c.type);
  std::vector<std::string> equiv_types;
  for (auto* d : sig.equivalents(C))
    if (d->sort == SortTag::Box) equiv_types.push_back(d->name);
  if (equiv_types.empty()) equiv_types.push_back(C);
  for (std::size_t j = 1; j <= tel.binders.size(); ++j) {
    const TermPtr& tj = tel.binders[j - 1].second;
    bool ok = true;
    for (auto& D : equiv_types) {
      auto bad = occurrences_violating(D, tj, Polarity::Plus, sig, false);
      if (!bad.empty()) {
        ok = false;
        rep.offenders[(int)j] = {D, bad.front()};
        break;
      }
    }
    if (ok) rep.acc.insert((int)j);
  }
  return rep;
}

void check_i6(const std::string& C, Signature& sig) {
  for (auto& c : sig.decls) {
    if (!c.constructor || c.output_head != C) continue;
    Telescope tel = split_telescope(c.type);
    Spine core = spine(tel.core);
    std::map<std::string, std::string> opened_to_hint;
    std::set<std::string> pred_binders;
    for (std::size_t i = 0; i < tel.binders.size(); ++i) {
      if (tel.sorts[i] == SortTag::Box) pred_binders.insert(tel.binders[i].first);
      opened_to_hint[tel.binders[i].first] = tel.hints[i];
    }
    for (std::size_t j = 0; j < tel.binders.size(); ++j) {
      for (auto& [v, s] : free_vars_sorted(tel.binders[j].second)) {
        if (s != SortTag::Box || !pred_binders.count(v)) continue;
        bool witnessed = false;
        for (auto& arg : core.args)
          if (arg->kind == TermKind::FVar && arg->name == v) witnessed = true;
        if (!witnessed) {
          sig.gate_report.add(make_diag(
              Severity::Error, "E_I6", "I6",
              "predicate variable " + opened_to_hint[v] + " occurs in argument " +
                  std::to_string(j + 1) + " of constructor " + c.name +
                  " but is not an output-type argument of " + C,
              c.name));
        }
      }
    }
  }
}

void check_safe(const RewriteRule& rule, Signature& sig, DiagnosticList& diags) {
  const SymbolDecl* head = sig.find(rule.head);
  if (!head) return;
  Telescope tel = split_telescope(head->type);
  std::map<std::string, int> seen;
  for (std::size_t i = 1; i <= rule.lhs_args.size() && i <= tel.binders.size(); ++i) {
    if (tel.sorts[i - 1] != SortTag::Box) continue;
    TermPtr li = subst(rule.lhs_args[i - 1], rule.rho);
    if (li->kind != TermKind::FVar) {
      diags.add(make_diag(Severity::Error, "E_UNSAFE_MATCH", "safeness",
                          "predicate argument " + std::to_string(i) + " of rule " +
                              rule.label + " is matched against the non-variable " +
                              to_string(li),
                          rule.head, rule.label));
      continue;
    }
    auto it = seen.find(li->name);
    if (it != seen.end()) {
      diags.add(make_diag(Severity::Error, "E_UNSAFE_NONLINEAR", "safeness",
                          "predicate arguments " + std::to_string(it->second) + " and " +
                              std::to_string(i) + " of rule " + rule.label +
                              " collapse to the same variable " + li->name,
                          rule.head, rule.label));
    } else {
      seen[li->name] = (int)i;
    }
  }
}

void check_small(const std::string& C, int param_count, Signature& sig,
                 DiagnosticList& diags) {
  const SymbolDecl* cd = sig.find(C);
  if (!cd) return;
  Telescope ctel = split_telescope(cd->type, param_count);
  for (auto& c : sig.decls) {
    if (!c.constructor || c.output_head != C || c.defined) continue;
    Telescope tel = split_telescope(c.type);
    // Greedy match of a binder prefix against a subsequence of the
    // parameters, then the rest must bind objects only.
    Substitution rename;
    std::size_t cursor = 0, j = 0;
    for (; j < tel.binders.size(); ++j) {
      TermPtr ty = subst(tel.binders[j].second, rename);
      bool matched = false;
      for (std::size_t p = cursor; p < ctel.binders.size(); ++p) {
        if (alpha_eq(ty, ctel.binders[p].second)) {
          rename[tel.binders[j].first] =
              mk_fvar(ctel.binders[p].first, ctel.sorts[p]);
          cursor = p + 1;
          matched = true;
          break;
        }
      }
      if (!matched) break;
    }
    for (; j < tel.binders.size(); ++j) {
      if (tel.sorts[j] == SortTag::Box) {
        diags.add(make_diag(Severity::Error, "E_NOT_SMALL", "smallness",
                            "constructor " + c.name + " binds the predicate variable " +
                                tel.hints[j] + " beyond the parameters of " + C,
                            c.name));
      }
    }
  }
}

FirstOrderReport is_first_order_data_type(const std::string& C, Signature& sig) {
  // Greatest fixpoint over the constant predicate symbols.
  std::set<std::string> fo;
  for (auto& d : sig.decls)
    if (d.sort == SortTag::Box && !d.defined) fo.insert(d.name);
  std::map<std::string, std::string> reason;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = fo.begin(); it != fo.end();) {
      const std::string& D = *it;
      std::string why;
      const SymbolDecl* dd = sig.find(D);
      Telescope dtel = split_telescope(dd->type);
      for (std::size_t i = 0; i < dtel.binders.size() && why.empty(); ++i)
        if (dtel.sorts[i] == SortTag::Box)
          why = D + " binds a predicate variable";
      if (why.empty()) {
        for (auto& c : sig.decls) {
          if (!c.constructor || !(c.output_head == D)) continue;
          Telescope tel = split_telescope(c.type);
          for (std::size_t j = 0; j < tel.binders.size() && why.empty(); ++j) {
            if (tel.sorts[j] == SortTag::Box) {
              why = c.name + " has a predicate argument";
              break;
            }
            Spine s = spine(tel.binders[j].second);
            if (s.head->kind != TermKind::Sym) {
              why = c.name + " has a non-atomic argument type";
              break;
            }
            const std::string& E = s.head->name;
            if (!fo.count(E) || !(E == D || sig.prec.leq(E, D))) {
              why = c.name + " has argument type headed by " + E;
              break;
            }
          }
          if (why.empty() && (int)c.acc.size() != (int)tel.binders.size())
            why = c.name + " has inaccessible arguments";
          if (!why.empty()) break;
        }
      }
      if (!why.empty()) {
        reason[D] = why;
        it = fo.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  FirstOrderReport rep;
  // Every equivalent type must be first-order too.
  rep.first_order = fo.count(C) != 0;
  for (auto* e : sig.equivalents(C))
    if (e->sort == SortTag::Box && !fo.count(e->name)) rep.first_order = false;
  if (!rep.first_order) {
    auto it = reason.find(C);
    rep.reason = it != reason.end() ? it->second : C + " is not a constant predicate symbol";
  }
  return rep;
}

void check_mon_declarations(Signature& sig) {
  for (auto& f : sig.decls) {
    if (f.mon_plus.empty() && f.mon_minus.empty()) continue;
    if (!f.defined) continue;  // constants are validated by the recursor gates
    for (const RewriteRule* r : sig.rules_of(f.name)) {
      auto check_side = [&](const std::set<int>& side, Polarity eps) {
        for (int i : side) {
          if (i > (int)r->lhs_args.size()) continue;
          const TermPtr& li = r->lhs_args[i - 1];
          if (li->kind != TermKind::FVar || li->vsort != SortTag::Box) {
            sig.gate_report.add(make_diag(
                Severity::Error, "E_MONOTONICITY", "monotone-arguments",
                "argument " + std::to_string(i) + " of rule " + r->label +
                    " must be a predicate variable",
                f.name, r->label));
            continue;
          }
          auto bad = occurrences_violating(li->name, r->rhs, eps, sig, true);
          if (!bad.empty()) {
            sig.gate_report.add(make_diag(
                Severity::Error, "E_MONOTONICITY", "monotone-arguments",
                "variable " + li->name + " occurs at position " +
                    position_to_string(bad.front()) + " of the rhs of " + r->label +
                    " with the wrong sign",
                f.name, r->label, position_to_string(bad.front())));
          }
        }
      };
      check_side(f.mon_plus, Polarity::Plus);
      check_side(f.mon_minus, Polarity::Minus);
    }
  }
}

}  // namespace cac
