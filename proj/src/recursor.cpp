/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/recursor.hpp"

#include <algorithm>
#include <functional>

namespace cac {

namespace {

struct NameGen {
  std::set<std::string> used;
  std::string get(const std::string& hint) {
    std::string base = hint.empty() || hint == "_" || hint[0] == '#' ? "x" : hint;
    std::string n = fresh_named(base, used);
    used.insert(n);
    return n;
  }
};

// Recursive-argument decomposition of a constructor argument type:
// T = (alpha:W...)C q w... with the parameter prefix verbatim.
struct RecArg {
  bool recursive = false;
  Telescope alpha;              // the (alpha:W...) telescope
  std::vector<TermPtr> w_args;  // spine args beyond the parameter prefix
};

RecArg analyze_rec_arg(const TermPtr& ty, const std::string& C,
                       const std::vector<TermPtr>& qvars) {
  RecArg out;
  out.alpha = split_telescope(ty);
  Spine core = spine(out.alpha.core);
  if (core.head->kind != TermKind::Sym || core.head->name != C) return out;
  if (core.args.size() < qvars.size()) return out;
  for (std::size_t i = 0; i < qvars.size(); ++i)
    if (!alpha_eq(core.args[i], qvars[i])) return out;
  out.recursive = true;
  out.w_args.assign(core.args.begin() + qvars.size(), core.args.end());
  return out;
}

}  // namespace

std::optional<CtorView> ctor_view(const std::string& name, const std::string& C,
                                  const Signature& sig) {
  const SymbolDecl* d = sig.find(name);
  if (!d) return std::nullopt;
  CtorView v;
  v.name = name;
  v.tel = split_telescope(d->type);
  Spine core = spine(v.tel.core);
  if (core.head->kind != TermKind::Sym || core.head->name != C) return std::nullopt;
  v.out_args = core.args;
  return v;
}

int infer_parameters(const std::string& C, const std::vector<std::string>& ctors,
                     const Signature& sig) {
  const SymbolDecl* cd = sig.find(C);
  if (!cd) return 0;
  Telescope ctel = split_telescope(cd->type);
  int kmax = (int)ctel.binders.size();
  for (auto& c : ctors) {
    auto v = ctor_view(c, C, sig);
    if (!v) return 0;
    kmax = std::min(kmax, (int)v->tel.binders.size());
  }
  for (int k = kmax; k >= 1; --k) {
    bool ok = true;
    for (auto& cname : ctors) {
      auto v = ctor_view(cname, C, sig);
      if (!v || (int)v->out_args.size() != (int)ctel.binders.size()) { ok = false; break; }
      // First k binders must repeat C's parameter telescope.
      Substitution ren;
      std::vector<TermPtr> qvars;
      for (int i = 0; i < k && ok; ++i) {
        TermPtr want = ctel.binders[i].second;
        for (int j = 0; j < i; ++j)
          want = subst1(want, ctel.binders[j].first,
                        mk_fvar(v->tel.binders[j].first, v->tel.sorts[j]));
        if (!alpha_eq(v->tel.binders[i].second, want)) ok = false;
        qvars.push_back(mk_fvar(v->tel.binders[i].first, v->tel.sorts[i]));
      }
      // Output type must start with the parameter variables.
      for (int i = 0; i < k && ok; ++i)
        if (!alpha_eq(v->out_args[i], qvars[i])) ok = false;
      // Recursive argument types repeat the prefix verbatim.
      for (std::size_t j = k; j < v->tel.binders.size() && ok; ++j) {
        Telescope at = split_telescope(v->tel.binders[j].second);
        Spine core = spine(at.core);
        if (core.head->kind == TermKind::Sym && core.head->name == C) {
          if (core.args.size() < (std::size_t)k) { ok = false; break; }
          for (int i = 0; i < k; ++i)
            if (!alpha_eq(core.args[i], qvars[i])) ok = false;
        }
      }
      if (!ok) break;
    }
    if (ok) return k;
  }
  return 0;
}

void check_strictly_positive(const std::string& C, const std::vector<std::string>& ctors,
                             Signature& sig, DiagnosticList& diags) {
  std::set<std::string> eq;
  for (auto* d : sig.equivalents(C))
    if (d->sort == SortTag::Box) eq.insert(d->name);
  eq.insert(C);
  for (auto& cname : ctors) {
    auto v = ctor_view(cname, C, sig);
    if (!v) {
      diags.add(make_diag(Severity::Error, "E_NOT_STRICTLY_POSITIVE", "strict-positivity",
                          cname + " is not a constructor of " + C, cname));
      continue;
    }
    auto mentions_eq = [&](const TermPtr& t) {
      for (auto& g : symbols_of(t))
        if (eq.count(g)) return true;
      return false;
    };
    for (auto& a : v->out_args)
      if (mentions_eq(a))
        diags.add(make_diag(Severity::Error, "E_NOT_STRICTLY_POSITIVE", "strict-positivity",
                            "output arguments of " + cname + " mention " + C, cname));
    for (std::size_t j = 0; j < v->tel.binders.size(); ++j) {
      const TermPtr& tj = v->tel.binders[j].second;
      if (!mentions_eq(tj)) continue;
      Telescope at = split_telescope(tj);
      Spine core = spine(at.core);
      bool head_ok = core.head->kind == TermKind::Sym && core.head->name == C &&
                     !sig.is_defined(C);
      bool inner_ok = true;
      for (auto& [an, aty] : at.binders)
        if (mentions_eq(aty)) inner_ok = false;
      for (auto& a : core.args)
        if (mentions_eq(a)) inner_ok = false;
      if (!head_ok || !inner_ok) {
        diags.add(make_diag(
            Severity::Error, "E_NOT_STRICTLY_POSITIVE", "strict-positivity",
            "argument " + std::to_string(j + 1) + " of " + cname +
                " mentions " + C + " outside the head of a recursive argument type",
            cname, "", position_to_string({(int)j + 1})));
      }
    }
  }
}

namespace {

struct GenContext {
  std::string C;
  const Signature* sig;
  NameGen ng;
  int k = 0;
  RecursorStyle style = RecursorStyle::Appended;
  std::string rec_name;
  std::vector<std::pair<std::string, TermPtr>> q_binders, z_binders;
  std::vector<SortTag> q_sorts, z_sorts;
  std::vector<TermPtr> qvars, zvars;
  // Strong recursors: codomain builder from (index values, scrutinee value);
  // weak recursors: applies the motive variable.
  bool strong = false;
  TermPtr motive_var;   // weak only
  TermPtr motive_type;  // weak only
  std::function<TermPtr(const std::vector<TermPtr>&, const TermPtr&)> result_of;
};

TermPtr apply_result(const GenContext& cx, const std::vector<TermPtr>& idx,
                     const TermPtr& scrut) {
  return cx.result_of(idx, scrut);
}

struct BranchData {
  std::string ctor;
  std::vector<std::string> x_names;
  std::vector<TermPtr> x_types;
  std::vector<SortTag> x_sorts;
  std::vector<RecArg> rec;
  std::vector<TermPtr> out_idx;  // v... (output indices beyond parameters)
  TermPtr branch_type;
};

BranchData build_branch(GenContext& cx, const std::string& cname) {
  const Signature& sig = *cx.sig;
  BranchData b;
  b.ctor = cname;
  auto v = *ctor_view(cname, cx.C, sig);
  Substitution ren;
  for (std::size_t j = 0; j < v.tel.binders.size(); ++j) {
    TermPtr ty = subst(v.tel.binders[j].second, ren);
    if ((int)j < cx.k) {
      ren[v.tel.binders[j].first] = cx.qvars[j];
      continue;
    }
    std::string x = cx.ng.get(v.tel.hints[j]);
    ren[v.tel.binders[j].first] = mk_fvar(x, v.tel.sorts[j]);
    b.x_names.push_back(x);
    b.x_types.push_back(ty);
    b.x_sorts.push_back(v.tel.sorts[j]);
  }
  for (std::size_t i = cx.k; i < v.out_args.size(); ++i)
    b.out_idx.push_back(subst(v.out_args[i], ren));
  for (auto& ty : b.x_types) b.rec.push_back(analyze_rec_arg(ty, cx.C, cx.qvars));

  // Branch type.
  std::vector<std::pair<std::string, TermPtr>> binders;
  std::vector<TermPtr> ctor_args = cx.qvars;
  for (std::size_t j = 0; j < b.x_names.size(); ++j)
    ctor_args.push_back(mk_fvar(b.x_names[j], b.x_sorts[j]));
  TermPtr applied_ctor = mk_app(mk_sym(cname, sig.find(cname)->sort), ctor_args);
  TermPtr core = apply_result(cx, b.out_idx, applied_ctor);

  auto ih_type = [&](std::size_t j) -> TermPtr {
    const RecArg& ra = b.rec[j];
    if (!ra.recursive) return b.x_types[j];
    std::vector<TermPtr> avars;
    for (std::size_t ai = 0; ai < ra.alpha.binders.size(); ++ai)
      avars.push_back(mk_fvar(ra.alpha.binders[ai].first, ra.alpha.sorts[ai]));
    TermPtr applied = mk_app(mk_fvar(b.x_names[j], b.x_sorts[j]), avars);
    return build_telescope(ra.alpha.binders, apply_result(cx, ra.w_args, applied));
  };

  if (cx.style == RecursorStyle::Appended) {
    for (std::size_t j = 0; j < b.x_names.size(); ++j)
      binders.emplace_back(b.x_names[j], b.x_types[j]);
    for (std::size_t j = 0; j < b.x_names.size(); ++j)
      binders.emplace_back(cx.ng.get(b.x_names[j] + "'"), ih_type(j));
  } else {
    for (std::size_t j = 0; j < b.x_names.size(); ++j) {
      binders.emplace_back(b.x_names[j], b.x_types[j]);
      if (b.rec[j].recursive) binders.emplace_back(cx.ng.get(b.x_names[j] + "'"), ih_type(j));
    }
  }
  b.branch_type = build_telescope(binders, core);
  return b;
}

RewriteRule build_rule(GenContext& cx, const BranchData& b, std::size_t branch_index,
                       const std::vector<std::pair<std::string, TermPtr>>& y_binders,
                       const std::vector<SortTag>& y_sorts, bool with_motive_arg) {
  const Signature& sig = *cx.sig;
  RewriteRule rule;
  rule.head = cx.rec_name;
  rule.label = cx.rec_name + "#" + b.ctor;

  NameGen local = cx.ng;
  std::vector<TermPtr> yvars;
  for (std::size_t i = 0; i < y_binders.size(); ++i)
    yvars.push_back(mk_fvar(y_binders[i].first, y_sorts[i]));

  // Fresh index variables and primed parameter copies.
  std::vector<TermPtr> index_vars, primed_q;
  for (std::size_t i = 0; i < cx.z_binders.size(); ++i)
    index_vars.push_back(mk_fvar(local.get(cx.z_binders[i].first), cx.z_sorts[i]));
  for (std::size_t i = 0; i < cx.q_binders.size(); ++i)
    primed_q.push_back(mk_fvar(local.get(cx.q_binders[i].first + "'"), cx.q_sorts[i]));

  std::vector<TermPtr> ctor_pattern_args = primed_q;
  std::vector<TermPtr> xvars;
  for (std::size_t j = 0; j < b.x_names.size(); ++j)
    xvars.push_back(mk_fvar(b.x_names[j], b.x_sorts[j]));
  ctor_pattern_args.insert(ctor_pattern_args.end(), xvars.begin(), xvars.end());

  rule.lhs_args = cx.qvars;
  rule.lhs_args.insert(rule.lhs_args.end(), index_vars.begin(), index_vars.end());
  rule.lhs_args.push_back(mk_app(mk_sym(b.ctor, sig.find(b.ctor)->sort), ctor_pattern_args));
  if (with_motive_arg) rule.lhs_args.push_back(cx.motive_var);
  rule.lhs_args.insert(rule.lhs_args.end(), yvars.begin(), yvars.end());

  TermPtr rec_sym = mk_sym(cx.rec_name, cx.strong ? SortTag::Box : SortTag::Star);
  auto rec_call = [&](const std::vector<TermPtr>& w, const TermPtr& scrut) {
    std::vector<TermPtr> args = cx.qvars;
    args.insert(args.end(), w.begin(), w.end());
    args.push_back(scrut);
    if (with_motive_arg) args.push_back(cx.motive_var);
    args.insert(args.end(), yvars.begin(), yvars.end());
    return mk_app(rec_sym, args);
  };

  auto ih_term = [&](std::size_t j) -> TermPtr {
    const RecArg& ra = b.rec[j];
    std::vector<TermPtr> avars;
    for (std::size_t ai = 0; ai < ra.alpha.binders.size(); ++ai)
      avars.push_back(mk_fvar(ra.alpha.binders[ai].first, ra.alpha.sorts[ai]));
    TermPtr call = rec_call(ra.w_args, mk_app(xvars[j], avars));
    return build_abstractions(ra.alpha.binders, call);
  };

  std::vector<TermPtr> rhs_args;
  if (cx.style == RecursorStyle::Appended) {
    rhs_args = xvars;
    for (std::size_t j = 0; j < b.x_names.size(); ++j)
      rhs_args.push_back(b.rec[j].recursive ? ih_term(j) : xvars[j]);
  } else {
    for (std::size_t j = 0; j < b.x_names.size(); ++j) {
      rhs_args.push_back(xvars[j]);
      if (b.rec[j].recursive) rhs_args.push_back(ih_term(j));
    }
  }
  rule.rhs = mk_app(yvars[branch_index], rhs_args);

  // Environment: parameters, constructor arguments, motive, branches.
  for (std::size_t i = 0; i < cx.q_binders.size(); ++i)
    rule.rule_env.push(cx.q_binders[i].first, cx.q_binders[i].second);
  for (std::size_t j = 0; j < b.x_names.size(); ++j)
    rule.rule_env.push(b.x_names[j], b.x_types[j]);
  if (with_motive_arg)
    rule.rule_env.push(cx.motive_var->name, cx.motive_type);
  for (std::size_t i = 0; i < y_binders.size(); ++i)
    rule.rule_env.push(y_binders[i].first, y_binders[i].second);

  // Normalizing substitution: indices to output indices, primed parameters
  // to the parameters.
  for (std::size_t i = 0; i < index_vars.size(); ++i)
    rule.rho[index_vars[i]->name] = b.out_idx[i];
  for (std::size_t i = 0; i < primed_q.size(); ++i)
    rule.rho[primed_q[i]->name] = cx.qvars[i];
  return rule;
}

void setup_c_telescope(GenContext& cx) {
  const SymbolDecl* cd = cx.sig->find(cx.C);
  Telescope ctel = split_telescope(cd->type);
  Substitution ren;
  for (std::size_t i = 0; i < ctel.binders.size(); ++i) {
    TermPtr ty = subst(ctel.binders[i].second, ren);
    std::string name = cx.ng.get(ctel.hints[i]);
    TermPtr var = mk_fvar(name, ctel.sorts[i]);
    ren[ctel.binders[i].first] = var;
    if ((int)i < cx.k) {
      cx.q_binders.emplace_back(name, ty);
      cx.q_sorts.push_back(ctel.sorts[i]);
      cx.qvars.push_back(var);
    } else {
      cx.z_binders.emplace_back(name, ty);
      cx.z_sorts.push_back(ctel.sorts[i]);
      cx.zvars.push_back(var);
    }
  }
}

TermPtr scrutinee_type(const GenContext& cx, const std::vector<TermPtr>& idx) {
  std::vector<TermPtr> args = cx.qvars;
  args.insert(args.end(), idx.begin(), idx.end());
  return mk_app(mk_sym(cx.C, SortTag::Box), args);
}

}  // namespace

GeneratedRecursor gen_weak_recursor(const std::string& C,
                                    const std::vector<std::string>& ctors,
                                    const Signature& sig, const std::string& rec_name,
                                    int params, RecursorStyle style) {
  GenContext cx;
  cx.C = C;
  cx.sig = &sig;
  cx.k = params;
  cx.style = style;
  cx.rec_name = rec_name;
  cx.ng.used.insert(rec_name);
  setup_c_telescope(cx);

  // Motive: P : (z:V...)C q z... => *
  std::vector<std::pair<std::string, TermPtr>> motive_binders;
  Substitution copy;
  std::vector<TermPtr> copy_vars;
  for (std::size_t i = 0; i < cx.z_binders.size(); ++i) {
    std::string name = cx.ng.get(cx.z_binders[i].first);
    TermPtr ty = subst(cx.z_binders[i].second, copy);
    copy[cx.z_binders[i].first] = mk_fvar(name, cx.z_sorts[i]);
    copy_vars.push_back(mk_fvar(name, cx.z_sorts[i]));
    motive_binders.emplace_back(name, ty);
  }
  std::vector<TermPtr> sc_args = cx.qvars;
  sc_args.insert(sc_args.end(), copy_vars.begin(), copy_vars.end());
  TermPtr motive_type = build_telescope(
      motive_binders, mk_arrow(mk_app(mk_sym(C, SortTag::Box), sc_args), star()));
  std::string pname = cx.ng.get("P");
  cx.motive_var = mk_fvar(pname, SortTag::Box);
  cx.motive_type = motive_type;
  cx.strong = false;
  cx.result_of = [&cx](const std::vector<TermPtr>& idx, const TermPtr& scrut) {
    std::vector<TermPtr> args = idx;
    args.push_back(scrut);
    return mk_app(cx.motive_var, args);
  };

  std::vector<BranchData> branches;
  for (auto& c : ctors) branches.push_back(build_branch(cx, c));

  std::vector<std::pair<std::string, TermPtr>> y_binders;
  std::vector<SortTag> y_sorts;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    std::string y = cx.ng.get("y" + std::to_string(i + 1));
    y_binders.emplace_back(y, branches[i].branch_type);
    y_sorts.push_back(binder_sort(branches[i].branch_type));
  }

  std::string zname = cx.ng.get("z");
  std::vector<std::pair<std::string, TermPtr>> all = cx.q_binders;
  all.insert(all.end(), cx.z_binders.begin(), cx.z_binders.end());
  all.emplace_back(zname, scrutinee_type(cx, cx.zvars));
  all.emplace_back(pname, motive_type);
  all.insert(all.end(), y_binders.begin(), y_binders.end());
  TermPtr result = apply_result(cx, cx.zvars, mk_fvar(zname, SortTag::Star));

  GeneratedRecursor out;
  out.decl.name = rec_name;
  out.decl.type = build_telescope(all, result);
  out.decl.sort = SortTag::Star;
  RecursorInfo info;
  info.target = C;
  info.strong = false;
  info.generated = true;
  info.params = params;
  info.style = style;
  out.decl.recursor = info;
  for (std::size_t i = 0; i < branches.size(); ++i)
    out.rules.push_back(build_rule(cx, branches[i], i, y_binders, y_sorts, true));
  return out;
}

std::optional<GeneratedRecursor> gen_strong_recursor(
    const std::string& C, const std::vector<std::string>& ctors, const TermPtr& motive,
    Signature& sig, const std::string& rec_name, DiagnosticList& diags, int params) {
  if (params < 0) params = infer_parameters(C, ctors, sig);
  DiagnosticList small;
  check_small(C, params, sig, small);
  for (auto& d : small.items) diags.add(d);
  if (small.has_errors()) return std::nullopt;

  GenContext cx;
  cx.C = C;
  cx.sig = &sig;
  cx.k = params;
  cx.style = RecursorStyle::Appended;
  cx.rec_name = rec_name;
  cx.ng.used.insert(rec_name);
  cx.strong = true;
  setup_c_telescope(cx);

  // Motive shape: [z:V...][z0:C p... z...]Q with p... free parameter names.
  std::vector<std::string> mot_names;
  TermPtr m = motive;
  std::size_t want = cx.z_binders.size() + 1;
  std::vector<TermPtr> annots;
  for (std::size_t i = 0; i < want; ++i) {
    if (m->kind != TermKind::Abs) {
      diags.add(make_diag(Severity::Error, "E_RECURSOR_MOTIVE", "canonical-recursors",
                          "strong-recursor motive must abstract the indices and the "
                          "scrutinee of " + C,
                          rec_name));
      return std::nullopt;
    }
    std::string n = fresh_internal();
    mot_names.push_back(n);
    annots.push_back(m->left);
    m = instantiate(m->right, mk_fvar(n, binder_sort(m->left)));
  }
  // Parameter names: the prefix of the scrutinee annotation's spine.
  Spine sc = spine(annots.back());
  if (sc.head->kind != TermKind::Sym || sc.head->name != C ||
      sc.args.size() != cx.q_binders.size() + cx.z_binders.size()) {
    diags.add(make_diag(Severity::Error, "E_RECURSOR_MOTIVE", "canonical-recursors",
                        "motive scrutinee annotation must be " + C +
                            " applied to parameters and indices",
                        rec_name));
    return std::nullopt;
  }
  Substitution mren;
  for (std::size_t i = 0; i < cx.q_binders.size(); ++i) {
    if (sc.args[i]->kind != TermKind::FVar) {
      diags.add(make_diag(Severity::Error, "E_RECURSOR_MOTIVE", "canonical-recursors",
                          "motive parameters must be named variables", rec_name));
      return std::nullopt;
    }
    mren[sc.args[i]->name] = cx.qvars[i];
  }
  for (std::size_t i = 0; i < cx.z_binders.size(); ++i)
    mren[mot_names[i]] = cx.zvars[i];
  TermPtr q_body = subst(m, mren);  // still mentions the scrutinee marker
  std::string scrut_marker = mot_names.back();
  TermClass qc = classify(q_body);
  if (!(qc == TermClass::Kind || is_sort(q_body, SortTag::Star))) {
    diags.add(make_diag(Severity::Error, "E_RECURSOR_MOTIVE", "canonical-recursors",
                        "strong-recursor motive body must be a kind", rec_name));
    return std::nullopt;
  }
  cx.result_of = [&cx, q_body, scrut_marker](const std::vector<TermPtr>& idx,
                                             const TermPtr& scrut) {
    Substitution s;
    for (std::size_t i = 0; i < idx.size(); ++i) s[cx.zvars[i]->name] = idx[i];
    s[scrut_marker] = scrut;
    return subst(q_body, s);
  };

  std::vector<BranchData> branches;
  for (auto& c : ctors) branches.push_back(build_branch(cx, c));
  std::vector<std::pair<std::string, TermPtr>> y_binders;
  std::vector<SortTag> y_sorts;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    std::string y = cx.ng.get("y" + std::to_string(i + 1));
    y_binders.emplace_back(y, branches[i].branch_type);
    y_sorts.push_back(binder_sort(branches[i].branch_type));
  }

  std::string zname = cx.ng.get("z");
  std::vector<std::pair<std::string, TermPtr>> all = cx.q_binders;
  all.insert(all.end(), cx.z_binders.begin(), cx.z_binders.end());
  all.emplace_back(zname, scrutinee_type(cx, cx.zvars));
  all.insert(all.end(), y_binders.begin(), y_binders.end());
  TermPtr result = cx.result_of(cx.zvars, mk_fvar(zname, SortTag::Star));

  GeneratedRecursor out;
  out.decl.name = rec_name;
  out.decl.type = build_telescope(all, result);
  out.decl.sort = SortTag::Box;
  RecursorInfo info;
  info.target = C;
  info.strong = true;
  info.generated = true;
  info.params = params;
  info.style = RecursorStyle::Appended;
  out.decl.recursor = info;
  for (std::size_t i = 0; i < branches.size(); ++i)
    out.rules.push_back(build_rule(cx, branches[i], i, y_binders, y_sorts, false));

  // Safeness gate on the would-be rules blocks generation.
  DiagnosticList safe;
  {
    Telescope tel = split_telescope(out.decl.type);
    for (auto& rule : out.rules) {
      std::map<std::string, int> seen;
      for (std::size_t i = 1; i <= rule.lhs_args.size() && i <= tel.binders.size(); ++i) {
        if (tel.sorts[i - 1] != SortTag::Box) continue;
        TermPtr li = subst(rule.lhs_args[i - 1], rule.rho);
        if (li->kind != TermKind::FVar) {
          safe.add(make_diag(Severity::Error, "E_UNSAFE_MATCH", "safeness",
                             "predicate argument " + std::to_string(i) + " of " +
                                 rule.label + " is matched against a non-variable",
                             rec_name, rule.label));
        } else if (seen.count(li->name)) {
          safe.add(make_diag(Severity::Error, "E_UNSAFE_NONLINEAR", "safeness",
                             "predicate arguments " + std::to_string(seen[li->name]) +
                                 " and " + std::to_string(i) + " of " + rule.label +
                                 " collapse to the same variable " + li->name,
                             rec_name, rule.label));
        } else {
          seen[li->name] = (int)i;
        }
      }
    }
  }
  for (auto& d : safe.items) diags.add(d);
  if (safe.has_errors()) return std::nullopt;
  return out;
}

std::optional<PreRecursorView> check_pre_recursor(const SymbolDecl& f, const std::string& C,
                                                  Signature& sig, DiagnosticList& diags) {
  const SymbolDecl* cd = sig.find(C);
  if (!cd) return std::nullopt;
  Telescope ctel = split_telescope(cd->type);
  std::size_t m = ctel.binders.size();
  PreRecursorView view;
  view.tel = split_telescope(f.type);
  std::map<std::string, int> slot_of;
  for (std::size_t i = 0; i < view.tel.binders.size(); ++i)
    slot_of[view.tel.binders[i].first] = (int)i;

  bool saw_c_headed = false;
  for (std::size_t s = 0; s < view.tel.binders.size() && view.scrutinee_slot < 0; ++s) {
    Spine sp = spine(view.tel.binders[s].second);
    if (sp.head->kind != TermKind::Sym || sp.head->name != C) continue;
    saw_c_headed = true;
    if (sp.args.size() != m) continue;
    std::set<std::string> seen;
    std::vector<int> slots;
    bool ok = true;
    for (auto& a : sp.args) {
      if (a->kind != TermKind::FVar || !slot_of.count(a->name) ||
          slot_of[a->name] >= (int)s || seen.count(a->name)) {
        ok = false;
        break;
      }
      seen.insert(a->name);
      slots.push_back(slot_of[a->name]);
    }
    if (!ok) continue;
    view.scrutinee_slot = (int)s;
    view.index_slots = slots;
    view.scrutinee_name = view.tel.binders[s].first;
    for (auto& a : sp.args) view.index_names.push_back(a->name);
  }
  if (view.scrutinee_slot < 0) {
    diags.add(make_diag(
        Severity::Error, "E_PRE_RECURSOR_SHAPE", "pre-recursor",
        f.name + " does not have the shape (z:V...)(z0:" + C + " z...)W" +
            (saw_c_headed ? "; an argument permutation may fix it" : ""),
        f.name));
    return std::nullopt;
  }
  std::set<int> taken(view.index_slots.begin(), view.index_slots.end());
  taken.insert(view.scrutinee_slot);
  for (std::size_t i = 0; i < view.tel.binders.size(); ++i)
    if (!taken.count((int)i)) view.rest_slots.push_back((int)i);

  // The permuted order must respect dependencies.
  std::vector<int> order = view.index_slots;
  order.push_back(view.scrutinee_slot);
  order.insert(order.end(), view.rest_slots.begin(), view.rest_slots.end());
  std::set<std::string> earlier;
  for (int slot : order) {
    for (auto& v : free_vars(view.tel.binders[slot].second)) {
      if (slot_of.count(v) && !earlier.count(v)) {
        diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_SHAPE", "pre-recursor",
                            f.name + ": arguments cannot be permuted to indices-then-"
                            "scrutinee order because of dependencies",
                            f.name));
        return std::nullopt;
      }
    }
    earlier.insert(view.tel.binders[slot].first);
  }

  std::vector<std::pair<std::string, TermPtr>> rest_binders;
  for (int slot : view.rest_slots) rest_binders.push_back(view.tel.binders[slot]);
  view.w = build_telescope(rest_binders, view.tel.core);

  for (auto& g : symbols_of(view.w)) {
    const SymbolDecl* gd = sig.find(g);
    if (gd && gd->sort == SortTag::Box && sig.prec.lt(C, g))
      diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_PRECEDENCE", "pre-recursor",
                          "predicate symbol " + g + " in the output part of " + f.name +
                              " is larger than " + C,
                          f.name));
  }

  for (const RewriteRule* r : sig.rules_of(f.name)) {
    if (r->lhs_args.size() != view.tel.binders.size()) {
      diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_RULE", "pre-recursor",
                          "rule " + r->label + " must apply " + f.name + " fully",
                          f.name, r->label));
      continue;
    }
    const TermPtr& sc = r->lhs_args[view.scrutinee_slot];
    Spine sp = spine(sc);
    if (sp.head->kind != TermKind::Sym || sig.is_defined(sp.head->name)) {
      diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_RULE", "pre-recursor",
                          "rule " + r->label + " must match a constant constructor in "
                          "the scrutinee position",
                          f.name, r->label));
      continue;
    }
    std::set<std::string> index_vars;
    bool vars_ok = true;
    for (int slot : view.index_slots) {
      const TermPtr& li = r->lhs_args[slot];
      if (li->kind != TermKind::FVar || index_vars.count(li->name)) vars_ok = false;
      else index_vars.insert(li->name);
    }
    if (!vars_ok) {
      diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_RULE", "pre-recursor",
                          "rule " + r->label + " must have distinct variables in the "
                          "index positions",
                          f.name, r->label));
      continue;
    }
    // Index variables may not occur in the right-hand side. Parameter-like
    // slots are exempt: an index variable equated by rho with a scrutinee
    // pattern variable is stable data, which is how the canonical rules
    // thread the parameter prefix through recursive calls.
    std::set<std::string> rho_images;
    for (auto& [x, img] : r->rho)
      for (auto& v : free_vars(img)) rho_images.insert(v);
    for (auto& v : free_vars(r->rhs))
      if (index_vars.count(v) && !rho_images.count(v))
        diags.add(make_diag(Severity::Error, "E_PRE_RECURSOR_RULE", "pre-recursor",
                            "rule " + r->label + " uses index variable " + v +
                                " in its right-hand side",
                            f.name, r->label));
  }
  return view;
}

void check_recursor_positivity(const SymbolDecl& f, const std::string& C,
                               const PreRecursorView& view, Signature& sig,
                               FuelBudget& fuel, DiagnosticList& diags) {
  // The analysis runs on the type as written: unfolding defined predicate
  // symbols would bypass the declared monotone-argument signs entirely.
  (void)fuel;
  TermPtr w = view.w;
  bool any_mon = false;
  for (auto& d : sig.decls)
    if (!d.mon_plus.empty() || !d.mon_minus.empty()) any_mon = true;
  bool defined_equiv = false;
  for (auto* d : sig.equivalents(C))
    if (d->sort == SortTag::Box && d->defined && d->name != C) defined_equiv = true;
  bool use_extended = any_mon || defined_equiv;

  std::vector<const SymbolDecl*> eq;
  for (auto* d : sig.equivalents(C))
    if (d->sort == SortTag::Box) eq.push_back(d);

  if (use_extended) {
    for (auto* F : eq) {
      auto bad = occurrences_violating(F->name, w, Polarity::Plus, sig, true);
      if (!bad.empty())
        diags.add(make_diag(Severity::Error, "E_RECURSOR_POSITIVITY", "recursor-positivity",
                            F->name + " occurs at non-positive position " +
                                position_to_string(bad.front()) + " in the output part of " +
                                f.name,
                            f.name, "", position_to_string(bad.front())));
    }
    const SymbolDecl* cd = sig.find(C);
    auto check_mon = [&](const std::set<int>& side, Polarity eps) {
      for (int i : side) {
        if (i > (int)view.index_names.size()) continue;
        auto bad = occurrences_violating(view.index_names[i - 1], w, eps, sig, true);
        if (!bad.empty())
          diags.add(make_diag(Severity::Error, "E_RECURSOR_POSITIVITY",
                              "recursor-positivity",
                              "monotone argument " + std::to_string(i) + " of " + C +
                                  " occurs with the wrong sign at " +
                                  position_to_string(bad.front()) + " in " + f.name,
                              f.name, "", position_to_string(bad.front())));
      }
    };
    if (cd) {
      check_mon(cd->mon_plus, Polarity::Plus);
      check_mon(cd->mon_minus, Polarity::Minus);
    }
  } else {
    for (auto* F : eq) {
      if (F->defined) {
        if (symbols_of(w).count(F->name))
          diags.add(make_diag(Severity::Error, "E_RECURSOR_POSITIVITY",
                              "recursor-positivity",
                              "defined predicate " + F->name +
                                  " occurs in the output part of " + f.name,
                              f.name));
        continue;
      }
      auto bad = occurrences_violating(F->name, w, Polarity::Plus, sig, true);
      if (!bad.empty())
        diags.add(make_diag(Severity::Error, "E_RECURSOR_POSITIVITY", "recursor-positivity",
                            F->name + " occurs at non-positive position " +
                                position_to_string(bad.front()) + " in the output part of " +
                                f.name,
                            f.name, "", position_to_string(bad.front())));
    }
  }
}

namespace {

bool strict_acc_subterm(const TermPtr& l, const TermPtr& target, const Signature& sig) {
  Spine s = spine(l);
  if (s.head->kind != TermKind::Sym) return false;
  const SymbolDecl* c = sig.find(s.head->name);
  if (!c) return false;
  for (std::size_t j = 1; j <= s.args.size(); ++j) {
    if (!c->acc.count((int)j)) continue;
    if (alpha_eq(s.args[j - 1], target)) return true;
    if (strict_acc_subterm(s.args[j - 1], target, sig)) return true;
  }
  return false;
}

void collect_calls(const TermPtr& t, const std::string& head, const Signature& sig,
                   std::vector<std::pair<std::string, std::vector<TermPtr>>>& out) {
  Spine s = spine(t);
  if (s.head->kind == TermKind::Sym &&
      (s.head->name == head || sig.prec.equiv(s.head->name, head))) {
    out.push_back({s.head->name, s.args});
    for (auto& a : s.args) collect_calls(a, head, sig, out);
    return;
  }
  switch (t->kind) {
    case TermKind::Abs:
    case TermKind::App:
    case TermKind::Prod:
      collect_calls(t->left, head, sig, out);
      collect_calls(t->right, head, sig, out);
      return;
    default:
      return;
  }
}

}  // namespace

void structural_decrease_check(const RewriteRule& rule, Signature& sig,
                               DiagnosticList& diags) {
  std::vector<std::pair<std::string, std::vector<TermPtr>>> calls;
  collect_calls(rule.rhs, rule.head, sig, calls);
  for (auto& [g, args] : calls) {
    bool ok = false;
    std::size_t n = std::min(args.size(), rule.lhs_args.size());
    for (std::size_t i = 0; i < n && !ok; ++i) {
      const TermPtr& u = args[i];
      if (strict_acc_subterm(rule.lhs_args[i], u, sig)) ok = true;
      Spine us = spine(u);
      if (!ok && us.head->kind == TermKind::FVar && !us.args.empty() &&
          strict_acc_subterm(rule.lhs_args[i], us.head, sig))
        ok = true;
    }
    if (!ok)
      diags.add(make_diag(Severity::Error, "E_NO_DECREASE", "structural-decrease",
                          "recursive call to " + g + " in rule " + rule.label +
                              " has no argument that is a strict accessible subterm of "
                              "the corresponding lhs argument",
                          rule.head, rule.label));
  }
}

namespace {

TermPtr permute_spines(const TermPtr& t, const std::string& head, std::size_t arity,
                       const std::vector<int>& order) {
  TermPtr out;
  switch (t->kind) {
    case TermKind::Abs:
      out = mk_abs(t->name, permute_spines(t->left, head, arity, order),
                   permute_spines(t->right, head, arity, order));
      break;
    case TermKind::Prod:
      out = mk_prod(t->name, permute_spines(t->left, head, arity, order),
                    permute_spines(t->right, head, arity, order));
      break;
    case TermKind::App:
      out = mk_app(permute_spines(t->left, head, arity, order),
                   permute_spines(t->right, head, arity, order));
      break;
    default:
      out = t;
  }
  Spine s = spine(out);
  if (s.head->kind == TermKind::Sym && s.head->name == head && s.args.size() == arity) {
    std::vector<TermPtr> perm;
    for (int slot : order) perm.push_back(s.args[slot]);
    return mk_app(s.head, perm);
  }
  return out;
}

// Closes a lhs/rhs pair over its free variables in a canonical order so two
// rules can be compared up to variable renaming.
TermPtr close_rule_pair(const TermPtr& lhs, const TermPtr& rhs) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::function<void(const TermPtr&)> collect = [&](const TermPtr& t) {
    switch (t->kind) {
      case TermKind::FVar:
        if (!seen.count(t->name)) {
          seen.insert(t->name);
          order.push_back(t->name);
        }
        return;
      case TermKind::Abs:
      case TermKind::App:
      case TermKind::Prod:
        collect(t->left);
        collect(t->right);
        return;
      default:
        return;
    }
  };
  collect(lhs);
  collect(rhs);
  TermPtr pair = mk_app(mk_app(mk_sym("#pair"), lhs), rhs);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    pair = mk_abs("v", star(), abstract_fvar(pair, *it));
  return pair;
}

}  // namespace

bool matches_canonical_recursor(SymbolDecl& f, const std::string& C,
                                const PreRecursorView& view,
                                const std::vector<RewriteRule>& rules_of_f,
                                const std::vector<std::string>& ctors, Signature& sig) {
  std::vector<int> order = view.index_slots;
  order.push_back(view.scrutinee_slot);
  order.insert(order.end(), view.rest_slots.begin(), view.rest_slots.end());

  std::vector<std::pair<std::string, TermPtr>> permuted_binders;
  for (int slot : order) permuted_binders.push_back(view.tel.binders[slot]);
  TermPtr permuted_type = build_telescope(permuted_binders, view.tel.core);

  std::size_t arity = view.tel.binders.size();
  auto transform_rule = [&](const RewriteRule& r) {
    return std::pair<TermPtr, TermPtr>(permute_spines(r.lhs_term(), f.name, arity, order),
                                       permute_spines(r.rhs, f.name, arity, order));
  };

  int kmax = infer_parameters(C, ctors, sig);
  for (RecursorStyle style : {RecursorStyle::Interleaved, RecursorStyle::Appended}) {
    for (int k = kmax; k >= 0; --k) {
      GeneratedRecursor gen;
      if (f.sort == SortTag::Star) {
        gen = gen_weak_recursor(C, ctors, sig, f.name, k, style);
      } else {
        // Reconstruct the motive from the candidate's own codomain.
        std::vector<std::pair<std::string, TermPtr>> mbinders;
        for (std::size_t i = k; i < view.index_slots.size(); ++i)
          mbinders.push_back(view.tel.binders[view.index_slots[i]]);
        mbinders.push_back(view.tel.binders[view.scrutinee_slot]);
        TermPtr motive = build_abstractions(mbinders, view.tel.core);
        DiagnosticList scratch;
        auto g = gen_strong_recursor(C, ctors, motive, sig, f.name, scratch, k);
        if (!g) continue;
        gen = *g;
      }
      if ((int)gen.decl.recursor->params != k) continue;
      if (!alpha_eq(permuted_type, gen.decl.type)) continue;
      if (gen.rules.size() != rules_of_f.size()) continue;
      bool all = true;
      for (auto& gr : gen.rules) {
        // Scrutinee of a generated rule sits right after parameters+indices.
        std::size_t sc_slot = view.index_slots.size();
        Spine gsc = spine(gr.lhs_args[sc_slot]);
        const RewriteRule* cand = nullptr;
        for (auto& cr : rules_of_f) {
          Spine csc = spine(cr.lhs_args[view.scrutinee_slot]);
          if (csc.head->kind == TermKind::Sym && gsc.head->kind == TermKind::Sym &&
              csc.head->name == gsc.head->name) {
            cand = &cr;
            break;
          }
        }
        if (!cand) { all = false; break; }
        auto [cl, cr2] = transform_rule(*cand);
        TermPtr closed_cand = close_rule_pair(cl, cr2);
        TermPtr closed_gen = close_rule_pair(gr.lhs_term(), gr.rhs);
        if (!alpha_eq(closed_cand, closed_gen)) { all = false; break; }
      }
      if (!all) continue;
      f.recursor->params = k;
      f.recursor->style = style;
      f.recursor->perm = order;
      return true;
    }
  }
  return false;
}

}  // namespace cac
