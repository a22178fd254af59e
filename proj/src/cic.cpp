/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/cic.hpp"

#include <functional>
#include <sstream>

namespace cac {

CicPtr cic_sort(SortTag s) {
  auto t = std::make_shared<CicTerm>(CicKind::Sort);
  const_cast<CicTerm&>(*t).sort = s;
  return t;
}

CicPtr cic_star() {
  static CicPtr t = cic_sort(SortTag::Star);
  return t;
}

CicPtr cic_box() {
  static CicPtr t = cic_sort(SortTag::Box);
  return t;
}

CicPtr cic_bvar(int i) {
  auto t = std::make_shared<CicTerm>(CicKind::BVar);
  const_cast<CicTerm&>(*t).index = i;
  return t;
}

CicPtr cic_fvar(const std::string& n, SortTag s) {
  auto t = std::make_shared<CicTerm>(CicKind::FVar);
  auto& m = const_cast<CicTerm&>(*t);
  m.name = n;
  m.vsort = s;
  return t;
}

CicPtr cic_abs(const std::string& hint, const CicPtr& annot, const CicPtr& body) {
  auto t = std::make_shared<CicTerm>(CicKind::Abs);
  auto& m = const_cast<CicTerm&>(*t);
  m.name = hint;
  m.a = annot;
  m.b = body;
  return t;
}

CicPtr cic_prod(const std::string& hint, const CicPtr& dom, const CicPtr& cod) {
  auto t = std::make_shared<CicTerm>(CicKind::Prod);
  auto& m = const_cast<CicTerm&>(*t);
  m.name = hint;
  m.a = dom;
  m.b = cod;
  return t;
}

CicPtr cic_arrow(const CicPtr& dom, const CicPtr& cod) { return cic_prod("_", dom, cod); }

CicPtr cic_app(const CicPtr& f, const CicPtr& a) {
  auto t = std::make_shared<CicTerm>(CicKind::App);
  auto& m = const_cast<CicTerm&>(*t);
  m.a = f;
  m.b = a;
  return t;
}

CicPtr cic_app(const CicPtr& f, const std::vector<CicPtr>& args) {
  CicPtr t = f;
  for (auto& a : args) t = cic_app(t, a);
  return t;
}

CicPtr cic_ind(const std::string& hint, const CicPtr& arity, std::vector<CicPtr> ctors) {
  auto t = std::make_shared<CicTerm>(CicKind::Ind);
  auto& m = const_cast<CicTerm&>(*t);
  m.name = hint;
  m.a = arity;
  m.ctors = std::move(ctors);
  return t;
}

CicPtr cic_constr(int i, const CicPtr& ind) {
  auto t = std::make_shared<CicTerm>(CicKind::Constr);
  auto& m = const_cast<CicTerm&>(*t);
  m.index = i;
  m.a = ind;
  return t;
}

CicPtr cic_elim(const CicPtr& ind, const CicPtr& motive, std::vector<CicPtr> indices,
                const CicPtr& scrut, std::vector<CicPtr> branches) {
  auto t = std::make_shared<CicTerm>(CicKind::Elim);
  auto& m = const_cast<CicTerm&>(*t);
  m.a = ind;
  m.b = motive;
  m.indices = std::move(indices);
  m.scrut = scrut;
  m.branches = std::move(branches);
  return t;
}

bool cic_alpha_eq(const CicPtr& a, const CicPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case CicKind::Sort: return a->sort == b->sort;
    case CicKind::BVar: return a->index == b->index;
    case CicKind::FVar: return a->name == b->name;
    case CicKind::Abs:
    case CicKind::Prod:
    case CicKind::App:
      return cic_alpha_eq(a->a, b->a) && cic_alpha_eq(a->b, b->b);
    case CicKind::Ind: {
      if (!cic_alpha_eq(a->a, b->a) || a->ctors.size() != b->ctors.size()) return false;
      for (std::size_t i = 0; i < a->ctors.size(); ++i)
        if (!cic_alpha_eq(a->ctors[i], b->ctors[i])) return false;
      return true;
    }
    case CicKind::Constr:
      return a->index == b->index && cic_alpha_eq(a->a, b->a);
    case CicKind::Elim: {
      if (!cic_alpha_eq(a->a, b->a) || !cic_alpha_eq(a->b, b->b)) return false;
      if (a->indices.size() != b->indices.size() ||
          a->branches.size() != b->branches.size())
        return false;
      for (std::size_t i = 0; i < a->indices.size(); ++i)
        if (!cic_alpha_eq(a->indices[i], b->indices[i])) return false;
      if (!cic_alpha_eq(a->scrut, b->scrut)) return false;
      for (std::size_t i = 0; i < a->branches.size(); ++i)
        if (!cic_alpha_eq(a->branches[i], b->branches[i])) return false;
      return true;
    }
  }
  return false;
}

namespace {

CicPtr cic_map(const CicPtr& t, const std::function<CicPtr(const CicPtr&, int)>& leaf,
               int depth) {
  switch (t->kind) {
    case CicKind::Sort: return t;
    case CicKind::BVar:
    case CicKind::FVar:
      return leaf(t, depth);
    case CicKind::Abs:
      return cic_abs(t->name, cic_map(t->a, leaf, depth), cic_map(t->b, leaf, depth + 1));
    case CicKind::Prod:
      return cic_prod(t->name, cic_map(t->a, leaf, depth), cic_map(t->b, leaf, depth + 1));
    case CicKind::App:
      return cic_app(cic_map(t->a, leaf, depth), cic_map(t->b, leaf, depth));
    case CicKind::Ind: {
      std::vector<CicPtr> cs;
      for (auto& c : t->ctors) cs.push_back(cic_map(c, leaf, depth + 1));
      return cic_ind(t->name, cic_map(t->a, leaf, depth), std::move(cs));
    }
    case CicKind::Constr:
      return cic_constr(t->index, cic_map(t->a, leaf, depth));
    case CicKind::Elim: {
      std::vector<CicPtr> idx, brs;
      for (auto& i : t->indices) idx.push_back(cic_map(i, leaf, depth));
      for (auto& b : t->branches) brs.push_back(cic_map(b, leaf, depth));
      return cic_elim(cic_map(t->a, leaf, depth), cic_map(t->b, leaf, depth),
                      std::move(idx), cic_map(t->scrut, leaf, depth), std::move(brs));
    }
  }
  return t;
}

}  // namespace

CicPtr cic_instantiate(const CicPtr& body, const CicPtr& arg) {
  return cic_map(body,
                 [&](const CicPtr& t, int depth) -> CicPtr {
                   if (t->kind == CicKind::BVar && t->index == depth) return arg;
                   return t;
                 },
                 0);
}

CicPtr cic_abstract(const CicPtr& t, const std::string& x) {
  return cic_map(t,
                 [&](const CicPtr& u, int depth) -> CicPtr {
                   if (u->kind == CicKind::FVar && u->name == x) return cic_bvar(depth);
                   return u;
                 },
                 0);
}

CicPtr cic_subst1(const CicPtr& t, const std::string& x, const CicPtr& u) {
  return cic_map(t,
                 [&](const CicPtr& v, int) -> CicPtr {
                   if (v->kind == CicKind::FVar && v->name == x) return u;
                   return v;
                 },
                 0);
}

std::set<std::string> cic_free_vars(const CicPtr& t) {
  std::set<std::string> out;
  std::function<void(const CicPtr&)> walk = [&](const CicPtr& u) {
    switch (u->kind) {
      case CicKind::FVar: out.insert(u->name); return;
      case CicKind::Abs:
      case CicKind::Prod:
      case CicKind::App:
        walk(u->a);
        walk(u->b);
        return;
      case CicKind::Ind:
        walk(u->a);
        for (auto& c : u->ctors) walk(c);
        return;
      case CicKind::Constr: walk(u->a); return;
      case CicKind::Elim:
        walk(u->a);
        walk(u->b);
        for (auto& i : u->indices) walk(i);
        walk(u->scrut);
        for (auto& b : u->branches) walk(b);
        return;
      default:
        return;
    }
  };
  walk(t);
  return out;
}

const CicPtr* CicEnv::lookup(const std::string& x) const {
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
    if (it->first == x) return &it->second;
  return nullptr;
}

namespace {

void cic_print(std::ostringstream& os, const CicPtr& t, std::vector<std::string>& bound,
               int level) {
  switch (t->kind) {
    case CicKind::Sort:
      os << (t->sort == SortTag::Star ? "*" : "[]");
      return;
    case CicKind::BVar: {
      int i = (int)bound.size() - 1 - t->index;
      os << (i >= 0 ? bound[i] : "_" + std::to_string(t->index));
      return;
    }
    case CicKind::FVar:
      os << t->name;
      return;
    case CicKind::App:
      if (level > 1) os << '(';
      cic_print(os, t->a, bound, 1);
      os << ' ';
      cic_print(os, t->b, bound, 2);
      if (level > 1) os << ')';
      return;
    case CicKind::Abs:
    case CicKind::Prod: {
      std::set<std::string> avoid(bound.begin(), bound.end());
      for (auto& v : cic_free_vars(t->b)) avoid.insert(v);
      std::string x = fresh_named(t->name, avoid);
      if (level > 0) os << '(';
      os << (t->kind == CicKind::Abs ? '[' : '(') << x << ':';
      cic_print(os, t->a, bound, 0);
      os << (t->kind == CicKind::Abs ? ']' : ')');
      bound.push_back(x);
      cic_print(os, t->b, bound, 0);
      bound.pop_back();
      if (level > 0) os << ')';
      return;
    }
    case CicKind::Ind: {
      std::set<std::string> avoid(bound.begin(), bound.end());
      std::string x = fresh_named(t->name, avoid);
      os << "Ind(" << x << ':';
      cic_print(os, t->a, bound, 0);
      os << "){";
      bound.push_back(x);
      for (std::size_t i = 0; i < t->ctors.size(); ++i) {
        if (i) os << " | ";
        cic_print(os, t->ctors[i], bound, 0);
      }
      bound.pop_back();
      os << '}';
      return;
    }
    case CicKind::Constr:
      os << "Constr(" << t->index << ", ";
      cic_print(os, t->a, bound, 0);
      os << ')';
      return;
    case CicKind::Elim: {
      os << "Elim(";
      cic_print(os, t->a, bound, 0);
      os << ", ";
      cic_print(os, t->b, bound, 0);
      os << ", (";
      for (std::size_t i = 0; i < t->indices.size(); ++i) {
        if (i) os << ", ";
        cic_print(os, t->indices[i], bound, 0);
      }
      os << "), ";
      cic_print(os, t->scrut, bound, 0);
      os << "){";
      for (std::size_t i = 0; i < t->branches.size(); ++i) {
        if (i) os << " | ";
        cic_print(os, t->branches[i], bound, 0);
      }
      os << '}';
      return;
    }
  }
}

}  // namespace

std::string cic_to_string(const CicPtr& t) {
  std::ostringstream os;
  std::vector<std::string> bound;
  cic_print(os, t, bound, 0);
  return os.str();
}

namespace {

struct CicSpine {
  CicPtr head;
  std::vector<CicPtr> args;
};

CicSpine cic_spine(const CicPtr& t) {
  CicSpine s;
  CicPtr cur = t;
  std::vector<CicPtr> rev;
  while (cur->kind == CicKind::App) {
    rev.push_back(cur->b);
    cur = cur->a;
  }
  s.head = cur;
  s.args.assign(rev.rbegin(), rev.rend());
  return s;
}

struct CicTelescope {
  std::vector<std::pair<std::string, CicPtr>> binders;
  std::vector<std::string> hints;
  CicPtr core;
};

SortTag cic_binder_sort(const CicPtr& annot) {
  // Box exactly when the annotation is a kind: * or a product ending in *.
  CicPtr cur = annot;
  while (cur->kind == CicKind::Prod) cur = cur->b;
  if (cur->kind == CicKind::Sort) return SortTag::Box;
  return SortTag::Star;
}

CicTelescope cic_split(const CicPtr& t, int max = -1) {
  CicTelescope tel;
  CicPtr cur = t;
  while (cur->kind == CicKind::Prod && (max < 0 || (int)tel.binders.size() < max)) {
    std::string x = fresh_internal();
    tel.binders.emplace_back(x, cur->a);
    tel.hints.push_back(cur->name);
    cur = cic_instantiate(cur->b, cic_fvar(x, cic_binder_sort(cur->a)));
    }
  tel.core = cur;
  return tel;
}

[[noreturn]] void cic_fail(const std::string& code, const std::string& msg) {
  throw type_error(make_diag(Severity::Error, code, "cic-typing", msg));
}

// Delta'[I,X,C,f,Q,fs,zs]: the iota' contractum walker shared with the
// translation.  `C` is opened with the marker X; `actuals` are the
// constructor's arguments.
CicPtr delta_prime_contract(const CicPtr& ind, const CicPtr& ctor_opened,
                            const std::string& xmark, const CicPtr& branch,
                            const CicPtr& motive, const std::vector<CicPtr>& branches,
                            const std::vector<CicPtr>& actuals) {
  CicPtr c = ctor_opened;
  CicPtr f = branch;
  std::size_t i = 0;
  while (c->kind == CicKind::Prod) {
    if (i >= actuals.size())
      cic_fail("E_CIC_ARITY", "constructor applied to too few arguments for iota'");
    CicPtr b = c->a;
    const CicPtr& a = actuals[i];
    bool recursive = cic_free_vars(b).count(xmark) != 0;
    if (!recursive) {
      f = cic_app(f, a);
    } else {
      CicTelescope bt = cic_split(b);
      CicSpine core = cic_spine(bt.core);
      // b = (y:D...)X q...: add the recursive result on a y...-abstraction.
      std::vector<CicPtr> yvars;
      for (auto& [n, ty] : bt.binders) yvars.push_back(cic_fvar(n));
      std::vector<CicPtr> q;
      for (auto& arg : core.args)
        q.push_back(cic_subst1(arg, xmark, ind));
      CicPtr inner = cic_elim(ind, motive, q, cic_app(a, yvars), branches);
      CicPtr wrapped = inner;
      for (auto it = bt.binders.rbegin(); it != bt.binders.rend(); ++it)
        wrapped = cic_abs("y", cic_subst1(it->second, xmark, ind),
                          cic_abstract(wrapped, it->first));
      f = cic_app(cic_app(f, a), wrapped);
    }
    c = cic_instantiate(c->b, a);
    ++i;
  }
  if (i != actuals.size())
    cic_fail("E_CIC_ARITY", "constructor applied to too many arguments for iota'");
  return f;
}

std::optional<CicPtr> iota_here(const CicPtr& t) {
  if (t->kind != CicKind::Elim) return std::nullopt;
  CicSpine s = cic_spine(t->scrut);
  if (s.head->kind != CicKind::Constr) return std::nullopt;
  const CicPtr& ind = s.head->a;
  if (ind->kind != CicKind::Ind) return std::nullopt;
  int i = s.head->index;
  if (i < 1 || i > (int)ind->ctors.size()) return std::nullopt;
  if ((int)t->branches.size() != (int)ind->ctors.size()) return std::nullopt;
  std::string xmark = fresh_internal();
  CicPtr opened = cic_instantiate(ind->ctors[i - 1], cic_fvar(xmark, SortTag::Box));
  return delta_prime_contract(t->a, opened, xmark, t->branches[i - 1], t->b, t->branches,
                              s.args);
}

std::optional<CicPtr> beta_here(const CicPtr& t) {
  if (t->kind == CicKind::App && t->a->kind == CicKind::Abs)
    return cic_instantiate(t->a->b, t->b);
  return std::nullopt;
}

// Leftmost-outermost step over the full structure.
std::optional<CicPtr> step_rec(const CicPtr& t, bool include_beta) {
  if (include_beta)
    if (auto r = beta_here(t)) return r;
  if (auto r = iota_here(t)) return r;
  auto try_child = [&](const CicPtr& c) { return step_rec(c, include_beta); };
  switch (t->kind) {
    case CicKind::Abs:
    case CicKind::Prod: {
      if (auto r = try_child(t->a))
        return t->kind == CicKind::Abs ? cic_abs(t->name, *r, t->b)
                                       : cic_prod(t->name, *r, t->b);
      if (auto r = try_child(t->b))
        return t->kind == CicKind::Abs ? cic_abs(t->name, t->a, *r)
                                       : cic_prod(t->name, t->a, *r);
      return std::nullopt;
    }
    case CicKind::App: {
      if (auto r = try_child(t->a)) return cic_app(*r, t->b);
      if (auto r = try_child(t->b)) return cic_app(t->a, *r);
      return std::nullopt;
    }
    case CicKind::Ind: {
      if (auto r = try_child(t->a)) {
        return cic_ind(t->name, *r, t->ctors);
      }
      for (std::size_t i = 0; i < t->ctors.size(); ++i)
        if (auto r = try_child(t->ctors[i])) {
          std::vector<CicPtr> cs = t->ctors;
          cs[i] = *r;
          return cic_ind(t->name, t->a, std::move(cs));
        }
      return std::nullopt;
    }
    case CicKind::Constr: {
      if (auto r = try_child(t->a)) return cic_constr(t->index, *r);
      return std::nullopt;
    }
    case CicKind::Elim: {
      if (auto r = try_child(t->a))
        return cic_elim(*r, t->b, t->indices, t->scrut, t->branches);
      if (auto r = try_child(t->b))
        return cic_elim(t->a, *r, t->indices, t->scrut, t->branches);
      for (std::size_t i = 0; i < t->indices.size(); ++i)
        if (auto r = try_child(t->indices[i])) {
          std::vector<CicPtr> idx = t->indices;
          idx[i] = *r;
          return cic_elim(t->a, t->b, std::move(idx), t->scrut, t->branches);
        }
      if (auto r = try_child(t->scrut))
        return cic_elim(t->a, t->b, t->indices, *r, t->branches);
      for (std::size_t i = 0; i < t->branches.size(); ++i)
        if (auto r = try_child(t->branches[i])) {
          std::vector<CicPtr> brs = t->branches;
          brs[i] = *r;
          return cic_elim(t->a, t->b, t->indices, t->scrut, std::move(brs));
        }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

void all_reducts_rec(const CicPtr& t, std::vector<CicPtr>& out,
                     const std::function<CicPtr(const CicPtr&)>& wrap) {
  if (auto r = beta_here(t)) out.push_back(wrap(*r));
  if (auto r = iota_here(t)) out.push_back(wrap(*r));
  switch (t->kind) {
    case CicKind::Abs:
    case CicKind::Prod:
      all_reducts_rec(t->a, out, [&, t](const CicPtr& r) {
        return wrap(t->kind == CicKind::Abs ? cic_abs(t->name, r, t->b)
                                            : cic_prod(t->name, r, t->b));
      });
      all_reducts_rec(t->b, out, [&, t](const CicPtr& r) {
        return wrap(t->kind == CicKind::Abs ? cic_abs(t->name, t->a, r)
                                            : cic_prod(t->name, t->a, r));
      });
      return;
    case CicKind::App:
      all_reducts_rec(t->a, out, [&, t](const CicPtr& r) { return wrap(cic_app(r, t->b)); });
      all_reducts_rec(t->b, out, [&, t](const CicPtr& r) { return wrap(cic_app(t->a, r)); });
      return;
    case CicKind::Elim: {
      all_reducts_rec(t->a, out, [&, t](const CicPtr& r) {
        return wrap(cic_elim(r, t->b, t->indices, t->scrut, t->branches));
      });
      all_reducts_rec(t->b, out, [&, t](const CicPtr& r) {
        return wrap(cic_elim(t->a, r, t->indices, t->scrut, t->branches));
      });
      for (std::size_t i = 0; i < t->indices.size(); ++i)
        all_reducts_rec(t->indices[i], out, [&, t, i](const CicPtr& r) {
          std::vector<CicPtr> idx = t->indices;
          idx[i] = r;
          return wrap(cic_elim(t->a, t->b, std::move(idx), t->scrut, t->branches));
        });
      all_reducts_rec(t->scrut, out, [&, t](const CicPtr& r) {
        return wrap(cic_elim(t->a, t->b, t->indices, r, t->branches));
      });
      for (std::size_t i = 0; i < t->branches.size(); ++i)
        all_reducts_rec(t->branches[i], out, [&, t, i](const CicPtr& r) {
          std::vector<CicPtr> brs = t->branches;
          brs[i] = r;
          return wrap(cic_elim(t->a, t->b, t->indices, t->scrut, std::move(brs)));
        });
      return;
    }
    case CicKind::Ind:
    case CicKind::Constr:
    default:
      return;
  }
}

}  // namespace

std::optional<CicPtr> iota_prime_step(const CicPtr& t) { return step_rec(t, false); }

std::optional<CicPtr> cic_step(const CicPtr& t) { return step_rec(t, true); }

CicPtr cic_normalize(const CicPtr& t, FuelBudget& fuel) {
  CicPtr cur = t;
  while (auto r = cic_step(cur)) {
    fuel.take();
    cur = *r;
  }
  return cur;
}

std::vector<CicPtr> cic_all_reducts(const CicPtr& t) {
  std::vector<CicPtr> out;
  all_reducts_rec(t, out, [](const CicPtr& r) { return r; });
  return out;
}

CicPtr delta_type(const CicPtr& ind, const CicPtr& ctor_type, const CicPtr& motive,
                  const CicPtr& c) {
  std::string xmark = fresh_internal();
  std::function<CicPtr(const CicPtr&, const CicPtr&)> walk =
      [&](const CicPtr& ct, const CicPtr& acc) -> CicPtr {
    if (ct->kind != CicKind::Prod) {
      CicSpine core = cic_spine(ct);
      if (core.head->kind != CicKind::FVar || core.head->name != xmark)
        cic_fail("E_CIC_TYPE", "malformed constructor type in branch-type computation");
      return cic_app(cic_app(motive, core.args), acc);
    }
    bool recursive = cic_free_vars(ct->a).count(xmark) != 0;
    std::string z = fresh_internal();
    CicPtr zv = cic_fvar(z, cic_binder_sort(ct->a));
    CicPtr rest = walk(cic_instantiate(ct->b, zv), cic_app(acc, zv));
    if (!recursive)
      return cic_prod("z", ct->a, cic_abstract(rest, z));
    CicTelescope bt = cic_split(ct->a);
    CicSpine core = cic_spine(bt.core);
    if (core.head->kind != CicKind::FVar || core.head->name != xmark)
      cic_fail("E_CIC_TYPE", "constructor argument type is not strictly positive");
    std::vector<CicPtr> yvars;
    for (auto& [n, ty] : bt.binders) yvars.push_back(cic_fvar(n));
    CicPtr hyp = cic_app(cic_app(motive, core.args), cic_app(zv, yvars));
    for (auto it = bt.binders.rbegin(); it != bt.binders.rend(); ++it)
      hyp = cic_prod("y", it->second, cic_abstract(hyp, it->first));
    CicPtr dom = cic_subst1(ct->a, xmark, ind);
    return cic_prod("z", dom, cic_abstract(cic_arrow(hyp, rest), z));
  };
  CicPtr opened = cic_instantiate(ctor_type, cic_fvar(xmark, SortTag::Box));
  return walk(opened, c);
}

CicPtr delta_prime_type(const CicPtr& ind, const CicPtr& ctor_type,
                        const std::vector<std::string>& idx_names,
                        const std::string& y_name, const CicPtr& k_body, const CicPtr& c) {
  std::string xmark = fresh_internal();
  auto k_at = [&](const std::vector<CicPtr>& m, const CicPtr& yv) {
    CicPtr out = k_body;
    for (std::size_t i = 0; i < idx_names.size() && i < m.size(); ++i)
      out = cic_subst1(out, idx_names[i], m[i]);
    return cic_subst1(out, y_name, yv);
  };
  std::function<CicPtr(const CicPtr&, const CicPtr&)> walk =
      [&](const CicPtr& ct, const CicPtr& acc) -> CicPtr {
    if (ct->kind != CicKind::Prod) {
      CicSpine core = cic_spine(ct);
      if (core.head->kind != CicKind::FVar || core.head->name != xmark)
        cic_fail("E_CIC_TYPE", "malformed constructor type in branch-type computation");
      return k_at(core.args, acc);
    }
    bool recursive = cic_free_vars(ct->a).count(xmark) != 0;
    std::string z = fresh_internal();
    CicPtr zv = cic_fvar(z, cic_binder_sort(ct->a));
    CicPtr rest = walk(cic_instantiate(ct->b, zv), cic_app(acc, zv));
    if (!recursive) {
      // Clause missing from the source construction; forced by typability.
      return cic_prod("z", ct->a, cic_abstract(rest, z));
    }
    CicTelescope bt = cic_split(ct->a);
    CicSpine core = cic_spine(bt.core);
    if (core.head->kind != CicKind::FVar || core.head->name != xmark)
      cic_fail("E_CIC_TYPE", "constructor argument type is not strictly positive");
    std::vector<CicPtr> yvars;
    for (auto& [n, ty] : bt.binders) yvars.push_back(cic_fvar(n));
    CicPtr hyp = k_at(core.args, cic_app(zv, yvars));
    for (auto it = bt.binders.rbegin(); it != bt.binders.rend(); ++it)
      hyp = cic_prod("y", it->second, cic_abstract(hyp, it->first));
    CicPtr dom = cic_subst1(ct->a, xmark, ind);
    return cic_prod("z", dom, cic_abstract(cic_arrow(hyp, rest), z));
  };
  CicPtr opened = cic_instantiate(ctor_type, cic_fvar(xmark, SortTag::Box));
  return walk(opened, c);
}

namespace {

struct CicChecker {
  FuelBudget& fuel;

  bool convertible(const CicPtr& a, const CicPtr& b) {
    if (cic_alpha_eq(a, b)) return true;
    return cic_alpha_eq(cic_normalize(a, fuel), cic_normalize(b, fuel));
  }

  CicPtr infer_sort(const CicEnv& env, const CicPtr& t) {
    CicPtr s = infer(env, t);
    if (s->kind != CicKind::Sort) s = cic_normalize(s, fuel);
    if (s->kind != CicKind::Sort)
      cic_fail("E_CIC_TYPE", "expected a sort as the type of " + cic_to_string(t));
    return s;
  }

  void check(const CicEnv& env, const CicPtr& t, const CicPtr& ty) {
    CicPtr ti = infer(env, t);
    if (ti->kind == CicKind::Sort && ti->sort == SortTag::Box) {
      if (!(ty->kind == CicKind::Sort && ty->sort == SortTag::Box))
        cic_fail("E_CIC_TYPE", cic_to_string(t) + " is a kind, expected " +
                                   cic_to_string(ty));
      return;
    }
    if (!convertible(ti, ty))
      cic_fail("E_CIC_TYPE", cic_to_string(t) + " has type " + cic_to_string(ti) +
                                 ", not convertible to " + cic_to_string(ty));
  }

  // Strict positivity of one constructor type with respect to the marker.
  void check_positive(const CicPtr& opened, const std::string& xmark) {
    CicTelescope tel = cic_split(opened);
    CicSpine core = cic_spine(tel.core);
    if (core.head->kind != CicKind::FVar || core.head->name != xmark)
      cic_fail("E_CIC_NOT_STRICTLY_POSITIVE",
               "constructor type must end in the inductive variable");
    for (auto& m : core.args)
      if (cic_free_vars(m).count(xmark))
        cic_fail("E_CIC_NOT_STRICTLY_POSITIVE",
                 "inductive variable occurs in its own output arguments");
    for (auto& [n, b] : tel.binders) {
      if (!cic_free_vars(b).count(xmark)) continue;
      CicTelescope bt = cic_split(b);
      CicSpine bc = cic_spine(bt.core);
      if (bc.head->kind != CicKind::FVar || bc.head->name != xmark)
        cic_fail("E_CIC_NOT_STRICTLY_POSITIVE",
                 "inductive variable occurs at a non-strictly-positive position");
      for (auto& [yn, d] : bt.binders)
        if (cic_free_vars(d).count(xmark))
          cic_fail("E_CIC_NOT_STRICTLY_POSITIVE",
                   "inductive variable occurs left of an arrow");
      for (auto& q : bc.args)
        if (cic_free_vars(q).count(xmark))
          cic_fail("E_CIC_NOT_STRICTLY_POSITIVE",
                   "inductive variable occurs in recursive-argument indices");
    }
  }

  // CIC- smallness: constructor type (x':A'...)(z:B...)X m... with x':A' a
  // sub-sequence of the arity telescope and no predicate variable among z.
  bool is_small(const CicPtr& ind) {
    CicTelescope atel = cic_split(ind->a);
    for (auto& ctor : ind->ctors) {
      std::string xmark = fresh_internal();
      CicPtr opened = cic_instantiate(ctor, cic_fvar(xmark, SortTag::Box));
      CicTelescope tel = cic_split(opened);
      std::size_t cursor = 0, j = 0;
      std::map<std::string, CicPtr> ren;
      for (; j < tel.binders.size(); ++j) {
        CicPtr ty = tel.binders[j].second;
        for (auto& [from, to] : ren) ty = cic_subst1(ty, from, to);
        bool matched = false;
        for (std::size_t p = cursor; p < atel.binders.size(); ++p) {
          if (cic_alpha_eq(ty, atel.binders[p].second)) {
            ren[tel.binders[j].first] = cic_fvar(atel.binders[p].first);
            cursor = p + 1;
            matched = true;
            break;
          }
        }
        if (!matched) break;
      }
      for (; j < tel.binders.size(); ++j)
        if (cic_binder_sort(tel.binders[j].second) == SortTag::Box) return false;
    }
    return true;
  }

  // CIC- safeness: predicate positions of the arity receive distinct
  // variables in every constructor's output arguments.
  bool is_safe(const CicPtr& ind) {
    CicTelescope atel = cic_split(ind->a);
    for (auto& ctor : ind->ctors) {
      std::string xmark = fresh_internal();
      CicPtr opened = cic_instantiate(ctor, cic_fvar(xmark, SortTag::Box));
      CicTelescope tel = cic_split(opened);
      CicSpine core = cic_spine(tel.core);
      std::set<std::string> seen;
      for (std::size_t i = 0; i < atel.binders.size() && i < core.args.size(); ++i) {
        if (cic_binder_sort(atel.binders[i].second) != SortTag::Box) continue;
        const CicPtr& m = core.args[i];
        if (m->kind != CicKind::FVar || m->vsort != SortTag::Box) return false;
        if (seen.count(m->name)) return false;
        seen.insert(m->name);
      }
    }
    return true;
  }

  CicPtr infer_ind(const CicEnv& env, const CicPtr& t) {
    for (auto& v : cic_free_vars(t))
      if (env.lookup(v))
        cic_fail("E_CIC_NOT_CLOSED", "inductive type depends on the environment (" + v +
                                         "); close it first");
    CicTelescope atel = cic_split(t->a);
    if (atel.core->kind != CicKind::Sort || atel.core->sort != SortTag::Star)
      cic_fail("E_CIC_TYPE", "inductive arity must end in *");
    CicEnv empty;
    CicPtr asort = infer_sort(empty, t->a);
    if (asort->sort != SortTag::Box) cic_fail("E_CIC_TYPE", "inductive arity must be a kind");
    FuelBudget nf_fuel(fuel.remaining);
    if (!cic_alpha_eq(cic_normalize(t, nf_fuel), t))
      cic_fail("E_CIC_NF", "inductive type must be in normal form");
    for (auto& ctor : t->ctors) {
      std::string xmark = fresh_internal();
      CicPtr opened = cic_instantiate(ctor, cic_fvar(xmark, SortTag::Box));
      CicEnv env2;
      env2.push(xmark, t->a);
      CicPtr s = infer(env2, opened);
      if (!convertible(s, cic_star()))
        cic_fail("E_CIC_TYPE", "constructor type is not a proposition/type");
      check_positive(opened, xmark);
    }
    return t->a;
  }

  CicPtr infer(const CicEnv& env, const CicPtr& t) {
    switch (t->kind) {
      case CicKind::Sort:
        if (t->sort == SortTag::Star) return cic_box();
        cic_fail("E_CIC_TYPE", "the sort [] has no type");
      case CicKind::BVar:
        cic_fail("E_CIC_TYPE", "dangling bound variable");
      case CicKind::FVar: {
        const CicPtr* ty = env.lookup(t->name);
        if (!ty) cic_fail("E_CIC_TYPE", "unbound variable " + t->name);
        return *ty;
      }
      case CicKind::Abs: {
        CicPtr su = infer_sort(env, t->a);
        std::string x = fresh_internal();
        CicEnv env2 = env;
        env2.push(x, t->a);
        CicPtr body = cic_instantiate(t->b, cic_fvar(x, su->sort));
        CicPtr tv = infer(env2, body);
        infer_sort(env2, tv);
        return cic_prod(t->name, t->a, cic_abstract(tv, x));
      }
      case CicKind::Prod: {
        CicPtr su = infer_sort(env, t->a);
        std::string x = fresh_internal();
        CicEnv env2 = env;
        env2.push(x, t->a);
        return infer_sort(env2, cic_instantiate(t->b, cic_fvar(x, su->sort)));
      }
      case CicKind::App: {
        CicPtr tf = infer(env, t->a);
        if (tf->kind != CicKind::Prod) tf = cic_normalize(tf, fuel);
        if (tf->kind != CicKind::Prod)
          cic_fail("E_CIC_TYPE", "applied term of non-product type");
        check(env, t->b, tf->a);
        return cic_instantiate(tf->b, t->b);
      }
      case CicKind::Ind:
        return infer_ind(env, t);
      case CicKind::Constr: {
        if (t->a->kind != CicKind::Ind)
          cic_fail("E_CIC_TYPE", "constructor of a non-inductive term");
        infer(env, t->a);
        if (t->index < 1 || t->index > (int)t->a->ctors.size())
          cic_fail("E_CIC_TYPE", "constructor index out of range");
        return cic_instantiate(t->a->ctors[t->index - 1], t->a);
      }
      case CicKind::Elim: {
        const CicPtr& ind = t->a;
        if (ind->kind != CicKind::Ind)
          cic_fail("E_CIC_TYPE", "elimination of a non-inductive term");
        infer(env, ind);
        CicTelescope atel = cic_split(ind->a);
        std::size_t nidx = atel.binders.size();
        if (t->indices.size() != nidx)
          cic_fail("E_CIC_ARITY", "elimination applies the wrong number of indices");
        if (t->branches.size() != ind->ctors.size())
          cic_fail("E_CIC_ARITY", "elimination has the wrong number of branches");

        // Index and scrutinee typing.
        {
          CicPtr rem = ind->a;
          for (std::size_t j = 0; j < nidx; ++j) {
            check(env, t->indices[j], rem->a);
            rem = cic_instantiate(rem->b, t->indices[j]);
          }
        }
        check(env, t->scrut, cic_app(ind, t->indices));

        // Strong elimination: Q = [x:A...][y:I x...]K with K a kind.
        bool strong = false;
        {
          CicPtr m = t->b;
          std::size_t abs_count = 0;
          while (m->kind == CicKind::Abs && abs_count < nidx + 1) {
            ++abs_count;
            m = m->b;
          }
          if (abs_count == nidx + 1) {
            CicPtr kk = m;
            while (kk->kind == CicKind::Prod) kk = kk->b;
            if (kk->kind == CicKind::Sort && kk->sort == SortTag::Star) strong = true;
          }
        }

        if (!strong) {
          // (star-Elim)
          if (!cic_free_vars(t->b).empty())
            cic_fail("E_CIC_TYPE", "elimination motive must be closed");
          CicEnv empty;
          CicPtr qty = infer(empty, t->b);
          std::vector<std::pair<std::string, CicPtr>> xb;
          std::vector<CicPtr> xv;
          for (std::size_t j = 0; j < nidx; ++j) {
            std::string n = fresh_internal();
            xb.emplace_back(n, atel.binders[j].second);
            xv.push_back(cic_fvar(n, cic_binder_sort(atel.binders[j].second)));
          }
          CicPtr want = cic_arrow(cic_app(ind, xv), cic_star());
          for (auto it = xb.rbegin(); it != xb.rend(); ++it) {
            // Re-abstract over the arity telescope (renamed).
            CicPtr ty = it->second;
            want = cic_prod("x", ty, cic_abstract(want, it->first));
          }
          if (!convertible(qty, want))
            cic_fail("E_CIC_TYPE", "motive has type " + cic_to_string(qty) +
                                       ", expected " + cic_to_string(want));
          for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
            CicPtr ti = delta_type(ind, ind->ctors[i], t->b, cic_constr((int)i + 1, ind));
            CicPtr ts = infer_sort(empty, ti);
            if (ts->sort != SortTag::Star)
              cic_fail("E_CIC_TYPE", "branch type is not a proposition/type");
            check(env, t->branches[i], ti);
          }
          return cic_app(cic_app(t->b, t->indices), t->scrut);
        }

        // (box-Elim)
        if (!is_small(ind))
          cic_fail("E_CIC_NOT_SMALL", "strong elimination requires a small inductive type");
        if (!is_safe(ind))
          cic_fail("E_CIC_NOT_SAFE", "strong elimination requires a safe inductive type");
        {
          FuelBudget nf_fuel(fuel.remaining);
          if (!cic_alpha_eq(cic_normalize(t->b, nf_fuel), t->b))
            cic_fail("E_CIC_NF", "strong-elimination motive must be in normal form");
        }
        if (!cic_free_vars(t->b).empty())
          cic_fail("E_CIC_TYPE", "elimination motive must be closed");
        std::vector<std::string> idx_names;
        CicPtr k = t->b;
        CicEnv kenv;
        std::vector<CicPtr> xv;
        CicPtr arity_rem = ind->a;
        for (std::size_t j = 0; j < nidx; ++j) {
          if (!convertible(k->a, arity_rem->a))
            cic_fail("E_CIC_TYPE",
                     "strong-elimination motive must abstract the inductive arity");
          std::string n = fresh_internal();
          idx_names.push_back(n);
          kenv.push(n, k->a);
          xv.push_back(cic_fvar(n, cic_binder_sort(k->a)));
          arity_rem = cic_instantiate(arity_rem->b, xv.back());
          k = cic_instantiate(k->b, xv.back());
        }
        if (!convertible(k->a, cic_app(ind, xv)))
          cic_fail("E_CIC_TYPE",
                   "strong-elimination motive must abstract the scrutinee of the "
                   "inductive type");
        std::string y_name = fresh_internal();
        kenv.push(y_name, cic_app(ind, xv));
        CicPtr k_body = cic_instantiate(k->b, cic_fvar(y_name));
        CicPtr ks = infer_sort(kenv, k_body);
        if (ks->sort != SortTag::Box)
          cic_fail("E_CIC_TYPE", "strong-elimination motive body must be a kind");
        CicEnv empty;
        for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
          CicPtr ti = delta_prime_type(ind, ind->ctors[i], idx_names, y_name, k_body,
                                       cic_constr((int)i + 1, ind));
          CicPtr ts = infer_sort(empty, ti);
          if (ts->sort != SortTag::Box)
            cic_fail("E_CIC_TYPE", "strong-elimination branch type is not a kind");
          check(env, t->branches[i], ti);
        }
        CicPtr result = k_body;
        for (std::size_t j = 0; j < nidx; ++j)
          result = cic_subst1(result, idx_names[j], t->indices[j]);
        return cic_subst1(result, y_name, t->scrut);
      }
    }
    cic_fail("E_CIC_TYPE", "unreachable term former");
  }
};

}  // namespace

CicPtr cic_check(const CicEnv& env, const CicPtr& t, FuelBudget& fuel) {
  CicChecker checker{fuel};
  return checker.infer(env, t);
}

CicPtr close_inductives(const CicPtr& t) {
  // Bottom-up: close every Ind whose term still mentions enclosing binders,
  // and adjust Constr applications accordingly.
  std::function<CicPtr(const CicPtr&, std::vector<std::pair<std::string, CicPtr>>&)> go =
      [&](const CicPtr& u,
          std::vector<std::pair<std::string, CicPtr>>& scope) -> CicPtr {
    switch (u->kind) {
      case CicKind::Sort:
      case CicKind::BVar:
      case CicKind::FVar:
        return u;
      case CicKind::Abs:
      case CicKind::Prod: {
        CicPtr annot = go(u->a, scope);
        std::string x = fresh_internal();
        scope.emplace_back(x, annot);
        CicPtr body = go(cic_instantiate(u->b, cic_fvar(x, cic_binder_sort(annot))), scope);
        scope.pop_back();
        CicPtr closed = cic_abstract(body, x);
        return u->kind == CicKind::Abs ? cic_abs(u->name, annot, closed)
                                       : cic_prod(u->name, annot, closed);
      }
      case CicKind::App:
        return cic_app(go(u->a, scope), go(u->b, scope));
      case CicKind::Ind: {
        CicPtr arity = go(u->a, scope);
        std::vector<CicPtr> cs;
        for (auto& c : u->ctors) cs.push_back(go(c, scope));
        CicPtr ind = cic_ind(u->name, arity, std::move(cs));
        // Dependent scope variables, closed under type dependencies.
        std::set<std::string> need;
        for (auto& v : cic_free_vars(ind))
          for (auto& [n, ty] : scope)
            if (n == v) need.insert(v);
        bool grew = true;
        while (grew) {
          grew = false;
          for (auto& [n, ty] : scope) {
            if (!need.count(n)) continue;
            for (auto& v : cic_free_vars(ty))
              for (auto& [n2, ty2] : scope)
                if (n2 == v && !need.count(v)) {
                  need.insert(v);
                  grew = true;
                }
          }
        }
        if (need.empty()) return ind;
        std::vector<std::pair<std::string, CicPtr>> ys;
        for (auto& [n, ty] : scope)
          if (need.count(n)) ys.emplace_back(n, ty);
        // A' = (y:U...)A; C' = (y:U...)C{X -> X' y...}.
        CicPtr arity2 = arity;
        for (auto it = ys.rbegin(); it != ys.rend(); ++it)
          arity2 = cic_prod(it->first, it->second, cic_abstract(arity2, it->first));
        std::vector<CicPtr> cs2;
        for (auto& c : ind->ctors) {
          std::string xm = fresh_internal();
          std::vector<CicPtr> yvars;
          for (auto& [n, ty] : ys) yvars.push_back(cic_fvar(n));
          CicPtr opened = cic_instantiate(c, cic_app(cic_fvar(xm, SortTag::Box), yvars));
          for (auto it = ys.rbegin(); it != ys.rend(); ++it)
            opened = cic_prod(it->first, it->second, cic_abstract(opened, it->first));
          cs2.push_back(cic_abstract(opened, xm));
        }
        CicPtr closed = cic_ind(u->name, arity2, std::move(cs2));
        std::vector<CicPtr> yvars;
        for (auto& [n, ty] : ys) yvars.push_back(cic_fvar(n));
        return cic_app(closed, yvars);
      }
      case CicKind::Constr: {
        CicPtr inner = go(u->a, scope);
        CicSpine s = cic_spine(inner);
        if (s.head->kind == CicKind::Ind && !s.args.empty())
          return cic_app(cic_constr(u->index, s.head), s.args);
        return cic_constr(u->index, inner);
      }
      case CicKind::Elim: {
        CicPtr ind = go(u->a, scope);
        if (ind->kind != CicKind::Ind) {
          CicSpine s = cic_spine(ind);
          if (s.head->kind == CicKind::Ind)
            cic_fail("E_CIC_NOT_CLOSED",
                     "elimination of an environment-dependent inductive type is not "
                     "supported");
        }
        std::vector<CicPtr> idx, brs;
        for (auto& i : u->indices) idx.push_back(go(i, scope));
        for (auto& b : u->branches) brs.push_back(go(b, scope));
        return cic_elim(ind, go(u->b, scope), std::move(idx), go(u->scrut, scope),
                        std::move(brs));
      }
    }
    return u;
  };
  std::vector<std::pair<std::string, CicPtr>> scope;
  return go(t, scope);
}

// ---------------------------------------------------------------------------
// Translation into CAC.

std::string Translator::ind_name(const CicPtr& ind) {
  for (auto& [t, n] : names)
    if (cic_alpha_eq(t, ind)) return n;
  std::string n = "I" + std::to_string(++anon_counter);
  names.emplace_back(ind, n);
  return n;
}

namespace {

TermPtr cac_delta_prime_rhs(const TermPtr& ctor_type_marked, const std::string& xmark,
                            const TermPtr& ind_sym, const TermPtr& branch,
                            const std::vector<TermPtr>& actuals,
                            const std::function<TermPtr(const std::vector<TermPtr>&,
                                                        const TermPtr&)>& rec_call) {
  TermPtr c = ctor_type_marked;
  TermPtr f = branch;
  std::size_t i = 0;
  while (c->kind == TermKind::Prod) {
    const TermPtr& a = actuals[i];
    TermPtr b = c->left;
    if (!occurs_free(xmark, b)) {
      f = mk_app(f, a);
    } else {
      Telescope bt = split_telescope(b);
      Spine core = spine(bt.core);
      std::vector<TermPtr> yvars;
      for (std::size_t ai = 0; ai < bt.binders.size(); ++ai)
        yvars.push_back(mk_fvar(bt.binders[ai].first, bt.sorts[ai]));
      std::vector<TermPtr> q;
      for (std::size_t qi = 0; qi < core.args.size(); ++qi)
        q.push_back(subst1(core.args[qi], xmark, ind_sym));
      TermPtr inner = rec_call(q, mk_app(a, yvars));
      std::vector<std::pair<std::string, TermPtr>> binders;
      for (auto& [n, ty] : bt.binders) binders.emplace_back(n, subst1(ty, xmark, ind_sym));
      f = mk_app(mk_app(f, a), build_abstractions(binders, inner));
    }
    c = instantiate(c->right, a);
    ++i;
  }
  return f;
}

}  // namespace

void Translator::emit_inductive(const CicPtr& ind, const std::string& base) {
  for (auto& d : out.decls)
    if (d.name == "Ind_" + base) return;  // already emitted

  CicTelescope atel_probe = cic_split(ind->a);
  std::size_t nidx = atel_probe.binders.size();

  TranslationOutput::Decl ind_decl;
  ind_decl.name = "Ind_" + base;
  ind_decl.type = run(ind->a);
  out.decls.push_back(ind_decl);
  TermPtr ind_sym = mk_sym(ind_decl.name, SortTag::Box);

  std::vector<TermPtr> ctor_types;
  for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
    TranslationOutput::Decl d;
    d.name = "Constr_" + base + "_" + std::to_string(i + 1);
    d.type = run(cic_instantiate(ind->ctors[i], ind));
    ctor_types.push_back(d.type);
    out.decls.push_back(d);
  }

  // WElim_base : (Q:(x:A...)Ind x... => *)(x:A...)(y:Ind x...)(f:T...)Q x... y
  std::string qname = "Q";
  TermPtr qvar = mk_fvar(qname, SortTag::Box);
  std::vector<std::pair<std::string, TermPtr>> xb;
  std::vector<TermPtr> xv;
  {
    TermPtr a = ind_decl.type;
    for (std::size_t j = 0; j < nidx; ++j) {
      std::string n = "x" + std::to_string(j + 1);
      xb.emplace_back(n, a->left);
      xv.push_back(mk_fvar(n, binder_sort(a->left)));
      a = instantiate(a->right, xv.back());
    }
  }
  TermPtr q_type;
  {
    std::vector<std::pair<std::string, TermPtr>> copy;
    std::vector<TermPtr> cv;
    TermPtr a = ind_decl.type;
    for (std::size_t j = 0; j < nidx; ++j) {
      std::string n = "x" + std::to_string(j + 1) + "q";
      copy.emplace_back(n, a->left);
      cv.push_back(mk_fvar(n, binder_sort(a->left)));
      a = instantiate(a->right, cv.back());
    }
    q_type = build_telescope(copy, mk_arrow(mk_app(ind_sym, cv), star()));
  }
  std::vector<TermPtr> branch_types;
  for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
    CicPtr ti = delta_type(ind, ind->ctors[i], cic_fvar(qname, SortTag::Box),
                           cic_constr((int)i + 1, ind));
    branch_types.push_back(run(ti));
  }
  std::vector<std::pair<std::string, TermPtr>> welim_binders;
  welim_binders.emplace_back(qname, q_type);
  welim_binders.insert(welim_binders.end(), xb.begin(), xb.end());
  std::string yname = "y0";
  welim_binders.emplace_back(yname, mk_app(ind_sym, xv));
  std::vector<std::string> fnames;
  for (std::size_t i = 0; i < branch_types.size(); ++i) {
    fnames.push_back("f" + std::to_string(i + 1));
    welim_binders.emplace_back(fnames.back(), branch_types[i]);
  }
  TermPtr welim_result = mk_app(mk_app(qvar, xv), mk_fvar(yname, SortTag::Star));
  TranslationOutput::Decl welim;
  welim.name = "WElim_" + base;
  welim.type = build_telescope(welim_binders, welim_result);
  welim.is_recursor = true;
  welim.recursor_for = ind_decl.name;
  out.decls.push_back(welim);

  // Rules: WElim Q x... (Constr_i z...) f... --> Delta'_W[...].
  for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
    std::string xmark = fresh_internal();
    TermPtr marked = run(cic_instantiate(ind->ctors[i], cic_fvar(xmark, SortTag::Box)));
    Telescope mtel = split_telescope(marked);
    RewriteRule rule;
    rule.head = welim.name;
    rule.label = welim.name + "#" + std::to_string(i + 1);
    std::vector<TermPtr> fvars;
    for (std::size_t b = 0; b < fnames.size(); ++b)
      fvars.push_back(mk_fvar(fnames[b], binder_sort(branch_types[b])));
    std::vector<TermPtr> zvars;
    std::vector<std::pair<std::string, TermPtr>> zb;
    for (std::size_t j = 0; j < mtel.binders.size(); ++j) {
      std::string n = "z" + std::to_string(j + 1);
      zvars.push_back(mk_fvar(n, mtel.sorts[j]));
      TermPtr ty = mtel.binders[j].second;
      // Rewrite opened names to the rule variables and the marker to Ind.
      Substitution s;
      for (std::size_t p = 0; p < j; ++p) s[mtel.binders[p].first] = zvars[p];
      s[xmark] = ind_sym;
      zb.emplace_back(n, subst(ty, s));
    }
    std::vector<TermPtr> idx_vars;
    for (std::size_t j = 0; j < nidx; ++j)
      idx_vars.push_back(mk_fvar("x" + std::to_string(j + 1), binder_sort(xb[j].second)));
    rule.lhs_args.push_back(qvar);
    rule.lhs_args.insert(rule.lhs_args.end(), idx_vars.begin(), idx_vars.end());
    TermPtr ctor_sym = mk_sym("Constr_" + base + "_" + std::to_string(i + 1));
    rule.lhs_args.push_back(mk_app(ctor_sym, zvars));
    rule.lhs_args.insert(rule.lhs_args.end(), fvars.begin(), fvars.end());

    auto rec_call = [&](const std::vector<TermPtr>& q, const TermPtr& scrut) {
      std::vector<TermPtr> args;
      args.push_back(qvar);
      args.insert(args.end(), q.begin(), q.end());
      args.push_back(scrut);
      args.insert(args.end(), fvars.begin(), fvars.end());
      return mk_app(mk_sym(welim.name, SortTag::Star), args);
    };
    rule.rhs = cac_delta_prime_rhs(marked, xmark, ind_sym, fvars[i], zvars, rec_call);

    rule.rule_env.push(qname, q_type);
    for (auto& [n, ty] : zb) rule.rule_env.push(n, ty);
    for (std::size_t b = 0; b < fnames.size(); ++b)
      rule.rule_env.push(fnames[b], branch_types[b]);
    // rho: index variables to the constructor's output indices.
    {
      Spine core = spine(mtel.core);
      Substitution s;
      for (std::size_t p = 0; p < mtel.binders.size(); ++p)
        s[mtel.binders[p].first] = zvars[p];
      for (std::size_t j = 0; j < nidx && j < core.args.size(); ++j)
        rule.rho["x" + std::to_string(j + 1)] = subst(core.args[j], s);
    }
    out.rules.push_back(rule);
  }
}

std::string Translator::emit_strong(const CicPtr& ind, const CicPtr& motive) {
  std::string base = ind_name(ind);
  emit_inductive(ind, base);
  std::string key = cic_to_string(ind) + "@" + cic_to_string(motive);
  auto it = selim_by_key.find(key);
  if (it != selim_by_key.end()) return it->second;
  int k = 1;
  for (auto& [key2, name] : selim_by_key)
    if (name.rfind("SElim_" + base + "_", 0) == 0) ++k;
  std::string name = "SElim_" + base + "_" + std::to_string(k);
  selim_by_key[key] = name;

  TermPtr ind_sym = mk_sym("Ind_" + base, SortTag::Box);
  CicTelescope atel = cic_split(ind->a);
  std::size_t nidx = atel.binders.size();

  // Open the motive [x:A...][y:I x...]K.
  std::vector<std::string> idx_names;
  CicPtr m = motive;
  std::vector<CicPtr> xv_cic;
  for (std::size_t j = 0; j < nidx; ++j) {
    std::string n = "x" + std::to_string(j + 1);
    idx_names.push_back(n);
    xv_cic.push_back(cic_fvar(n, cic_binder_sort(m->a)));
    m = cic_instantiate(m->b, xv_cic.back());
  }
  std::string y_name = "y0";
  CicPtr k_body = cic_instantiate(m->b, cic_fvar(y_name));

  std::vector<std::pair<std::string, TermPtr>> binders;
  std::vector<TermPtr> xv;
  {
    TermPtr a = run(ind->a);
    for (std::size_t j = 0; j < nidx; ++j) {
      binders.emplace_back(idx_names[j], a->left);
      xv.push_back(mk_fvar(idx_names[j], binder_sort(a->left)));
      a = instantiate(a->right, xv.back());
    }
  }
  binders.emplace_back(y_name, mk_app(ind_sym, xv));
  std::vector<TermPtr> branch_types;
  std::vector<std::string> fnames;
  for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
    CicPtr ti = delta_prime_type(ind, ind->ctors[i], idx_names, y_name, k_body,
                                 cic_constr((int)i + 1, ind));
    branch_types.push_back(run(ti));
    fnames.push_back("f" + std::to_string(i + 1));
    binders.emplace_back(fnames.back(), branch_types.back());
  }
  TermPtr result = run(k_body);
  TranslationOutput::Decl selim;
  selim.name = name;
  selim.type = build_telescope(binders, result);
  selim.is_recursor = true;
  selim.recursor_for = "Ind_" + base;
  out.decls.push_back(selim);

  for (std::size_t i = 0; i < ind->ctors.size(); ++i) {
    std::string xmark = fresh_internal();
    TermPtr marked = run(cic_instantiate(ind->ctors[i], cic_fvar(xmark, SortTag::Box)));
    Telescope mtel = split_telescope(marked);
    RewriteRule rule;
    rule.head = name;
    rule.label = name + "#" + std::to_string(i + 1);
    std::vector<TermPtr> fvars;
    for (std::size_t b = 0; b < fnames.size(); ++b)
      fvars.push_back(mk_fvar(fnames[b], binder_sort(branch_types[b])));
    std::vector<TermPtr> zvars;
    std::vector<std::pair<std::string, TermPtr>> zb;
    for (std::size_t j = 0; j < mtel.binders.size(); ++j) {
      std::string n = "z" + std::to_string(j + 1);
      zvars.push_back(mk_fvar(n, mtel.sorts[j]));
      Substitution s;
      for (std::size_t p = 0; p < j; ++p) s[mtel.binders[p].first] = zvars[p];
      s[xmark] = ind_sym;
      zb.emplace_back(n, subst(mtel.binders[j].second, s));
    }
    std::vector<TermPtr> idx_vars;
    for (std::size_t j = 0; j < nidx; ++j)
      idx_vars.push_back(mk_fvar(idx_names[j], binder_sort(binders[j].second)));
    rule.lhs_args = idx_vars;
    TermPtr ctor_sym = mk_sym("Constr_" + base + "_" + std::to_string(i + 1));
    rule.lhs_args.push_back(mk_app(ctor_sym, zvars));
    rule.lhs_args.insert(rule.lhs_args.end(), fvars.begin(), fvars.end());
    auto rec_call = [&](const std::vector<TermPtr>& q, const TermPtr& scrut) {
      std::vector<TermPtr> args = q;
      args.push_back(scrut);
      args.insert(args.end(), fvars.begin(), fvars.end());
      return mk_app(mk_sym(name, SortTag::Box), args);
    };
    rule.rhs = cac_delta_prime_rhs(marked, xmark, ind_sym, fvars[i], zvars, rec_call);
    for (auto& [n, ty] : zb) rule.rule_env.push(n, ty);
    for (std::size_t b = 0; b < fnames.size(); ++b)
      rule.rule_env.push(fnames[b], branch_types[b]);
    {
      Spine core = spine(mtel.core);
      Substitution s;
      for (std::size_t p = 0; p < mtel.binders.size(); ++p)
        s[mtel.binders[p].first] = zvars[p];
      for (std::size_t j = 0; j < nidx && j < core.args.size(); ++j)
        rule.rho[idx_names[j]] = subst(core.args[j], s);
    }
    out.rules.push_back(rule);
  }
  return name;
}

TermPtr Translator::run(const CicPtr& t) {
  switch (t->kind) {
    case CicKind::Sort: return mk_sort(t->sort);
    case CicKind::BVar: return mk_bvar(t->index);
    case CicKind::FVar: return mk_fvar(t->name, t->vsort);
    case CicKind::Abs: return mk_abs(t->name, run(t->a), run(t->b));
    case CicKind::Prod: return mk_prod(t->name, run(t->a), run(t->b));
    case CicKind::App: return mk_app(run(t->a), run(t->b));
    case CicKind::Ind: {
      std::string base = ind_name(t);
      emit_inductive(t, base);
      return mk_sym("Ind_" + base, SortTag::Box);
    }
    case CicKind::Constr: {
      if (t->a->kind != CicKind::Ind)
        cic_fail("E_CIC_TYPE", "translation of a constructor of a non-inductive term");
      std::string base = ind_name(t->a);
      emit_inductive(t->a, base);
      return mk_sym("Constr_" + base + "_" + std::to_string(t->index));
    }
    case CicKind::Elim: {
      if (t->a->kind != CicKind::Ind)
        cic_fail("E_CIC_TYPE", "translation of an elimination of a non-inductive term");
      std::string base = ind_name(t->a);
      emit_inductive(t->a, base);
      // Strong eliminations carry a motive of shape [x...][y](y...:U)*.
      bool strong = false;
      {
        CicPtr m = t->b;
        std::size_t abs_count = 0;
        while (m->kind == CicKind::Abs) {
          ++abs_count;
          m = m->b;
        }
        CicTelescope atel = cic_split(t->a->a);
        if (abs_count == atel.binders.size() + 1) {
          CicPtr core = m;
          while (core->kind == CicKind::Prod) core = core->b;
          if (core->kind == CicKind::Sort && core->sort == SortTag::Star) strong = true;
        }
      }
      if (strong) {
        std::string selim = emit_strong(t->a, t->b);
        std::vector<TermPtr> args;
        for (auto& i : t->indices) args.push_back(run(i));
        args.push_back(run(t->scrut));
        for (auto& b : t->branches) args.push_back(run(b));
        return mk_app(mk_sym(selim, SortTag::Box), args);
      }
      std::vector<TermPtr> args;
      args.push_back(run(t->b));
      for (auto& i : t->indices) args.push_back(run(i));
      args.push_back(run(t->scrut));
      for (auto& b : t->branches) args.push_back(run(b));
      return mk_app(mk_sym("WElim_" + base, SortTag::Star), args);
    }
  }
  cic_fail("E_CIC_TYPE", "unreachable translation case");
}

TranslationOutput translate(const CicPtr& t,
                            const std::vector<std::pair<CicPtr, std::string>>& names) {
  Translator tr;
  tr.names = names;
  tr.out.main = tr.run(t);
  return tr.out;
}

std::string render_cac_file(const TranslationOutput& out) {
  std::ostringstream os;
  for (auto& d : out.decls) {
    if (d.is_recursor)
      os << "recursor " << d.name << " for " << d.recursor_for << " : "
         << to_string(d.type) << ".\n";
    else
      os << "constant " << d.name << " : " << to_string(d.type) << ".\n";
  }
  for (auto& r : out.rules) {
    os << "rule " << to_string(r.lhs_term()) << " --> " << to_string(r.rhs) << " [env: ";
    bool first = true;
    for (auto& [x, ty] : r.rule_env.bindings) {
      if (!first) os << ", ";
      first = false;
      os << x << ":" << to_string(ty);
    }
    if (!r.rho.empty()) {
      os << " ; rho: ";
      first = true;
      for (auto& [x, img] : r.rho) {
        if (!first) os << ", ";
        first = false;
        os << x << " := " << to_string(img);
      }
    }
    os << "].\n";
  }
  if (out.main) os << "(* main: " << to_string(out.main) << " *)\n";
  return os.str();
}

}  // namespace cac
