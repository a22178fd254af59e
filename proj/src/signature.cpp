/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/signature.hpp"

namespace cac {

bool Precedence::equiv(const std::string& f, const std::string& g) const {
  auto a = cls.find(f), b = cls.find(g);
  if (a == cls.end() || b == cls.end()) return false;
  return a->second == b->second;
}

bool Precedence::lt(const std::string& f, const std::string& g) const {
  auto a = cls.find(f), b = cls.find(g);
  if (a == cls.end() || b == cls.end()) return false;
  if (a->second == b->second) return false;
  return reach[a->second][b->second];
}

bool Precedence::leq(const std::string& f, const std::string& g) const {
  return equiv(f, g) || lt(f, g);
}

const SymbolDecl* Signature::find(const std::string& name) const {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &decls[it->second];
}

SymbolDecl* Signature::find_mut(const std::string& name) {
  auto it = by_name.find(name);
  return it == by_name.end() ? nullptr : &decls[it->second];
}

bool Signature::is_defined(const std::string& name) const {
  auto it = rules_by_head.find(name);
  return it != rules_by_head.end() && !it->second.empty();
}

std::vector<const RewriteRule*> Signature::rules_of(const std::string& head) const {
  std::vector<const RewriteRule*> out;
  auto it = rules_by_head.find(head);
  if (it != rules_by_head.end())
    for (auto i : it->second) out.push_back(&rules[i]);
  return out;
}

std::vector<const SymbolDecl*> Signature::equivalents(const std::string& f) const {
  std::vector<const SymbolDecl*> out;
  for (auto& d : decls)
    if (d.name == f || prec.equiv(d.name, f)) out.push_back(&d);
  return out;
}

void Signature::add_decl(SymbolDecl d) {
  by_name[d.name] = decls.size();
  decls.push_back(std::move(d));
}

void Signature::add_rule(RewriteRule r) {
  rules_by_head[r.head].push_back(rules.size());
  rules.push_back(std::move(r));
}

bool is_neutral(const TermPtr& t, const Signature& sig) {
  if (t->kind == TermKind::Abs) return false;
  Spine s = spine(t);
  if (s.head->kind != TermKind::Sym) return true;
  const SymbolDecl* f = sig.find(s.head->name);
  if (!f) return true;
  // Partial application of a defined symbol.
  for (const RewriteRule* r : sig.rules_of(f->name))
    if (r->lhs_args.size() > s.args.size()) return false;
  // Fully applied constructor form.
  if (f->constructor) {
    Telescope tel = split_telescope(f->type);
    if (s.args.size() == tel.binders.size()) {
      const SymbolDecl* c = sig.find(f->output_head);
      bool elim = c && c->interp == InterpClass::Elim;
      if (!elim || !f->defined) return false;
    }
  }
  return true;
}

}  // namespace cac
