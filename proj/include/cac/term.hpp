/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cac {

enum class SortTag { Star, Box };

enum class TermKind { Sort, BVar, FVar, Sym, Abs, App, Prod };

// Syntactic classification of raw terms: objects, predicates, kinds, the
// sorts themselves, or none of these.
enum class TermClass { Object, Predicate, Kind, Sort, IllFormed };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Immutable term tree. Bound variables are de Bruijn indices (BVar), free
// variables are named (FVar), so structural equality modulo binder name
// hints is exactly alpha-equivalence. Every exposed term is locally closed;
// substitution of free variables can therefore never capture.
class Term {
public:
  TermKind kind;
  SortTag sort = SortTag::Star;   // Sort nodes
  int index = 0;                  // BVar nodes
  std::string name;               // FVar/Sym: name; Abs/Prod: binder hint
  SortTag vsort = SortTag::Star;  // FVar: variable sort; Sym: symbol sort
  TermPtr left, right;            // Abs: annot/body; App: fun/arg; Prod: dom/cod

  explicit Term(TermKind k) : kind(k) {}
};

// A Dewey position: sequence over {1,2}. Children are numbered
// 1 = annotation/domain/function, 2 = body/codomain/argument.
using Position = std::vector<int>;

std::string position_to_string(const Position& p);

// Finite map from free-variable names to terms; dom = keys.
using Substitution = std::map<std::string, TermPtr>;

// Ordered typing environment.
struct Environment {
  std::vector<std::pair<std::string, TermPtr>> bindings;

  const TermPtr* lookup(const std::string& x) const;
  bool contains(const std::string& x) const { return lookup(x) != nullptr; }
  void push(const std::string& x, const TermPtr& t) { bindings.emplace_back(x, t); }
  std::size_t size() const { return bindings.size(); }
};

// Constructors.
TermPtr mk_sort(SortTag s);
TermPtr star();
TermPtr box();
TermPtr mk_bvar(int index);
TermPtr mk_fvar(const std::string& name, SortTag vsort = SortTag::Star);
TermPtr mk_sym(const std::string& name, SortTag vsort = SortTag::Star);
// `annot`/`dom` and the body/codomain with BVar(0) for the bound variable.
TermPtr mk_abs(const std::string& hint, const TermPtr& annot, const TermPtr& body);
TermPtr mk_prod(const std::string& hint, const TermPtr& dom, const TermPtr& cod);
TermPtr mk_arrow(const TermPtr& dom, const TermPtr& cod);  // non-dependent product
TermPtr mk_app(const TermPtr& f, const TermPtr& a);
TermPtr mk_app(const TermPtr& f, const std::vector<TermPtr>& args);

bool is_sort(const TermPtr& t, SortTag s);

// Alpha-equivalence: structural equality ignoring binder name hints and
// variable-sort metadata.
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Replace BVar(0) of a binder body by a locally closed term.
TermPtr instantiate(const TermPtr& body, const TermPtr& arg);
// Inverse: turn free occurrences of x into BVar(0) of a new binder body.
TermPtr abstract_fvar(const TermPtr& t, const std::string& x);

// Capture-avoiding substitution of free variables.
TermPtr subst(const TermPtr& t, const Substitution& theta);
TermPtr subst1(const TermPtr& t, const std::string& x, const TermPtr& u);

std::set<std::string> free_vars(const TermPtr& t);
// Free variables together with their sorts.
std::map<std::string, SortTag> free_vars_sorted(const TermPtr& t);
bool occurs_free(const std::string& x, const TermPtr& t);
// Names of all symbols occurring in t.
std::set<std::string> symbols_of(const TermPtr& t);

std::set<Position> all_positions(const TermPtr& t);
// Positions of free occurrences of the variable or symbol named x.
std::set<Position> positions_of(const std::string& x, const TermPtr& t);
// Subterm access; the result may contain dangling bound variables.
TermPtr subterm_at(const TermPtr& t, const Position& p);
TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& u);

// Sort of a variable bound with the given annotation: Box when the
// annotation is a kind (or a sort), Star otherwise.
SortTag binder_sort(const TermPtr& annot);

TermClass classify(const TermPtr& t);
const char* term_class_name(TermClass c);

// Application spine: t = head a1 ... an with head not an application.
struct Spine {
  TermPtr head;
  std::vector<TermPtr> args;
};
Spine spine(const TermPtr& t);

// Telescope view: t = (x1:T1)...(xn:Tn)core, binders opened as fresh FVars.
struct Telescope {
  std::vector<std::pair<std::string, TermPtr>> binders;  // opened name, type
  std::vector<SortTag> sorts;                            // binder variable sorts
  std::vector<std::string> hints;                        // original binder hints
  TermPtr core;
};
Telescope split_telescope(const TermPtr& t, int max_binders = -1);
// Rebuild (x1:T1)...(xn:Tn)core, re-abstracting the opened names.
TermPtr build_telescope(const Telescope& tel);
TermPtr build_telescope(const std::vector<std::pair<std::string, TermPtr>>& binders,
                        const TermPtr& core);
// Rebuild [x1:T1]...[xn:Tn]core as nested abstractions.
TermPtr build_abstractions(const std::vector<std::pair<std::string, TermPtr>>& binders,
                           const TermPtr& core);

// Fresh name machinery. fresh_internal returns reserved names ("#n") that
// the parser cannot produce; fresh_named derives a readable variant of the
// hint avoiding the given set.
std::string fresh_internal();
std::string fresh_named(const std::string& hint, const std::set<std::string>& avoid);

// Pretty printing; regenerates readable binder names.
std::string to_string(const TermPtr& t);

}  // namespace cac
