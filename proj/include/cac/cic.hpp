/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cac/diagnostics.hpp"
#include "cac/rewriting.hpp"
#include "cac/signature.hpp"
#include "cac/term.hpp"

namespace cac {

enum class CicKind { Sort, BVar, FVar, Abs, App, Prod, Ind, Constr, Elim };

class CicTerm;
using CicPtr = std::shared_ptr<const CicTerm>;

// CIC- term tree: the CAC formers plus inductive types Ind(X:A){C...},
// constructors Constr(i,I) and eliminations Elim(I,Q,a...,c){f...}.
// Binding is de Bruijn as in Term; in Ind the bound X is BVar(0) of each
// constructor type, and the arity is closed with respect to X.
class CicTerm {
public:
  CicKind kind;
  SortTag sort = SortTag::Star;  // Sort
  int index = 0;                 // BVar; Constr: 1-based constructor index
  std::string name;              // FVar name; Abs/Prod/Ind binder hint
  SortTag vsort = SortTag::Star;
  CicPtr a, b;                   // Abs/Prod: annot/body; App: fun/arg; Constr: a = I
  std::vector<CicPtr> ctors;     // Ind: constructor types (X bound)
  // Elim: a = I, b = Q (motive)
  std::vector<CicPtr> indices;   // Elim index arguments
  CicPtr scrut;                  // Elim scrutinee
  std::vector<CicPtr> branches;  // Elim branches

  explicit CicTerm(CicKind k) : kind(k) {}
};

CicPtr cic_sort(SortTag s);
CicPtr cic_star();
CicPtr cic_box();
CicPtr cic_bvar(int i);
CicPtr cic_fvar(const std::string& n, SortTag s = SortTag::Star);
CicPtr cic_abs(const std::string& hint, const CicPtr& annot, const CicPtr& body);
CicPtr cic_prod(const std::string& hint, const CicPtr& dom, const CicPtr& cod);
CicPtr cic_arrow(const CicPtr& dom, const CicPtr& cod);
CicPtr cic_app(const CicPtr& f, const CicPtr& a);
CicPtr cic_app(const CicPtr& f, const std::vector<CicPtr>& args);
CicPtr cic_ind(const std::string& hint, const CicPtr& arity, std::vector<CicPtr> ctors);
CicPtr cic_constr(int i, const CicPtr& ind);
CicPtr cic_elim(const CicPtr& ind, const CicPtr& motive, std::vector<CicPtr> indices,
                const CicPtr& scrut, std::vector<CicPtr> branches);

bool cic_alpha_eq(const CicPtr& a, const CicPtr& b);
CicPtr cic_instantiate(const CicPtr& body, const CicPtr& arg);
CicPtr cic_abstract(const CicPtr& t, const std::string& x);
CicPtr cic_subst1(const CicPtr& t, const std::string& x, const CicPtr& u);
std::set<std::string> cic_free_vars(const CicPtr& t);
std::string cic_to_string(const CicPtr& t);

struct CicEnv {
  std::vector<std::pair<std::string, CicPtr>> bindings;
  const CicPtr* lookup(const std::string& x) const;
  void push(const std::string& x, const CicPtr& t) { bindings.emplace_back(x, t); }
};

// One leftmost-outermost iota'-contraction; nullopt when no Elim redex exists.
std::optional<CicPtr> iota_prime_step(const CicPtr& t);
// One leftmost-outermost beta or iota' step.
std::optional<CicPtr> cic_step(const CicPtr& t);
CicPtr cic_normalize(const CicPtr& t, FuelBudget& fuel);
// All one-step beta/iota' reducts (used by simulation testing).
std::vector<CicPtr> cic_all_reducts(const CicPtr& t);

// Branch type for star-elimination: Delta{I,X,C,Q,c}.
CicPtr delta_type(const CicPtr& ind, const CicPtr& ctor_type, const CicPtr& motive,
                  const CicPtr& c);
// Branch type for box-elimination: Delta'{I,X,C,xy,K,c}. `idx_names`/`y_name`
// are the variables of K bound by the motive.
CicPtr delta_prime_type(const CicPtr& ind, const CicPtr& ctor_type,
                        const std::vector<std::string>& idx_names,
                        const std::string& y_name, const CicPtr& k_body, const CicPtr& c);

// Typechecker for CIC-. Throws type_error on failure.
CicPtr cic_check(const CicEnv& env, const CicPtr& t, FuelBudget& fuel);

// Closes inductive subterms that depend on enclosing binders so that the
// (Ind) rule's empty-environment premise can apply.
CicPtr close_inductives(const CicPtr& t);

struct TranslationOutput {
  struct Decl {
    std::string name;
    TermPtr type;
    bool is_recursor = false;
    std::string recursor_for;
  };
  std::vector<Decl> decls;
  std::vector<RewriteRule> rules;
  TermPtr main;
};

// Translate a well-typed CIC- term into CAC: emits Ind_I, Constr_I_i,
// WElim_I and SElim_I_k symbols with their rules, and maps the term itself
// homomorphically. `names` optionally assigns readable names to inductives.
TranslationOutput translate(const CicPtr& t,
                            const std::vector<std::pair<CicPtr, std::string>>& names = {});

// Translate a single term against an already-populated output (shared
// emission state); exposed for simulation tests.
struct Translator {
  TranslationOutput out;
  std::vector<std::pair<CicPtr, std::string>> names;
  TermPtr run(const CicPtr& t);
  std::string ind_name(const CicPtr& ind);

private:
  std::map<std::string, std::string> selim_by_key;
  int anon_counter = 0;
  void emit_inductive(const CicPtr& ind, const std::string& base);
  std::string emit_strong(const CicPtr& ind, const CicPtr& motive);
};

// Renders a translation as a .cac source file accepted by cmd_check.
std::string render_cac_file(const TranslationOutput& out);

}  // namespace cac
