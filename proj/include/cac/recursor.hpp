/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cac/positivity.hpp"
#include "cac/signature.hpp"

namespace cac {

// View of a constructor type: q-prefix handling is the caller's concern;
// binders are the full telescope and out_args the output-type arguments.
struct CtorView {
  std::string name;
  Telescope tel;
  std::vector<TermPtr> out_args;
};

std::optional<CtorView> ctor_view(const std::string& name, const std::string& C,
                                  const Signature& sig);

// Longest parameter prefix: C : (q:Q...)(z:V...)* such that every listed
// constructor repeats the prefix verbatim, including inside recursive
// argument types.
int infer_parameters(const std::string& C, const std::vector<std::string>& ctors,
                     const Signature& sig);

void check_strictly_positive(const std::string& C, const std::vector<std::string>& ctors,
                             Signature& sig, DiagnosticList& diags);

struct GeneratedRecursor {
  SymbolDecl decl;
  std::vector<RewriteRule> rules;
};

GeneratedRecursor gen_weak_recursor(const std::string& C,
                                    const std::vector<std::string>& ctors,
                                    const Signature& sig, const std::string& rec_name,
                                    int params, RecursorStyle style);

// Strong recursor for motive [z:V...][z:C q z...]Q; free variables of the
// motive name the parameter prefix. Smallness and safeness gates must pass
// before the result is admitted. params < 0 means: infer the prefix.
std::optional<GeneratedRecursor> gen_strong_recursor(
    const std::string& C, const std::vector<std::string>& ctors, const TermPtr& motive,
    Signature& sig, const std::string& rec_name, DiagnosticList& diags, int params = -1);

// Decomposition of a pre-recursor type into indices, scrutinee, and the rest,
// possibly after a dependency-respecting argument permutation.
struct PreRecursorView {
  std::vector<int> index_slots;  // slots holding C's arguments, in C order
  int scrutinee_slot = -1;
  std::vector<int> rest_slots;   // remaining slots in original order
  Telescope tel;                 // telescope of tau_f
  TermPtr w;                     // (rest...)core with index/scrutinee vars free
  std::vector<std::string> index_names;
  std::string scrutinee_name;
};

std::optional<PreRecursorView> check_pre_recursor(const SymbolDecl& f, const std::string& C,
                                                  Signature& sig, DiagnosticList& diags);

void check_recursor_positivity(const SymbolDecl& f, const std::string& C,
                               const PreRecursorView& view, Signature& sig,
                               FuelBudget& fuel, DiagnosticList& diags);

// Conservative termination gate for defined non-recursor symbols and strong
// recursors: every call to an equivalent symbol must take some argument that
// is a strict subterm of the corresponding lhs argument, reached only through
// accessible constructor positions.
void structural_decrease_check(const RewriteRule& rule, Signature& sig,
                               DiagnosticList& diags);

// Whether a user-declared recursor is alpha-equal, modulo a dependency-
// respecting argument permutation, to generator output for some parameter
// prefix and branch style. On success fills decl.recursor metadata.
bool matches_canonical_recursor(SymbolDecl& f, const std::string& C,
                                const PreRecursorView& view,
                                const std::vector<RewriteRule>& rules_of_f,
                                const std::vector<std::string>& ctors, Signature& sig);

}  // namespace cac
