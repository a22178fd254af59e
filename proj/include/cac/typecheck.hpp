/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <optional>
#include <set>
#include <string>

#include "cac/parse.hpp"
#include "cac/signature.hpp"

namespace cac {

// Optional restriction of the (symb) rule to a set of visible symbols,
// implementing the staged relations where only symbols below a bound are
// usable.
struct Visibility {
  std::set<std::string> allowed;
  bool visible(const std::string& f) const { return allowed.count(f) != 0; }
};

// Type inference per the kernel typing rules. Throws type_error on failure
// and fuel_error when conversion runs out of budget.
TermPtr infer(const Environment& env, const TermPtr& t, const Signature& sig,
              FuelBudget& fuel, const Visibility* vis = nullptr);

void check(const Environment& env, const TermPtr& t, const TermPtr& type,
           const Signature& sig, FuelBudget& fuel, const Visibility* vis = nullptr);

// Checks that an environment is well-formed: distinct names, each type
// well-sorted under its prefix. Returns the resolved variable sorts.
std::map<std::string, SortTag> check_environment(const Environment& env,
                                                 const Signature& sig, FuelBudget& fuel);

struct PrecedenceInput {
  // symbol -> symbols occurring in its type (strict constraints)
  std::map<std::string, std::set<std::string>> type_occurrences;
  // rule head -> symbols occurring in rule right-hand sides (weak constraints)
  std::map<std::string, std::set<std::string>> rhs_occurrences;
  // pairs forced into the same class (inductive-recursive coupling)
  std::vector<std::pair<std::string, std::string>> same_class;
  std::vector<std::string> declaration_order;
};

// Builds the smallest adequate quasi-order; reports a cycle when a strict
// constraint lands inside an equivalence class.
std::optional<Precedence> infer_precedence(const PrecedenceInput& in,
                                           DiagnosticList& diags);

// Per-rule format and well-typedness checks: algebraic lhs, closed variable
// flow, rho soundness, rhs typing against the instantiated head type, and
// the conservative matchability condition.
void check_rule(const RewriteRule& rule, Signature& sig, FuelBudget& fuel,
                bool assume_valid_rules);

struct ElaborateOptions {
  long long fuel = 1000000;
  bool assume_valid_rules = false;
  std::set<std::string> trusted_recursors;
};

// Runs the full gate pipeline over a parsed source file and produces an
// immutable signature whose gate_report lists every violation found.
Signature elaborate_signature(const SourceFile& src, const ElaborateOptions& opts = {});

}  // namespace cac
