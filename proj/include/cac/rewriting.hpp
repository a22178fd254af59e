/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cac/diagnostics.hpp"
#include "cac/term.hpp"

namespace cac {

struct Signature;

// A rewrite rule f l1 ... ln --> r together with its typing environment and
// its normalizing substitution rho. lhs arguments are algebraic: variables
// and symbol-headed applications only.
struct RewriteRule {
  std::string head;
  std::vector<TermPtr> lhs_args;
  TermPtr rhs;
  Environment rule_env;
  Substitution rho;
  // Predicate variables of rhs -> 0-based lhs argument index with l_i = x.
  std::map<std::string, int> kappa;
  std::string label;

  TermPtr lhs_term() const;
};

// Per-call reduction budget; each beta or rule step consumes one unit.
struct FuelBudget {
  long long remaining;
  long long used = 0;

  explicit FuelBudget(long long max_steps = 1000000) : remaining(max_steps) {}
  void take() {
    if (remaining <= 0) throw fuel_error(used);
    --remaining;
    ++used;
  }
};

// Syntactic first-order matching of an algebraic pattern against a term.
// Non-linear pattern variables require alpha-equal arguments.
std::optional<Substitution> match_lhs(const TermPtr& lhs, const TermPtr& t);

struct StepInfo {
  TermPtr result;
  Position pos;
  std::string rule;  // rule label, or "beta"
};

// One leftmost-outermost beta or rewrite step; nullopt iff t is in normal form.
std::optional<StepInfo> step(const TermPtr& t, const Signature& sig);

struct NormalizeResult {
  TermPtr term;
  long long steps = 0;
  std::vector<StepInfo> trace;  // filled only when trace requested
};

NormalizeResult normalize(const TermPtr& t, const Signature& sig, FuelBudget& fuel,
                          bool keep_trace = false);

bool convertible(const TermPtr& t, const TermPtr& u, const Signature& sig,
                 FuelBudget& fuel);

struct CriticalPair {
  std::size_t rule1 = 0;  // indices into the rule list
  std::size_t rule2 = 0;
  Position position;      // non-variable position of rule1's lhs
  Substitution unifier;
  TermPtr peak;
  TermPtr reduct_inner;   // contract rule2 inside the peak
  TermPtr reduct_root;    // contract rule1 at the root
  bool joinable = false;  // alpha-equal one-step reducts
};

std::vector<CriticalPair> critical_pairs(const std::vector<RewriteRule>& rules);

// First-order unification of algebraic terms; the unifier is idempotent.
std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b);

}  // namespace cac
