/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <set>
#include <string>

#include "cac/signature.hpp"
#include "cac/term.hpp"

namespace cac {

enum class Polarity { Plus, Minus };

inline Polarity operator*(Polarity a, Polarity b) {
  return a == b ? Polarity::Plus : Polarity::Minus;
}

// Signed position sets for a term under a starting polarity. Monotone and
// anti-monotone argument declarations of predicate symbols extend the signed
// sets through applied arguments; everything else under an application spine
// stays unsigned.
std::map<Polarity, std::set<Position>> signed_positions(const TermPtr& t, Polarity delta,
                                                        const Signature& sig);

// Positions strictly inside maximal subterms classified as objects; such
// occurrences are irrelevant to the interpretation and are exempt from the
// monotonicity-style checks.
std::set<Position> object_interior_positions(const TermPtr& t);

// Occurrences of the symbol or variable `name` in `t` that do not carry the
// required sign. With exempt_objects, occurrences inside object subterms are
// acceptable at any sign.
std::vector<Position> occurrences_violating(const std::string& name, const TermPtr& t,
                                            Polarity required, const Signature& sig,
                                            bool exempt_objects);

struct AccessReport {
  std::set<int> acc;  // 1-based accessible indices
  // inaccessible index -> (offending symbol, position within the argument type)
  std::map<int, std::pair<std::string, Position>> offenders;
};

// Accessible arguments of a constructor-shaped symbol: those argument types
// in which every type equivalent to C occurs only positively.
AccessReport accessible_args(const SymbolDecl& c, const std::string& C, Signature& sig,
                             FuelBudget& fuel);

// Condition I6 for intro-class types: every predicate variable occurring in
// a constructor argument type must reappear verbatim among the output-type
// arguments.
void check_i6(const std::string& C, Signature& sig);

// Safeness of a rule: variables at all predicate argument positions of the
// rho-normalized lhs, pairwise distinct.
void check_safe(const RewriteRule& rule, Signature& sig, DiagnosticList& diags);

// Smallness of constructor types relative to a parameter prefix.
void check_small(const std::string& C, int param_count, Signature& sig,
                 DiagnosticList& diags);

struct FirstOrderReport {
  bool first_order = false;
  std::string reason;
};

FirstOrderReport is_first_order_data_type(const std::string& C, Signature& sig);

// Validates declared monotone/anti-monotone argument sets against the rules
// of the defined predicate symbols that carry them.
void check_mon_declarations(Signature& sig);

}  // namespace cac
