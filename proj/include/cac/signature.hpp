/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cac/diagnostics.hpp"
#include "cac/rewriting.hpp"
#include "cac/term.hpp"

namespace cac {

// Inferred symbol precedence: the smallest quasi-order satisfying the
// occurrence constraints. Symbols in the same strongly connected component
// of the constraint graph are equivalent; the strict part is the quotient
// reachability.
struct Precedence {
  std::map<std::string, int> cls;              // symbol -> class id
  std::vector<std::vector<bool>> reach;        // class reachability (lower -> higher)
  std::vector<std::vector<std::string>> members;

  bool known(const std::string& f) const { return cls.count(f) != 0; }
  bool equiv(const std::string& f, const std::string& g) const;
  bool lt(const std::string& f, const std::string& g) const;   // strictly smaller
  bool leq(const std::string& f, const std::string& g) const;
  // Class ids in a valid elaboration order (smaller classes first).
  std::vector<int> order;
};

enum class InterpClass { Intro, Elim };

// How a recursor's branch telescopes are laid out: Appended keeps every
// constructor argument and appends the induction-hypothesis telescope;
// Interleaved inserts each hypothesis right after its recursive argument
// and keeps nothing for non-recursive ones.
enum class RecursorStyle { Appended, Interleaved };

struct RecursorInfo {
  std::string target;          // the type C this symbol eliminates
  bool strong = false;
  bool generated = false;      // produced by the generator in this elaboration
  bool trusted = false;        // admitted through the trusted-recursor escape
  int params = 0;              // parameter-prefix length used for matching
  RecursorStyle style = RecursorStyle::Appended;
  std::vector<int> perm;       // candidate slot -> canonical slot
};

struct SymbolDecl {
  std::string name;
  TermPtr type;                    // tau_f, closed
  SortTag sort = SortTag::Star;    // s_f
  bool declared_constant = false;  // `constant` keyword
  bool defined = false;            // has at least one rule
  bool constructor = false;        // type of the form (y:U...)C v... with C constant predicate
  std::string output_head;         // C above, when constructor
  InterpClass interp = InterpClass::Intro;
  std::set<int> mon_plus, mon_minus;  // 1-based argument indices
  std::set<int> acc;                  // 1-based accessible argument indices
  std::optional<RecursorInfo> recursor;
};

struct Signature {
  std::vector<SymbolDecl> decls;
  std::map<std::string, std::size_t> by_name;
  std::vector<RewriteRule> rules;
  std::map<std::string, std::vector<std::size_t>> rules_by_head;
  Precedence prec;
  DiagnosticList gate_report;
  long long default_fuel = 1000000;

  const SymbolDecl* find(const std::string& name) const;
  SymbolDecl* find_mut(const std::string& name);
  bool is_defined(const std::string& name) const;
  std::vector<const RewriteRule*> rules_of(const std::string& head) const;
  // All declared symbols equivalent to f (including f itself).
  std::vector<const SymbolDecl*> equivalents(const std::string& f) const;
  bool ok() const { return !gate_report.has_errors(); }

  void add_decl(SymbolDecl d);
  void add_rule(RewriteRule r);
};

// Neutral terms: everything except abstractions, partial applications of
// defined symbols, and fully applied constructor forms (where the head must
// be constant if the target type is elim-class).
bool is_neutral(const TermPtr& t, const Signature& sig);

}  // namespace cac
