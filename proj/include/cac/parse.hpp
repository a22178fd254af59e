/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cac/cic.hpp"
#include "cac/term.hpp"

namespace cac {

struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

using Binders = std::vector<std::pair<std::string, TermPtr>>;

struct SurfaceSymbol {
  std::string name;
  TermPtr type;
  bool constant = false;
  int line = 0;
};

struct SurfaceRule {
  std::string head;
  std::vector<TermPtr> lhs_args;
  TermPtr rhs;
  Binders env;
  Binders rho;  // x := t entries, in order
  std::string label;
  int line = 0;
};

struct SurfaceInductive {
  std::string name;
  Binders params, indices;
  std::vector<std::pair<std::string, TermPtr>> ctors;  // name, full closed type
  int line = 0;
};

struct SurfaceMonotone {
  std::string name;
  std::set<int> plus, minus;
  int line = 0;
};

struct SurfaceRecursor {  // user-declared recursor with explicit type
  std::string name;
  std::string target;
  TermPtr type;
  int line = 0;
};

struct SurfaceStrongRecursor {  // generation request
  std::string name;
  std::string target;
  TermPtr motive;
  int line = 0;
};

using SurfaceDecl = std::variant<SurfaceSymbol, SurfaceRule, SurfaceInductive,
                                 SurfaceMonotone, SurfaceRecursor, SurfaceStrongRecursor>;

struct SourceFile {
  std::string path;
  std::vector<SurfaceDecl> decls;
};

// Parses the `cac` dialect. Throws parse_error.
SourceFile parse_cac_file(const std::string& text, const std::string& path = "<input>");

// Parses a single term against the sorts recorded in `symbol_sorts`.
// Identifiers that are not symbols become free variables of object sort
// unless overridden by `var_sorts`.
TermPtr parse_term_text(const std::string& text,
                        const std::map<std::string, SortTag>& symbol_sorts,
                        const std::map<std::string, SortTag>& var_sorts = {});

struct CicSourceFile {
  std::string path;
  std::vector<std::pair<std::string, CicPtr>> lets;  // in order, fully inlined
  CicPtr main;  // may be null
};

// Parses the `cicminus` dialect.
CicSourceFile parse_cic_file(const std::string& text, const std::string& path = "<input>");

}  // namespace cac
