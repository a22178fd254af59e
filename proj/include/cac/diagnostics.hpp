/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cac {

enum class Severity { Error, Warning, Info };

// One gate result. `code` is a stable machine identifier, `pointer` names
// the kernel condition that failed (see pointer_module()).
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string symbol;   // offending symbol, if any
  std::string rule;     // offending rule label, if any
  std::string position; // offending position, if any
  std::string pointer;  // condition identifier
  std::string message;
};

// Maps a condition identifier to the module that implements the check.
// Returns nullptr for unknown identifiers.
const char* pointer_module(const std::string& pointer);

struct DiagnosticList {
  std::vector<Diagnostic> items;

  void add(Diagnostic d) { items.push_back(std::move(d)); }
  bool has_errors() const {
    for (auto& d : items)
      if (d.severity == Severity::Error) return true;
    return false;
  }
  bool has_code(const std::string& code) const {
    for (auto& d : items)
      if (d.code == code) return true;
    return false;
  }
};

// Thrown when a reduction fuel budget runs out.
struct fuel_error : std::runtime_error {
  long long steps_used;
  explicit fuel_error(long long steps)
      : std::runtime_error("fuel exhausted after " + std::to_string(steps) + " steps"),
        steps_used(steps) {}
};

// Thrown by the typechecker; converted into diagnostics at gate boundaries.
struct type_error : std::runtime_error {
  Diagnostic diag;
  explicit type_error(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

inline Diagnostic make_diag(Severity sev, std::string code, std::string pointer,
                            std::string message, std::string symbol = "",
                            std::string rule = "", std::string position = "") {
  Diagnostic d;
  d.severity = sev;
  d.code = std::move(code);
  d.pointer = std::move(pointer);
  d.message = std::move(message);
  d.symbol = std::move(symbol);
  d.rule = std::move(rule);
  d.position = std::move(position);
  return d;
}

}  // namespace cac
