/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "cac/cli.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cac/cic.hpp"
#include "cac/parse.hpp"

namespace cac {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "?";
}

void print_report(const Signature& sig, const CliOptions& opts, std::ostream& out) {
  if (opts.json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& d : sig.gate_report.items) {
      nlohmann::ordered_json j;
      j["code"] = d.code;
      j["severity"] = severity_name(d.severity);
      j["symbol"] = d.symbol;
      j["rule"] = d.rule;
      j["position"] = d.position;
      j["paper_pointer"] = d.pointer;
      j["message"] = d.message;
      arr.push_back(j);
    }
    out << arr.dump(2) << "\n";
    return;
  }
  std::set<std::string> bad_symbols, bad_rules;
  for (auto& d : sig.gate_report.items) {
    if (d.severity != Severity::Error) continue;
    if (!d.rule.empty()) bad_rules.insert(d.rule);
    else if (!d.symbol.empty()) bad_symbols.insert(d.symbol);
  }
  for (auto& d : sig.decls)
    out << "symbol " << d.name << ": " << (bad_symbols.count(d.name) ? "FAIL" : "ok")
        << "\n";
  for (auto& r : sig.rules)
    out << "rule " << r.label << ": " << (bad_rules.count(r.label) ? "FAIL" : "ok") << "\n";
  for (auto& d : sig.gate_report.items) {
    out << severity_name(d.severity) << "[" << d.code << "]";
    if (!d.symbol.empty()) out << " " << d.symbol;
    if (!d.rule.empty()) out << " (" << d.rule << ")";
    out << ": " << d.message << " [" << d.pointer << "]\n";
  }
  int errors = 0;
  for (auto& d : sig.gate_report.items)
    if (d.severity == Severity::Error) ++errors;
  out << (errors == 0 ? "accepted" : "rejected") << " (" << errors << " errors)\n";
}

}  // namespace

Signature elaborate_file(const SourceFile& src, const CliOptions& opts) {
  ElaborateOptions eo;
  eo.fuel = opts.fuel;
  eo.assume_valid_rules = opts.assume_valid_rules;
  eo.trusted_recursors = opts.trusted_recursors;
  return elaborate_signature(src, eo);
}

int exit_code_for(const Signature& sig) {
  bool fuel = false, errors = false;
  for (auto& d : sig.gate_report.items) {
    if (d.severity != Severity::Error) continue;
    errors = true;
    if (d.code == "E_FUEL") fuel = true;
  }
  if (fuel) return ExitStatus::Fuel;
  if (errors) return ExitStatus::Rejected;
  return ExitStatus::Accepted;
}

int cmd_check(const std::string& path, const CliOptions& opts, std::ostream& out) {
  SourceFile src;
  try {
    src = parse_cac_file(read_file(path), path);
  } catch (const parse_error& e) {
    out << "parse error: " << e.what() << "\n";
    return ExitStatus::Usage;
  }
  Signature sig = elaborate_file(src, opts);
  print_report(sig, opts, out);
  return exit_code_for(sig);
}

int cmd_translate(const std::string& path, const CliOptions& opts, std::ostream& out) {
  CicSourceFile src;
  try {
    src = parse_cic_file(read_file(path), path);
  } catch (const parse_error& e) {
    out << "parse error: " << e.what() << "\n";
    return ExitStatus::Usage;
  }
  Translator tr;
  try {
    CicEnv empty;
    for (auto& [name, term] : src.lets) {
      CicPtr closed = close_inductives(term);
      FuelBudget fuel(opts.fuel);
      cic_check(empty, closed, fuel);
      if (closed->kind == CicKind::Ind) tr.names.emplace_back(closed, name);
    }
    for (auto& [name, term] : src.lets) tr.run(close_inductives(term));
    if (src.main) {
      CicPtr closed = close_inductives(src.main);
      FuelBudget fuel(opts.fuel);
      cic_check(empty, closed, fuel);
      tr.out.main = tr.run(closed);
    }
  } catch (const type_error& e) {
    out << "error[" << e.diag.code << "]: " << e.diag.message << "\n";
    return ExitStatus::Rejected;
  } catch (const fuel_error& e) {
    out << "error[E_FUEL]: " << e.what() << "\n";
    return ExitStatus::Fuel;
  }
  std::string text = render_cac_file(tr.out);
  if (opts.out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(opts.out_path, std::ios::binary);
    if (!f) {
      out << "cannot write " << opts.out_path << "\n";
      return ExitStatus::Usage;
    }
    f << text;
  }
  return ExitStatus::Accepted;
}

int cmd_normalize(const std::string& path, const std::string& term_text,
                  const CliOptions& opts, std::ostream& out) {
  SourceFile src;
  try {
    src = parse_cac_file(read_file(path), path);
  } catch (const parse_error& e) {
    out << "parse error: " << e.what() << "\n";
    return ExitStatus::Usage;
  }
  Signature sig = elaborate_file(src, opts);
  if (exit_code_for(sig) != ExitStatus::Accepted) {
    print_report(sig, opts, out);
    return exit_code_for(sig);
  }

  std::map<std::string, SortTag> symbol_sorts;
  for (auto& d : sig.decls) symbol_sorts[d.name] = d.sort;

  Environment env;
  std::map<std::string, SortTag> var_sorts;
  try {
    if (!opts.env_text.empty()) {
      // "x:T, y:U": split on top-level commas.
      std::vector<std::pair<std::string, std::string>> entries;
      int depth = 0;
      std::string cur;
      auto flush = [&]() {
        auto colon = cur.find(':');
        if (colon == std::string::npos) throw parse_error(0, "bad --env entry: " + cur);
        std::string name = cur.substr(0, colon);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        entries.emplace_back(name, cur.substr(colon + 1));
        cur.clear();
      };
      for (char c : opts.env_text) {
        if (c == '(' || c == '[') depth++;
        if (c == ')' || c == ']') depth--;
        if (c == ',' && depth == 0) { flush(); continue; }
        cur += c;
      }
      if (!cur.empty()) flush();
      for (auto& [name, ty_text] : entries) {
        TermPtr ty = parse_term_text(ty_text, symbol_sorts, var_sorts);
        env.push(name, ty);
        var_sorts[name] = binder_sort(ty);
      }
    }
    TermPtr t = parse_term_text(term_text, symbol_sorts, var_sorts);
    FuelBudget fuel(opts.fuel);
    infer(env, t, sig, fuel);
    NormalizeResult res = normalize(t, sig, fuel, opts.trace);
    if (opts.trace)
      for (auto& s : res.trace)
        out << "step " << s.rule << " at " << position_to_string(s.pos) << "\n";
    out << to_string(res.term) << "\n";
    return ExitStatus::Accepted;
  } catch (const parse_error& e) {
    out << "parse error: " << e.what() << "\n";
    return ExitStatus::Usage;
  } catch (const type_error& e) {
    out << "error[" << e.diag.code << "]: " << e.diag.message << "\n";
    return ExitStatus::Rejected;
  } catch (const fuel_error& e) {
    out << "error[E_FUEL]: " << e.what() << "\n";
    return ExitStatus::Fuel;
  }
}

const char* pointer_module(const std::string& pointer) {
  static const std::map<std::string, const char*> table = {
      {"term-grammar", "kernel-terms"},
      {"symbol-typing", "typechecker"},
      {"precedence", "typechecker"},
      {"conversion", "rewriting"},
      {"rewrite-rule-format", "typechecker"},
      {"well-typed-rules", "typechecker"},
      {"predicate-rule-conditions", "typechecker"},
      {"confluence-assumption", "rewriting"},
      {"accessibility", "positivity"},
      {"positive-positions", "positivity"},
      {"I6", "positivity"},
      {"safeness", "positivity"},
      {"smallness", "positivity"},
      {"first-order-data-types", "positivity"},
      {"monotone-arguments", "positivity"},
      {"pre-recursor", "recursor-gen"},
      {"recursor-positivity", "recursor-gen"},
      {"strict-positivity", "recursor-gen"},
      {"canonical-recursors", "recursor-gen"},
      {"admissible-recursors", "recursor-gen"},
      {"structural-decrease", "recursor-gen"},
      {"cic-typing", "cic-bridge"},
      {"iota-prime-reduction", "cic-bridge"},
      {"translation", "cic-bridge"},
      {"fuel", "rewriting"},
  };
  auto it = table.find(pointer);
  return it == table.end() ? nullptr : it->second;
}

}  // namespace cac
