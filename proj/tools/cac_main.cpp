/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cac/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cac - a type-checking kernel for algebraic constructions"};
  app.require_subcommand(1);

  cac::CliOptions opts;
  std::string file, term;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--fuel", opts.fuel, "reduction step budget")->capture_default_str();
    cmd->add_flag("--json", opts.json, "machine-readable diagnostics");
    cmd->add_flag("--trace", opts.trace, "print each reduction step");
    cmd->add_flag("--assume-valid-rules", opts.assume_valid_rules,
                  "downgrade matchability failures to warnings");
    cmd->add_option("--trusted-recursor", opts.trusted_recursors,
                    "admit a hand-written recursor for this type");
  };

  CLI::App* check = app.add_subcommand("check", "elaborate a signature file");
  check->add_option("file", file, "signature file (.cac)")->required();
  add_common(check);

  CLI::App* translate = app.add_subcommand("translate", "translate inductive definitions");
  translate->add_option("file", file, "definitions file (.cicminus)")->required();
  translate->add_option("-o,--output", opts.out_path, "output signature file");
  add_common(translate);

  CLI::App* norm = app.add_subcommand("normalize", "normalize a term under a signature");
  norm->add_option("file", file, "signature file (.cac)")->required();
  norm->add_option("term", term, "term to normalize")->required();
  norm->add_option("--env", opts.env_text, "free-variable environment, e.g. \"x:nat\"");
  add_common(norm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cac::ExitStatus::Usage;
  }

  if (check->parsed()) return cac::cmd_check(file, opts, std::cout);
  if (translate->parsed()) return cac::cmd_translate(file, opts, std::cout);
  if (norm->parsed()) return cac::cmd_normalize(file, term, opts, std::cout);
  return cac::ExitStatus::Usage;
}
