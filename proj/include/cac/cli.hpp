/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#pragma once

#include <ostream>
#include <set>
#include <string>

#include "cac/typecheck.hpp"

namespace cac {

// Exit codes: 0 accepted, 1 gate/typing rejection, 2 usage or parse error,
// 3 fuel exhausted.
struct ExitStatus {
  static constexpr int Accepted = 0;
  static constexpr int Rejected = 1;
  static constexpr int Usage = 2;
  static constexpr int Fuel = 3;
};

struct CliOptions {
  long long fuel = 1000000;
  bool json = false;
  bool trace = false;
  bool assume_valid_rules = false;
  std::set<std::string> trusted_recursors;
  std::string out_path;   // translate: output file ("" = stdout)
  std::string env_text;   // normalize: free-variable environment "x:T, y:U"
};

int cmd_check(const std::string& path, const CliOptions& opts, std::ostream& out);
int cmd_translate(const std::string& path, const CliOptions& opts, std::ostream& out);
int cmd_normalize(const std::string& path, const std::string& term_text,
                  const CliOptions& opts, std::ostream& out);

// Shared helper: elaborate a parsed file with CLI options applied.
Signature elaborate_file(const SourceFile& src, const CliOptions& opts);

int exit_code_for(const Signature& sig);

}  // namespace cac
