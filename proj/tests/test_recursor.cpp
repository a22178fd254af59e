/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include <doctest.h>

#include <functional>

#include "test_support.hpp"

using namespace cactest;

namespace {

Signature jmeq_sig() {
  return elaborate_text(
      "inductive JMeq params (A:*)(a:A) indices (B:*)(b:B) :=\n"
      "    refl : (C:*)(x:C) JMeq C x C x.\n");
}

Signature fin_sig() {
  return elaborate_text(
      "constant bot : *.\n"
      "constant or : * -> * -> *.\n"
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "constant eq : nat -> nat -> *.\n"
      "inductive fin params indices (q:nat -> *) :=\n"
      "    empty : fin ([y:nat]bot)\n"
      "  | add : (x:nat)(p:nat -> *) (fin p) -> fin ([y:nat] or (eq y x) (p y)).\n");
}

// Slow prefix-enumeration oracle for infer_parameters: try every k and take
// the largest one satisfying the verbatim-prefix conditions, re-validated
// through an independent walk.
int oracle_parameters(const Signature& sig, const std::string& C,
                      const std::vector<std::string>& ctors) {
  Telescope ctel = split_telescope(sig.find(C)->type);
  int best = 0;
  for (int k = 0; k <= (int)ctel.binders.size(); ++k) {
    bool ok = true;
    for (auto& cname : ctors) {
      Telescope tel = split_telescope(sig.find(cname)->type);
      if ((int)tel.binders.size() < k) { ok = false; break; }
      Spine out = spine(tel.core);
      if ((int)out.args.size() != (int)ctel.binders.size()) { ok = false; break; }
      Substitution ren;
      for (int i = 0; i < k && ok; ++i) {
        TermPtr want = subst(ctel.binders[i].second, ren);
        if (!alpha_eq(tel.binders[i].second, want)) ok = false;
        ren[ctel.binders[i].first] = mk_fvar(tel.binders[i].first, tel.sorts[i]);
      }
      for (int i = 0; i < k && ok; ++i)
        if (!(out.args[i]->kind == TermKind::FVar &&
              out.args[i]->name == tel.binders[i].first))
          ok = false;
      for (std::size_t j = k; j < tel.binders.size() && ok; ++j) {
        Telescope at = split_telescope(tel.binders[j].second);
        Spine core = spine(at.core);
        if (core.head->kind == TermKind::Sym && core.head->name == C) {
          for (int i = 0; i < k; ++i)
            if (!(i < (int)core.args.size() && core.args[i]->kind == TermKind::FVar &&
                  core.args[i]->name == tel.binders[i].first))
              ok = false;
        }
      }
      if (!ok) break;
    }
    if (ok) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("parameter inference") {
  Signature list = elaborate_corpus("list.cac");
  REQUIRE(list.ok());
  CHECK(infer_parameters("list", {"nil", "cons"}, list) == 1);
  CHECK(infer_parameters("list", {"nil", "cons"}, list) ==
        oracle_parameters(list, "list", {"nil", "cons"}));
  CHECK(infer_parameters("nat", {"zero", "succ"}, list) == 0);

  Signature jmeq = jmeq_sig();
  REQUIRE(jmeq.ok());
  CHECK(infer_parameters("JMeq", {"refl"}, jmeq) == 2);
  CHECK(infer_parameters("JMeq", {"refl"}, jmeq) ==
        oracle_parameters(jmeq, "JMeq", {"refl"}));

  Signature fin = fin_sig();
  REQUIRE(fin.ok());
  CHECK(infer_parameters("fin", {"empty", "add"}, fin) == 0);
}

TEST_CASE("strict positivity") {
  Signature fin = fin_sig();
  DiagnosticList d;
  check_strictly_positive("fin", {"empty", "add"}, fin, d);
  CHECK_FALSE(d.has_errors());

  Signature jmeq = jmeq_sig();
  DiagnosticList d2;
  check_strictly_positive("JMeq", {"refl"}, jmeq, d2);
  CHECK_FALSE(d2.has_errors());

  // trm's mu places trm under a double negation.
  ElaborateOptions o;
  o.trusted_recursors.insert("trm");
  Signature trm = elaborate_corpus("trm.cac", o);
  REQUIRE(trm.ok());
  DiagnosticList d3;
  check_strictly_positive("trm", {"var", "fun", "mu"}, trm, d3);
  CHECK(d3.has_errors());

  // Mendler's negative constructor.
  Signature mendler = elaborate_corpus("mendler.cac");
  CHECK(mendler.gate_report.has_code("E_NOT_STRICTLY_POSITIVE"));
}

TEST_CASE("the canonical nat recursor matches the expected type and rules") {
  Signature sig = elaborate_corpus("nat.cac");
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("rec_nat");
  REQUIRE(rec);
  TermPtr expected = tparse(
      sig, "(z:nat)(P:nat -> *)(y1:P zero)(y2:(x:nat)(P x) -> P (succ x)) P z",
      {{"P", SortTag::Box}});
  CHECK(alpha_eq(rec->type, expected));

  auto rules = sig.rules_of("rec_nat");
  REQUIRE(rules.size() == 2);
  std::map<std::string, SortTag> vars{{"P", SortTag::Box},
                                      {"y1", SortTag::Star},
                                      {"y2", SortTag::Star},
                                      {"x", SortTag::Star}};
  CHECK(alpha_eq(rules[0]->lhs_term(), tparse(sig, "rec_nat zero P y1 y2", vars)));
  CHECK(alpha_eq(rules[0]->rhs, tparse(sig, "y1", vars)));
  // Compare the successor rule after closing over the rule variables.
  TermPtr got = rules[1]->lhs_term();
  TermPtr want_l = tparse(sig, "rec_nat (succ x) P y1 y2", vars);
  TermPtr want_r = tparse(sig, "y2 x (rec_nat x P y1 y2)", vars);
  auto close2 = [](TermPtr a, TermPtr b) {
    TermPtr pair = mk_app(mk_app(mk_sym("#p"), a), b);
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (auto& v : free_vars(pair)) (void)v;
    std::function<void(const TermPtr&)> collect = [&](const TermPtr& t) {
      if (t->kind == TermKind::FVar && seen.insert(t->name).second)
        order.push_back(t->name);
      if (t->kind == TermKind::Abs || t->kind == TermKind::App ||
          t->kind == TermKind::Prod) {
        collect(t->left);
        collect(t->right);
      }
    };
    collect(pair);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      pair = mk_abs("v", star(), abstract_fvar(pair, *it));
    return pair;
  };
  CHECK(alpha_eq(close2(got, rules[1]->rhs), close2(want_l, want_r)));
}

TEST_CASE("the fin recursor computes projections through its motive") {
  Signature sig = fin_sig();
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("rec_fin");
  REQUIRE(rec);
  // rec_fin : (q:nat -> *)(z:fin q)(P:...)(y1:...)(y2:...)P q z
  Telescope tel = split_telescope(rec->type);
  CHECK(tel.binders.size() == 5);
  auto rules = sig.rules_of("rec_fin");
  REQUIRE(rules.size() == 2);
  // The add rule recurses on the fin argument.
  bool found_recursive_call = false;
  for (auto& v : symbols_of(rules[1]->rhs))
    if (v == "rec_fin") found_recursive_call = true;
  CHECK(found_recursive_call);
}

TEST_CASE("the JMeq weak recursor is linear with duplications in rho") {
  Signature sig = jmeq_sig();
  REQUIRE(sig.ok());
  auto rules = sig.rules_of("rec_JMeq");
  REQUIRE(rules.size() == 1);
  const RewriteRule& r = *rules[0];
  // Linear lhs.
  std::map<std::string, int> count;
  for (auto& l : r.lhs_args)
    for (auto& v : free_vars(l)) count[v] += (int)positions_of(v, l).size();
  for (auto& [v, n] : count) CHECK(n == 1);
  // rho collapses the indices onto the parameters and the primed copies.
  CHECK(r.rho.size() == 4);
  // rhs is the bare branch variable.
  CHECK(r.rhs->kind == TermKind::FVar);
}

TEST_CASE("generated rules pass the whole gate pipeline") {
  // Re-elaborating corpora that contain generated recursors re-runs every
  // rule through check_rule, the pre-recursor gates and positivity.
  for (auto* name : {"nat.cac", "list.cac"}) {
    Signature sig = elaborate_corpus(name);
    CHECK(sig.ok());
    for (auto& d : sig.decls)
      if (d.recursor) {
        CHECK(d.recursor->generated);
      }
  }
}

TEST_CASE("generated rule sets are orthogonal") {
  Signature sig = elaborate_corpus("list.cac");
  REQUIRE(sig.ok());
  std::vector<RewriteRule> gen_rules;
  for (auto& r : sig.rules)
    if (r.head == "rec_list" || r.head == "rec_nat") gen_rules.push_back(r);
  CHECK(critical_pairs(gen_rules).empty());
  for (auto& r : gen_rules) {
    std::map<std::string, int> count;
    for (auto& l : r.lhs_args)
      for (auto& v : free_vars(l)) count[v] += (int)positions_of(v, l).size();
    for (auto& [v, n] : count) CHECK(n == 1);
  }
}

TEST_CASE("pre-recursor gate") {
  Signature sig = elaborate_corpus("nat.cac");
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("rec_nat");
  DiagnosticList d;
  auto view = check_pre_recursor(*rec, "nat", sig, d);
  CHECK(view);
  CHECK_FALSE(d.has_errors());
  CHECK(view->scrutinee_slot == 0);

  // A recursor whose rule right-hand side uses an index variable.
  Signature bad = elaborate_text(
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "constant vec : nat -> *.\n"
      "constant vnil : vec zero.\n"
      "recursor badrec for vec : (n:nat)(z:vec n)(y1:nat -> nat) nat.\n"
      "rule badrec n vnil y1 --> y1 n [env: n:nat, y1:nat -> nat].\n");
  CHECK_FALSE(bad.ok());
  CHECK(bad.gate_report.has_code("E_PRE_RECURSOR_RULE"));

  // Scrutinee placed where its indices cannot precede it.
  Signature misplaced = elaborate_text(
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "constant vec : nat -> *.\n"
      "constant vnil : vec zero.\n"
      "recursor badrec2 for vec : (z:vec zero)(P:vec zero -> *)(y1:P vnil) P z.\n");
  CHECK_FALSE(misplaced.ok());
  CHECK(misplaced.gate_report.has_code("E_PRE_RECURSOR_SHAPE"));
}

TEST_CASE("recursor positivity under the extended definition") {
  // The trm recursor passes with the anti-monotone neg declaration.
  ElaborateOptions o;
  o.trusted_recursors.insert("trm");
  Signature trm = elaborate_corpus("trm.cac", o);
  CHECK(trm.ok());

  // Without the declaration the occurrence of trm under neg neg is unsigned.
  std::string text = read_corpus("trm.cac");
  auto pos = text.find("monotone neg (-1).\n");
  REQUIRE(pos != std::string::npos);
  text.erase(pos, std::string("monotone neg (-1).\n").size());
  Signature no_mon = elaborate_signature(parse_cac_file(text), o);
  CHECK_FALSE(no_mon.ok());
  CHECK(no_mon.gate_report.has_code("E_RECURSOR_POSITIVITY"));
}

TEST_CASE("inductive-recursive recursor: defined equivalent accepted when positive") {
  ElaborateOptions o;
  o.trusted_recursors.insert("dlist");
  Signature sig = elaborate_corpus("dlist.cac", o);
  CHECK(sig.ok());
  // fresh and dlist sit in one precedence class.
  CHECK(sig.prec.equiv("fresh", "dlist"));

  // A negative occurrence of the defined equivalent is rejected.
  std::string text = read_corpus("dlist.cac");
  auto pos = text.find("(h2:fresh A ne x l)");
  REQUIRE(pos != std::string::npos);
  std::string bad_text = text;
  bad_text.replace(pos, std::string("(h2:fresh A ne x l)").size(),
                   "(h2:fresh A ne x l -> top)");
  Signature bad = elaborate_signature(parse_cac_file(bad_text), o);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("strong recursor for nat mirrors the weak rules with kind substitution") {
  Signature sig = elaborate_text(
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "recursor strong srec for nat motive [z:nat]*.\n");
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("srec");
  REQUIRE(rec);
  CHECK(rec->sort == SortTag::Box);
  TermPtr expected =
      tparse(sig, "(z:nat)(y1:*)(y2:(x:nat) * -> *) *", {});
  CHECK(alpha_eq(rec->type, expected));
  auto rules = sig.rules_of("srec");
  REQUIRE(rules.size() == 2);
  // Predicate-level rules carry the kappa map.
  CHECK(rules[0]->kappa.size() == 1);
}

TEST_CASE("strong recursor requests rejected on not-small and unsafe types") {
  Signature fin = elaborate_corpus("fin_strong.cac");
  CHECK_FALSE(fin.ok());
  CHECK(fin.gate_report.has_code("E_NOT_SMALL"));
  CHECK_FALSE(fin.find("srec_fin"));  // generation blocked

  Signature jmeq = elaborate_corpus("jmeq_strong.cac");
  CHECK_FALSE(jmeq.ok());
  CHECK(jmeq.gate_report.has_code("E_UNSAFE_NONLINEAR"));
  CHECK_FALSE(jmeq.find("srec_jmeq"));
}

TEST_CASE("structural decrease") {
  Signature dist = elaborate_corpus("dist.cac");
  REQUIRE(dist.ok());  // plus and times rules all decrease

  ElaborateOptions o;
  o.trusted_recursors.insert("trm");
  Signature trm = elaborate_corpus("trm.cac", o);
  REQUIRE(trm.ok());  // map decreases through cons accessibility

  Signature bad = elaborate_text(
      "constant nat : *.\n"
      "constant zero : nat.\n"
      "symbol f : nat -> nat.\n"
      "rule f x --> f x [env: x:nat].\n");
  CHECK_FALSE(bad.ok());
  CHECK(bad.gate_report.has_code("E_NO_DECREASE"));
}

TEST_CASE("iota simulation: the recursor unfolds once per successor layer") {
  Signature sig = elaborate_corpus("nat.cac");
  REQUIRE(sig.ok());
  for (int k = 0; k <= 5; ++k) {
    TermPtr n = tparse(sig, "zero");
    for (int i = 0; i < k; ++i) n = mk_app(mk_sym("succ"), n);
    std::map<std::string, SortTag> vars{{"P", SortTag::Box},
                                        {"u", SortTag::Star},
                                        {"v", SortTag::Star}};
    TermPtr t = mk_app(mk_sym("rec_nat"),
                       {n, tparse(sig, "P", vars), tparse(sig, "u", vars),
                        tparse(sig, "v", vars)});
    FuelBudget fuel(10000);
    NormalizeResult res = normalize(t, sig, fuel, true);
    int succ_steps = 0;
    for (auto& s : res.trace)
      if (s.rule == "rec_nat#succ") ++succ_steps;
    CHECK(succ_steps == k);
  }
}

TEST_CASE("re-parsed generator output passes the canonical-pattern admission") {
  // Print the generated nat recursor as a user declaration and check it is
  // admitted without any trusted annotation.
  Signature sig = elaborate_corpus("nat.cac");
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("rec_nat");
  std::ostringstream os;
  os << "constant natx : *.\nconstant zerox : natx.\nconstant succx : natx -> natx.\n";
  os << "recursor rec_natx for natx : " << to_string(rec->type) << ".\n";
  for (auto* r : sig.rules_of("rec_nat")) {
    os << "rule " << to_string(r->lhs_term()) << " --> " << to_string(r->rhs)
       << " [env: ";
    bool first = true;
    for (auto& [x, ty] : r->rule_env.bindings) {
      if (!first) os << ", ";
      first = false;
      os << x << ":" << to_string(ty);
    }
    if (!r->rho.empty()) {
      os << " ; rho: ";
      first = true;
      for (auto& [x, img] : r->rho) {
        if (!first) os << ", ";
        first = false;
        os << x << " := " << to_string(img);
      }
    }
    os << "].\n";
  }
  // Rename every symbol so the declarations stand on their own.
  std::string text = os.str();
  for (auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"rec_nat", "rec_natx"}, {"nat", "natx"}, {"zero", "zerox"},
           {"succ", "succx"}}) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      if (text.compare(i, from.size(), from) == 0 &&
          (i + from.size() >= text.size() ||
           !(std::isalnum((unsigned char)text[i + from.size()]) ||
             text[i + from.size()] == '_' || text[i + from.size()] == 'x'))) {
        out += to;
        i += from.size();
      } else {
        out += text[i++];
      }
    }
    text = out;
  }
  Signature re = elaborate_text(text);
  CHECK(re.ok());
  const SymbolDecl* mine = re.find("rec_natx");
  REQUIRE(mine);
  REQUIRE(mine->recursor.has_value());
  CHECK_FALSE(mine->recursor->generated);
  CHECK_FALSE(mine->recursor->trusted);
}

TEST_CASE("arbitrary user recursors are rejected without trust") {
  Signature sig = elaborate_text(
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "recursor weird for nat : (z:nat)(P:nat -> *)(y1:P zero) P z.\n"
      "rule weird zero P y1 --> y1 [env: P:nat -> *, y1:P zero].\n");
  CHECK_FALSE(sig.ok());
  CHECK(sig.gate_report.has_code("E_RECURSOR_NOT_CANONICAL"));
}

TEST_CASE("an inductive type without constructors still gets a recursor") {
  Signature sig = elaborate_text(
      "inductive bot params indices := .\n"
      "constant truth : *.\n");
  REQUIRE(sig.ok());
  const SymbolDecl* rec = sig.find("rec_bot");
  REQUIRE(rec);
  CHECK(sig.rules_of("rec_bot").empty());
  CHECK(alpha_eq(rec->type,
                 tparse(sig, "(z:bot)(P:bot -> *)P z", {{"P", SortTag::Box}})));
  // The empty eliminator is stuck on a variable scrutinee.
  Environment env;
  env.push("w", tparse(sig, "bot"));
  FuelBudget fuel(100);
  TermPtr t = tparse(sig, "rec_bot w ([z:bot]truth)", {{"w", SortTag::Star}});
  CHECK_NOTHROW(infer(env, t, sig, fuel));
  CHECK(alpha_eq(normalize(t, sig, fuel).term, t));
}

TEST_CASE("the JMeq recursor reduces on a reflexivity scrutinee") {
  Signature sig = jmeq_sig();
  REQUIRE(sig.ok());
  // rec A a B b (refl A' a') P h matches with both index pairs collapsed.
  std::map<std::string, SortTag> vars{{"T", SortTag::Box},
                                      {"t", SortTag::Star},
                                      {"P", SortTag::Box},
                                      {"h", SortTag::Star}};
  TermPtr t = tparse(sig, "rec_JMeq T t T t (refl T t) P h", vars);
  FuelBudget fuel(100);
  NormalizeResult res = normalize(t, sig, fuel);
  CHECK(res.steps == 1);
  CHECK(alpha_eq(res.term, tparse(sig, "h", vars)));
  // The lhs is linear, so matching does not compare the index arguments:
  // the typing rules, not the matcher, force them to be convertible.
  TermPtr linear = tparse(sig, "rec_JMeq T t T u (refl T t) P h",
                          {{"T", SortTag::Box}, {"t", SortTag::Star},
                           {"u", SortTag::Star}, {"P", SortTag::Box},
                           {"h", SortTag::Star}});
  FuelBudget f2(100);
  CHECK(alpha_eq(normalize(linear, sig, f2).term, tparse(sig, "h", vars)));
}
