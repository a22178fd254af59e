/*
Copyright (c) 2026 the cac developers. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include <doctest.h>

#include "test_support.hpp"

using namespace cactest;

namespace {

Signature plus_sig() {
  return elaborate_text(
      "inductive nat params indices := zero : nat | succ : nat -> nat.\n"
      "symbol plus : nat -> nat -> nat.\n"
      "rule plus x zero --> x [env: x:nat].\n"
      "rule plus x (succ y) --> succ (plus x y) [env: x:nat, y:nat].\n"
      "constant P : nat -> *.\n");
}

TermPtr numeral(const Signature& sig, int n) {
  TermPtr t = tparse(sig, "zero");
  for (int i = 0; i < n; ++i) t = mk_app(mk_sym("succ"), t);
  return t;
}

}  // namespace

TEST_CASE("match_lhs on constructor patterns") {
  Signature sig = plus_sig();
  TermPtr lhs = tparse(sig, "plus x zero");
  auto m = match_lhs(lhs, tparse(sig, "plus (succ zero) zero"));
  REQUIRE(m);
  CHECK(alpha_eq((*m)["x"], tparse(sig, "succ zero")));
  CHECK_FALSE(match_lhs(lhs, tparse(sig, "plus zero (succ zero)")));
}

TEST_CASE("match_lhs on the polymorphic app rule") {
  Signature sig = elaborate_corpus("list.cac");
  REQUIRE(sig.ok());
  TermPtr lhs = tparse(sig, "app A (nil A') l'");
  TermPtr t = tparse(sig, "app nat (nil nat) (nil nat)");
  auto m = match_lhs(lhs, t);
  REQUIRE(m);
  CHECK(alpha_eq((*m)["A"], tparse(sig, "nat")));
  CHECK(alpha_eq((*m)["A'"], tparse(sig, "nat")));
  CHECK(alpha_eq((*m)["l'"], tparse(sig, "nil nat")));
}

TEST_CASE("non-linear matching requires alpha-equal arguments") {
  Signature sig = plus_sig();
  TermPtr lhs = mk_app(mk_sym("plus"), {mk_fvar("x"), mk_fvar("x")});
  CHECK(match_lhs(lhs, tparse(sig, "plus zero zero")));
  CHECK_FALSE(match_lhs(lhs, tparse(sig, "plus zero (succ zero)")));
}

TEST_CASE("match/subst round trip") {
  Signature sig = plus_sig();
  Rng rng(101);
  for (int i = 0; i < 100; ++i) {
    TermPtr lhs = tparse(sig, "plus x (succ y)");
    Substitution theta;
    theta["x"] = numeral(sig, rng.pick(4));
    theta["y"] = numeral(sig, rng.pick(4));
    auto m = match_lhs(lhs, subst(lhs, theta));
    REQUIRE(m);
    CHECK(alpha_eq((*m)["x"], theta["x"]));
    CHECK(alpha_eq((*m)["y"], theta["y"]));
  }
}

TEST_CASE("step is leftmost-outermost and sound against the redex enumerator") {
  Signature sig = plus_sig();

  TermPtr t = tparse(sig, "plus (succ zero) (succ zero)");
  auto s = step(t, sig);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, tparse(sig, "succ (plus (succ zero) zero)")));

  auto b = step(tparse(sig, "([x:nat]x) zero"), sig);
  REQUIRE(b);
  CHECK(alpha_eq(b->result, tparse(sig, "zero")));
  CHECK(b->rule == "beta");

  Rng rng(55);
  for (int i = 0; i < 300; ++i) {
    TermPtr r = random_term(rng, sig, 5);
    auto st = step(r, sig);
    std::vector<Redex> redexes = all_redexes(r, sig);
    if (!st) {
      CHECK(redexes.empty());
      continue;
    }
    REQUIRE_FALSE(redexes.empty());
    // The chosen redex is one of the enumerated ones and has the least
    // position in prefix-lexicographic order.
    bool found = false;
    for (auto& rx : redexes) {
      if (rx.pos == st->pos && alpha_eq(rx.result, st->result)) found = true;
      CHECK_FALSE(std::lexicographical_compare(rx.pos.begin(), rx.pos.end(),
                                               st->pos.begin(), st->pos.end()));
    }
    CHECK(found);
  }
}

TEST_CASE("step uses the int rules") {
  Signature sig = elaborate_corpus("int.cac");
  REQUIRE(sig.ok());
  auto s = step(tparse(sig, "s (p x)"), sig);
  REQUIRE(s);
  CHECK(alpha_eq(s->result, tparse(sig, "x")));
}

TEST_CASE("normalize") {
  Signature sig = plus_sig();
  FuelBudget fuel(1000);
  NormalizeResult r = normalize(tparse(sig, "plus (succ zero) (succ zero)"), sig, fuel);
  CHECK(alpha_eq(r.term, tparse(sig, "succ (succ zero)")));
  CHECK(r.steps == 2);

  FuelBudget fuel2(1000);
  CHECK(alpha_eq(normalize(tparse(sig, "zero"), sig, fuel2).term, tparse(sig, "zero")));
}

TEST_CASE("normalize the map example") {
  ElaborateOptions o;
  o.trusted_recursors.insert("trm");
  Signature sig = elaborate_corpus("trm.cac", o);
  REQUIRE(sig.ok());
  FuelBudget fuel(1000);
  TermPtr t = tparse(sig, "map nat nat f (cons nat zero (nil nat))",
                     {{"f", SortTag::Star}});
  NormalizeResult r = normalize(t, sig, fuel);
  CHECK(alpha_eq(r.term, tparse(sig, "cons nat (f zero) (nil nat)",
                                {{"f", SortTag::Star}})));
}

TEST_CASE("normalize reports fuel exhaustion") {
  Signature sig = elaborate_text(
      "constant nat : *.\n"
      "symbol loop : nat.\n"
      "rule loop --> loop [env: ].\n");
  FuelBudget fuel(10);
  CHECK_THROWS_AS(normalize(tparse(sig, "loop"), sig, fuel), fuel_error);
}

TEST_CASE("normalize is idempotent") {
  Signature sig = plus_sig();
  Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    TermPtr t = random_term(rng, sig, 5);
    FuelBudget fuel(20000);
    try {
      TermPtr once = normalize(t, sig, fuel).term;
      TermPtr twice = normalize(once, sig, fuel).term;
      CHECK(alpha_eq(once, twice));
    } catch (const fuel_error&) {
      // Raw random terms may loop through beta; only terminating ones count.
    }
  }
}

TEST_CASE("convertible identifies P(2+2) with P 4") {
  Signature sig = plus_sig();
  FuelBudget fuel(1000);
  TermPtr lhs = tparse(sig, "P (plus (plus zero (succ zero)) (succ zero))");
  TermPtr rhs = mk_app(mk_sym("P"), numeral(sig, 2));
  CHECK(convertible(lhs, rhs, sig, fuel));
  CHECK(convertible(tparse(sig, "nat"), tparse(sig, "nat"), sig, fuel));
  CHECK_FALSE(convertible(tparse(sig, "nat"), tparse(sig, "nat -> nat"), sig, fuel));
}

TEST_CASE("convertible is an equivalence on normalizing terms") {
  Signature sig = plus_sig();
  Rng rng(91);
  std::vector<TermPtr> pool;
  for (int i = 0; i < 12; ++i) pool.push_back(random_term(rng, sig, 3));
  for (auto& a : pool) {
    FuelBudget fuel(20000);
    try {
      CHECK(convertible(a, a, sig, fuel));
    } catch (const fuel_error&) {}
    for (auto& b : pool) {
      for (auto& c : pool) {
        FuelBudget f2(20000);
        try {
          if (convertible(a, b, sig, f2) && convertible(b, c, sig, f2))
            CHECK(convertible(a, c, sig, f2));
          if (convertible(a, b, sig, f2)) CHECK(convertible(b, a, sig, f2));
        } catch (const fuel_error&) {}
      }
    }
  }
}

TEST_CASE("critical pairs: disjoint constructor patterns have none") {
  Signature sig = plus_sig();
  std::vector<RewriteRule> rules;
  for (auto& r : sig.rules)
    if (r.head == "plus") rules.push_back(r);
  CHECK(critical_pairs(rules).empty());
}

TEST_CASE("critical pairs of the int rules are trivially joinable") {
  Signature sig = elaborate_corpus("int.cac");
  REQUIRE(sig.ok());
  std::vector<CriticalPair> cps = critical_pairs(sig.rules);
  REQUIRE(cps.size() == 2);
  for (auto& cp : cps) {
    CHECK(cp.joinable);
    CHECK(alpha_eq(cp.reduct_inner, cp.reduct_root));
    CHECK(cp.position == Position{2});
  }
}

TEST_CASE("critical pairs: constructor-disjoint predicate rules have none") {
  Signature sig = elaborate_corpus("fn.cac");
  REQUIRE(sig.ok());
  CHECK(critical_pairs(sig.rules).empty());
}

TEST_CASE("critical pairs agree with a brute-force superposition oracle") {
  // Oracle: a structurally different unification routine (iterated equation
  // solving) applied at every non-variable subterm of every lhs.
  Signature sig = elaborate_corpus("list.cac");
  REQUIRE(sig.ok());
  auto oracle_unify = [](TermPtr a, TermPtr b) -> std::optional<Substitution> {
    std::vector<std::pair<TermPtr, TermPtr>> eqs{{a, b}};
    Substitution sol;
    auto apply_all = [&](const Substitution& s) {
      for (auto& [l, r] : eqs) {
        l = subst(l, s);
        r = subst(r, s);
      }
      for (auto& [k, v] : sol) v = subst(v, s);
    };
    while (!eqs.empty()) {
      auto [l, r] = eqs.back();
      eqs.pop_back();
      if (alpha_eq(l, r)) continue;
      if (l->kind == TermKind::FVar) {
        if (occurs_free(l->name, r)) return std::nullopt;
        Substitution s;
        s[l->name] = r;
        apply_all(s);
        sol[l->name] = r;
        continue;
      }
      if (r->kind == TermKind::FVar) {
        eqs.push_back({r, l});
        continue;
      }
      if (l->kind == TermKind::App && r->kind == TermKind::App) {
        eqs.push_back({l->left, r->left});
        eqs.push_back({l->right, r->right});
        continue;
      }
      return std::nullopt;
    }
    return sol;
  };
  std::vector<CriticalPair> ours = critical_pairs(sig.rules);
  std::size_t oracle_count = 0;
  for (std::size_t i = 0; i < sig.rules.size(); ++i) {
    TermPtr lhs1 = sig.rules[i].lhs_term();
    for (std::size_t j = 0; j < sig.rules.size(); ++j) {
      Substitution ren;
      TermPtr lhs2 = sig.rules[j].lhs_term();
      for (auto& v : free_vars(lhs2)) ren[v] = mk_fvar(v + "$o");
      lhs2 = subst(lhs2, ren);
      for (auto& p : all_positions(lhs1)) {
        TermPtr sub = subterm_at(lhs1, p);
        if (sub->kind == TermKind::FVar) continue;
        if (p.empty() && i == j) continue;
        if (oracle_unify(sub, lhs2)) ++oracle_count;
      }
    }
  }
  CHECK(ours.size() == oracle_count);
}
