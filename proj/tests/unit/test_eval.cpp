#include <doctest.h>

#include "extt/conversion.hpp"
#include "extt/eval.hpp"
#include "extt/pretty.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace extt;
using extt::testing::assume;
using extt::testing::check_program;

TEST_CASE("eval: computation rule outS (inS v)") {
  Signature sig;
  Evaluator ev(sig, {});
  ValuePtr v = ev.eval_closed(tm::out_s(tm::in_s(tm::zero())));
  CHECK(value_as<VZero>(v) != nullptr);
}

TEST_CASE("eval: clause fires on a bound variable when entailed") {
  Signature sig = check_program("atom phi");
  Restriction r = assume(sig, {"phi"});
  Prop phi = Prop::atom(sig.find_atom("phi")->id);

  // x : {Nat | phi |> suc zero}
  TermPtr xty = tm::ext_ty(tm::nat(), {{phi, tm::suc(tm::zero())}});
  Context ctx;
  ctx.restriction = r;
  ctx = ctx.bound("x", xty, Evaluator(sig, r).eval_closed(xty));

  Evaluator ev(sig, r);
  ValuePtr v = ev.eval(ctx.env, tm::out_s(tm::var(0)));
  const auto* s = value_as<VSuc>(v);
  REQUIRE(s != nullptr);
  CHECK(value_as<VZero>(s->pred) != nullptr);

  // Without the assumption the projection stays blocked.
  Context ctx0;
  ctx0 = ctx0.bound("x", xty, Evaluator(sig, {}).eval_closed(xty));
  ValuePtr blocked = Evaluator(sig, {}).eval(ctx0.env, tm::out_s(tm::var(0)));
  CHECK(value_as<VNeutral>(blocked) != nullptr);
}

TEST_CASE("eval: definitional projection computes under the empty restriction") {
  Signature sig = check_program(extt::testing::kPrecat);
  Context ctx;  // empty restriction
  TermPtr lhs = tm::field_proj(tm::out_s(tm::defref("A")), "Ob");
  TermPtr rhs = tm::out_s(tm::defref("Group"));
  TermPtr lnf = normalize(sig, ctx, lhs, vs::type());
  TermPtr rnf = normalize(sig, ctx, rhs, vs::type());
  CHECK(structural_eq(lnf, rnf));
  CHECK(show_term(sig, lnf) == "Group");
  // Unspecified field of the patched type stays a blocked projection.
  TermPtr hom = tm::field_proj(tm::out_s(tm::defref("A")), "Hom");
  Evaluator ev(sig, {});
  ValuePtr homv = ev.eval_closed(hom);
  CHECK(value_as<VNeutral>(homv) != nullptr);
}

TEST_CASE("apply: beta and neutral extension") {
  Signature sig;
  Evaluator ev(sig, {});
  ValuePtr id = ev.eval_closed(tm::lam(tm::var(0)));
  CHECK(value_as<VZero>(ev.apply(id, vs::zero())) != nullptr);

  ValuePtr pi = vs::make(VPi{vs::nat(), Closure{{}, tm::nat()}});
  ValuePtr f = vs::fresh_var(pi, 0);
  ValuePtr applied = ev.apply(f, vs::zero());
  const auto* neu = value_as<VNeutral>(applied);
  REQUIRE(neu != nullptr);
  CHECK(neutral_as<NApp>(neu->neutral) != nullptr);
  CHECK_THROWS_AS(ev.apply(vs::zero(), vs::zero()), KernelBug);
}

TEST_CASE("apply/eval agree with substitution then eval") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 31;
  cfg.max_depth = 3;
  oracle::TermGen gen(sig, cfg);
  for (int i = 0; i < 120; ++i) {
    TermPtr body = gen.gen_nat_open(2, 1);
    TermPtr arg = gen.gen_nat(2);
    Restriction r = gen.random_restriction();
    Context ctx;
    ctx.restriction = r;
    TermPtr beta = normalize(sig, ctx, tm::app(tm::lam(body), arg), vs::nat());
    TermPtr direct = normalize(sig, ctx, oracle::subst(body, 0, arg), vs::nat());
    CHECK(structural_eq(beta, direct));
  }
}

TEST_CASE("quote: basics and blocked clause") {
  Signature sig;
  Evaluator ev(sig, {});
  CHECK(structural_eq(ev.quote(0, vs::nat(), vs::zero()), tm::zero()));

  ValuePtr extty =
      vs::make(VExtTy{vs::nat(), {}});
  NeutralPtr var0 = vs::make_neutral(NVar{0});
  NeutralPtr blocked = vs::make_neutral(NOutS{var0, extty});
  TermPtr q = ev.quote_neutral(1, blocked);
  CHECK(structural_eq(q, tm::out_s(tm::var(0))));
}

TEST_CASE("normalize: controlled unfolding chain") {
  Signature sig = check_program(extt::testing::kUnfoldChain);
  // Under closure({phi_f}) the whole chain unfolds.
  TermPtr nf = extt::testing::normalize_ref(sig, "f", assume(sig, {"phi_f"}));
  CHECK(structural_eq(nf, tm::suc(tm::zero())));
  CHECK(show_term(sig, nf) == "suc zero");
  // With no assumption the reference stays opaque and prints as `f`.
  TermPtr opaque = extt::testing::normalize_ref(sig, "f", {});
  CHECK(structural_eq(opaque, tm::out_s(tm::defref("f"))));
  CHECK(show_term(sig, opaque) == "f");
  // The sibling k sees g opaque even when phi_k is assumed.
  TermPtr sibling = extt::testing::normalize_ref(sig, "k", assume(sig, {"phi_k"}));
  CHECK(structural_eq(sibling, tm::out_s(tm::defref("g"))));
  CHECK(show_term(sig, sibling) == "g");
}

TEST_CASE("normalize: idempotent on generated terms") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 8;
  oracle::TermGen gen(sig, cfg);
  for (int i = 0; i < 150; ++i) {
    TermPtr t = gen.gen_nat(4);
    Restriction r = gen.random_restriction();
    Context ctx;
    ctx.restriction = r;
    TermPtr once = normalize(sig, ctx, t, vs::nat());
    TermPtr twice = normalize(sig, ctx, once, vs::nat());
    CHECK(structural_eq(once, twice));
  }
}

TEST_CASE("normalize: restriction monotonicity") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 77;
  oracle::TermGen gen(sig, cfg);
  std::mt19937 rng(4);
  std::vector<AtomId> everything;
  for (AtomId a : sig.all_atoms()) everything.push_back(a);
  for (int i = 0; i < 120; ++i) {
    TermPtr t = gen.gen_nat(4);
    Restriction small = gen.random_restriction();
    std::set<AtomId> bigger = small.atoms;
    for (AtomId a : everything)
      if (rng() & 1) bigger.insert(a);
    Restriction big = sig.close(bigger);
    Context sctx, bctx;
    sctx.restriction = small;
    bctx.restriction = big;
    TermPtr small_nf = normalize(sig, sctx, t, vs::nat());
    TermPtr direct = normalize(sig, bctx, t, vs::nat());
    TermPtr staged = normalize(sig, bctx, small_nf, vs::nat());
    CHECK(structural_eq(direct, staged));
  }
}

TEST_CASE("normalize: canonicity under the full restriction") {
  Signature sig = check_program(extt::testing::kGenFixture);
  Restriction all = sig.close(sig.all_atoms());
  oracle::GenConfig cfg;
  cfg.seed = 55;
  oracle::TermGen gen(sig, cfg);
  std::function<bool(const TermPtr&)> numeral = [&](const TermPtr& t) -> bool {
    if (term_as<TZero>(t)) return true;
    if (const auto* s = term_as<TSuc>(t)) return numeral(s->pred);
    return false;
  };
  Context ctx;
  ctx.restriction = all;
  for (int i = 0; i < 150; ++i) {
    TermPtr nf = normalize(sig, ctx, gen.gen_nat(4), vs::nat());
    CHECK(numeral(nf));
  }
}

TEST_CASE("eval: natrec computes and blocks") {
  Signature sig = check_program(extt::testing::kGenFixture);
  Context ctx;  // empty restriction
  // dbl is opaque here, so natrec over `dbl zero` must block...
  TermPtr blocked_target = tm::app(tm::out_s(tm::defref("dbl")), tm::zero());
  TermPtr rec = tm::natrec(tm::lam(tm::nat()), tm::zero(),
                           tm::lam(tm::lam(tm::suc(tm::var(0)))), blocked_target);
  TermPtr nf = normalize(sig, ctx, rec, vs::nat());
  CHECK(term_as<TNatRec>(nf) != nullptr);
  // ...and compute to a numeral once phi_dbl is assumed.
  Context ctx2;
  ctx2.restriction = assume(sig, {"phi_dbl"});
  TermPtr nf2 = normalize(sig, ctx2, rec, vs::nat());
  CHECK(structural_eq(nf2, tm::zero()));
}

TEST_CASE("eval: ill-formed environment is a kernel bug") {
  Signature sig;
  Evaluator ev(sig, {});
  CHECK_THROWS_AS(ev.eval({}, tm::var(0)), KernelBug);
}

TEST_CASE("quote: eta-expands neutrals at Pi and Sigma") {
  Signature sig;
  Evaluator ev(sig, {});
  // f : Nat -> Nat, read back as \x0. f x0
  ValuePtr pi = vs::make(VPi{vs::nat(), Closure{{}, tm::nat()}});
  TermPtr qf = ev.quote(1, pi, vs::fresh_var(pi, 0));
  CHECK(structural_eq(qf, tm::lam(tm::app(tm::var(1), tm::var(0)))));
  // p : Sig (n : Nat) . Nat, read back as (fst p, snd p)
  ValuePtr sg = vs::make(VSigma{vs::nat(), Closure{{}, tm::nat()}});
  TermPtr qp = ev.quote(1, sg, vs::fresh_var(sg, 0));
  CHECK(structural_eq(qp, tm::pair(tm::fst(tm::var(0)), tm::snd(tm::var(0)))));
}

TEST_CASE("normalize: function-typed definitions read back eta-long") {
  Signature sig = extt::testing::check_program(extt::testing::kGenFixture);
  Restriction r = assume(sig, {"phi_idnat"});
  TermPtr nf = extt::testing::normalize_ref(sig, "idnat", r);
  CHECK(structural_eq(nf, tm::lam(tm::var(0))));
  // Opaque, the same reference eta-expands around the neutral head.
  TermPtr opaque = extt::testing::normalize_ref(sig, "idnat", {});
  CHECK(structural_eq(opaque, tm::lam(tm::app(tm::out_s(tm::defref("idnat")), tm::var(0)))));
  CHECK(show_term(sig, opaque) == "\\x0. idnat x0");
}
