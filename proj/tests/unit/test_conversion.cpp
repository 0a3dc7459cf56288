#include <doctest.h>

#include "extt/conversion.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace extt;
using extt::testing::assume;
using extt::testing::check_program;

namespace {

// A context with a single variable of the given closed type.
Context one_var(const Signature& sig, const Restriction& r, const TermPtr& ty) {
  Context ctx;
  ctx.restriction = r;
  return ctx.bound("x", ty, Evaluator(sig, r).eval_closed(ty));
}

}  // namespace

TEST_CASE("conv: alpha equality via de Bruijn") {
  Signature sig;
  Evaluator ev(sig, {});
  ValuePtr ty = vs::make(VPi{vs::nat(), Closure{{}, tm::nat()}});
  ValuePtr f = ev.eval_closed(tm::lam(tm::var(0)));
  ValuePtr g = ev.eval_closed(tm::lam(tm::var(0)));
  CHECK(conv(sig, {}, 0, ty, f, g));
  ValuePtr h = ev.eval_closed(tm::lam(tm::suc(tm::var(0))));
  CHECK_FALSE(conv(sig, {}, 0, ty, f, h));
}

TEST_CASE("conv: eta at Pi") {
  Signature sig = check_program(extt::testing::kGenFixture);
  Restriction r;
  Evaluator ev(sig, r);
  ValuePtr ty = vs::make(VPi{vs::nat(), Closure{{}, tm::nat()}});
  // idnat stays opaque; \x. idnat x must still equal idnat by eta.
  ValuePtr lhs = ev.eval_closed(tm::lam(tm::app(tm::out_s(tm::defref("idnat")), tm::var(0))));
  ValuePtr rhs = ev.eval_closed(tm::out_s(tm::defref("idnat")));
  CHECK(conv(sig, r, 0, ty, lhs, rhs));
}

TEST_CASE("conv: entailed clause forces equality") {
  Signature sig = check_program("atom phi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  TermPtr xty = tm::ext_ty(tm::nat(), {{phi, tm::zero()}});
  Restriction r = assume(sig, {"phi"});
  Context ctx = one_var(sig, r, xty);
  Evaluator ev(sig, r);
  ValuePtr lhs = ev.eval(ctx.env, tm::out_s(tm::var(0)));
  CHECK(conv(sig, r, ctx.depth(), vs::nat(), lhs, vs::zero()));
  // Not without the assumption.
  Context ctx0 = one_var(sig, {}, xty);
  ValuePtr blocked = Evaluator(sig, {}).eval(ctx0.env, tm::out_s(tm::var(0)));
  CHECK_FALSE(conv(sig, {}, ctx0.depth(), vs::nat(), blocked, vs::zero()));
}

TEST_CASE("conv: uniqueness rule inS (outS x) == x") {
  Signature sig = check_program("atom phi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  TermPtr xty = tm::ext_ty(tm::nat(), {{phi, tm::zero()}});
  for (Restriction r : {Restriction{}, assume(sig, {"phi"})}) {
    Context ctx = one_var(sig, r, xty);
    Evaluator ev(sig, r);
    ValuePtr extty = ev.eval(ctx.env, xty);
    ValuePtr wrapped = ev.eval(ctx.env, tm::in_s(tm::out_s(tm::var(0))));
    ValuePtr x = ev.eval(ctx.env, tm::var(0));
    CHECK(conv(sig, r, ctx.depth(), extty, wrapped, x));
  }
}

TEST_CASE("conv: reflexive and symmetric on generated values") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 21;
  oracle::TermGen gen(sig, cfg);
  for (int i = 0; i < 60; ++i) {
    Restriction r = gen.random_restriction();
    Evaluator ev(sig, r);
    ValuePtr a = ev.eval_closed(gen.gen_nat(3));
    ValuePtr b = ev.eval_closed(gen.gen_nat(3));
    CHECK(conv(sig, r, 0, vs::nat(), a, a));
    CHECK(conv(sig, r, 0, vs::nat(), a, b) == conv(sig, r, 0, vs::nat(), b, a));
  }
}

TEST_CASE("conv: agreement with normalization on the generated corpus") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 100;
  oracle::TermGen gen(sig, cfg);
  for (int i = 0; i < 120; ++i) {
    TermPtr t1 = gen.gen_nat(3);
    // Half the time compare against a judgmentally equal wrapping of t1.
    TermPtr t2 = (i % 2 == 0) ? tm::app(tm::lam(tm::var(0)), t1) : gen.gen_nat(3);
    Restriction r = gen.random_restriction();
    Context ctx;
    ctx.restriction = r;
    Evaluator ev(sig, r);
    bool by_conv = conv(sig, r, 0, vs::nat(), ev.eval_closed(t1), ev.eval_closed(t2));
    bool by_nf = structural_eq(normalize(sig, ctx, t1, vs::nat()),
                               normalize(sig, ctx, t2, vs::nat()));
    CHECK(by_conv == by_nf);
  }
}

TEST_CASE("conv: restriction monotonicity") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 14;
  oracle::TermGen gen(sig, cfg);
  std::mt19937 rng(3);
  for (int i = 0; i < 80; ++i) {
    TermPtr t1 = gen.gen_nat(3);
    TermPtr t2 = gen.gen_nat(3);
    Restriction small = gen.random_restriction();
    std::set<AtomId> more = small.atoms;
    for (AtomId a : sig.all_atoms())
      if (rng() & 1) more.insert(a);
    Restriction big = sig.close(more);
    Evaluator evs(sig, small);
    if (conv(sig, small, 0, vs::nat(), evs.eval_closed(t1), evs.eval_closed(t2))) {
      Evaluator evb(sig, big);
      CHECK(conv(sig, big, 0, vs::nat(), evb.eval_closed(t1), evb.eval_closed(t2)));
    }
  }
}

TEST_CASE("check_clauses_compat: truth clause accepted") {
  Signature sig;
  Context ctx;
  check_clauses_compat(sig, ctx, vs::nat(), {{Prop::truth(), tm::zero()}});
}

TEST_CASE("check_clauses_compat: constructor clash rejected") {
  Signature sig = check_program("atom phi\natom psi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  Prop psi = Prop::atom(sig.find_atom("psi")->id);
  Context ctx;
  try {
    check_clauses_compat(sig, ctx, vs::nat(),
                         {{phi, tm::zero()}, {psi, tm::suc(tm::zero())}});
    FAIL("expected ClausesIncompatible");
  } catch (const CheckError& e) {
    CHECK(e.code == codes::clauses_incompatible);
    CHECK(std::string(e.what()).find("0") != std::string::npos);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("check_clauses_compat: clauses equal after firing are accepted") {
  // x : {Nat | tt |> zero}  |-  {Nat | phi |> outS x, tt |> zero} is fine
  // because outS x computes to zero unconditionally.
  Signature sig = check_program("atom phi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  TermPtr xty = tm::ext_ty(tm::nat(), {{Prop::truth(), tm::zero()}});
  Context ctx = one_var(sig, {}, xty);
  check_clauses_compat(sig, ctx, vs::nat(),
                       {{phi, tm::out_s(tm::var(0))}, {Prop::truth(), tm::zero()}});
}

TEST_CASE("check_clauses_compat: ill-typed clause reported with its index") {
  Signature sig = check_program("atom phi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  Context ctx;
  try {
    check_clauses_compat(sig, ctx, vs::nat(), {{phi, tm::type()}});
    FAIL("expected ClauseIllTyped");
  } catch (const CheckError& e) {
    CHECK(e.code == codes::clause_ill_typed);
    CHECK(std::string(e.what()).find("clause 0") != std::string::npos);
  }
}

TEST_CASE("conv: incompatible clauses would break transitivity (sanity)") {
  // With phi and psi both assumed, outS x is judged equal to both clause
  // values; compatibility checking is what rules this situation out at
  // formation time.
  Signature sig = check_program("atom phi\natom psi");
  Prop phi = Prop::atom(sig.find_atom("phi")->id);
  Prop psi = Prop::atom(sig.find_atom("psi")->id);
  TermPtr bad = tm::ext_ty(tm::nat(), {{phi, tm::zero()}, {psi, tm::suc(tm::zero())}});
  Restriction both = assume(sig, {"phi", "psi"});
  Context ctx = one_var(sig, both, bad);
  Evaluator ev(sig, both);
  ValuePtr out = ev.eval(ctx.env, tm::out_s(tm::var(0)));
  CHECK(conv(sig, both, ctx.depth(), vs::nat(), out, vs::zero()));
}

TEST_CASE("core checker: kernel re-entry on elaborated bodies") {
  Signature sig = check_program(extt::testing::kPrecat);
  for (const Declaration& d : sig.decls()) {
    const auto* def = std::get_if<DefDecl>(&d.decl);
    if (!def) continue;
    std::set<AtomId> assumed;
    for (const std::string& g : def->unfold_set) {
      if (const DefDecl* target = sig.find_def(g)) assumed.insert(target->atom.id);
      else if (const AtomDeclInfo* a = sig.find_atom_decl(g)) assumed.insert(a->atom.id);
    }
    Context ctx;
    ctx.restriction = sig.close(assumed);
    check_core(sig, ctx, def->type, vs::type());
    ValuePtr ty = Evaluator(sig, ctx.restriction).eval_closed(def->type);
    check_core(sig, ctx, def->body, ty);
  }
}

TEST_CASE("core checker: rejects plain mismatches") {
  Signature sig;
  Context ctx;
  CHECK_THROWS_AS(check_core(sig, ctx, tm::suc(tm::zero()), vs::type()), CheckError);
  CHECK_THROWS_AS(check_core(sig, ctx, tm::lam(tm::var(0)), vs::nat()), CheckError);
  check_core(sig, ctx, tm::zero(), vs::nat());
}

TEST_CASE("conv: canonical values at an opaque type compare structurally") {
  // When a clause fires while a type alias stays folded, inS values appear
  // at the blocked base type; conversion must still identify them.
  Signature sig = check_program(
      "def inner : Type := {Nat | tt |> zero}\n"
      "atom phi\n"
      "def xn unfolding (inner) : {inner | phi |> zero} := zero\n");
  Restriction r = assume(sig, {"phi"});
  Evaluator ev(sig, r);
  const DefDecl* xn = sig.find_def("xn");
  ValuePtr xty = ev.eval_closed(xn->type);  // {outS inner | phi |> inS zero}
  const auto* ext = value_as<VExtTy>(xty);
  REQUIRE(ext != nullptr);
  CHECK(value_as<VNeutral>(ext->base) != nullptr);  // inner stays folded
  Context ctx;
  ctx.restriction = r;
  ctx = ctx.bound("x", xn->type, xty);
  ValuePtr x = ev.eval(ctx.env, tm::var(0));
  ValuePtr wrapped = ev.eval(ctx.env, tm::in_s(tm::out_s(tm::var(0))));
  CHECK(conv(sig, r, ctx.depth(), xty, wrapped, x));
  // And the fired value reads back at the opaque base type.
  TermPtr nf = ev.quote(ctx.depth(), ext->base, ev.out_s(x));
  CHECK(structural_eq(nf, tm::in_s(tm::zero())));
}

TEST_CASE("boundary checking rebuilds binder types under the larger restriction") {
  // x : {Nat | phi_uu |> gdef}; checking outS x against {Nat | phi_uu |>
  // suc zero} must re-evaluate x's clause under closure({phi_uu}), where
  // gdef unfolds to suc zero. A stale context would reject this.
  Signature sig = check_program(
      "def gdef : Nat := suc zero\n"
      "def uu unfolding (gdef) : Nat := gdef\n");
  Prop phi_uu = Prop::atom(sig.find_atom("phi_uu")->id);
  TermPtr xty = tm::ext_ty(tm::nat(), {{phi_uu, tm::out_s(tm::defref("gdef"))}});
  Context ctx;
  ctx = ctx.bound("x", xty, Evaluator(sig, {}).eval_closed(xty));
  TermPtr expected = tm::ext_ty(tm::nat(), {{phi_uu, tm::suc(tm::zero())}});
  ValuePtr expected_v = Evaluator(sig, {}).eval_closed(expected);
  Elaborator elab(sig);
  Parser p("outS x");
  TermPtr t = elab.check(ctx, p.parse_term_all(), expected_v);
  CHECK(term_as<TInS>(t) != nullptr);
}

TEST_CASE("conv: transitive on generated triples") {
  Signature sig = check_program(extt::testing::kGenFixture);
  oracle::GenConfig cfg;
  cfg.seed = 61;
  oracle::TermGen gen(sig, cfg);
  for (int i = 0; i < 60; ++i) {
    Restriction r = gen.random_restriction();
    Evaluator ev(sig, r);
    TermPtr base = gen.gen_nat(3);
    // Three routes to the same value plus one unrelated term.
    ValuePtr v1 = ev.eval_closed(base);
    ValuePtr v2 = ev.eval_closed(tm::app(tm::lam(tm::var(0)), base));
    ValuePtr v3 = ev.eval_closed(tm::out_s(tm::in_s(base)));
    ValuePtr w = ev.eval_closed(gen.gen_nat(3));
    auto eq = [&](const ValuePtr& a, const ValuePtr& b) {
      return conv(sig, r, 0, vs::nat(), a, b);
    };
    CHECK(eq(v1, v2));
    CHECK(eq(v2, v3));
    CHECK(eq(v1, v3));
    if (eq(v1, w) && eq(w, v2)) CHECK(eq(v1, v2));
    if (eq(v1, w)) CHECK(eq(v2, w));  // substitutivity along the chain
  }
}

TEST_CASE("empty clause lists are legal in core extension types") {
  Signature sig;
  Context ctx;
  TermPtr wrapper = tm::ext_ty(tm::nat(), {});
  check_core(sig, ctx, wrapper, vs::type());
  // The wrapper is judgmentally isomorphic to its base.
  Evaluator ev(sig, {});
  ValuePtr wv = ev.eval_closed(wrapper);
  check_core(sig, ctx, tm::in_s(tm::zero()), wv);
  ValuePtr roundtrip = ev.eval_closed(tm::out_s(tm::in_s(tm::zero())));
  CHECK(conv(sig, {}, 0, vs::nat(), roundtrip, vs::zero()));
}
