#pragma once

#include <string>
#include <vector>

#include "extt/conversion.hpp"
#include "extt/elaborate.hpp"
#include "extt/parse.hpp"

namespace extt::testing {

// Parses and checks a whole program, returning the resulting signature.
inline Signature check_program(const std::string& source) {
  std::vector<SurfaceDecl> decls = parse_file(source);
  Signature sig;
  Elaborator elab(sig);
  for (const SurfaceDecl& d : decls) elab.check_decl(d);
  return sig;
}

// Elaborates a standalone surface term in the empty context under the given
// restriction, returning core term and type value.
inline std::pair<TermPtr, ValuePtr> elab_term(Signature& sig, const std::string& source,
                                              Restriction r = {}) {
  Parser parser(source);
  SurfacePtr s = parser.parse_term_all();
  Elaborator elab(sig);
  Context ctx;
  ctx.restriction = sig.close(r.atoms);
  return elab.infer(ctx, s);
}

inline TermPtr elab_check(Signature& sig, const std::string& source, const ValuePtr& expected,
                          Restriction r = {}) {
  Parser parser(source);
  SurfacePtr s = parser.parse_term_all();
  Elaborator elab(sig);
  Context ctx;
  ctx.restriction = sig.close(r.atoms);
  return elab.check(ctx, s, expected);
}

// The unfolding chain from the controlled-unfolding story: f unfolds g,
// g unfolds h, and a sibling k that declares nothing.
inline const char* kUnfoldChain = R"(
def h : Nat := suc zero
def g unfolding (h) : Nat := h
def f unfolding (g) : Nat := g
def k : Nat := g
)";

// Fixture signature for the generator and the oracle-agreement suites.
inline const char* kGenFixture = R"(
atom enc
def n1 : Nat := suc zero
def n2 unfolding (n1) : Nat := suc n1
def idnat : Nat -> Nat := \x. x
def dbl : Nat -> Nat := \x. natrec (\n. Nat) zero (\n. \h. suc (suc h)) x
def xz : {Nat | enc |> zero} := zero
def add2 unfolding (n2) : Nat := suc n2
record PairN where { a : Nat; b : Nat }
def pp : PairN := new PairN { a := zero, b := suc zero }
def pn : PairN { a := zero } := new PairN { a := zero, b := zero }
)";

// The record-patching story: a precategory skeleton with groups.
inline const char* kPrecat = R"(
record Precat where {
  Ob : Type;
  Hom : Ob -> Ob -> Type
}
def Group : Type := Nat
def GroupHom : Group -> Group -> Type := \a. \b. Nat
def PatchedOb : Type := Precat { Ob := Group }
def A : Precat { Ob := Group } :=
  new Precat { Ob := Group, Hom := GroupHom }
def B : Precat Group GroupHom :=
  new Precat { Ob := Group, Hom := GroupHom }
)";

inline Restriction assume(const Signature& sig, const std::vector<std::string>& names) {
  std::set<AtomId> atoms;
  for (const std::string& n : names) {
    const Atom* a = sig.find_atom(n);
    if (!a) throw std::runtime_error("fixture: unknown atom " + n);
    atoms.insert(a->id);
  }
  return sig.close(atoms);
}

// Normal form of a definition's stored body under the given restriction.
inline TermPtr normalize_body(const Signature& sig, const std::string& name,
                              const Restriction& r) {
  const DefDecl* def = sig.find_def(name);
  if (!def) throw std::runtime_error("fixture: unknown def " + name);
  Context ctx;
  ctx.restriction = r;
  Evaluator ev(sig, r);
  return normalize(sig, ctx, def->body, ev.eval_closed(def->type));
}

// Normal form of a reference to the definition (outS f) under r.
inline TermPtr normalize_ref(const Signature& sig, const std::string& name,
                             const Restriction& r) {
  const DefDecl* def = sig.find_def(name);
  if (!def) throw std::runtime_error("fixture: unknown def " + name);
  Context ctx;
  ctx.restriction = r;
  Evaluator ev(sig, r);
  return normalize(sig, ctx, tm::out_s(tm::defref(name)), ev.eval_closed(def->type));
}

}  // namespace extt::testing
