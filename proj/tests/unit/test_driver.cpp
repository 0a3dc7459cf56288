#include <doctest.h>

#include "extt/driver.hpp"
#include "support/fixtures.hpp"

using namespace extt;

TEST_CASE("driver: well-typed file checks with exit 0") {
  CheckResult res = check_source("chain.ett", extt::testing::kUnfoldChain, {});
  CHECK(res.exit_code == 0);
  CHECK(res.output.empty());
  CHECK(res.diagnostics.empty());
}

TEST_CASE("driver: normalize under assumptions") {
  Options opt;
  opt.normalize_name = "f";
  opt.assume = {"phi_f"};
  CheckResult res = check_source("chain.ett", extt::testing::kUnfoldChain, opt);
  CHECK(res.exit_code == 0);
  CHECK(res.output == "suc zero\n");

  Options bare;
  bare.normalize_name = "f";
  CheckResult res2 = check_source("chain.ett", extt::testing::kUnfoldChain, bare);
  CHECK(res2.output == "f\n");

  Options sibling;
  sibling.normalize_name = "k";
  sibling.assume = {"phi_k"};
  CheckResult res3 = check_source("chain.ett", extt::testing::kUnfoldChain, sibling);
  CHECK(res3.output == "g\n");
}

TEST_CASE("driver: determinism across runs") {
  Options opt;
  opt.normalize_name = "f";
  opt.assume = {"phi_f"};
  opt.print_core = true;
  CheckResult a = check_source("chain.ett", extt::testing::kUnfoldChain, opt);
  CheckResult b = check_source("chain.ett", extt::testing::kUnfoldChain, opt);
  CHECK(a.exit_code == b.exit_code);
  CHECK(a.output == b.output);
}

TEST_CASE("driver: diagnostics render as CODE file:line:col message") {
  CheckResult res = check_source("bad.ett", "def x : Nat := Type", {});
  REQUIRE(res.exit_code == 1);
  REQUIRE(res.diagnostics.size() == 1);
  std::string line = res.diagnostics[0].render();
  CHECK(line.rfind("E-TYPE-MISMATCH bad.ett:1:", 0) == 0);
}

TEST_CASE("driver: parse errors exit 1 with E-PARSE") {
  CheckResult res = check_source("bad.ett", "def def", {});
  CHECK(res.exit_code == 1);
  REQUIRE(res.diagnostics.size() == 1);
  CHECK(res.diagnostics[0].code == codes::parse);
}

TEST_CASE("driver: unknown normalize target and unknown atom") {
  Options opt;
  opt.normalize_name = "nope";
  CheckResult res = check_source("chain.ett", extt::testing::kUnfoldChain, opt);
  CHECK(res.exit_code == 1);
  CHECK(res.diagnostics[0].code == codes::scope);

  Options opt2;
  opt2.normalize_name = "f";
  opt2.assume = {"nope"};
  CheckResult res2 = check_source("chain.ett", extt::testing::kUnfoldChain, opt2);
  CHECK(res2.exit_code == 1);
  CHECK(res2.diagnostics[0].code == codes::unknown_atom);
}

TEST_CASE("driver: error opacity in diagnostics") {
  // `probe` fails to check; the message must not contain secret's body
  // (suc suc suc zero) because phi_secret is not assumed inside probe.
  std::string src =
      "def secret : Nat := suc (suc (suc zero))\n"
      "def probe : {Nat | tt |> zero} := secret\n";
  CheckResult res = check_source("opaque.ett", src, {});
  REQUIRE(res.exit_code == 1);
  CHECK(res.diagnostics[0].code == codes::boundary);
  CHECK(res.diagnostics[0].message.find("secret") != std::string::npos);
  CHECK(res.diagnostics[0].message.find("suc (suc") == std::string::npos);
}

TEST_CASE("driver: print-core shows explicit coercions") {
  Options opt;
  opt.print_core = true;
  CheckResult res = check_source("chain.ett", extt::testing::kUnfoldChain, opt);
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("def g : Nat := outS h\n") != std::string::npos);
  CHECK(res.output.find("def f : Nat := outS g\n") != std::string::npos);
}

TEST_CASE("driver: truth clauses collapse stuck values (singleton behavior)") {
  std::string src =
      "def krange : (k : Nat) -> {Nat | tt |> k} :=\n"
      "  \\k. natrec (\\n. {Nat | tt |> n}) zero (\\n. \\h. suc (outS h)) k\n"
      "def back : Nat -> Nat := \\x. krange x\n";
  Options opt;
  opt.normalize_name = "back";
  opt.assume = {"phi_back"};
  CheckResult res = check_source("dep.ett", src, opt);
  REQUIRE(res.exit_code == 0);
  // krange stays folded, yet {Nat | tt |> x} pins the value to x.
  CHECK(res.output == "\\x0. x0\n");
}

TEST_CASE("driver: gated alias unfolds through a patched projection") {
  std::string src =
      "atom gate\n"
      "def GroupAlias unfolding (gate) : Type := Nat\n"
      "record C where { Ob : Type; pt : Ob }\n"
      "def z unfolding (GroupAlias) : GroupAlias := zero\n"
      "def A : C { Ob := GroupAlias } := new C { Ob := GroupAlias, pt := z }\n"
      "def AOb : Type := A.Ob\n";
  Options opaque;
  opaque.normalize_name = "AOb";
  opaque.assume = {"phi_AOb"};
  CHECK(check_source("g.ett", src, opaque).output == "GroupAlias\n");
  Options open;
  open.normalize_name = "AOb";
  open.assume = {"phi_AOb", "phi_GroupAlias"};
  CHECK(check_source("g.ett", src, open).output == "Nat\n");
}

TEST_CASE("driver: extension-typed Pi domains elaborate and normalize") {
  std::string src =
      "atom phi\n"
      "def extid : (x : {Nat | phi |> zero}) -> {Nat | phi |> zero} := \\x. x\n";
  Options opt;
  opt.normalize_name = "extid";
  opt.assume = {"phi_extid", "phi"};
  CheckResult res = check_source("e.ett", src, opt);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output == "\\x0. inS zero\n");
}
