#pragma once

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "extt/elaborate.hpp"
#include "extt/parse.hpp"
#include "extt/pretty.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Batch driver: parse a file, check declarations in order, then serve
// --print-core and --normalize requests. Identical inputs produce byte
// identical output; everything below is pure.
// ---------------------------------------------------------------------------

struct Options {
  std::string normalize_name;        // empty: no normalization requested
  std::vector<std::string> assume;   // atom names assumed true (closure applied)
  bool print_core = false;
};

struct CheckResult {
  int exit_code = 0;  // 0 checked, 1 parse/type error
  std::string output;
  std::vector<Diagnostic> diagnostics;
};

inline CheckResult check_source(const std::string& file, const std::string& source,
                                const Options& opt) {
  CheckResult res;
  auto fail = [&](const CheckError& e) {
    res.diagnostics.push_back(
        {Diagnostic::Severity::error, e.code, file, e.span, e.what()});
    res.exit_code = 1;
    return res;
  };

  std::vector<SurfaceDecl> decls;
  try {
    decls = parse_file(source);
  } catch (const CheckError& e) {
    return fail(e);
  }

  Signature sig;
  Elaborator elab(sig);
  try {
    for (const SurfaceDecl& d : decls) elab.check_decl(d);
  } catch (const CheckError& e) {
    return fail(e);
  }

  std::ostringstream out;
  if (opt.print_core) {
    for (const Declaration& d : sig.decls()) {
      if (const auto* def = std::get_if<DefDecl>(&d.decl)) {
        out << "def " << def->name << " : "
            << show_term(sig, def->type, 0, /*explicit_mode=*/true) << " := "
            << show_term(sig, def->body, 0, /*explicit_mode=*/true) << "\n";
      }
    }
  }

  if (!opt.normalize_name.empty()) {
    const DefDecl* def = sig.find_def(opt.normalize_name);
    if (!def)
      return fail(CheckError(codes::scope, {},
                             "no definition named '" + opt.normalize_name + "'"));
    std::set<AtomId> assumed;
    for (const std::string& a : opt.assume) {
      const Atom* atom = sig.find_atom(a);
      if (!atom) return fail(CheckError(codes::unknown_atom, {}, "unknown atom '" + a + "'"));
      assumed.insert(atom->id);
    }
    Context ctx;
    ctx.restriction = sig.close(assumed);
    Evaluator ev(sig, ctx.restriction);
    TermPtr ref = tm::out_s(tm::defref(opt.normalize_name));
    ValuePtr ty = ev.eval_closed(def->type);
    out << show_term(sig, normalize(sig, ctx, ref, ty)) << "\n";
  }

  res.output = out.str();
  return res;
}

// Exit codes: 0 all declarations checked, 1 parse or type error, 2 I/O error.
inline int run_check(const std::string& path, const Options& opt, std::ostream& out,
                     std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read '" << path << "'\n";
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  CheckResult res = check_source(path, buf.str(), opt);
  for (const Diagnostic& d : res.diagnostics) err << d.render() << "\n";
  out << res.output;
  return res.exit_code;
}

}  // namespace extt
