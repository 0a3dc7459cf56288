#pragma once

#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "extt/syntax.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Core term rendering in the surface grammar. Binders print as x0, x1, ...
// indexed by depth, deterministically.
//
// In display mode a reference `outS f` to a global prints as plain `f`,
// matching how the user wrote it; explicit mode shows every inS/outS.
// ---------------------------------------------------------------------------

namespace detail {

// Precedence levels: 0 atom, 1 application/prefix, 2 arrow, 3 binders.
inline void print_term(std::ostream& os, const Signature& sig, const TermPtr& t,
                       int depth, int max_prec, bool explicit_mode);

inline std::string binder_name(int level) { return "x" + std::to_string(level); }

inline void wrap(std::ostream& os, bool parens, const std::function<void()>& body) {
  if (parens) os << "(";
  body();
  if (parens) os << ")";
}

inline void print_prop(std::ostream& os, const Signature& sig, const Prop& p) {
  if (p.is_truth())
    os << "tt";
  else
    os << sig.atom_name(p.atom_id());
}

inline void print_term(std::ostream& os, const Signature& sig, const TermPtr& t,
                       int depth, int max_prec, bool explicit_mode) {
  auto sub = [&](const TermPtr& u, int prec, int d = -1) {
    print_term(os, sig, u, d < 0 ? depth : d, prec, explicit_mode);
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TVar>) {
          os << binder_name(depth - 1 - n.index);
        } else if constexpr (std::is_same_v<N, TType>) {
          os << "Type";
        } else if constexpr (std::is_same_v<N, TNat>) {
          os << "Nat";
        } else if constexpr (std::is_same_v<N, TZero>) {
          os << "zero";
        } else if constexpr (std::is_same_v<N, TSuc>) {
          wrap(os, max_prec < 1, [&] { os << "suc "; sub(n.pred, 0); });
        } else if constexpr (std::is_same_v<N, TNatRec>) {
          wrap(os, max_prec < 1, [&] {
            os << "natrec ";
            sub(n.motive, 0); os << " ";
            sub(n.base, 0); os << " ";
            sub(n.step, 0); os << " ";
            sub(n.target, 0);
          });
        } else if constexpr (std::is_same_v<N, TPi>) {
          wrap(os, max_prec < 2, [&] {
            if (occurs_var(n.cod, 0)) {
              os << "(" << binder_name(depth) << " : ";
              sub(n.dom, 3);
              os << ") -> ";
            } else {
              sub(n.dom, 1);
              os << " -> ";
            }
            sub(n.cod, 2, depth + 1);
          });
        } else if constexpr (std::is_same_v<N, TLam>) {
          wrap(os, max_prec < 3, [&] {
            os << "\\" << binder_name(depth) << ". ";
            sub(n.body, 3, depth + 1);
          });
        } else if constexpr (std::is_same_v<N, TApp>) {
          wrap(os, max_prec < 1, [&] { sub(n.fn, 1); os << " "; sub(n.arg, 0); });
        } else if constexpr (std::is_same_v<N, TSigma>) {
          wrap(os, max_prec < 3, [&] {
            os << "Sig (" << binder_name(depth) << " : ";
            sub(n.fst, 3);
            os << ") . ";
            sub(n.snd, 3, depth + 1);
          });
        } else if constexpr (std::is_same_v<N, TPair>) {
          os << "(";
          sub(n.first, 3);
          os << ", ";
          sub(n.second, 3);
          os << ")";
        } else if constexpr (std::is_same_v<N, TFst>) {
          wrap(os, max_prec < 1, [&] { os << "fst "; sub(n.target, 0); });
        } else if constexpr (std::is_same_v<N, TSnd>) {
          wrap(os, max_prec < 1, [&] { os << "snd "; sub(n.target, 0); });
        } else if constexpr (std::is_same_v<N, TDefRef>) {
          os << n.name;
        } else if constexpr (std::is_same_v<N, TRecordTy>) {
          os << n.name;
        } else if constexpr (std::is_same_v<N, TNewRecord>) {
          os << "new " << n.record << " { ";
          bool sep = false;
          for (const auto& [f, u] : n.fields) {
            if (sep) os << ", ";
            sep = true;
            os << f << " := ";
            sub(u, 3);
          }
          os << " }";
        } else if constexpr (std::is_same_v<N, TFieldProj>) {
          sub(n.target, 0);
          os << "." << n.field;
        } else if constexpr (std::is_same_v<N, TExtTy>) {
          os << "{";
          sub(n.base, 3);
          os << " | ";
          bool sep = false;
          for (const auto& [p, u] : n.clauses) {
            if (sep) os << ", ";
            sep = true;
            print_prop(os, sig, p);
            os << " |> ";
            sub(u, 3);
          }
          os << "}";
        } else if constexpr (std::is_same_v<N, TInS>) {
          wrap(os, max_prec < 1, [&] { os << "inS "; sub(n.body, 0); });
        } else if constexpr (std::is_same_v<N, TOutS>) {
          if (!explicit_mode && term_as<TDefRef>(n.body)) {
            os << term_as<TDefRef>(n.body)->name;
          } else {
            wrap(os, max_prec < 1, [&] { os << "outS "; sub(n.body, 0); });
          }
        } else if constexpr (std::is_same_v<N, TProjExtTy>) {
          os << n.record << " { ";
          bool sep = false;
          for (const auto& [f, u] : n.clauses) {
            if (sep) os << ", ";
            sep = true;
            os << f << " := ";
            sub(u, 3);
          }
          os << " }";
        }
      },
      t->node);
}

}  // namespace detail

inline std::string show_term(const Signature& sig, const TermPtr& t, int depth = 0,
                             bool explicit_mode = false) {
  std::ostringstream os;
  detail::print_term(os, sig, t, depth, 3, explicit_mode);
  return os.str();
}

inline std::string show_restriction(const Signature& sig, const Restriction& r) {
  std::ostringstream os;
  os << "{";
  bool sep = false;
  for (AtomId a : r.atoms) {
    if (sep) os << ", ";
    sep = true;
    os << sig.atom_name(a);
  }
  os << "}";
  return os.str();
}

}  // namespace extt
