#pragma once

#include <string>
#include <utility>
#include <vector>

#include "extt/eval.hpp"
#include "extt/pretty.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Type-directed definitional equality under a restriction.
//
// Eta holds at Pi and Sigma. At extension types both sides are compared
// through outS, which is also the uniqueness rule: inS (outS v) and v
// collapse to the same value. Projective extension types compare their
// underlying records; the specified fields are already forced equal by
// clause firing in the evaluator.
// ---------------------------------------------------------------------------

inline bool conv(const Signature& sig, const Restriction& r, int depth,
                 const ValuePtr& ty, const ValuePtr& v1, const ValuePtr& v2);
inline bool conv_type(const Signature& sig, const Restriction& r, int depth,
                      const ValuePtr& t1, const ValuePtr& t2);
inline bool conv_neutral(const Signature& sig, const Restriction& r, int depth,
                         const NeutralPtr& n1, const NeutralPtr& n2);
inline bool conv_untyped(const Signature& sig, const Restriction& r, int depth,
                         const ValuePtr& v1, const ValuePtr& v2);

inline bool conv(const Signature& sig, const Restriction& r, int depth,
                 const ValuePtr& ty, const ValuePtr& v1, const ValuePtr& v2) {
  Evaluator ev(sig, r);
  if (const auto* pi = value_as<VPi>(ty)) {
    ValuePtr x = vs::fresh_var(pi->dom, depth);
    return conv(sig, r, depth + 1, ev.apply_closure(pi->cod, x), ev.apply(v1, x),
                ev.apply(v2, x));
  }
  if (const auto* sg = value_as<VSigma>(ty)) {
    ValuePtr a1 = ev.first(v1);
    if (!conv(sig, r, depth, sg->fst, a1, ev.first(v2))) return false;
    return conv(sig, r, depth, ev.apply_closure(sg->snd, a1), ev.second(v1),
                ev.second(v2));
  }
  if (const auto* ext = value_as<VExtTy>(ty))
    return conv(sig, r, depth, ext->base, ev.out_s(v1), ev.out_s(v2));
  if (const auto* pty = value_as<VProjExtTy>(ty))
    return conv(sig, r, depth, vs::make(VRecordTy{pty->record}), ev.out_s(v1),
                ev.out_s(v2));
  if (value_as<VType>(ty)) return conv_type(sig, r, depth, v1, v2);
  if (value_as<VNat>(ty)) {
    if (value_as<VZero>(v1) && value_as<VZero>(v2)) return true;
    const auto* s1 = value_as<VSuc>(v1);
    const auto* s2 = value_as<VSuc>(v2);
    if (s1 && s2) return conv(sig, r, depth, ty, s1->pred, s2->pred);
    const auto* m1 = value_as<VNeutral>(v1);
    const auto* m2 = value_as<VNeutral>(v2);
    if (m1 && m2) return conv_neutral(sig, r, depth, m1->neutral, m2->neutral);
    return false;
  }
  if (const auto* rt = value_as<VRecordTy>(ty)) {
    const auto* r1 = value_as<VNewRecord>(v1);
    const auto* r2 = value_as<VNewRecord>(v2);
    if (r1 && r2) {
      // No record eta: literals compare fieldwise only.
      if (r1->fields.size() != r2->fields.size()) return false;
      const RecordDecl* rec = sig.find_record(rt->name);
      if (!rec) throw KernelBug("conv: unknown record '" + rt->name + "'");
      for (std::size_t i = 0; i < r1->fields.size(); ++i) {
        if (r1->fields[i].first != r2->fields[i].first) return false;
        ValuePtr fty = ev.field_type(*rec, static_cast<int>(i),
                                     [&](int j) { return r1->fields[j].second; });
        if (!conv(sig, r, depth, fty, r1->fields[i].second, r2->fields[i].second))
          return false;
      }
      return true;
    }
    const auto* m1 = value_as<VNeutral>(v1);
    const auto* m2 = value_as<VNeutral>(v2);
    if (m1 && m2) return conv_neutral(sig, r, depth, m1->neutral, m2->neutral);
    return false;
  }
  // Opaque (blocked) type: canonical values can still reach this point
  // when a clause fired while the type alias itself stayed folded, so we
  // fall back to structural comparison. No eta is available here.
  if (value_as<VNeutral>(ty)) return conv_untyped(sig, r, depth, v1, v2);
  throw KernelBug("conv: comparison at a non-type");
}

inline bool conv_untyped(const Signature& sig, const Restriction& r, int depth,
                         const ValuePtr& v1, const ValuePtr& v2) {
  if (v1.get() == v2.get()) return true;
  {
    const auto* m1 = value_as<VNeutral>(v1);
    const auto* m2 = value_as<VNeutral>(v2);
    if (m1 && m2) return conv_neutral(sig, r, depth, m1->neutral, m2->neutral);
  }
  if (value_as<VZero>(v1) && value_as<VZero>(v2)) return true;
  {
    const auto* s1 = value_as<VSuc>(v1);
    const auto* s2 = value_as<VSuc>(v2);
    if (s1 && s2) return conv_untyped(sig, r, depth, s1->pred, s2->pred);
  }
  {
    const auto* i1 = value_as<VInS>(v1);
    const auto* i2 = value_as<VInS>(v2);
    if (i1 && i2) return conv_untyped(sig, r, depth, i1->body, i2->body);
  }
  {
    const auto* p1 = value_as<VPair>(v1);
    const auto* p2 = value_as<VPair>(v2);
    if (p1 && p2)
      return conv_untyped(sig, r, depth, p1->first, p2->first) &&
             conv_untyped(sig, r, depth, p1->second, p2->second);
  }
  {
    const auto* r1 = value_as<VNewRecord>(v1);
    const auto* r2 = value_as<VNewRecord>(v2);
    if (r1 && r2 && r1->record == r2->record)
      return conv(sig, r, depth, vs::make(VRecordTy{r1->record}), v1, v2);
  }
  auto is_type_value = [](const ValuePtr& v) {
    return value_as<VType>(v) || value_as<VNat>(v) || value_as<VPi>(v) ||
           value_as<VSigma>(v) || value_as<VRecordTy>(v) || value_as<VExtTy>(v) ||
           value_as<VProjExtTy>(v);
  };
  if (is_type_value(v1) && is_type_value(v2)) return conv_type(sig, r, depth, v1, v2);
  // Lambdas at an opaque type have no usable eta; treat them as distinct.
  return false;
}

inline bool conv_type(const Signature& sig, const Restriction& r, int depth,
                      const ValuePtr& t1, const ValuePtr& t2) {
  Evaluator ev(sig, r);
  if (value_as<VType>(t1) && value_as<VType>(t2)) return true;
  if (value_as<VNat>(t1) && value_as<VNat>(t2)) return true;
  {
    const auto* p1 = value_as<VPi>(t1);
    const auto* p2 = value_as<VPi>(t2);
    if (p1 && p2) {
      if (!conv_type(sig, r, depth, p1->dom, p2->dom)) return false;
      ValuePtr x = vs::fresh_var(p1->dom, depth);
      return conv_type(sig, r, depth + 1, ev.apply_closure(p1->cod, x),
                       ev.apply_closure(p2->cod, x));
    }
  }
  {
    const auto* s1 = value_as<VSigma>(t1);
    const auto* s2 = value_as<VSigma>(t2);
    if (s1 && s2) {
      if (!conv_type(sig, r, depth, s1->fst, s2->fst)) return false;
      ValuePtr x = vs::fresh_var(s1->fst, depth);
      return conv_type(sig, r, depth + 1, ev.apply_closure(s1->snd, x),
                       ev.apply_closure(s2->snd, x));
    }
  }
  {
    const auto* r1 = value_as<VRecordTy>(t1);
    const auto* r2 = value_as<VRecordTy>(t2);
    if (r1 && r2) return r1->name == r2->name;
  }
  {
    // Extension types: equal bases and equal clause sets. Clause lists are
    // stored in source order but compared as sets keyed by proposition.
    const auto* e1 = value_as<VExtTy>(t1);
    const auto* e2 = value_as<VExtTy>(t2);
    if (e1 && e2) {
      if (!conv_type(sig, r, depth, e1->base, e2->base)) return false;
      auto covered = [&](const VExtTy& a, const VExtTy& b) {
        for (const auto& [p, u] : a.clauses) {
          bool found = false;
          for (const auto& [q, w] : b.clauses) {
            if (p == q && conv(sig, r, depth, a.base, u, w)) {
              found = true;
              break;
            }
          }
          if (!found) return false;
        }
        return true;
      };
      return covered(*e1, *e2) && covered(*e2, *e1);
    }
  }
  {
    const auto* p1 = value_as<VProjExtTy>(t1);
    const auto* p2 = value_as<VProjExtTy>(t2);
    if (p1 && p2) {
      if (p1->record != p2->record) return false;
      const RecordDecl* rec = sig.find_record(p1->record);
      if (!rec) throw KernelBug("conv: unknown record '" + p1->record + "'");
      auto clause_of = [](const VProjExtTy& p, const std::string& f) -> const ValuePtr* {
        for (const auto& [g, u] : p.clauses)
          if (g == f) return &u;
        return nullptr;
      };
      if (p1->clauses.size() != p2->clauses.size()) return false;
      for (const auto& [f, u1] : p1->clauses) {
        const ValuePtr* u2 = clause_of(*p2, f);
        if (!u2) return false;
        int idx = rec->field_index(f);
        if (idx < 0) throw KernelBug("conv: unknown field '" + f + "'");
        ValuePtr fty = ev.field_type(*rec, idx, [&](int j) -> ValuePtr {
          const ValuePtr* w = clause_of(*p1, rec->fields[j].name);
          return w ? *w : nullptr;
        });
        if (!conv(sig, r, depth, fty, u1, *u2)) return false;
      }
      return true;
    }
  }
  {
    const auto* m1 = value_as<VNeutral>(t1);
    const auto* m2 = value_as<VNeutral>(t2);
    if (m1 && m2) return conv_neutral(sig, r, depth, m1->neutral, m2->neutral);
  }
  return false;
}

inline bool conv_neutral(const Signature& sig, const Restriction& r, int depth,
                         const NeutralPtr& n1, const NeutralPtr& n2) {
  if (n1->node.index() != n2->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(n2->node);
        if constexpr (std::is_same_v<N, NVar>) {
          return x.level == y.level;
        } else if constexpr (std::is_same_v<N, NDef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, NApp>) {
          return conv_neutral(sig, r, depth, x.fn, y.fn) &&
                 conv(sig, r, depth, x.arg_type, x.arg, y.arg);
        } else if constexpr (std::is_same_v<N, NFst>) {
          return conv_neutral(sig, r, depth, x.target, y.target);
        } else if constexpr (std::is_same_v<N, NSnd>) {
          return conv_neutral(sig, r, depth, x.target, y.target);
        } else if constexpr (std::is_same_v<N, NNatRec>) {
          Evaluator ev(sig, r);
          if (!conv(sig, r, depth, Evaluator::nat_to_type(), x.motive, y.motive))
            return false;
          if (!conv(sig, r, depth, ev.apply(x.motive, vs::zero()), x.base, y.base))
            return false;
          if (!conv(sig, r, depth, Evaluator::step_type(x.motive), x.step, y.step))
            return false;
          return conv_neutral(sig, r, depth, x.target, y.target);
        } else if constexpr (std::is_same_v<N, NFieldProj>) {
          return x.field == y.field && conv_neutral(sig, r, depth, x.target, y.target);
        } else if constexpr (std::is_same_v<N, NOutS>) {
          return conv_neutral(sig, r, depth, x.target, y.target);
        } else {
          return false;
        }
      },
      n1->node);
}

// ---------------------------------------------------------------------------
// Kernel re-entry: checking core terms directly. The elaborator produces
// these; re-checking validates elaboration soundness and backs the clause
// compatibility check. Core terms are fully explicit, so there is no
// coercion insertion here, only conversion.
// ---------------------------------------------------------------------------

inline ValuePtr infer_core(const Signature& sig, const Context& ctx, const TermPtr& t);
inline void check_core(const Signature& sig, const Context& ctx, const TermPtr& t,
                       const ValuePtr& expected);
inline void check_clauses_compat(const Signature& sig, const Context& ctx,
                                 const ValuePtr& base,
                                 const std::vector<std::pair<Prop, TermPtr>>& clauses);

namespace detail {

inline CheckError core_mismatch(const Signature& sig, int depth, const Restriction& r,
                                const ValuePtr& expected, const ValuePtr& actual) {
  Evaluator ev(sig, r);
  return CheckError(codes::type_mismatch, {},
                    "expected " + show_term(sig, ev.quote_type(depth, expected), depth) +
                        ", got " + show_term(sig, ev.quote_type(depth, actual), depth));
}

inline TermPtr quote_ty(const Signature& sig, const Context& ctx, const ValuePtr& ty) {
  return Evaluator(sig, ctx.restriction).quote_type(ctx.depth(), ty);
}

inline void require_known_prop(const Signature& sig, const Prop& p) {
  if (!p.is_truth() && !sig.knows_atom(p.atom_id()))
    throw CheckError(codes::unknown_atom, {}, "clause mentions an undeclared atom");
}

// Validates a projective extension type's clause list against the record:
// fields exist, are distinct, and every field a clause's type depends on is
// itself specified. Returns the clause terms ordered by field position.
inline std::vector<std::pair<int, TermPtr>> validate_proj_clauses(
    const Signature& sig, const RecordDecl& rec,
    const std::vector<std::pair<std::string, TermPtr>>& clauses) {
  std::vector<std::pair<int, TermPtr>> ordered;
  for (const auto& [f, u] : clauses) {
    int idx = rec.field_index(f);
    if (idx < 0)
      throw CheckError(codes::unknown_field, {},
                       "record '" + rec.name + "' has no field '" + f + "'");
    for (const auto& [g, _] : ordered)
      if (g == idx)
        throw CheckError(codes::duplicate_field, {}, "field '" + f + "' specified twice");
    ordered.emplace_back(idx, u);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto specified = [&](int idx) {
    for (const auto& [g, _] : ordered)
      if (g == idx) return true;
    return false;
  };
  for (const auto& [idx, _] : ordered) {
    const TermPtr& fty = rec.fields[idx].type;  // scoped over fields 0..idx-1
    for (int j = 0; j < idx; ++j) {
      int dep = idx - 1 - j;  // field index referenced by Var j
      if (occurs_var(fty, j) && !specified(dep))
        throw CheckError(codes::field_type, {},
                         "type of field '" + rec.fields[idx].name +
                             "' depends on unspecified field '" +
                             rec.fields[dep].name + "'");
    }
  }
  return ordered;
}

}  // namespace detail

inline ValuePtr infer_core(const Signature& sig, const Context& ctx, const TermPtr& t) {
  Evaluator ev(sig, ctx.restriction);
  return std::visit(
      [&](const auto& n) -> ValuePtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TVar>) {
          if (n.index < 0 || n.index >= ctx.depth())
            throw CheckError(codes::scope, {}, "variable index out of scope");
          return ctx.telescope[ctx.depth() - 1 - n.index].type_value;
        } else if constexpr (std::is_same_v<N, TType>) {
          return vs::type();  // Type : Type, deliberately
        } else if constexpr (std::is_same_v<N, TNat>) {
          return vs::type();
        } else if constexpr (std::is_same_v<N, TZero>) {
          return vs::nat();
        } else if constexpr (std::is_same_v<N, TSuc>) {
          check_core(sig, ctx, n.pred, vs::nat());
          return vs::nat();
        } else if constexpr (std::is_same_v<N, TPi>) {
          check_core(sig, ctx, n.dom, vs::type());
          Context inner = ctx.bound("_", n.dom, ev.eval(ctx.env, n.dom));
          check_core(sig, inner, n.cod, vs::type());
          return vs::type();
        } else if constexpr (std::is_same_v<N, TSigma>) {
          check_core(sig, ctx, n.fst, vs::type());
          Context inner = ctx.bound("_", n.fst, ev.eval(ctx.env, n.fst));
          check_core(sig, inner, n.snd, vs::type());
          return vs::type();
        } else if constexpr (std::is_same_v<N, TApp>) {
          ValuePtr fty = infer_core(sig, ctx, n.fn);
          const auto* pi = value_as<VPi>(fty);
          if (!pi) throw CheckError(codes::type_mismatch, {}, "applying a non-function");
          check_core(sig, ctx, n.arg, pi->dom);
          return ev.apply_closure(pi->cod, ev.eval(ctx.env, n.arg));
        } else if constexpr (std::is_same_v<N, TFst>) {
          ValuePtr sty = infer_core(sig, ctx, n.target);
          const auto* sg = value_as<VSigma>(sty);
          if (!sg) throw CheckError(codes::type_mismatch, {}, "fst of a non-pair");
          return sg->fst;
        } else if constexpr (std::is_same_v<N, TSnd>) {
          ValuePtr sty = infer_core(sig, ctx, n.target);
          const auto* sg = value_as<VSigma>(sty);
          if (!sg) throw CheckError(codes::type_mismatch, {}, "snd of a non-pair");
          return ev.apply_closure(sg->snd, ev.first(ev.eval(ctx.env, n.target)));
        } else if constexpr (std::is_same_v<N, TNatRec>) {
          check_core(sig, ctx, n.motive, Evaluator::nat_to_type());
          ValuePtr motive = ev.eval(ctx.env, n.motive);
          check_core(sig, ctx, n.base, ev.apply(motive, vs::zero()));
          check_core(sig, ctx, n.step, Evaluator::step_type(motive));
          check_core(sig, ctx, n.target, vs::nat());
          return ev.apply(motive, ev.eval(ctx.env, n.target));
        } else if constexpr (std::is_same_v<N, TDefRef>) {
          const DefDecl* def = sig.find_def(n.name);
          if (!def) throw CheckError(codes::scope, {}, "unknown definition '" + n.name + "'");
          VExtTy wrapper{ev.eval_closed(def->type),
                         {{Prop::atom(def->atom.id), ev.eval_closed(def->body)}}};
          return vs::make(std::move(wrapper));
        } else if constexpr (std::is_same_v<N, TRecordTy>) {
          if (!sig.find_record(n.name))
            throw CheckError(codes::scope, {}, "unknown record '" + n.name + "'");
          return vs::type();
        } else if constexpr (std::is_same_v<N, TNewRecord>) {
          const RecordDecl* rec = sig.find_record(n.record);
          if (!rec) throw CheckError(codes::scope, {}, "unknown record '" + n.record + "'");
          if (rec->fields.size() != n.fields.size())
            throw CheckError(codes::missing_field, {},
                             "record literal must specify every field of '" + n.record + "'");
          for (std::size_t i = 0; i < n.fields.size(); ++i) {
            if (n.fields[i].first != rec->fields[i].name)
              throw CheckError(codes::unknown_field, {},
                               "record literal fields must follow the declaration order");
            ValuePtr fty = ev.field_type(*rec, static_cast<int>(i), [&](int j) {
              return ev.eval(ctx.env, n.fields[j].second);
            });
            check_core(sig, ctx, n.fields[i].second, fty);
          }
          return vs::make(VRecordTy{n.record});
        } else if constexpr (std::is_same_v<N, TFieldProj>) {
          ValuePtr tty = infer_core(sig, ctx, n.target);
          std::string record;
          if (const auto* rt = value_as<VRecordTy>(tty))
            record = rt->name;
          else if (const auto* pty = value_as<VProjExtTy>(tty))
            record = pty->record;
          else
            throw CheckError(codes::type_mismatch, {}, "projection from a non-record");
          const RecordDecl* rec = sig.find_record(record);
          if (!rec) throw KernelBug("infer: unknown record '" + record + "'");
          int idx = rec->field_index(n.field);
          if (idx < 0)
            throw CheckError(codes::unknown_field, {},
                             "record '" + record + "' has no field '" + n.field + "'");
          ValuePtr target = ev.eval(ctx.env, n.target);
          return ev.field_type(*rec, idx,
                               [&](int j) { return ev.field_proj(target, rec->fields[j].name); });
        } else if constexpr (std::is_same_v<N, TExtTy>) {
          check_core(sig, ctx, n.base, vs::type());
          check_clauses_compat(sig, ctx, ev.eval(ctx.env, n.base), n.clauses);
          return vs::type();
        } else if constexpr (std::is_same_v<N, TInS>) {
          // In inferring position inS lives at the clause-free wrapper
          // type {T | }, which is judgmentally isomorphic to T.
          return vs::make(VExtTy{infer_core(sig, ctx, n.body), {}});
        } else if constexpr (std::is_same_v<N, TOutS>) {
          ValuePtr ety = infer_core(sig, ctx, n.body);
          if (const auto* ext = value_as<VExtTy>(ety)) return ext->base;
          if (const auto* pty = value_as<VProjExtTy>(ety))
            return vs::make(VRecordTy{pty->record});
          throw CheckError(codes::type_mismatch, {}, "outS of a non-extension value");
        } else if constexpr (std::is_same_v<N, TProjExtTy>) {
          const RecordDecl* rec = sig.find_record(n.record);
          if (!rec) throw CheckError(codes::scope, {}, "unknown record '" + n.record + "'");
          auto ordered = detail::validate_proj_clauses(sig, *rec, n.clauses);
          auto value_of = [&](int idx) -> ValuePtr {
            for (const auto& [g, u] : ordered)
              if (g == idx) return ev.eval(ctx.env, u);
            return nullptr;  // unreachable for dependency-closed patches
          };
          for (const auto& [idx, u] : ordered) {
            ValuePtr fty = ev.field_type(*rec, idx, value_of);
            check_core(sig, ctx, u, fty);
          }
          return vs::type();
        } else if constexpr (std::is_same_v<N, TLam>) {
          throw CheckError(codes::cannot_infer, {}, "lambda needs an expected type");
        } else if constexpr (std::is_same_v<N, TPair>) {
          throw CheckError(codes::cannot_infer, {}, "pair needs an expected type");
        } else {
          throw KernelBug("infer: unhandled term");
        }
      },
      t->node);
}

inline void check_core(const Signature& sig, const Context& ctx, const TermPtr& t,
                       const ValuePtr& expected) {
  Evaluator ev(sig, ctx.restriction);
  if (const auto* lam = term_as<TLam>(t)) {
    const auto* pi = value_as<VPi>(expected);
    if (!pi) throw CheckError(codes::type_mismatch, {}, "lambda against a non-function type");
    Context inner =
        ctx.bound("_", ev.quote_type(ctx.depth(), pi->dom), pi->dom);
    check_core(sig, inner, lam->body,
               ev.apply_closure(pi->cod, inner.env.back()));
    return;
  }
  if (const auto* pr = term_as<TPair>(t)) {
    const auto* sg = value_as<VSigma>(expected);
    if (!sg) throw CheckError(codes::type_mismatch, {}, "pair against a non-pair type");
    check_core(sig, ctx, pr->first, sg->fst);
    check_core(sig, ctx, pr->second,
               ev.apply_closure(sg->snd, ev.eval(ctx.env, pr->first)));
    return;
  }
  if (const auto* ins = term_as<TInS>(t)) {
    if (const auto* ext = value_as<VExtTy>(expected)) {
      check_core(sig, ctx, ins->body, ext->base);
      // Boundary: under each clause's restriction the body must equal the
      // clause value. Both sides are re-evaluated under the larger
      // restriction, which may unfold more.
      TermPtr base_term = detail::quote_ty(sig, ctx, ext->base);
      for (std::size_t i = 0; i < ext->clauses.size(); ++i) {
        const auto& [p, u] = ext->clauses[i];
        detail::require_known_prop(sig, p);
        TermPtr u_term = ev.quote(ctx.depth(), ext->base, u);
        Context rctx = restrict_context(sig, ctx, p);
        Evaluator rev(sig, rctx.restriction);
        ValuePtr rbase = rev.eval(rctx.env, base_term);
        ValuePtr lhs = rev.eval(rctx.env, ins->body);
        ValuePtr rhs = rev.eval(rctx.env, u_term);
        if (!conv(sig, rctx.restriction, rctx.depth(), rbase, lhs, rhs))
          throw CheckError(
              codes::boundary, {},
              "boundary clause " + std::to_string(i) + " fails: " +
                  show_term(sig, rev.quote(rctx.depth(), rbase, lhs), rctx.depth()) +
                  " is not " +
                  show_term(sig, rev.quote(rctx.depth(), rbase, rhs), rctx.depth()) +
                  " under " + show_restriction(sig, rctx.restriction));
      }
      return;
    }
    if (const auto* pty = value_as<VProjExtTy>(expected)) {
      ValuePtr rec_ty = vs::make(VRecordTy{pty->record});
      check_core(sig, ctx, ins->body, rec_ty);
      const RecordDecl* rec = sig.find_record(pty->record);
      if (!rec) throw KernelBug("check: unknown record '" + pty->record + "'");
      ValuePtr rv = ev.eval(ctx.env, ins->body);
      auto clause_of = [&](const std::string& f) -> ValuePtr {
        for (const auto& [g, u] : pty->clauses)
          if (g == f) return u;
        return nullptr;
      };
      for (const auto& [f, u] : pty->clauses) {
        int idx = rec->field_index(f);
        if (idx < 0) throw KernelBug("check: unknown field '" + f + "'");
        ValuePtr fty = ev.field_type(*rec, idx, [&](int j) -> ValuePtr {
          ValuePtr w = clause_of(rec->fields[j].name);
          return w ? w : ev.field_proj(rv, rec->fields[j].name);
        });
        ValuePtr actual = ev.field_proj(rv, f);
        if (!conv(sig, ctx.restriction, ctx.depth(), fty, actual, u))
          throw CheckError(codes::proj_boundary, {},
                           "field '" + f + "' projects to " +
                               show_term(sig, ev.quote(ctx.depth(), fty, actual), ctx.depth()) +
                               ", expected " +
                               show_term(sig, ev.quote(ctx.depth(), fty, u), ctx.depth()));
      }
      return;
    }
    throw CheckError(codes::type_mismatch, {}, "inS against a non-extension type");
  }
  ValuePtr inferred = infer_core(sig, ctx, t);
  if (!conv_type(sig, ctx.restriction, ctx.depth(), inferred, expected))
    throw detail::core_mismatch(sig, ctx.depth(), ctx.restriction, expected, inferred);
}

// Extension-type formation: each clause checks against the base under its
// own restriction, and clauses are pairwise compatible under the joint
// restriction. The elim rule makes outS v equal to every entailed clause
// at once, so compatibility is what keeps judgmental equality transitive.
inline void check_clauses_compat(const Signature& sig, const Context& ctx,
                                 const ValuePtr& base,
                                 const std::vector<std::pair<Prop, TermPtr>>& clauses) {
  TermPtr base_term = detail::quote_ty(sig, ctx, base);
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto& [p, u] = clauses[i];
    detail::require_known_prop(sig, p);
    Context rctx = restrict_context(sig, ctx, p);
    ValuePtr rbase = Evaluator(sig, rctx.restriction).eval(rctx.env, base_term);
    try {
      check_core(sig, rctx, u, rbase);
    } catch (const CheckError& e) {
      throw CheckError(codes::clause_ill_typed, e.span,
                       "clause " + std::to_string(i) + " is ill-typed: " + e.what());
    }
  }
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    for (std::size_t j = i + 1; j < clauses.size(); ++j) {
      Context rctx = restrict_context(sig, restrict_context(sig, ctx, clauses[i].first),
                                      clauses[j].first);
      Evaluator rev(sig, rctx.restriction);
      ValuePtr rbase = rev.eval(rctx.env, base_term);
      ValuePtr vi = rev.eval(rctx.env, clauses[i].second);
      ValuePtr vj = rev.eval(rctx.env, clauses[j].second);
      if (!conv(sig, rctx.restriction, rctx.depth(), rbase, vi, vj))
        throw CheckError(
            codes::clauses_incompatible, {},
            "clauses " + std::to_string(i) + " and " + std::to_string(j) +
                " are incompatible: " +
                show_term(sig, rev.quote(rctx.depth(), rbase, vi), rctx.depth()) +
                " is not " +
                show_term(sig, rev.quote(rctx.depth(), rbase, vj), rctx.depth()) +
                " under " + show_restriction(sig, rctx.restriction));
    }
  }
}

}  // namespace extt
