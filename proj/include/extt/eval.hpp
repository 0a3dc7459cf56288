#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "extt/domain.hpp"
#include "extt/syntax.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Normalization by evaluation, parameterized by the active restriction.
//
// The restriction decides three things during evaluation:
//   - whether a DefRef unfolds (entails(r, phi_f)) or stays a neutral head,
//   - which clause of an extension type fires under outS,
//   - nothing else: beta, natrec and record projection are restriction-free.
//
// Restriction invariant: `restr_` is closed under the signature's
// implication edges, so entailment of an atom is a membership test.
// ---------------------------------------------------------------------------

class Evaluator {
 public:
  Evaluator(const Signature& sig, Restriction restr)
      : sig_(sig), restr_(std::move(restr)) {}

  const Signature& signature() const { return sig_; }
  const Restriction& restriction() const { return restr_; }

  // --- evaluation ---

  ValuePtr eval(const Env& env, const TermPtr& t) const {
    return std::visit(
        [&](const auto& n) -> ValuePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, TVar>) {
            if (n.index < 0 || n.index >= static_cast<int>(env.size()))
              throw KernelBug("eval: variable index out of range");
            const ValuePtr& v = env[env.size() - 1 - n.index];
            if (!v) throw KernelBug("eval: hole in environment consulted");
            return v;
          } else if constexpr (std::is_same_v<N, TType>) {
            return vs::type();
          } else if constexpr (std::is_same_v<N, TPi>) {
            return vs::make(VPi{eval(env, n.dom), Closure{env, n.cod}});
          } else if constexpr (std::is_same_v<N, TLam>) {
            return vs::make(VLam{Closure{env, n.body}});
          } else if constexpr (std::is_same_v<N, TApp>) {
            return apply(eval(env, n.fn), eval(env, n.arg));
          } else if constexpr (std::is_same_v<N, TSigma>) {
            return vs::make(VSigma{eval(env, n.fst), Closure{env, n.snd}});
          } else if constexpr (std::is_same_v<N, TPair>) {
            return vs::make(VPair{eval(env, n.first), eval(env, n.second)});
          } else if constexpr (std::is_same_v<N, TFst>) {
            return first(eval(env, n.target));
          } else if constexpr (std::is_same_v<N, TSnd>) {
            return second(eval(env, n.target));
          } else if constexpr (std::is_same_v<N, TNat>) {
            return vs::nat();
          } else if constexpr (std::is_same_v<N, TZero>) {
            return vs::zero();
          } else if constexpr (std::is_same_v<N, TSuc>) {
            return vs::suc(eval(env, n.pred));
          } else if constexpr (std::is_same_v<N, TNatRec>) {
            return nat_rec(eval(env, n.motive), eval(env, n.base),
                           eval(env, n.step), eval(env, n.target));
          } else if constexpr (std::is_same_v<N, TDefRef>) {
            return eval_defref(n.name);
          } else if constexpr (std::is_same_v<N, TRecordTy>) {
            return vs::make(VRecordTy{n.name});
          } else if constexpr (std::is_same_v<N, TNewRecord>) {
            VNewRecord out{n.record, {}};
            out.fields.reserve(n.fields.size());
            for (const auto& [f, ft] : n.fields) out.fields.emplace_back(f, eval(env, ft));
            return vs::make(std::move(out));
          } else if constexpr (std::is_same_v<N, TFieldProj>) {
            return field_proj(eval(env, n.target), n.field);
          } else if constexpr (std::is_same_v<N, TExtTy>) {
            VExtTy out{eval(env, n.base), {}};
            out.clauses.reserve(n.clauses.size());
            for (const auto& [p, u] : n.clauses) out.clauses.emplace_back(p, eval(env, u));
            return vs::make(std::move(out));
          } else if constexpr (std::is_same_v<N, TInS>) {
            return vs::make(VInS{eval(env, n.body)});
          } else if constexpr (std::is_same_v<N, TOutS>) {
            return out_s(eval(env, n.body));
          } else if constexpr (std::is_same_v<N, TProjExtTy>) {
            VProjExtTy out{n.record, {}};
            out.clauses.reserve(n.clauses.size());
            for (const auto& [f, u] : n.clauses) out.clauses.emplace_back(f, eval(env, u));
            return vs::make(std::move(out));
          } else {
            throw KernelBug("eval: unhandled term");
          }
        },
        t->node);
  }

  ValuePtr eval_closed(const TermPtr& t) const { return eval({}, t); }

  // A reference to a global is either unfolded (restriction entails its
  // atom) or a neutral head carrying the wrapper type {A | phi_f |> body}.
  // Results depend only on (signature, restriction), so they are memoized
  // per evaluator; an Evaluator instance is single-threaded.
  ValuePtr eval_defref(const std::string& name) const {
    auto hit = defref_memo_.find(name);
    if (hit != defref_memo_.end()) return hit->second;
    const DefDecl* def = sig_.find_def(name);
    if (!def) throw KernelBug("eval: unresolved definition '" + name + "'");
    Prop phi = Prop::atom(def->atom.id);
    ValuePtr out;
    if (sig_.entails(restr_, phi)) {
      out = vs::make(VInS{eval_closed(def->body)});
    } else {
      VExtTy wrapper{eval_closed(def->type), {{phi, eval_closed(def->body)}}};
      out = vs::neutral(vs::make(std::move(wrapper)), vs::make_neutral(NDef{name}));
    }
    defref_memo_.emplace(name, out);
    return out;
  }

  ValuePtr apply_closure(const Closure& cl, const ValuePtr& arg) const {
    Env env = cl.env;
    env.push_back(arg);
    return eval(env, cl.body);
  }

  ValuePtr apply(const ValuePtr& fn, const ValuePtr& arg) const {
    if (const auto* lam = value_as<VLam>(fn)) return apply_closure(lam->body, arg);
    if (const auto* neu = value_as<VNeutral>(fn)) {
      if (const auto* pi = value_as<VPi>(neu->type)) {
        return vs::neutral(apply_closure(pi->cod, arg),
                           vs::make_neutral(NApp{neu->neutral, arg, pi->dom}));
      }
      throw KernelBug("apply: neutral is not of function type");
    }
    throw KernelBug("apply: not a function");
  }

  ValuePtr first(const ValuePtr& v) const {
    if (const auto* p = value_as<VPair>(v)) return p->first;
    if (const auto* neu = value_as<VNeutral>(v)) {
      if (const auto* sg = value_as<VSigma>(neu->type))
        return vs::neutral(sg->fst, vs::make_neutral(NFst{neu->neutral}));
    }
    throw KernelBug("fst: not a pair");
  }

  ValuePtr second(const ValuePtr& v) const {
    if (const auto* p = value_as<VPair>(v)) return p->second;
    if (const auto* neu = value_as<VNeutral>(v)) {
      if (const auto* sg = value_as<VSigma>(neu->type))
        return vs::neutral(apply_closure(sg->snd, first(v)),
                           vs::make_neutral(NSnd{neu->neutral}));
    }
    throw KernelBug("snd: not a pair");
  }

  ValuePtr nat_rec(const ValuePtr& motive, const ValuePtr& base,
                   const ValuePtr& step, const ValuePtr& target) const {
    if (value_as<VZero>(target)) return base;
    if (const auto* s = value_as<VSuc>(target))
      return apply(apply(step, s->pred), nat_rec(motive, base, step, s->pred));
    if (const auto* neu = value_as<VNeutral>(target)) {
      return vs::neutral(apply(motive, target),
                         vs::make_neutral(NNatRec{motive, base, step, neu->neutral}));
    }
    throw KernelBug("natrec: target is not a natural");
  }

  // Elimination of extension types. On a neutral the first clause whose
  // proposition is entailed fires; the truth proposition always fires.
  ValuePtr out_s(const ValuePtr& v) const {
    if (const auto* i = value_as<VInS>(v)) return i->body;
    if (const auto* neu = value_as<VNeutral>(v)) {
      if (const auto* ext = value_as<VExtTy>(neu->type)) {
        for (const auto& [p, u] : ext->clauses)
          if (sig_.entails(restr_, p)) return u;
        return vs::neutral(ext->base, vs::make_neutral(NOutS{neu->neutral, neu->type}));
      }
      if (const auto* pty = value_as<VProjExtTy>(neu->type)) {
        return vs::neutral(vs::make(VRecordTy{pty->record}),
                           vs::make_neutral(NOutS{neu->neutral, neu->type}));
      }
      throw KernelBug("outS: neutral is not of extension type");
    }
    throw KernelBug("outS: not an extension-type value");
  }

  // Record projection. Projecting a specified field of a projective
  // extension type computes to the clause value, even with an empty
  // restriction; `(outS r).f` collapses to `r.f` so both routes agree.
  ValuePtr field_proj(const ValuePtr& v, const std::string& field) const {
    if (const auto* rec = value_as<VNewRecord>(v)) {
      for (const auto& [f, u] : rec->fields)
        if (f == field) return u;
      throw KernelBug("projection: no field '" + field + "'");
    }
    if (const auto* i = value_as<VInS>(v)) return field_proj(i->body, field);
    if (const auto* neu = value_as<VNeutral>(v)) {
      if (const auto* pty = value_as<VProjExtTy>(neu->type)) {
        for (const auto& [f, u] : pty->clauses)
          if (f == field) return u;
        return neutral_proj(pty->record, v, neu->neutral, field);
      }
      if (const auto* rt = value_as<VRecordTy>(neu->type)) {
        if (const auto* outs = neutral_as<NOutS>(neu->neutral)) {
          // n = outS m with m of projective type: project m directly, so
          // (outS r).f and r.f compute to the same value.
          if (outs->target_type && value_as<VProjExtTy>(outs->target_type))
            return field_proj(vs::neutral(outs->target_type, outs->target), field);
        }
        return neutral_proj(rt->name, v, neu->neutral, field);
      }
      throw KernelBug("projection: neutral is not of record type");
    }
    throw KernelBug("projection: not a record value");
  }

  // Field type of `rec.fields[index]` with earlier fields provided by `get`.
  ValuePtr field_type(const RecordDecl& rec, int index,
                      const std::function<ValuePtr(int)>& get) const {
    Env env;
    env.reserve(index);
    for (int j = 0; j < index; ++j) env.push_back(get(j));
    return eval(env, rec.fields[index].type);
  }

  // --- read-back ---

  // Type-directed quotation. Eta-expands neutrals at Pi and Sigma, and
  // reads extension-type values back through inS/outS, which makes the
  // uniqueness rule hold on normal forms as well.
  TermPtr quote(int depth, const ValuePtr& ty, const ValuePtr& v) const {
    if (const auto* pi = value_as<VPi>(ty)) {
      ValuePtr x = vs::fresh_var(pi->dom, depth);
      return tm::lam(quote(depth + 1, apply_closure(pi->cod, x), apply(v, x)));
    }
    if (const auto* sg = value_as<VSigma>(ty)) {
      ValuePtr a = first(v);
      return tm::pair(quote(depth, sg->fst, a),
                      quote(depth, apply_closure(sg->snd, a), second(v)));
    }
    if (const auto* ext = value_as<VExtTy>(ty))
      return tm::in_s(quote(depth, ext->base, out_s(v)));
    if (const auto* pty = value_as<VProjExtTy>(ty))
      return tm::in_s(quote(depth, vs::make(VRecordTy{pty->record}), out_s(v)));
    if (value_as<VType>(ty)) return quote_type(depth, v);
    if (value_as<VNat>(ty)) {
      if (value_as<VZero>(v)) return tm::zero();
      if (const auto* s = value_as<VSuc>(v)) return tm::suc(quote(depth, ty, s->pred));
      if (const auto* neu = value_as<VNeutral>(v)) return quote_neutral(depth, neu->neutral);
      throw KernelBug("quote: ill-formed natural");
    }
    if (const auto* rt = value_as<VRecordTy>(ty)) {
      if (const auto* rec = value_as<VNewRecord>(v)) {
        const RecordDecl* decl = sig_.find_record(rt->name);
        if (!decl || decl->fields.size() != rec->fields.size())
          throw KernelBug("quote: ill-formed record literal");
        std::vector<std::pair<std::string, TermPtr>> fields;
        for (std::size_t i = 0; i < rec->fields.size(); ++i) {
          ValuePtr fty = field_type(*decl, static_cast<int>(i),
                                    [&](int j) { return rec->fields[j].second; });
          fields.emplace_back(rec->fields[i].first, quote(depth, fty, rec->fields[i].second));
        }
        return tm::new_record(rt->name, std::move(fields));
      }
      if (const auto* neu = value_as<VNeutral>(v)) return quote_neutral(depth, neu->neutral);
      throw KernelBug("quote: ill-formed record value");
    }
    // Opaque (blocked) type: a clause may have fired while the type alias
    // stayed folded, so canonical values can appear here. Read them back
    // structurally; only lambdas are unrepresentable without a domain.
    if (value_as<VNeutral>(ty)) return quote_opaque(depth, v);
    throw KernelBug("quote: not a type");
  }

  TermPtr quote_opaque(int depth, const ValuePtr& v) const {
    if (const auto* neu = value_as<VNeutral>(v)) return quote_neutral(depth, neu->neutral);
    if (value_as<VZero>(v)) return tm::zero();
    if (const auto* s = value_as<VSuc>(v)) return tm::suc(quote_opaque(depth, s->pred));
    if (const auto* i = value_as<VInS>(v)) return tm::in_s(quote_opaque(depth, i->body));
    if (const auto* p = value_as<VPair>(v))
      return tm::pair(quote_opaque(depth, p->first), quote_opaque(depth, p->second));
    if (const auto* rec = value_as<VNewRecord>(v))
      return quote(depth, vs::make(VRecordTy{rec->record}), v);
    if (value_as<VType>(v) || value_as<VNat>(v) || value_as<VPi>(v) ||
        value_as<VSigma>(v) || value_as<VRecordTy>(v) || value_as<VExtTy>(v) ||
        value_as<VProjExtTy>(v))
      return quote_type(depth, v);
    throw KernelBug("quote: lambda at an opaque type");
  }

  TermPtr quote_type(int depth, const ValuePtr& v) const {
    if (value_as<VType>(v)) return tm::type();
    if (value_as<VNat>(v)) return tm::nat();
    if (const auto* pi = value_as<VPi>(v)) {
      TermPtr dom = quote_type(depth, pi->dom);
      ValuePtr x = vs::fresh_var(pi->dom, depth);
      return tm::pi(dom, quote_type(depth + 1, apply_closure(pi->cod, x)));
    }
    if (const auto* sg = value_as<VSigma>(v)) {
      TermPtr fst = quote_type(depth, sg->fst);
      ValuePtr x = vs::fresh_var(sg->fst, depth);
      return tm::sigma(fst, quote_type(depth + 1, apply_closure(sg->snd, x)));
    }
    if (const auto* rt = value_as<VRecordTy>(v)) return tm::record_ty(rt->name);
    if (const auto* ext = value_as<VExtTy>(v)) {
      std::vector<std::pair<Prop, TermPtr>> clauses;
      for (const auto& [p, u] : ext->clauses)
        clauses.emplace_back(p, quote(depth, ext->base, u));
      return tm::ext_ty(quote_type(depth, ext->base), std::move(clauses));
    }
    if (const auto* pty = value_as<VProjExtTy>(v)) {
      const RecordDecl* decl = sig_.find_record(pty->record);
      if (!decl) throw KernelBug("quote: unknown record '" + pty->record + "'");
      std::vector<std::pair<std::string, TermPtr>> clauses;
      for (const auto& [f, u] : pty->clauses) {
        int idx = decl->field_index(f);
        if (idx < 0) throw KernelBug("quote: unknown field '" + f + "'");
        ValuePtr fty = field_type(*decl, idx, [&](int j) -> ValuePtr {
          for (const auto& [g, w] : pty->clauses)
            if (g == decl->fields[j].name) return w;
          return nullptr;  // unspecified; unreachable for well-formed patches
        });
        clauses.emplace_back(f, quote(depth, fty, u));
      }
      return tm::proj_ext_ty(pty->record, std::move(clauses));
    }
    if (const auto* neu = value_as<VNeutral>(v)) return quote_neutral(depth, neu->neutral);
    throw KernelBug("quote: value is not a type");
  }

  TermPtr quote_neutral(int depth, const NeutralPtr& n) const {
    return std::visit(
        [&](const auto& x) -> TermPtr {
          using N = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<N, NVar>) {
            if (x.level < 0 || x.level >= depth)
              throw KernelBug("quote: variable level out of range");
            return tm::var(depth - 1 - x.level);
          } else if constexpr (std::is_same_v<N, NDef>) {
            return tm::defref(x.name);
          } else if constexpr (std::is_same_v<N, NApp>) {
            return tm::app(quote_neutral(depth, x.fn), quote(depth, x.arg_type, x.arg));
          } else if constexpr (std::is_same_v<N, NFst>) {
            return tm::fst(quote_neutral(depth, x.target));
          } else if constexpr (std::is_same_v<N, NSnd>) {
            return tm::snd(quote_neutral(depth, x.target));
          } else if constexpr (std::is_same_v<N, NNatRec>) {
            ValuePtr motive_ty = nat_to_type();
            return tm::natrec(quote(depth, motive_ty, x.motive),
                              quote(depth, apply(x.motive, vs::zero()), x.base),
                              quote(depth, step_type(x.motive), x.step),
                              quote_neutral(depth, x.target));
          } else if constexpr (std::is_same_v<N, NFieldProj>) {
            return tm::field_proj(quote_neutral(depth, x.target), x.field);
          } else if constexpr (std::is_same_v<N, NOutS>) {
            return tm::out_s(quote_neutral(depth, x.target));
          } else {
            throw KernelBug("quote: unhandled neutral");
          }
        },
        n->node);
  }

  // Nat -> Type
  static ValuePtr nat_to_type() {
    return vs::make(VPi{vs::nat(), Closure{{}, tm::type()}});
  }

  // (n : Nat) -> P n -> P (suc n), given the motive value P
  static ValuePtr step_type(const ValuePtr& motive) {
    Closure cod{{motive},
                tm::pi(tm::app(tm::var(1), tm::var(0)),
                       tm::app(tm::var(2), tm::suc(tm::var(1))))};
    return vs::make(VPi{vs::nat(), std::move(cod)});
  }

 private:
  ValuePtr neutral_proj(const std::string& record, const ValuePtr& v,
                        const NeutralPtr& n, const std::string& field) const {
    const RecordDecl* rec = sig_.find_record(record);
    if (!rec) throw KernelBug("projection: unknown record '" + record + "'");
    int idx = rec->field_index(field);
    if (idx < 0) throw KernelBug("projection: unknown field '" + field + "'");
    ValuePtr fty = field_type(*rec, idx, [&](int j) { return field_proj(v, rec->fields[j].name); });
    return vs::neutral(fty, vs::make_neutral(NFieldProj{n, field}));
  }

  const Signature& sig_;
  Restriction restr_;
  mutable std::map<std::string, ValuePtr> defref_memo_;
};

// Normal form of t relative to ctx's restriction: evaluate under the
// context's environment of fresh neutrals, then read back at `ty`.
inline TermPtr normalize(const Signature& sig, const Context& ctx,
                         const TermPtr& t, const ValuePtr& ty) {
  Evaluator ev(sig, ctx.restriction);
  return ev.quote(ctx.depth(), ty, ev.eval(ctx.env, t));
}

// Context restriction: re-close the atom set and rebuild the telescope's
// type values (and fresh-variable environment) under the larger restriction.
inline Context restrict_context(const Signature& sig, const Context& ctx, const Prop& p) {
  std::set<AtomId> atoms = ctx.restriction.atoms;
  if (!p.is_truth()) atoms.insert(p.atom_id());
  Restriction closed = sig.close(atoms);
  if (closed == ctx.restriction) return ctx;
  Context out;
  out.restriction = std::move(closed);
  Evaluator ev(sig, out.restriction);
  for (std::size_t i = 0; i < ctx.telescope.size(); ++i) {
    const ContextEntry& e = ctx.telescope[i];
    ValuePtr tv = ev.eval(out.env, e.type_term);
    out.env.push_back(vs::fresh_var(tv, static_cast<int>(i)));
    out.telescope.push_back({e.name, e.type_term, tv});
  }
  return out;
}

}  // namespace extt
