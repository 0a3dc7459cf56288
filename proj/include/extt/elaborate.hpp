#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "extt/conversion.hpp"
#include "extt/eval.hpp"
#include "extt/pretty.hpp"
#include "extt/surface.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Bidirectional elaboration of surface syntax into core terms.
//
// The three translations:
//   - a reference to a global definition f elaborates to `outS f`, where the
//     stored global has type {A | phi_f |> body}; unfolding is then entirely
//     a question of whether the restriction entails phi_f,
//   - `R { f := u }` and positional `R u` elaborate to projective extension
//     types,
//   - inS/outS are inserted implicitly: check wraps at extension types,
//     infer unwraps when an extension-typed term is used at its base type.
// ---------------------------------------------------------------------------

class Elaborator {
 public:
  explicit Elaborator(Signature& sig) : sig_(sig) {}

  // --- declarations ---

  void check_decl(const SurfaceDecl& d) {
    std::visit([&](const auto& decl) { check_decl_impl(decl); }, d.decl);
  }

  // --- terms ---

  std::pair<TermPtr, ValuePtr> infer(const Context& ctx, const SurfacePtr& s) {
    Evaluator ev(sig_, ctx.restriction);
    if (const auto* v = surface_as<SVar>(s)) {
      int index = 0;
      if (const ContextEntry* entry = ctx.lookup(v->name, &index))
        return {tm::var(index), entry->type_value};
      if (const DefDecl* def = sig_.find_def(v->name))
        return {tm::out_s(tm::defref(v->name)), ev.eval_closed(def->type)};
      if (sig_.find_record(v->name))
        return {tm::record_ty(v->name), vs::type()};
      if (sig_.find_atom_decl(v->name))
        throw CheckError(codes::scope, s->span,
                         "atom '" + v->name + "' cannot be used as a term");
      throw CheckError(codes::scope, s->span, "unbound name '" + v->name + "'");
    }
    if (surface_as<SType>(s)) return {tm::type(), vs::type()};
    if (surface_as<SNat>(s)) return {tm::nat(), vs::type()};
    if (surface_as<SZero>(s)) return {tm::zero(), vs::nat()};
    if (const auto* n = surface_as<SSuc>(s))
      return {tm::suc(check(ctx, n->arg, vs::nat())), vs::nat()};
    if (const auto* n = surface_as<SNatRec>(s)) {
      TermPtr motive = check(ctx, n->motive, Evaluator::nat_to_type());
      ValuePtr motive_v = ev.eval(ctx.env, motive);
      TermPtr base = check(ctx, n->base, ev.apply(motive_v, vs::zero()));
      TermPtr step = check(ctx, n->step, Evaluator::step_type(motive_v));
      TermPtr target = check(ctx, n->target, vs::nat());
      return {tm::natrec(motive, base, step, target),
              ev.apply(motive_v, ev.eval(ctx.env, target))};
    }
    if (const auto* n = surface_as<SPi>(s)) {
      TermPtr dom = check(ctx, n->dom, vs::type());
      Context inner = ctx.bound(n->binder, dom, ev.eval(ctx.env, dom));
      TermPtr cod = check(inner, n->cod, vs::type());
      return {tm::pi(dom, cod), vs::type()};
    }
    if (const auto* n = surface_as<SSigma>(s)) {
      TermPtr fst = check(ctx, n->fst, vs::type());
      Context inner = ctx.bound(n->binder, fst, ev.eval(ctx.env, fst));
      TermPtr snd = check(inner, n->snd, vs::type());
      return {tm::sigma(fst, snd), vs::type()};
    }
    if (const auto* n = surface_as<SFst>(s)) {
      auto [t, ty] = unwrap_ext(infer(ctx, n->arg));
      if (const auto* sg = value_as<VSigma>(ty)) return {tm::fst(t), sg->fst};
      throw mismatch(ctx, s->span, "fst of a non-pair", ty);
    }
    if (const auto* n = surface_as<SSnd>(s)) {
      auto [t, ty] = unwrap_ext(infer(ctx, n->arg));
      if (const auto* sg = value_as<VSigma>(ty))
        return {tm::snd(t), ev.apply_closure(sg->snd, ev.first(ev.eval(ctx.env, t)))};
      throw mismatch(ctx, s->span, "snd of a non-pair", ty);
    }
    if (const auto* n = surface_as<SApp>(s)) return infer_app(ctx, *n, s->span);
    if (const auto* n = surface_as<SExtTy>(s)) return infer_ext_ty(ctx, *n, s->span);
    if (const auto* n = surface_as<SPatch>(s)) return elab_patch(ctx, *n);
    if (const auto* n = surface_as<SNew>(s)) return infer_new(ctx, *n);
    if (const auto* n = surface_as<SOutS>(s)) {
      auto [t, ty] = infer(ctx, n->arg);
      if (const auto* ext = value_as<VExtTy>(ty)) return {tm::out_s(t), ext->base};
      if (const auto* pty = value_as<VProjExtTy>(ty))
        return {tm::out_s(t), vs::make(VRecordTy{pty->record})};
      throw mismatch(ctx, s->span, "outS expects an extension-typed term", ty);
    }
    if (const auto* n = surface_as<SFieldProj>(s)) {
      auto [t, ty] = unwrap_ext(infer(ctx, n->target));
      std::string record;
      if (const auto* rt = value_as<VRecordTy>(ty)) record = rt->name;
      else if (const auto* pty = value_as<VProjExtTy>(ty)) record = pty->record;
      else throw mismatch(ctx, s->span, "projection from a non-record", ty);
      const RecordDecl* rec = sig_.find_record(record);
      if (!rec) throw KernelBug("elaborate: unknown record '" + record + "'");
      int idx = rec->field_index(n->field);
      if (idx < 0)
        throw CheckError(codes::unknown_field, s->span,
                         "record '" + record + "' has no field '" + n->field + "'");
      ValuePtr target_v = ev.eval(ctx.env, t);
      ValuePtr fty = ev.field_type(*rec, idx, [&](int j) {
        return ev.field_proj(target_v, rec->fields[j].name);
      });
      return {tm::field_proj(t, n->field), fty};
    }
    if (surface_as<SLam>(s))
      throw CheckError(codes::cannot_infer, s->span,
                       "cannot infer the type of an unannotated lambda");
    if (surface_as<SPair>(s))
      throw CheckError(codes::cannot_infer, s->span, "cannot infer the type of a pair");
    if (surface_as<SInS>(s))
      throw CheckError(codes::cannot_infer, s->span, "inS needs an expected extension type");
    throw KernelBug("infer: unhandled surface term");
  }

  TermPtr check(const Context& ctx, const SurfacePtr& s, const ValuePtr& expected) {
    Evaluator ev(sig_, ctx.restriction);
    // Extension-type introduction comes first: the wrapped base may itself
    // be a Pi or Sigma, and the intro rule handles the inner term.
    if (value_as<VExtTy>(expected)) return check_ext_intro(ctx, s, expected);
    if (value_as<VProjExtTy>(expected)) return check_proj_ext_intro(ctx, s, expected);
    if (const auto* lam = surface_as<SLam>(s)) {
      const auto* pi = value_as<VPi>(expected);
      if (!pi) throw mismatch(ctx, s->span, "lambda against a non-function type", expected);
      Context inner =
          ctx.bound(lam->binder, ev.quote_type(ctx.depth(), pi->dom), pi->dom);
      TermPtr body = check(inner, lam->body, ev.apply_closure(pi->cod, inner.env.back()));
      return tm::lam(body);
    }
    if (const auto* pr = surface_as<SPair>(s)) {
      const auto* sg = value_as<VSigma>(expected);
      if (!sg) throw mismatch(ctx, s->span, "pair against a non-pair type", expected);
      TermPtr first = check(ctx, pr->first, sg->fst);
      TermPtr second =
          check(ctx, pr->second, ev.apply_closure(sg->snd, ev.eval(ctx.env, first)));
      return tm::pair(first, second);
    }
    if (surface_as<SInS>(s))
      throw mismatch(ctx, s->span, "inS against a non-extension type", expected);

    auto [t, ty] = infer(ctx, s);
    for (;;) {
      if (conv_type(sig_, ctx.restriction, ctx.depth(), ty, expected)) return t;
      if (const auto* ext = value_as<VExtTy>(ty)) {
        t = tm::out_s(t);
        ty = ext->base;
        continue;
      }
      if (const auto* pty = value_as<VProjExtTy>(ty)) {
        t = tm::out_s(t);
        ty = vs::make(VRecordTy{pty->record});
        continue;
      }
      break;
    }
    Evaluator qev(sig_, ctx.restriction);
    throw CheckError(codes::type_mismatch, s->span,
                     "expected " +
                         show_term(sig_, qev.quote_type(ctx.depth(), expected), ctx.depth()) +
                         ", got " +
                         show_term(sig_, qev.quote_type(ctx.depth(), ty), ctx.depth()));
  }

  // Introduction at an extension type: elaborate against the base, then
  // verify every clause boundary under its restriction. A bare term is
  // wrapped implicitly; writing `inS` in the source is optional sugar.
  TermPtr check_ext_intro(const Context& ctx, const SurfacePtr& s, const ValuePtr& expected) {
    const auto* ext = value_as<VExtTy>(expected);
    if (!ext) throw KernelBug("check_ext_intro: expected type is not an extension type");
    const SurfacePtr& inner = surface_as<SInS>(s) ? surface_as<SInS>(s)->arg : s;
    TermPtr v = check(ctx, inner, ext->base);
    Evaluator ev(sig_, ctx.restriction);
    TermPtr base_term = ev.quote_type(ctx.depth(), ext->base);
    for (std::size_t i = 0; i < ext->clauses.size(); ++i) {
      const auto& [p, u] = ext->clauses[i];
      TermPtr u_term = ev.quote(ctx.depth(), ext->base, u);
      Context rctx = restrict_context(sig_, ctx, p);
      Evaluator rev(sig_, rctx.restriction);
      ValuePtr rbase = rev.eval(rctx.env, base_term);
      ValuePtr lhs = rev.eval(rctx.env, v);
      ValuePtr rhs = rev.eval(rctx.env, u_term);
      if (!conv(sig_, rctx.restriction, rctx.depth(), rbase, lhs, rhs))
        throw CheckError(
            codes::boundary, s->span,
            "boundary clause " + std::to_string(i) + " fails: " +
                show_term(sig_, rev.quote(rctx.depth(), rbase, lhs), rctx.depth()) +
                " is not " +
                show_term(sig_, rev.quote(rctx.depth(), rbase, rhs), rctx.depth()) +
                " under " + show_restriction(sig_, rctx.restriction));
    }
    return tm::in_s(v);
  }

  // Introduction at a projective extension type: elaborate at the record
  // type, then verify each specified projection. Elimination is implicit;
  // using such a term where the record is expected inserts outS.
  TermPtr check_proj_ext_intro(const Context& ctx, const SurfacePtr& s,
                               const ValuePtr& expected) {
    const auto* pty = value_as<VProjExtTy>(expected);
    if (!pty) throw KernelBug("check_proj_ext_intro: not a projective type");
    const SurfacePtr& inner = surface_as<SInS>(s) ? surface_as<SInS>(s)->arg : s;
    TermPtr r = check(ctx, inner, vs::make(VRecordTy{pty->record}));
    const RecordDecl* rec = sig_.find_record(pty->record);
    if (!rec) throw KernelBug("check_proj_ext_intro: unknown record");
    Evaluator ev(sig_, ctx.restriction);
    ValuePtr rv = ev.eval(ctx.env, r);
    auto clause_of = [&](const std::string& f) -> ValuePtr {
      for (const auto& [g, u] : pty->clauses)
        if (g == f) return u;
      return nullptr;
    };
    for (const auto& [f, u] : pty->clauses) {
      int idx = rec->field_index(f);
      if (idx < 0) throw KernelBug("check_proj_ext_intro: unknown field");
      ValuePtr fty = ev.field_type(*rec, idx, [&](int j) -> ValuePtr {
        ValuePtr w = clause_of(rec->fields[j].name);
        return w ? w : ev.field_proj(rv, rec->fields[j].name);
      });
      ValuePtr actual = ev.field_proj(rv, f);
      if (!conv(sig_, ctx.restriction, ctx.depth(), fty, actual, u))
        throw CheckError(
            codes::proj_boundary, s->span,
            "field '" + f + "' projects to " +
                show_term(sig_, ev.quote(ctx.depth(), fty, actual), ctx.depth()) +
                ", expected " +
                show_term(sig_, ev.quote(ctx.depth(), fty, u), ctx.depth()));
    }
    return tm::in_s(r);
  }

 private:
  // --- declaration checking ---

  void check_decl_impl(const SurfaceAtomDecl& d) {
    if (sig_.has_name(d.name))
      throw CheckError(codes::duplicate_name, d.name_span,
                       "name '" + d.name + "' is already declared");
    Atom atom = sig_.declare_atom(d.name, d.name_span);
    sig_.add(Declaration{AtomDeclInfo{d.name, atom}});
  }

  void check_decl_impl(const SurfaceRecord& d) {
    if (sig_.has_name(d.name))
      throw CheckError(codes::duplicate_name, d.name_span,
                       "name '" + d.name + "' is already declared");
    Context ctx;
    RecordDecl rec{d.name, {}};
    for (const auto& f : d.fields) {
      for (const auto& g : rec.fields)
        if (g.name == f.name)
          throw CheckError(codes::duplicate_field, f.span,
                           "field '" + f.name + "' is declared twice");
      TermPtr ty = check(ctx, f.type, vs::type());
      ctx = ctx.bound(f.name, ty, Evaluator(sig_, ctx.restriction).eval(ctx.env, ty));
      rec.fields.push_back({f.name, ty});
    }
    sig_.add(Declaration{std::move(rec)});
  }

  void check_decl_impl(const SurfaceDef& d) {
    if (sig_.has_name(d.name))
      throw CheckError(codes::duplicate_name, d.name_span,
                       "name '" + d.name + "' is already declared");
    std::string atom_name = "phi_" + d.name;
    if (sig_.has_atom(atom_name))
      throw CheckError(codes::duplicate_atom, d.name_span,
                       "unfolding atom '" + atom_name + "' is already declared");
    // Resolve the unfold set; entries name earlier definitions or atoms.
    std::set<AtomId> assumed;
    std::vector<std::string> unfold_names;
    for (const auto& [g, gspan] : d.unfold) {
      if (const DefDecl* def = sig_.find_def(g)) {
        assumed.insert(def->atom.id);
      } else if (const AtomDeclInfo* ad = sig_.find_atom_decl(g)) {
        assumed.insert(ad->atom.id);
      } else {
        throw CheckError(codes::unknown_unfold, gspan,
                         "unknown unfold target '" + g + "'");
      }
      unfold_names.push_back(g);
    }
    // The body is checked under the declared unfoldings only; the
    // definition's own atom is allocated afterwards.
    Context ctx;
    ctx.restriction = sig_.close(assumed);
    TermPtr type = check(ctx, d.type, vs::type());
    ValuePtr type_v = Evaluator(sig_, ctx.restriction).eval_closed(type);
    TermPtr body = check(ctx, d.body, type_v);
    Atom atom = sig_.declare_atom(atom_name, d.name_span);
    for (AtomId target : assumed) sig_.add_implication(atom.id, target);
    sig_.add(Declaration{DefDecl{d.name, std::move(unfold_names), type, body, atom}});
  }

  // --- helpers ---

  std::pair<TermPtr, ValuePtr> unwrap_ext(std::pair<TermPtr, ValuePtr> tv) const {
    while (const auto* ext = value_as<VExtTy>(tv.second)) {
      tv.first = tm::out_s(tv.first);
      tv.second = ext->base;
    }
    return tv;
  }

  CheckError mismatch(const Context& ctx, Span span, const std::string& what,
                      const ValuePtr& ty) const {
    Evaluator ev(sig_, ctx.restriction);
    return CheckError(codes::type_mismatch, span,
                      what + ", got " +
                          show_term(sig_, ev.quote_type(ctx.depth(), ty), ctx.depth()));
  }

  Prop resolve_prop(const SProp& p) const {
    if (p.is_truth) return Prop::truth();
    const Atom* atom = sig_.find_atom(p.name);
    if (!atom)
      throw CheckError(codes::unknown_atom, p.span, "unknown atom '" + p.name + "'");
    return Prop::atom(atom->id);
  }

  std::pair<TermPtr, ValuePtr> infer_ext_ty(const Context& ctx, const SExtTy& n, Span span) {
    TermPtr base = check(ctx, n.base, vs::type());
    ValuePtr base_v = Evaluator(sig_, ctx.restriction).eval(ctx.env, base);
    std::vector<std::pair<Prop, TermPtr>> clauses;
    for (std::size_t i = 0; i < n.clauses.size(); ++i) {
      const auto& [sprop, su] = n.clauses[i];
      Prop p = resolve_prop(sprop);
      Context rctx = restrict_context(sig_, ctx, p);
      ValuePtr rbase = Evaluator(sig_, rctx.restriction).eval(rctx.env, base);
      try {
        clauses.emplace_back(p, check(rctx, su, rbase));
      } catch (const CheckError& e) {
        if (e.code == codes::type_mismatch || e.code == codes::cannot_infer ||
            e.code == codes::boundary || e.code == codes::proj_boundary)
          throw CheckError(codes::clause_ill_typed, su->span,
                           "clause " + std::to_string(i) + " is ill-typed: " + e.what());
        throw;
      }
    }
    try {
      check_clauses_compat(sig_, ctx, base_v, clauses);
    } catch (const CheckError& e) {
      if (e.span.line == 0) throw CheckError(e.code, span, e.what());
      throw;
    }
    return {tm::ext_ty(base, std::move(clauses)), vs::type()};
  }

  struct PatchClause {
    int index = 0;  // field position in the record
    TermPtr term;
    ValuePtr value;
  };

  // Shared by named and positional patching: check `value` against field
  // `index`'s type with the already-patched fields substituted in.
  void patch_one(const Context& ctx, const RecordDecl& rec,
                 std::vector<PatchClause>& clauses, int index,
                 const SurfacePtr& value, Span span) {
    for (const auto& c : clauses)
      if (c.index == index)
        throw CheckError(codes::duplicate_field, span,
                         "field '" + rec.fields[index].name + "' is already specified");
    auto specified = [&](int idx) -> const PatchClause* {
      for (const auto& c : clauses)
        if (c.index == idx) return &c;
      return nullptr;
    };
    const TermPtr& fty_term = rec.fields[index].type;
    for (int j = 0; j < index; ++j) {
      int dep = index - 1 - j;
      if (occurs_var(fty_term, j) && !specified(dep))
        throw CheckError(codes::field_type, span,
                         "type of field '" + rec.fields[index].name +
                             "' depends on unspecified field '" +
                             rec.fields[dep].name + "'");
    }
    Evaluator ev(sig_, ctx.restriction);
    ValuePtr fty = ev.field_type(rec, index, [&](int j) -> ValuePtr {
      const PatchClause* c = specified(j);
      return c ? c->value : nullptr;
    });
    TermPtr checked;
    try {
      checked = check(ctx, value, fty);
    } catch (const CheckError& e) {
      if (e.code == codes::type_mismatch || e.code == codes::cannot_infer)
        throw CheckError(codes::field_type, e.span,
                         "field '" + rec.fields[index].name + "': " + e.what());
      throw;
    }
    clauses.push_back({index, checked, ev.eval(ctx.env, checked)});
    std::sort(clauses.begin(), clauses.end(),
              [](const PatchClause& a, const PatchClause& b) { return a.index < b.index; });
  }

  TermPtr patch_term(const RecordDecl& rec, const std::vector<PatchClause>& clauses) const {
    std::vector<std::pair<std::string, TermPtr>> out;
    for (const auto& c : clauses) out.emplace_back(rec.fields[c.index].name, c.term);
    return tm::proj_ext_ty(rec.name, std::move(out));
  }

  // Recover (record, existing clauses) from a term whose value is a record
  // type or an already-patched one, quoting existing clause values back to
  // terms at their field types.
  std::pair<const RecordDecl*, std::vector<PatchClause>> patch_head(
      const Context& ctx, const ValuePtr& head_value, Span span) {
    Evaluator ev(sig_, ctx.restriction);
    if (const auto* rt = value_as<VRecordTy>(head_value)) {
      const RecordDecl* rec = sig_.find_record(rt->name);
      if (!rec) throw KernelBug("patch: unknown record '" + rt->name + "'");
      return {rec, {}};
    }
    if (const auto* pty = value_as<VProjExtTy>(head_value)) {
      const RecordDecl* rec = sig_.find_record(pty->record);
      if (!rec) throw KernelBug("patch: unknown record '" + pty->record + "'");
      std::vector<PatchClause> clauses;
      auto clause_of = [&](const std::string& f) -> ValuePtr {
        for (const auto& [g, u] : pty->clauses)
          if (g == f) return u;
        return nullptr;
      };
      for (const auto& [f, u] : pty->clauses) {
        int idx = rec->field_index(f);
        if (idx < 0) throw KernelBug("patch: unknown field '" + f + "'");
        ValuePtr fty = ev.field_type(*rec, idx, [&](int j) -> ValuePtr {
          return clause_of(rec->fields[j].name);
        });
        clauses.push_back({idx, ev.quote(ctx.depth(), fty, u), u});
      }
      std::sort(clauses.begin(), clauses.end(),
                [](const PatchClause& a, const PatchClause& b) { return a.index < b.index; });
      return {rec, std::move(clauses)};
    }
    throw mismatch(ctx, span, "cannot patch a non-record type", head_value);
  }

  std::pair<TermPtr, ValuePtr> elab_patch(const Context& ctx, const SPatch& n) {
    // The head may be a record name or any term whose value is a record
    // type; an opaque alias stays opaque and cannot be patched.
    ValuePtr head_value;
    if (sig_.find_record(n.head)) {
      head_value = vs::make(VRecordTy{n.head});
    } else {
      SurfacePtr head_var = surface(SVar{n.head}, n.head_span);
      TermPtr head = check(ctx, head_var, vs::type());
      head_value = Evaluator(sig_, ctx.restriction).eval(ctx.env, head);
    }
    auto [rec, clauses] = patch_head(ctx, head_value, n.head_span);
    // Assignments are processed in record declaration order regardless of
    // their source order, so earlier fields are in scope for later types.
    std::vector<std::pair<int, const SAssign*>> ordered;
    for (const auto& a : n.assignments) {
      int idx = rec->field_index(a.field);
      if (idx < 0)
        throw CheckError(codes::unknown_field, a.span,
                         "record '" + rec->name + "' has no field '" + a.field + "'");
      for (const auto& [seen, _] : ordered)
        if (seen == idx)
          throw CheckError(codes::duplicate_field, a.span,
                           "field '" + a.field + "' is assigned twice");
      ordered.emplace_back(idx, &a);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [idx, assign] : ordered)
      patch_one(ctx, *rec, clauses, idx, assign->value, assign->span);
    return {patch_term(*rec, clauses), vs::type()};
  }

  std::pair<TermPtr, ValuePtr> infer_app(const Context& ctx, const SApp& n, Span span) {
    auto [fn, fn_ty] = unwrap_ext(infer(ctx, n.fn));
    Evaluator ev(sig_, ctx.restriction);
    if (const auto* pi = value_as<VPi>(fn_ty)) {
      TermPtr arg = check(ctx, n.arg, pi->dom);
      return {tm::app(fn, arg), ev.apply_closure(pi->cod, ev.eval(ctx.env, arg))};
    }
    if (value_as<VType>(fn_ty)) {
      // Applying a record type (or a patched one) to a term is positional
      // patching; fields are consumed in declaration order and the patched
      // set must be a prefix.
      ValuePtr head_value = ev.eval(ctx.env, fn);
      auto [rec, clauses] = patch_head(ctx, head_value, span);
      for (std::size_t i = 0; i < clauses.size(); ++i)
        if (clauses[i].index != static_cast<int>(i))
          throw CheckError(codes::patch_positional, span,
                           "positional patching requires already-patched fields to "
                           "form a prefix of record '" + rec->name + "'");
      int next = static_cast<int>(clauses.size());
      if (next >= static_cast<int>(rec->fields.size()))
        throw CheckError(codes::unknown_field, span,
                         "record '" + rec->name + "' has no field left to patch");
      patch_one(ctx, *rec, clauses, next, n.arg, n.arg->span);
      return {patch_term(*rec, clauses), vs::type()};
    }
    throw mismatch(ctx, span, "cannot apply a term", fn_ty);
  }

  std::pair<TermPtr, ValuePtr> infer_new(const Context& ctx, const SNew& n) {
    const RecordDecl* rec = sig_.find_record(n.record);
    if (!rec)
      throw CheckError(codes::scope, n.record_span, "unknown record '" + n.record + "'");
    std::vector<const SAssign*> by_field(rec->fields.size(), nullptr);
    for (const auto& a : n.assignments) {
      int idx = rec->field_index(a.field);
      if (idx < 0)
        throw CheckError(codes::unknown_field, a.span,
                         "record '" + n.record + "' has no field '" + a.field + "'");
      if (by_field[idx])
        throw CheckError(codes::duplicate_field, a.span,
                         "field '" + a.field + "' is assigned twice");
      by_field[idx] = &a;
    }
    for (std::size_t i = 0; i < rec->fields.size(); ++i)
      if (!by_field[i])
        throw CheckError(codes::missing_field, n.record_span,
                         "missing field '" + rec->fields[i].name + "' in record literal");
    Evaluator ev(sig_, ctx.restriction);
    std::vector<std::pair<std::string, TermPtr>> fields;
    std::vector<ValuePtr> values;
    for (std::size_t i = 0; i < rec->fields.size(); ++i) {
      ValuePtr fty = ev.field_type(*rec, static_cast<int>(i),
                                   [&](int j) { return values[j]; });
      TermPtr f = check(ctx, by_field[i]->value, fty);
      values.push_back(ev.eval(ctx.env, f));
      fields.emplace_back(rec->fields[i].name, f);
    }
    return {tm::new_record(n.record, std::move(fields)), vs::make(VRecordTy{n.record})};
  }

  Signature& sig_;
};

}  // namespace extt
