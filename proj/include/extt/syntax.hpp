#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "extt/diagnostics.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Unfolding propositions
// ---------------------------------------------------------------------------

using AtomId = std::uint32_t;

struct Atom {
  AtomId id = 0;
  std::string name;
};

// A proposition of the strict universe: the constant truth or a named atom.
class Prop {
 public:
  static Prop truth() { return Prop(std::nullopt); }
  static Prop atom(AtomId id) { return Prop(id); }

  bool is_truth() const { return !atom_; }
  AtomId atom_id() const { return *atom_; }

  friend bool operator==(const Prop& a, const Prop& b) { return a.atom_ == b.atom_; }
  friend bool operator<(const Prop& a, const Prop& b) { return a.atom_ < b.atom_; }

 private:
  explicit Prop(std::optional<AtomId> a) : atom_(a) {}
  std::optional<AtomId> atom_;
};

// A set of atoms assumed true. Restrictions used for evaluation or
// conversion are closed under the signature's implication edges; closure
// is computed by Signature::close.
struct Restriction {
  std::set<AtomId> atoms;

  bool contains(AtomId a) const { return atoms.count(a) != 0; }
  bool subset_of(const Restriction& other) const {
    for (AtomId a : atoms)
      if (!other.contains(a)) return false;
    return true;
  }
  friend bool operator==(const Restriction& a, const Restriction& b) {
    return a.atoms == b.atoms;
  }
};

// ---------------------------------------------------------------------------
// Core terms (de Bruijn indices)
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct TVar { int index; };
struct TType {};
struct TPi { TermPtr dom, cod; };
struct TLam { TermPtr body; };
struct TApp { TermPtr fn, arg; };
struct TSigma { TermPtr fst, snd; };
struct TPair { TermPtr first, second; };
struct TFst { TermPtr target; };
struct TSnd { TermPtr target; };
struct TNat {};
struct TZero {};
struct TSuc { TermPtr pred; };
struct TNatRec { TermPtr motive, base, step, target; };
struct TDefRef { std::string name; };
struct TRecordTy { std::string name; };
struct TNewRecord {
  std::string record;
  std::vector<std::pair<std::string, TermPtr>> fields;
};
struct TFieldProj {
  TermPtr target;
  std::string field;
};
struct TExtTy {
  TermPtr base;
  std::vector<std::pair<Prop, TermPtr>> clauses;
};
struct TInS { TermPtr body; };
struct TOutS { TermPtr body; };
struct TProjExtTy {
  std::string record;
  std::vector<std::pair<std::string, TermPtr>> clauses;
};

struct Term {
  using Node = std::variant<TVar, TType, TPi, TLam, TApp, TSigma, TPair, TFst,
                            TSnd, TNat, TZero, TSuc, TNatRec, TDefRef,
                            TRecordTy, TNewRecord, TFieldProj, TExtTy, TInS,
                            TOutS, TProjExtTy>;
  Node node;
};

template <class T>
const T* term_as(const TermPtr& t) {
  return std::get_if<T>(&t->node);
}

// Shorthand constructors; tests and the elaborator lean on these heavily.
namespace tm {
inline TermPtr make(Term::Node n) { return std::make_shared<Term>(Term{std::move(n)}); }
inline TermPtr var(int i) { return make(TVar{i}); }
inline TermPtr type() { return make(TType{}); }
inline TermPtr pi(TermPtr d, TermPtr c) { return make(TPi{std::move(d), std::move(c)}); }
inline TermPtr lam(TermPtr b) { return make(TLam{std::move(b)}); }
inline TermPtr app(TermPtr f, TermPtr a) { return make(TApp{std::move(f), std::move(a)}); }
inline TermPtr sigma(TermPtr f, TermPtr s) { return make(TSigma{std::move(f), std::move(s)}); }
inline TermPtr pair(TermPtr a, TermPtr b) { return make(TPair{std::move(a), std::move(b)}); }
inline TermPtr fst(TermPtr t) { return make(TFst{std::move(t)}); }
inline TermPtr snd(TermPtr t) { return make(TSnd{std::move(t)}); }
inline TermPtr nat() { return make(TNat{}); }
inline TermPtr zero() { return make(TZero{}); }
inline TermPtr suc(TermPtr t) { return make(TSuc{std::move(t)}); }
inline TermPtr natrec(TermPtr m, TermPtr b, TermPtr s, TermPtr t) {
  return make(TNatRec{std::move(m), std::move(b), std::move(s), std::move(t)});
}
inline TermPtr defref(std::string n) { return make(TDefRef{std::move(n)}); }
inline TermPtr record_ty(std::string n) { return make(TRecordTy{std::move(n)}); }
inline TermPtr new_record(std::string r, std::vector<std::pair<std::string, TermPtr>> fs) {
  return make(TNewRecord{std::move(r), std::move(fs)});
}
inline TermPtr field_proj(TermPtr t, std::string f) {
  return make(TFieldProj{std::move(t), std::move(f)});
}
inline TermPtr ext_ty(TermPtr b, std::vector<std::pair<Prop, TermPtr>> cs) {
  return make(TExtTy{std::move(b), std::move(cs)});
}
inline TermPtr in_s(TermPtr t) { return make(TInS{std::move(t)}); }
inline TermPtr out_s(TermPtr t) { return make(TOutS{std::move(t)}); }
inline TermPtr proj_ext_ty(std::string r, std::vector<std::pair<std::string, TermPtr>> cs) {
  return make(TProjExtTy{std::move(r), std::move(cs)});
}
inline TermPtr numeral(int n) {
  TermPtr t = zero();
  for (int i = 0; i < n; ++i) t = suc(t);
  return t;
}
}  // namespace tm

// True iff every variable index in t is bounded by its binder depth plus
// `depth`. Names are not resolved; this is pure scoping.
inline bool well_scoped(const TermPtr& t, int depth) {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TVar>) {
          return n.index >= 0 && n.index < depth;
        } else if constexpr (std::is_same_v<N, TPi>) {
          return well_scoped(n.dom, depth) && well_scoped(n.cod, depth + 1);
        } else if constexpr (std::is_same_v<N, TLam>) {
          return well_scoped(n.body, depth + 1);
        } else if constexpr (std::is_same_v<N, TSigma>) {
          return well_scoped(n.fst, depth) && well_scoped(n.snd, depth + 1);
        } else if constexpr (std::is_same_v<N, TApp>) {
          return well_scoped(n.fn, depth) && well_scoped(n.arg, depth);
        } else if constexpr (std::is_same_v<N, TPair>) {
          return well_scoped(n.first, depth) && well_scoped(n.second, depth);
        } else if constexpr (std::is_same_v<N, TFst>) {
          return well_scoped(n.target, depth);
        } else if constexpr (std::is_same_v<N, TSnd>) {
          return well_scoped(n.target, depth);
        } else if constexpr (std::is_same_v<N, TSuc>) {
          return well_scoped(n.pred, depth);
        } else if constexpr (std::is_same_v<N, TNatRec>) {
          return well_scoped(n.motive, depth) && well_scoped(n.base, depth) &&
                 well_scoped(n.step, depth) && well_scoped(n.target, depth);
        } else if constexpr (std::is_same_v<N, TNewRecord>) {
          for (const auto& [_, ft] : n.fields)
            if (!well_scoped(ft, depth)) return false;
          return true;
        } else if constexpr (std::is_same_v<N, TFieldProj>) {
          return well_scoped(n.target, depth);
        } else if constexpr (std::is_same_v<N, TExtTy>) {
          if (!well_scoped(n.base, depth)) return false;
          for (const auto& [_, u] : n.clauses)
            if (!well_scoped(u, depth)) return false;
          return true;
        } else if constexpr (std::is_same_v<N, TInS>) {
          return well_scoped(n.body, depth);
        } else if constexpr (std::is_same_v<N, TOutS>) {
          return well_scoped(n.body, depth);
        } else if constexpr (std::is_same_v<N, TProjExtTy>) {
          for (const auto& [_, u] : n.clauses)
            if (!well_scoped(u, depth)) return false;
          return true;
        } else {
          return true;  // leaves
        }
      },
      t->node);
}

// True iff variable `index` occurs free in t.
inline bool occurs_var(const TermPtr& t, int index) {
  return std::visit(
      [&](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TVar>) {
          return n.index == index;
        } else if constexpr (std::is_same_v<N, TPi>) {
          return occurs_var(n.dom, index) || occurs_var(n.cod, index + 1);
        } else if constexpr (std::is_same_v<N, TLam>) {
          return occurs_var(n.body, index + 1);
        } else if constexpr (std::is_same_v<N, TSigma>) {
          return occurs_var(n.fst, index) || occurs_var(n.snd, index + 1);
        } else if constexpr (std::is_same_v<N, TApp>) {
          return occurs_var(n.fn, index) || occurs_var(n.arg, index);
        } else if constexpr (std::is_same_v<N, TPair>) {
          return occurs_var(n.first, index) || occurs_var(n.second, index);
        } else if constexpr (std::is_same_v<N, TFst>) {
          return occurs_var(n.target, index);
        } else if constexpr (std::is_same_v<N, TSnd>) {
          return occurs_var(n.target, index);
        } else if constexpr (std::is_same_v<N, TSuc>) {
          return occurs_var(n.pred, index);
        } else if constexpr (std::is_same_v<N, TNatRec>) {
          return occurs_var(n.motive, index) || occurs_var(n.base, index) ||
                 occurs_var(n.step, index) || occurs_var(n.target, index);
        } else if constexpr (std::is_same_v<N, TNewRecord>) {
          for (const auto& [_, ft] : n.fields)
            if (occurs_var(ft, index)) return true;
          return false;
        } else if constexpr (std::is_same_v<N, TFieldProj>) {
          return occurs_var(n.target, index);
        } else if constexpr (std::is_same_v<N, TExtTy>) {
          if (occurs_var(n.base, index)) return true;
          for (const auto& [_, u] : n.clauses)
            if (occurs_var(u, index)) return true;
          return false;
        } else if constexpr (std::is_same_v<N, TInS>) {
          return occurs_var(n.body, index);
        } else if constexpr (std::is_same_v<N, TOutS>) {
          return occurs_var(n.body, index);
        } else if constexpr (std::is_same_v<N, TProjExtTy>) {
          for (const auto& [_, u] : n.clauses)
            if (occurs_var(u, index)) return true;
          return false;
        } else {
          return false;  // leaves
        }
      },
      t->node);
}

// Structural (alpha) equality; de Bruijn representation makes this a plain
// tree comparison.
inline bool structural_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using N = std::decay_t<decltype(x)>;
        const auto& y = std::get<N>(b->node);
        if constexpr (std::is_same_v<N, TVar>) {
          return x.index == y.index;
        } else if constexpr (std::is_same_v<N, TPi>) {
          return structural_eq(x.dom, y.dom) && structural_eq(x.cod, y.cod);
        } else if constexpr (std::is_same_v<N, TLam>) {
          return structural_eq(x.body, y.body);
        } else if constexpr (std::is_same_v<N, TApp>) {
          return structural_eq(x.fn, y.fn) && structural_eq(x.arg, y.arg);
        } else if constexpr (std::is_same_v<N, TSigma>) {
          return structural_eq(x.fst, y.fst) && structural_eq(x.snd, y.snd);
        } else if constexpr (std::is_same_v<N, TPair>) {
          return structural_eq(x.first, y.first) && structural_eq(x.second, y.second);
        } else if constexpr (std::is_same_v<N, TFst>) {
          return structural_eq(x.target, y.target);
        } else if constexpr (std::is_same_v<N, TSnd>) {
          return structural_eq(x.target, y.target);
        } else if constexpr (std::is_same_v<N, TSuc>) {
          return structural_eq(x.pred, y.pred);
        } else if constexpr (std::is_same_v<N, TNatRec>) {
          return structural_eq(x.motive, y.motive) && structural_eq(x.base, y.base) &&
                 structural_eq(x.step, y.step) && structural_eq(x.target, y.target);
        } else if constexpr (std::is_same_v<N, TDefRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, TRecordTy>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<N, TNewRecord>) {
          if (x.record != y.record || x.fields.size() != y.fields.size()) return false;
          for (std::size_t i = 0; i < x.fields.size(); ++i)
            if (x.fields[i].first != y.fields[i].first ||
                !structural_eq(x.fields[i].second, y.fields[i].second))
              return false;
          return true;
        } else if constexpr (std::is_same_v<N, TFieldProj>) {
          return x.field == y.field && structural_eq(x.target, y.target);
        } else if constexpr (std::is_same_v<N, TExtTy>) {
          if (!structural_eq(x.base, y.base) || x.clauses.size() != y.clauses.size())
            return false;
          for (std::size_t i = 0; i < x.clauses.size(); ++i)
            if (!(x.clauses[i].first == y.clauses[i].first) ||
                !structural_eq(x.clauses[i].second, y.clauses[i].second))
              return false;
          return true;
        } else if constexpr (std::is_same_v<N, TInS>) {
          return structural_eq(x.body, y.body);
        } else if constexpr (std::is_same_v<N, TOutS>) {
          return structural_eq(x.body, y.body);
        } else if constexpr (std::is_same_v<N, TProjExtTy>) {
          if (x.record != y.record || x.clauses.size() != y.clauses.size()) return false;
          for (std::size_t i = 0; i < x.clauses.size(); ++i)
            if (x.clauses[i].first != y.clauses[i].first ||
                !structural_eq(x.clauses[i].second, y.clauses[i].second))
              return false;
          return true;
        } else {
          return true;  // leaves
        }
      },
      a->node);
}

// ---------------------------------------------------------------------------
// Declarations and the global signature
// ---------------------------------------------------------------------------

struct DefDecl {
  std::string name;
  std::vector<std::string> unfold_set;
  TermPtr type;  // closed, checked at Type under the unfold restriction
  TermPtr body;  // closed, checked against `type` under the same restriction
  Atom atom;     // the definition's unfolding atom phi_<name>
};

struct RecordField {
  std::string name;
  TermPtr type;  // scoped over the earlier fields of the telescope
};

struct RecordDecl {
  std::string name;
  std::vector<RecordField> fields;

  int field_index(const std::string& f) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == f) return static_cast<int>(i);
    return -1;
  }
};

struct AtomDeclInfo {
  std::string name;
  Atom atom;
};

struct Declaration {
  std::variant<DefDecl, RecordDecl, AtomDeclInfo> decl;
};

// The global environment: declarations in dependency order, the atom table
// and the implication graph between atoms. Built single-threaded by the
// elaborator; immutable afterwards.
class Signature {
 public:
  // --- atoms and implications (the prop-logic surface) ---

  Atom declare_atom(const std::string& name, Span span = {}) {
    if (atoms_by_name_.count(name))
      throw CheckError(codes::duplicate_atom, span, "atom '" + name + "' is already declared");
    Atom a{next_atom_id_++, name};
    atoms_by_name_.emplace(name, a);
    atom_names_.emplace(a.id, name);
    return a;
  }

  void add_implication(AtomId from, AtomId to) {
    require_atom(from);
    require_atom(to);
    edges_[from].insert(to);  // idempotent by construction
  }

  bool has_atom(const std::string& name) const { return atoms_by_name_.count(name) != 0; }
  bool knows_atom(AtomId id) const { return atom_names_.count(id) != 0; }

  const Atom* find_atom(const std::string& name) const {
    auto it = atoms_by_name_.find(name);
    return it == atoms_by_name_.end() ? nullptr : &it->second;
  }

  const std::string& atom_name(AtomId id) const {
    auto it = atom_names_.find(id);
    if (it == atom_names_.end()) throw KernelBug("unknown atom id");
    return it->second;
  }

  std::set<AtomId> all_atoms() const {
    std::set<AtomId> out;
    for (const auto& [id, _] : atom_names_) out.insert(id);
    return out;
  }

  const std::map<AtomId, std::set<AtomId>>& implications() const { return edges_; }

  // Smallest superset of `atoms` closed under the implication edges.
  Restriction close(const std::set<AtomId>& atoms) const {
    for (AtomId a : atoms) require_atom(a);
    Restriction r;
    std::vector<AtomId> queue(atoms.begin(), atoms.end());
    r.atoms = atoms;
    while (!queue.empty()) {
      AtomId a = queue.back();
      queue.pop_back();
      auto it = edges_.find(a);
      if (it == edges_.end()) continue;
      for (AtomId b : it->second)
        if (r.atoms.insert(b).second) queue.push_back(b);
    }
    return r;
  }

  Restriction close(const Restriction& r) const { return close(r.atoms); }

  // True iff p is the truth proposition or p's atom is reachable from some
  // atom of r (zero or more implication steps). Restrictions are kept
  // closed, so reachability is membership after closure.
  bool entails(const Restriction& r, const Prop& p) const {
    if (p.is_truth()) return true;
    require_atom(p.atom_id());
    if (r.contains(p.atom_id())) return true;
    return close(r.atoms).contains(p.atom_id());
  }

  // --- declarations ---

  bool has_name(const std::string& name) const { return decl_index_.count(name) != 0; }

  void add(Declaration d) {
    const std::string& name = std::visit([](const auto& x) -> const std::string& { return x.name; }, d.decl);
    if (has_name(name))
      throw CheckError(codes::duplicate_name, {}, "name '" + name + "' is already declared");
    decl_index_.emplace(name, decls_.size());
    decls_.push_back(std::move(d));
  }

  const std::vector<Declaration>& decls() const { return decls_; }

  const DefDecl* find_def(const std::string& name) const {
    return find_as<DefDecl>(name);
  }
  const RecordDecl* find_record(const std::string& name) const {
    return find_as<RecordDecl>(name);
  }
  const AtomDeclInfo* find_atom_decl(const std::string& name) const {
    return find_as<AtomDeclInfo>(name);
  }

 private:
  template <class T>
  const T* find_as(const std::string& name) const {
    auto it = decl_index_.find(name);
    if (it == decl_index_.end()) return nullptr;
    return std::get_if<T>(&decls_[it->second].decl);
  }

  void require_atom(AtomId id) const {
    if (!atom_names_.count(id))
      throw CheckError(codes::unknown_atom, {}, "unknown atom id " + std::to_string(id));
  }

  std::vector<Declaration> decls_;
  std::map<std::string, std::size_t> decl_index_;
  std::map<std::string, Atom> atoms_by_name_;
  std::map<AtomId, std::string> atom_names_;
  std::map<AtomId, std::set<AtomId>> edges_;
  AtomId next_atom_id_ = 0;
};

}  // namespace extt
