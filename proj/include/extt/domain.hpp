#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "extt/syntax.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Semantic domain for normalization by evaluation.
//
// Values use de Bruijn levels for free variables; closures pair a core term
// with the environment it was built in. Neutrals carry their type so that
// type-directed computation (clause firing, projective projection) and eta
// read-back are possible.
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct Neutral;
using NeutralPtr = std::shared_ptr<const Neutral>;

using Env = std::vector<ValuePtr>;

struct Closure {
  Env env;
  TermPtr body;  // scoped at env.size() + 1
};

struct VType {};
struct VNat {};
struct VZero {};
struct VSuc { ValuePtr pred; };
struct VPi { ValuePtr dom; Closure cod; };
struct VLam { Closure body; };
struct VSigma { ValuePtr fst; Closure snd; };
struct VPair { ValuePtr first, second; };
struct VRecordTy { std::string name; };
struct VNewRecord {
  std::string record;
  std::vector<std::pair<std::string, ValuePtr>> fields;
};
struct VExtTy {
  ValuePtr base;
  std::vector<std::pair<Prop, ValuePtr>> clauses;
};
struct VInS { ValuePtr body; };
struct VProjExtTy {
  std::string record;
  std::vector<std::pair<std::string, ValuePtr>> clauses;
};
struct VNeutral {
  ValuePtr type;
  NeutralPtr neutral;
};

struct Value {
  using Node = std::variant<VType, VNat, VZero, VSuc, VPi, VLam, VSigma, VPair,
                            VRecordTy, VNewRecord, VExtTy, VInS, VProjExtTy,
                            VNeutral>;
  Node node;
};

// Blocked computations. NDef(f) appears only when the active restriction
// does not entail phi_f; NOutS(n) only when no clause of n's extension type
// is entailed.
struct NVar { int level; };
struct NDef { std::string name; };
struct NApp {
  NeutralPtr fn;
  ValuePtr arg;
  ValuePtr arg_type;  // the Pi domain, kept for read-back
};
struct NFst { NeutralPtr target; };
struct NSnd { NeutralPtr target; };
struct NNatRec {
  ValuePtr motive, base, step;
  NeutralPtr target;
};
struct NFieldProj {
  NeutralPtr target;
  std::string field;
};
struct NOutS {
  NeutralPtr target;
  ValuePtr target_type;  // the extension type of the target, kept so record
                         // projection can still fire specified clauses
};

struct Neutral {
  using Node = std::variant<NVar, NDef, NApp, NFst, NSnd, NNatRec, NFieldProj, NOutS>;
  Node node;
};

template <class T>
const T* value_as(const ValuePtr& v) {
  return std::get_if<T>(&v->node);
}
template <class T>
const T* neutral_as(const NeutralPtr& n) {
  return std::get_if<T>(&n->node);
}

namespace vs {
inline ValuePtr make(Value::Node n) { return std::make_shared<Value>(Value{std::move(n)}); }
inline NeutralPtr make_neutral(Neutral::Node n) {
  return std::make_shared<Neutral>(Neutral{std::move(n)});
}
inline ValuePtr type() { return make(VType{}); }
inline ValuePtr nat() { return make(VNat{}); }
inline ValuePtr zero() { return make(VZero{}); }
inline ValuePtr suc(ValuePtr p) { return make(VSuc{std::move(p)}); }
inline ValuePtr neutral(ValuePtr ty, NeutralPtr n) {
  return make(VNeutral{std::move(ty), std::move(n)});
}
inline ValuePtr fresh_var(ValuePtr ty, int level) {
  return neutral(std::move(ty), make_neutral(NVar{level}));
}
}  // namespace vs

// ---------------------------------------------------------------------------
// Typing context: a telescope of typed variables plus the active restriction.
//
// Each entry keeps both the type value and the type as a (quoted) core term;
// the term is what lets us rebuild the telescope under a larger restriction
// when checking clause boundaries.
// ---------------------------------------------------------------------------

struct ContextEntry {
  std::string name;
  TermPtr type_term;   // scoped at this entry's depth
  ValuePtr type_value; // evaluated under the context's restriction
};

struct Context {
  std::vector<ContextEntry> telescope;
  Env env;  // fresh neutral for each telescope entry
  Restriction restriction;

  int depth() const { return static_cast<int>(telescope.size()); }

  Context bound(std::string name, TermPtr type_term, ValuePtr type_value) const {
    Context out = *this;
    out.env.push_back(vs::fresh_var(type_value, depth()));
    out.telescope.push_back({std::move(name), std::move(type_term), std::move(type_value)});
    return out;
  }

  const ContextEntry* lookup(const std::string& name, int* index_out) const {
    for (int i = depth() - 1; i >= 0; --i) {
      if (telescope[i].name == name) {
        *index_out = depth() - 1 - i;  // de Bruijn index
        return &telescope[i];
      }
    }
    return nullptr;
  }
};

}  // namespace extt
