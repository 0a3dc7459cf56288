#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "extt/diagnostics.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Surface syntax: named variables, sugar for patching and record literals.
// Every node carries the span it was parsed from.
// ---------------------------------------------------------------------------

struct SurfaceTerm;
using SurfacePtr = std::shared_ptr<const SurfaceTerm>;

struct SProp {
  bool is_truth = false;
  std::string name;  // atom name when not truth
  Span span;
};

struct SAssign {
  std::string field;
  Span span;
  SurfacePtr value;
};

struct SVar { std::string name; };
struct SType {};
struct SNat {};
struct SZero {};
struct SSuc { SurfacePtr arg; };
struct SNatRec { SurfacePtr motive, base, step, target; };
struct SLam { std::string binder; SurfacePtr body; };
struct SApp { SurfacePtr fn, arg; };
struct SPi { std::string binder; SurfacePtr dom, cod; };  // binder "_" for arrows
struct SSigma { std::string binder; SurfacePtr fst, snd; };
struct SPair { SurfacePtr first, second; };
struct SFst { SurfacePtr arg; };
struct SSnd { SurfacePtr arg; };
struct SExtTy {
  SurfacePtr base;
  std::vector<std::pair<SProp, SurfacePtr>> clauses;
};
struct SInS { SurfacePtr arg; };
struct SOutS { SurfacePtr arg; };
struct SPatch {
  std::string head;  // record name, or a term whose value is a record type
  Span head_span;
  std::vector<SAssign> assignments;
};
struct SNew {
  std::string record;
  Span record_span;
  std::vector<SAssign> assignments;
};
struct SFieldProj {
  SurfacePtr target;
  std::string field;
};

struct SurfaceTerm {
  using Node = std::variant<SVar, SType, SNat, SZero, SSuc, SNatRec, SLam, SApp,
                            SPi, SSigma, SPair, SFst, SSnd, SExtTy, SInS, SOutS,
                            SPatch, SNew, SFieldProj>;
  Node node;
  Span span;
};

template <class T>
const T* surface_as(const SurfacePtr& s) {
  return std::get_if<T>(&s->node);
}

inline SurfacePtr surface(SurfaceTerm::Node n, Span sp) {
  return std::make_shared<SurfaceTerm>(SurfaceTerm{std::move(n), sp});
}

// --- declarations ---

struct SurfaceDef {
  std::string name;
  Span name_span;
  std::vector<std::pair<std::string, Span>> unfold;
  SurfacePtr type;
  SurfacePtr body;
};

struct SurfaceRecord {
  struct Field {
    std::string name;
    Span span;
    SurfacePtr type;
  };
  std::string name;
  Span name_span;
  std::vector<Field> fields;
};

struct SurfaceAtomDecl {
  std::string name;
  Span name_span;
};

struct SurfaceDecl {
  std::variant<SurfaceDef, SurfaceRecord, SurfaceAtomDecl> decl;
};

}  // namespace extt
