#pragma once

#include <stdexcept>
#include <string>

namespace extt {

// Source location; lines and columns are 1-based, zero meaning "unknown".
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
};

// Stable diagnostic codes. The CLI contract promises these strings do not
// change between releases, so tests may match on them exactly.
namespace codes {
inline constexpr const char* parse = "E-PARSE";
inline constexpr const char* scope = "E-SCOPE";
inline constexpr const char* cannot_infer = "E-CANNOT-INFER";
inline constexpr const char* type_mismatch = "E-TYPE-MISMATCH";
inline constexpr const char* boundary = "E-BOUNDARY";
inline constexpr const char* proj_boundary = "E-PROJ-BOUNDARY";
inline constexpr const char* clause_ill_typed = "E-CLAUSE-ILL-TYPED";
inline constexpr const char* clauses_incompatible = "E-CLAUSES-INCOMPATIBLE";
inline constexpr const char* duplicate_atom = "E-DUP-ATOM";
inline constexpr const char* unknown_atom = "E-UNKNOWN-ATOM";
inline constexpr const char* duplicate_name = "E-DUP-NAME";
inline constexpr const char* unknown_unfold = "E-UNKNOWN-UNFOLD";
inline constexpr const char* unknown_field = "E-UNKNOWN-FIELD";
inline constexpr const char* duplicate_field = "E-DUP-FIELD";
inline constexpr const char* missing_field = "E-MISSING-FIELD";
inline constexpr const char* field_type = "E-FIELD-TYPE";
inline constexpr const char* patch_positional = "E-PATCH-POSITIONAL";
}  // namespace codes

// A user-facing failure: ill-scoped, ill-typed or ill-formed input.
// Carries a stable code plus the span of the offending source node.
struct CheckError : std::runtime_error {
  std::string code;
  Span span;

  CheckError(std::string code_, Span span_, const std::string& message)
      : std::runtime_error(message), code(std::move(code_)), span(span_) {}
};

// An internal invariant violation (ill-formed environment, applying a
// non-function, ...). Never triggered by user input; signals a kernel bug.
struct KernelBug : std::logic_error {
  explicit KernelBug(const std::string& message) : std::logic_error(message) {}
};

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string code;
  std::string file;
  Span span;
  std::string message;

  std::string render() const {
    return code + " " + file + ":" + std::to_string(span.line) + ":" +
           std::to_string(span.col) + " " + message;
  }
};

}  // namespace extt
