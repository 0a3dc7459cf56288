#pragma once

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "extt/surface.hpp"

namespace extt {

// ---------------------------------------------------------------------------
// Lexer and recursive-descent parser for the surface grammar:
//
//   decl ::= "atom" IDENT
//          | "def" IDENT ["unfolding" "(" IDENT,* ")"] ":" term ":=" term
//          | "record" IDENT "where" "{" (IDENT ":" term ";")* "}"
//   term ::= "\" IDENT "." term
//          | "Sig" "(" IDENT ":" term ")" "." term
//          | "(" IDENT ":" term ")" "->" term
//          | app ["->" term]
//   app  ::= atom+                      (left-assoc application)
//   atom ::= "Type" | "Nat" | "zero" | IDENT | IDENT "{" assigns "}"
//          | "suc"/"fst"/"snd"/"inS"/"outS" atom | "natrec" atom atom atom atom
//          | "new" IDENT "{" assigns "}" | "{" term "|" (prop "|>" term),+ "}"
//          | "(" term ")" | "(" term "," term ")"
//   atoms may be followed by ".field" projections; "--" comments to EOL.
// ---------------------------------------------------------------------------

namespace lex {

enum class Tok {
  Ident, KwDef, KwUnfolding, KwAtom, KwRecord, KwWhere, KwNew, KwType, KwNat,
  KwZero, KwSuc, KwNatRec, KwInS, KwOutS, KwFst, KwSnd, KwSig, KwTt,
  LParen, RParen, LBrace, RBrace, Colon, ColonEq, Semi, Comma, Dot,
  Backslash, Arrow, Pipe, Triangle, End,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto here = [&]() { return Span{line, col, line, col}; };
  auto push = [&](Tok k, std::string text, Span sp) {
    sp.end_line = line;
    sp.end_col = col;
    out.push_back({k, std::move(text), sp});
  };
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else { ++col; }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(); continue; }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    Span sp = here();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                src[i] == '_' || src[i] == '\''))
        advance();
      std::string word = src.substr(start, i - start);
      Tok k = Tok::Ident;
      if (word == "def") k = Tok::KwDef;
      else if (word == "unfolding") k = Tok::KwUnfolding;
      else if (word == "atom") k = Tok::KwAtom;
      else if (word == "record") k = Tok::KwRecord;
      else if (word == "where") k = Tok::KwWhere;
      else if (word == "new") k = Tok::KwNew;
      else if (word == "Type") k = Tok::KwType;
      else if (word == "Nat") k = Tok::KwNat;
      else if (word == "zero") k = Tok::KwZero;
      else if (word == "suc") k = Tok::KwSuc;
      else if (word == "natrec") k = Tok::KwNatRec;
      else if (word == "inS") k = Tok::KwInS;
      else if (word == "outS") k = Tok::KwOutS;
      else if (word == "fst") k = Tok::KwFst;
      else if (word == "snd") k = Tok::KwSnd;
      else if (word == "Sig") k = Tok::KwSig;
      else if (word == "tt") k = Tok::KwTt;
      push(k, std::move(word), sp);
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two(':', '=')) { advance(2); push(Tok::ColonEq, ":=", sp); continue; }
    if (two('-', '>')) { advance(2); push(Tok::Arrow, "->", sp); continue; }
    if (two('|', '>')) { advance(2); push(Tok::Triangle, "|>", sp); continue; }
    switch (c) {
      case '(': advance(); push(Tok::LParen, "(", sp); continue;
      case ')': advance(); push(Tok::RParen, ")", sp); continue;
      case '{': advance(); push(Tok::LBrace, "{", sp); continue;
      case '}': advance(); push(Tok::RBrace, "}", sp); continue;
      case ':': advance(); push(Tok::Colon, ":", sp); continue;
      case ';': advance(); push(Tok::Semi, ";", sp); continue;
      case ',': advance(); push(Tok::Comma, ",", sp); continue;
      case '.': advance(); push(Tok::Dot, ".", sp); continue;
      case '\\': advance(); push(Tok::Backslash, "\\", sp); continue;
      case '|': advance(); push(Tok::Pipe, "|", sp); continue;
      default:
        throw CheckError(codes::parse, sp, std::string("unexpected character '") + c + "'");
    }
  }
  Span sp{line, col, line, col};
  out.push_back({Tok::End, "", sp});
  return out;
}

}  // namespace lex

class Parser {
 public:
  explicit Parser(const std::string& source) : toks_(lex::tokenize(source)) {}

  std::vector<SurfaceDecl> parse_file() {
    std::vector<SurfaceDecl> decls;
    while (!at(lex::Tok::End)) decls.push_back(parse_decl());
    return decls;
  }

  SurfacePtr parse_term_all() {
    SurfacePtr t = parse_term();
    expect(lex::Tok::End, "end of input");
    return t;
  }

 private:
  using Tok = lex::Tok;

  const lex::Token& peek(int n = 0) const {
    std::size_t k = pos_ + n;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  bool at(Tok k, int n = 0) const { return peek(n).kind == k; }
  lex::Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  lex::Token expect(Tok k, const std::string& what) {
    if (!at(k))
      throw CheckError(codes::parse, peek().span,
                       "expected " + what + ", found '" +
                           (peek().kind == Tok::End ? "end of input" : peek().text) + "'");
    return take();
  }

  SurfaceDecl parse_decl() {
    if (at(Tok::KwAtom)) {
      take();
      lex::Token name = expect(Tok::Ident, "atom name");
      return SurfaceDecl{SurfaceAtomDecl{name.text, name.span}};
    }
    if (at(Tok::KwDef)) {
      take();
      lex::Token name = expect(Tok::Ident, "definition name");
      SurfaceDef def{name.text, name.span, {}, nullptr, nullptr};
      if (at(Tok::KwUnfolding)) {
        take();
        expect(Tok::LParen, "'('");
        if (!at(Tok::RParen)) {
          for (;;) {
            lex::Token u = expect(Tok::Ident, "unfold target");
            def.unfold.emplace_back(u.text, u.span);
            if (!at(Tok::Comma)) break;
            take();
          }
        }
        expect(Tok::RParen, "')'");
      }
      expect(Tok::Colon, "':'");
      def.type = parse_term();
      expect(Tok::ColonEq, "':='");
      def.body = parse_term();
      return SurfaceDecl{std::move(def)};
    }
    if (at(Tok::KwRecord)) {
      take();
      lex::Token name = expect(Tok::Ident, "record name");
      SurfaceRecord rec{name.text, name.span, {}};
      expect(Tok::KwWhere, "'where'");
      expect(Tok::LBrace, "'{'");
      while (!at(Tok::RBrace)) {
        lex::Token f = expect(Tok::Ident, "field name");
        expect(Tok::Colon, "':'");
        SurfacePtr ty = parse_term();
        rec.fields.push_back({f.text, f.span, ty});
        if (at(Tok::Semi)) take();
        else break;
      }
      expect(Tok::RBrace, "'}'");
      return SurfaceDecl{std::move(rec)};
    }
    throw CheckError(codes::parse, peek().span,
                     "expected a declaration ('def', 'record' or 'atom')");
  }

  SurfacePtr parse_term() {
    Span sp = peek().span;
    if (at(Tok::Backslash)) {
      take();
      lex::Token binder = expect(Tok::Ident, "binder name");
      expect(Tok::Dot, "'.'");
      return surface(SLam{binder.text, parse_term()}, sp);
    }
    if (at(Tok::KwSig)) {
      take();
      expect(Tok::LParen, "'('");
      lex::Token binder = expect(Tok::Ident, "binder name");
      expect(Tok::Colon, "':'");
      SurfacePtr fst = parse_term();
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      return surface(SSigma{binder.text, fst, parse_term()}, sp);
    }
    // Dependent Pi: "(" IDENT ":" term ")" "->"
    if (at(Tok::LParen) && at(Tok::Ident, 1) && at(Tok::Colon, 2)) {
      take();
      lex::Token binder = take();
      take();  // ':'
      SurfacePtr dom = parse_term();
      expect(Tok::RParen, "')'");
      expect(Tok::Arrow, "'->'");
      return surface(SPi{binder.text, dom, parse_term()}, sp);
    }
    SurfacePtr head = parse_app();
    if (at(Tok::Arrow)) {
      take();
      return surface(SPi{"_", head, parse_term()}, sp);
    }
    return head;
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident: case Tok::KwType: case Tok::KwNat: case Tok::KwZero:
      case Tok::KwSuc: case Tok::KwNatRec: case Tok::KwInS: case Tok::KwOutS:
      case Tok::KwFst: case Tok::KwSnd: case Tok::KwNew: case Tok::LParen:
      case Tok::LBrace:
        return true;
      default:
        return false;
    }
  }

  SurfacePtr parse_app() {
    SurfacePtr t = parse_atom();
    while (starts_atom()) t = surface(SApp{t, parse_atom()}, t->span);
    return t;
  }

  // An atom followed by any number of ".field" projections.
  SurfacePtr parse_atom() {
    SurfacePtr t = parse_atom_head();
    while (at(Tok::Dot)) {
      take();
      lex::Token f = expect(Tok::Ident, "field name");
      t = surface(SFieldProj{t, f.text}, t->span);
    }
    return t;
  }

  std::vector<SAssign> parse_assignments() {
    expect(Tok::LBrace, "'{'");
    std::vector<SAssign> out;
    if (!at(Tok::RBrace)) {
      for (;;) {
        lex::Token f = expect(Tok::Ident, "field name");
        expect(Tok::ColonEq, "':='");
        out.push_back({f.text, f.span, parse_term()});
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RBrace, "'}'");
    return out;
  }

  SurfacePtr parse_atom_head() {
    Span sp = peek().span;
    switch (peek().kind) {
      case Tok::KwType: take(); return surface(SType{}, sp);
      case Tok::KwNat: take(); return surface(SNat{}, sp);
      case Tok::KwZero: take(); return surface(SZero{}, sp);
      case Tok::KwSuc: take(); return surface(SSuc{parse_atom()}, sp);
      case Tok::KwFst: take(); return surface(SFst{parse_atom()}, sp);
      case Tok::KwSnd: take(); return surface(SSnd{parse_atom()}, sp);
      case Tok::KwInS: take(); return surface(SInS{parse_atom()}, sp);
      case Tok::KwOutS: take(); return surface(SOutS{parse_atom()}, sp);
      case Tok::KwNatRec: {
        take();
        SurfacePtr m = parse_atom();
        SurfacePtr b = parse_atom();
        SurfacePtr s = parse_atom();
        SurfacePtr t = parse_atom();
        return surface(SNatRec{m, b, s, t}, sp);
      }
      case Tok::KwNew: {
        take();
        lex::Token rec = expect(Tok::Ident, "record name");
        return surface(SNew{rec.text, rec.span, parse_assignments()}, sp);
      }
      case Tok::Ident: {
        lex::Token name = take();
        if (at(Tok::LBrace))
          return surface(SPatch{name.text, name.span, parse_assignments()}, sp);
        return surface(SVar{name.text}, name.span);
      }
      case Tok::LParen: {
        take();
        SurfacePtr t = parse_term();
        if (at(Tok::Comma)) {
          take();
          SurfacePtr u = parse_term();
          expect(Tok::RParen, "')'");
          return surface(SPair{t, u}, sp);
        }
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::LBrace: {
        take();
        SurfacePtr base = parse_term();
        expect(Tok::Pipe, "'|'");
        SExtTy ext{base, {}};
        for (;;) {
          SProp prop;
          prop.span = peek().span;
          if (at(Tok::KwTt)) {
            take();
            prop.is_truth = true;
          } else {
            lex::Token a = expect(Tok::Ident, "proposition (an atom name or 'tt')");
            prop.name = a.text;
          }
          expect(Tok::Triangle, "'|>'");
          ext.clauses.emplace_back(prop, parse_term());
          if (!at(Tok::Comma)) break;
          take();
        }
        expect(Tok::RBrace, "'}'");
        return surface(std::move(ext), sp);
      }
      default:
        throw CheckError(codes::parse, sp,
                         "expected a term, found '" +
                             (peek().kind == Tok::End ? "end of input" : peek().text) + "'");
    }
  }

  std::vector<lex::Token> toks_;
  std::size_t pos_ = 0;
};

inline std::vector<SurfaceDecl> parse_file(const std::string& source) {
  return Parser(source).parse_file();
}

}  // namespace extt
