#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kindle/expr.hpp"

namespace kindle {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
  enum class Kind { Assign, Havoc, If, While, Assert };

  Kind kind = Kind::Assign;
  SourcePos pos;
  VarId var = 0;       // Assign, Havoc
  ExprPtr expr;        // Assign value, or condition of If/While/Assert
  Block body;          // then-branch of If, body of While
  Block else_body;
};

struct Ast {
  std::vector<std::string> declarations;
  std::vector<SourcePos> declaration_pos;
  Block body;
};

class ParseError : public Error {
 public:
  ParseError(SourcePos pos, const std::string& what);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Parses the C-like source language:
///
///   program := {"int" ident ";"} {stmt}
///   stmt    := ident "=" expr ";" | ident "=" "nondet" "(" ")" ";"
///            | "if" "(" expr ")" block ["else" (block | if-stmt)]
///            | "while" "(" expr ")" block | "assert" "(" expr ")" ";"
///
/// `-`, `!=`, `<=`, `>`, `>=` are accepted and rewritten onto the core
/// operator set.
Ast parse(std::string_view source);

}  // namespace kindle
