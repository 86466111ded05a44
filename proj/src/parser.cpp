#include "kindle/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

namespace kindle {

ParseError::ParseError(SourcePos pos, const std::string& what)
    : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what), pos_(pos) {}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.pos = pos();
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
          advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, i_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = i_;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, i_ - start));
      } else {
        static constexpr std::string_view two[] = {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>"};
        t.kind = Tok::Punct;
        for (auto op : two) {
          if (src_.substr(i_, 2) == op) {
            t.text = std::string(op);
            break;
          }
        }
        if (t.text.empty()) {
          static constexpr std::string_view one = "+-*/%<>=!~^|&(){};,";
          if (one.find(c) == std::string_view::npos)
            throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, c);
        }
        for (std::size_t k = 0; k < t.text.size(); ++k) advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos pos() const { return {line_, col_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        advance();
      } else if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (src_.substr(i_, 2) == "/*") {
        SourcePos start = pos();
        advance();
        advance();
        while (i_ < src_.size() && src_.substr(i_, 2) != "*/") advance();
        if (i_ >= src_.size()) throw ParseError(start, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  return s == "int" || s == "if" || s == "else" || s == "while" || s == "assert" || s == "nondet";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Ast program() {
    Ast ast;
    while (peek_ident("int")) {
      next();
      for (;;) {
        const Token& name = expect_ident();
        if (is_keyword(name.text)) throw ParseError(name.pos, "keyword '" + name.text + "' used as variable name");
        if (name.text.rfind("__", 0) == 0)
          throw ParseError(name.pos, "identifiers starting with '__' are reserved");
        if (vars_.count(name.text)) throw ParseError(name.pos, "duplicate declaration of '" + name.text + "'");
        vars_[name.text] = static_cast<VarId>(ast.declarations.size());
        ast.declarations.push_back(name.text);
        ast.declaration_pos.push_back(name.pos);
        if (peek_punct(",")) {
          next();
          continue;
        }
        break;
      }
      expect_punct(";");
    }
    while (cur().kind != Tok::End) {
      if (peek_ident("int")) throw ParseError(cur().pos, "declarations must precede statements");
      ast.body.push_back(statement());
    }
    return ast;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool peek_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool peek_ident(std::string_view p) const { return cur().kind == Tok::Ident && cur().text == p; }

  void expect_punct(std::string_view p) {
    if (!peek_punct(p)) throw ParseError(cur().pos, "expected '" + std::string(p) + "'" + found());
    next();
  }

  const Token& expect_ident() {
    if (cur().kind != Tok::Ident) throw ParseError(cur().pos, "expected identifier" + found());
    return next();
  }

  std::string found() const {
    if (cur().kind == Tok::End) return " but found end of input";
    return " but found '" + cur().text + "'";
  }

  VarId lookup(const Token& t) const {
    auto it = vars_.find(t.text);
    if (it == vars_.end()) throw ParseError(t.pos, "use of undeclared variable '" + t.text + "'");
    return it->second;
  }

  Block block() {
    expect_punct("{");
    Block b;
    while (!peek_punct("}")) {
      if (cur().kind == Tok::End) throw ParseError(cur().pos, "expected '}'" + found());
      b.push_back(statement());
    }
    next();
    return b;
  }

  Stmt statement() {
    Stmt s;
    s.pos = cur().pos;
    if (peek_ident("if")) {
      next();
      expect_punct("(");
      s.kind = Stmt::Kind::If;
      s.expr = expr();
      expect_punct(")");
      s.body = block();
      if (peek_ident("else")) {
        next();
        if (peek_ident("if"))
          s.else_body.push_back(statement());
        else
          s.else_body = block();
      }
      return s;
    }
    if (peek_ident("while")) {
      next();
      expect_punct("(");
      s.kind = Stmt::Kind::While;
      s.expr = expr();
      expect_punct(")");
      s.body = block();
      return s;
    }
    if (peek_ident("assert")) {
      next();
      expect_punct("(");
      s.kind = Stmt::Kind::Assert;
      s.expr = expr();
      expect_punct(")");
      expect_punct(";");
      return s;
    }
    const Token& target = expect_ident();
    if (is_keyword(target.text)) throw ParseError(target.pos, "unexpected keyword '" + target.text + "'");
    s.var = lookup(target);
    expect_punct("=");
    if (peek_ident("nondet")) {
      next();
      expect_punct("(");
      expect_punct(")");
      s.kind = Stmt::Kind::Havoc;
    } else {
      s.kind = Stmt::Kind::Assign;
      s.expr = expr();
    }
    expect_punct(";");
    return s;
  }

  // Precedence climbing, loosest first.
  ExprPtr expr() { return log_or(); }

  ExprPtr log_or() {
    auto l = log_and();
    while (peek_punct("||")) {
      next();
      l = make_binary(BinOp::LogOr, l, log_and());
    }
    return l;
  }

  ExprPtr log_and() {
    auto l = bit_or();
    while (peek_punct("&&")) {
      next();
      l = make_binary(BinOp::LogAnd, l, bit_or());
    }
    return l;
  }

  ExprPtr bit_or() {
    auto l = bit_xor();
    while (peek_punct("|")) {
      next();
      l = make_binary(BinOp::BitOr, l, bit_xor());
    }
    return l;
  }

  ExprPtr bit_xor() {
    auto l = bit_and();
    while (peek_punct("^")) {
      next();
      l = make_binary(BinOp::BitXor, l, bit_and());
    }
    return l;
  }

  ExprPtr bit_and() {
    auto l = equality();
    while (peek_punct("&")) {
      next();
      l = make_binary(BinOp::BitAnd, l, equality());
    }
    return l;
  }

  ExprPtr equality() {
    auto l = relational();
    for (;;) {
      if (peek_punct("==")) {
        next();
        l = make_binary(BinOp::Eq, l, relational());
      } else if (peek_punct("!=")) {
        next();
        l = make_not(make_binary(BinOp::Eq, l, relational()));
      } else {
        return l;
      }
    }
  }

  ExprPtr relational() {
    auto l = shift();
    for (;;) {
      if (peek_punct("<")) {
        next();
        l = make_binary(BinOp::Lt, l, shift());
      } else if (peek_punct(">")) {
        next();
        l = make_binary(BinOp::Lt, shift(), l);
      } else if (peek_punct("<=")) {
        next();
        l = make_not(make_binary(BinOp::Lt, shift(), l));
      } else if (peek_punct(">=")) {
        next();
        l = make_not(make_binary(BinOp::Lt, l, shift()));
      } else {
        return l;
      }
    }
  }

  ExprPtr shift() {
    auto l = additive();
    for (;;) {
      if (peek_punct("<<")) {
        next();
        l = make_binary(BinOp::Shl, l, additive());
      } else if (peek_punct(">>")) {
        next();
        l = make_binary(BinOp::Shr, l, additive());
      } else {
        return l;
      }
    }
  }

  ExprPtr additive() {
    auto l = multiplicative();
    for (;;) {
      if (peek_punct("+")) {
        next();
        l = make_binary(BinOp::Add, l, multiplicative());
      } else if (peek_punct("-")) {
        next();
        l = make_binary(BinOp::Add, l, negate(multiplicative()));
      } else {
        return l;
      }
    }
  }

  ExprPtr multiplicative() {
    auto l = unary();
    for (;;) {
      BinOp op;
      if (peek_punct("*"))
        op = BinOp::Mul;
      else if (peek_punct("/"))
        op = BinOp::Div;
      else if (peek_punct("%"))
        op = BinOp::Mod;
      else
        return l;
      next();
      l = make_binary(op, l, unary());
    }
  }

  static ExprPtr negate(ExprPtr e) {
    if (e->is_const() && e->value != INT64_MIN) return make_const(-e->value);
    return make_unary(UnOp::Neg, std::move(e));
  }

  ExprPtr unary() {
    if (peek_punct("-")) {
      next();
      return negate(unary());
    }
    if (peek_punct("!")) {
      next();
      return make_not(unary());
    }
    if (peek_punct("~")) {
      next();
      return make_unary(UnOp::BitNot, unary());
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = cur();
    if (peek_punct("(")) {
      next();
      auto e = expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Tok::Number) {
      next();
      Value v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc()) throw ParseError(t.pos, "integer literal out of range: " + t.text);
      return make_const(v);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "nondet")
        throw ParseError(t.pos, "nondet() may only appear as the entire right-hand side of an assignment");
      if (is_keyword(t.text)) throw ParseError(t.pos, "unexpected keyword '" + t.text + "'");
      next();
      return make_var(lookup(t));
    }
    throw ParseError(t.pos, "expected expression" + found());
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::map<std::string, VarId> vars_;
};

}  // namespace

Ast parse(std::string_view source) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  return parser.program();
}

}  // namespace kindle
