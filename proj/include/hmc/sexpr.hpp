#pragma once

// Tokenizer and s-expression reader shared by the .hmc, .sol and .imp
// formats, plus conversion between s-expressions and the logic.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "hmc/logic.hpp"

namespace hmc {

struct Token {
  enum class Kind {
    kLParen,
    kRParen,
    kAtom,
    kComma,
    kSemi,
    kAssign,  // :=
    kChoice,  // []
    kLBrace,
    kRBrace,
    kLabel,   // /* text */, text stored trimmed
    kComment, // ;; text, text stored without the leading markers
    kEnd,
  };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

enum class LexMode {
  // `;` starts a comment that runs to end of line.
  kSexpr,
  // `;` separates instructions; `;;` starts a comment.
  kImp,
};

std::vector<Token> tokenize(std::string_view text, LexMode mode);

struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_list() const { return !is_atom; }
  // True for a list whose first item is the atom `head`.
  bool has_head(std::string_view head) const;
};

// Reads one s-expression starting at tokens[pos]; advances pos.
SExpr read_sexpr(const std::vector<Token>& tokens, std::size_t& pos);
// Reads every top-level s-expression in a .hmc/.sol style document.
std::vector<SExpr> read_sexprs(std::string_view text);

std::string print_sexpr(const SExpr& s);

// Throws ParseError positioned at `at`.
[[noreturn]] void parse_fail(const SExpr& at, const std::string& expected);

BaseType parse_base_type(const SExpr& s);
Expr parse_expr(const SExpr& s);
Pred parse_pred(const SExpr& s);
std::string parse_identifier(const SExpr& s, const std::string& what);

Expr parse_expr_text(std::string_view text);
Pred parse_pred_text(std::string_view text);

}  // namespace hmc
