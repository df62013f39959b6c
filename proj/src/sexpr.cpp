#include "hmc/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <optional>

#include "hmc/error.hpp"

namespace hmc {

namespace {

bool is_atom_char(char c, LexMode mode) {
  const unsigned char u = static_cast<unsigned char>(c);
  if (std::isspace(u)) return false;
  switch (c) {
    case '(': case ')': case ';': case ',': case '{': case '}':
      return false;
    case '[': case ']': case ':':
      return mode == LexMode::kSexpr;
    default:
      return true;
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<Value> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t start = s[0] == '-' ? 1 : 0;
  if (start == s.size()) return std::nullopt;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  }
  Value v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, LexMode mode) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t tl = line;
    const std::size_t tc = col;
    auto push = [&](Token::Kind k, std::string s, std::size_t len) {
      out.push_back(Token{k, std::move(s), tl, tc});
      advance(len);
    };
    const bool comment =
        c == ';' && (mode == LexMode::kSexpr || (i + 1 < text.size() && text[i + 1] == ';'));
    if (comment) {
      std::size_t end = text.find('\n', i);
      if (end == std::string_view::npos) end = text.size();
      std::string_view body = text.substr(i, end - i);
      while (!body.empty() && body.front() == ';') body.remove_prefix(1);
      if (mode == LexMode::kImp) {
        out.push_back(Token{Token::Kind::kComment, trim(body), tl, tc});
      }
      advance(end - i);
      continue;
    }
    switch (c) {
      case '(': push(Token::Kind::kLParen, "(", 1); continue;
      case ')': push(Token::Kind::kRParen, ")", 1); continue;
      case ',': push(Token::Kind::kComma, ",", 1); continue;
      case ';': push(Token::Kind::kSemi, ";", 1); continue;
      case '{': push(Token::Kind::kLBrace, "{", 1); continue;
      case '}': push(Token::Kind::kRBrace, "}", 1); continue;
      default: break;
    }
    if (mode == LexMode::kImp) {
      if (c == ':' ) {
        if (i + 1 < text.size() && text[i + 1] == '=') {
          push(Token::Kind::kAssign, ":=", 2);
          continue;
        }
        throw ParseError(tl, tc, "':='");
      }
      if (c == '[') {
        if (i + 1 < text.size() && text[i + 1] == ']') {
          push(Token::Kind::kChoice, "[]", 2);
          continue;
        }
        throw ParseError(tl, tc, "'[]'");
      }
      if (c == ']') throw ParseError(tl, tc, "'[]'");
      if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
        std::size_t end = text.find("*/", i + 2);
        if (end == std::string_view::npos) throw ParseError(tl, tc, "'*/' closing the label");
        push(Token::Kind::kLabel, trim(text.substr(i + 2, end - i - 2)), end + 2 - i);
        continue;
      }
    }
    std::size_t j = i;
    while (j < text.size() && is_atom_char(text[j], mode)) {
      if (mode == LexMode::kImp && text[j] == '/' && j + 1 < text.size() && text[j + 1] == '*') {
        break;
      }
      ++j;
    }
    push(Token::Kind::kAtom, std::string(text.substr(i, j - i)), j - i);
  }
  out.push_back(Token{Token::Kind::kEnd, "", line, col});
  return out;
}

bool SExpr::has_head(std::string_view head) const {
  return is_list() && !items.empty() && items.front().is_atom && items.front().atom == head;
}

SExpr read_sexpr(const std::vector<Token>& tokens, std::size_t& pos) {
  const Token& t = tokens.at(pos);
  SExpr s;
  s.line = t.line;
  s.column = t.column;
  if (t.kind == Token::Kind::kAtom) {
    s.is_atom = true;
    s.atom = t.text;
    ++pos;
    return s;
  }
  if (t.kind != Token::Kind::kLParen) {
    throw ParseError(t.line, t.column, t.kind == Token::Kind::kEnd ? "an s-expression, got end of input"
                                                                 : "an s-expression, got '" + t.text + "'");
  }
  ++pos;
  while (tokens.at(pos).kind != Token::Kind::kRParen) {
    if (tokens.at(pos).kind == Token::Kind::kEnd) {
      throw ParseError(tokens[pos].line, tokens[pos].column, "')'");
    }
    s.items.push_back(read_sexpr(tokens, pos));
  }
  ++pos;
  return s;
}

std::vector<SExpr> read_sexprs(std::string_view text) {
  auto tokens = tokenize(text, LexMode::kSexpr);
  std::vector<SExpr> out;
  std::size_t pos = 0;
  while (tokens[pos].kind != Token::Kind::kEnd) out.push_back(read_sexpr(tokens, pos));
  return out;
}

std::string print_sexpr(const SExpr& s) {
  if (s.is_atom) return s.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i > 0) out += ' ';
    out += print_sexpr(s.items[i]);
  }
  out += ')';
  return out;
}

void parse_fail(const SExpr& at, const std::string& expected) {
  throw ParseError(at.line, at.column, expected);
}

std::string parse_identifier(const SExpr& s, const std::string& what) {
  if (!s.is_atom || !is_identifier(s.atom)) parse_fail(s, what);
  return s.atom;
}

BaseType parse_base_type(const SExpr& s) {
  if (s.is_atom) {
    if (s.atom == "int") return BaseType::Int();
    if (s.atom == "bool") return BaseType::Bool();
  } else if (s.items.size() == 2 && s.has_head("ui")) {
    return BaseType::Ui(parse_identifier(s.items[1], "a ui type name"));
  }
  parse_fail(s, "a type (int, bool or (ui NAME))");
}

namespace {

const char* const kReserved[] = {"true", "false", "and", "or", "not", "=>", "kapp",
                                 "int", "bool", "ui"};

bool reserved(const std::string& s) {
  for (const char* r : kReserved) {
    if (s == r) return true;
  }
  return false;
}

std::optional<CmpOp> cmp_op(const std::string& s) {
  if (s == "=") return CmpOp::kEq;
  if (s == "!=") return CmpOp::kNe;
  if (s == "<") return CmpOp::kLt;
  if (s == "<=") return CmpOp::kLe;
  if (s == ">") return CmpOp::kGt;
  if (s == ">=") return CmpOp::kGe;
  return std::nullopt;
}

}  // namespace

Expr parse_expr(const SExpr& s) {
  if (s.is_atom) {
    if (auto v = parse_int(s.atom)) return Expr::lit(*v);
    if (!is_identifier(s.atom) || reserved(s.atom)) parse_fail(s, "an expression");
    return Expr::var(s.atom);
  }
  if (s.items.empty() || !s.items.front().is_atom) parse_fail(s, "an expression");
  const std::string& head = s.items.front().atom;
  const std::size_t n = s.items.size() - 1;
  if (head == "+") {
    if (n == 0) parse_fail(s, "at least one operand of +");
    Expr acc = parse_expr(s.items[1]);
    for (std::size_t i = 2; i <= n; ++i) acc = Expr::add(acc, parse_expr(s.items[i]));
    return acc;
  }
  if (head == "-") {
    if (n == 1) return Expr::mul(-1, parse_expr(s.items[1]));
    if (n != 2) parse_fail(s, "one or two operands of -");
    return Expr::add(parse_expr(s.items[1]), Expr::mul(-1, parse_expr(s.items[2])));
  }
  if (head == "*") {
    if (n != 2) parse_fail(s, "two operands of *");
    Expr a = parse_expr(s.items[1]);
    Expr b = parse_expr(s.items[2]);
    if (const auto* l = std::get_if<LitExpr>(&a.node().v)) return Expr::mul(l->value, b);
    if (const auto* l = std::get_if<LitExpr>(&b.node().v)) return Expr::mul(l->value, a);
    parse_fail(s, "a literal coefficient (non-linear terms must be uninterpreted functions)");
  }
  if (head == "/" || head == "div" || head == "mod") {
    parse_fail(s, "a linear expression (declare division as an uninterpreted function)");
  }
  if (!is_identifier(head) || reserved(head) || cmp_op(head)) parse_fail(s.items.front(), "a function name");
  std::vector<Expr> args;
  for (std::size_t i = 1; i <= n; ++i) args.push_back(parse_expr(s.items[i]));
  return Expr::app(head, std::move(args));
}

Pred parse_pred(const SExpr& s) {
  if (s.is_atom) {
    if (s.atom == "true") return Pred::truth();
    if (s.atom == "false") return Pred::falsity();
    if (!is_identifier(s.atom) || reserved(s.atom)) parse_fail(s, "a predicate");
    return Pred::bool_var(s.atom);
  }
  if (s.items.empty() || !s.items.front().is_atom) parse_fail(s, "a predicate");
  const std::string& head = s.items.front().atom;
  const std::size_t n = s.items.size() - 1;
  if (auto op = cmp_op(head)) {
    if (n != 2) parse_fail(s, "two operands of " + head);
    return Pred::cmp(*op, parse_expr(s.items[1]), parse_expr(s.items[2]));
  }
  if (head == "not") {
    if (n != 1) parse_fail(s, "one operand of not");
    return Pred::negation(parse_pred(s.items[1]));
  }
  if (head == "and" || head == "or") {
    std::vector<Pred> parts;
    for (std::size_t i = 1; i <= n; ++i) parts.push_back(parse_pred(s.items[i]));
    return head == "and" ? Pred::conj(parts) : Pred::disj(parts);
  }
  if (head == "=>") {
    if (n != 2) parse_fail(s, "two operands of =>");
    return Pred::implies(parse_pred(s.items[1]), parse_pred(s.items[2]));
  }
  parse_fail(s.items.front(), "a predicate operator");
}

Expr parse_expr_text(std::string_view text) {
  auto forms = read_sexprs(text);
  if (forms.size() != 1) throw ParseError(1, 1, "exactly one expression");
  return parse_expr(forms.front());
}

Pred parse_pred_text(std::string_view text) {
  auto forms = read_sexprs(text);
  if (forms.size() != 1) throw ParseError(1, 1, "exactly one predicate");
  return parse_pred(forms.front());
}

}  // namespace hmc
