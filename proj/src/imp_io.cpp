#include <sstream>

#include "hmc/error.hpp"
#include "hmc/imp.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {

namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// `;; relvar K arity N types T...`, `;; var X T`, `;; uninterp (f (A...) R)`,
// `;; clone K = K.1 K.2`. Other comments are ignored.
void read_header(Program& p, const Token& t) {
  auto fail = [&](const std::string& what) -> void { throw ParseError(t.line, t.column, what); };
  const auto w = words(t.text);
  if (w.empty()) return;
  const std::string rest = t.text.substr(t.text.find(w[0]) + w[0].size());
  if (w[0] == "relvar") {
    const auto types_at = rest.find(" types");
    if (w.size() < 5 || w[2] != "arity" || types_at == std::string::npos) {
      fail("';; relvar NAME arity N types T...'");
    }
    RelvarSig sig;
    for (const auto& s : read_sexprs(rest.substr(types_at + 6))) sig.types.push_back(parse_base_type(s));
    std::size_t n = 0;
    try {
      n = std::stoul(w[3]);
    } catch (const std::exception&) {
      fail("an arity");
    }
    if (n != sig.arity() || n == 0) fail("arity matching the listed types");
    if (!is_identifier(w[1])) fail("a relvar name");
    p.relvars[w[1]] = std::move(sig);
  } else if (w[0] == "var") {
    auto forms = read_sexprs(rest);
    if (forms.size() != 2) fail("';; var NAME TYPE'");
    p.var_types.insert_or_assign(parse_identifier(forms[0], "a variable name"), parse_base_type(forms[1]));
  } else if (w[0] == "uninterp") {
    auto forms = read_sexprs(rest);
    if (forms.size() != 1 || !forms[0].is_list() || forms[0].items.size() != 3 ||
        !forms[0].items[1].is_list()) {
      fail("';; uninterp (NAME (ARGTYPE...) RETTYPE)'");
    }
    FuncSig f;
    f.name = parse_identifier(forms[0].items[0], "a function name");
    for (const auto& a : forms[0].items[1].items) f.arg_types.push_back(parse_base_type(a));
    f.ret_type = parse_base_type(forms[0].items[2]);
    if (p.funcs.find(f.name) != nullptr) fail("a fresh function name");
    p.funcs.add(std::move(f));
  } else if (w[0] == "clone") {
    if (w.size() < 4 || w[2] != "=") fail("';; clone NAME = CLONE...'");
    p.clones[w[1]] = std::vector<std::string>(w.begin() + 3, w.end());
  }
}

class ImpParser {
 public:
  ImpParser(std::vector<Token> tokens, Program& p) : toks_(std::move(tokens)), p_(p) {}

  void run() {
    expect_atom("loop");
    expect(Token::Kind::kLBrace, "'{'");
    if (peek().kind != Token::Kind::kRBrace) {
      block();
      while (peek().kind == Token::Kind::kChoice) {
        ++pos_;
        block();
      }
    }
    expect(Token::Kind::kRBrace, "'}' or '[]'");
    expect(Token::Kind::kEnd, "end of input");
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(peek().line, peek().column, what);
  }
  void expect(Token::Kind k, const std::string& what) {
    if (peek().kind != k) fail(what);
    ++pos_;
  }
  void expect_atom(const std::string& a) {
    if (peek().kind != Token::Kind::kAtom || peek().text != a) fail("'" + a + "'");
    ++pos_;
  }
  std::string name(const std::string& what) {
    if (peek().kind != Token::Kind::kAtom || !is_identifier(peek().text)) fail(what);
    return toks_[pos_++].text;
  }
  SExpr sexpr() {
    const auto k = peek().kind;
    if (k != Token::Kind::kAtom && k != Token::Kind::kLParen) fail("an s-expression");
    return read_sexpr(toks_, pos_);
  }

  void block() {
    Block b;
    if (peek().kind == Token::Kind::kLabel) {
      b.label = toks_[pos_++].text;
    } else {
      b.label = "b" + std::to_string(p_.blocks.size() + 1);
    }
    auto at_end = [&] {
      return peek().kind == Token::Kind::kChoice || peek().kind == Token::Kind::kRBrace;
    };
    while (!at_end()) {
      b.body.push_back(instr());
      if (at_end()) break;
      expect(Token::Kind::kSemi, "';', '[]' or '}'");
    }
    p_.blocks.push_back(std::move(b));
  }

  std::vector<std::string> vars_in_parens(bool allow_empty) {
    expect(Token::Kind::kLParen, "'('");
    std::vector<std::string> out;
    if (peek().kind != Token::Kind::kRParen) {
      out.push_back(name("a variable"));
      while (peek().kind == Token::Kind::kComma) {
        ++pos_;
        out.push_back(name("a variable"));
      }
    }
    if (out.empty() && !allow_empty) fail("at least one variable");
    expect(Token::Kind::kRParen, "',' or ')'");
    return out;
  }

  Pred condition() {
    SExpr s = sexpr();
    if (s.is_list() && s.items.size() == 1) s = s.items[0];
    return parse_pred(s);
  }

  void note_relvar(const std::string& k, std::size_t width) {
    if (p_.relvars.count(k) == 0) {
      p_.relvars[k] = RelvarSig{std::vector<BaseType>(width, BaseType::Int())};
    }
  }

  Instr instr() {
    if (peek().kind != Token::Kind::kAtom) fail("an instruction");
    if (peek(1).kind == Token::Kind::kAssign) {
      std::string x = name("a variable");
      ++pos_;
      return AssignInstr{std::move(x), parse_expr(sexpr())};
    }
    const std::string kw = toks_[pos_++].text;
    if (kw == "havoc") return HavocInstr{name("a variable")};
    if (kw == "skip") return skip_instr();
    if (kw == "assume") return AssumeInstr{condition()};
    if (kw == "assert") return AssertInstr{condition()};
    if (kw == "get" || kw == "set") {
      std::string k = name("a relvar name");
      auto vars = vars_in_parens(false);
      note_relvar(k, vars.size());
      if (kw == "get") return GetInstr{std::move(k), std::move(vars)};
      return SetInstr{std::move(k), std::move(vars)};
    }
    --pos_;
    fail("an instruction (havoc, get, set, assume, assert or x := e)");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Program& p_;
};

std::string cond_text(const Pred& p) {
  std::string s = to_sexpr(p);
  return s.front() == '(' ? s : "(" + s + ")";
}

std::string join_vars(const std::vector<std::string>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i > 0) out += ", ";
    out += vs[i];
  }
  return out + ")";
}

}  // namespace

Program parse_imp(std::string_view text) {
  Program p;
  std::vector<Token> tokens;
  for (auto& t : tokenize(text, LexMode::kImp)) {
    if (t.kind == Token::Kind::kComment) {
      read_header(p, t);
    } else {
      tokens.push_back(std::move(t));
    }
  }
  ImpParser(std::move(tokens), p).run();
  return p;
}

std::string print_instr(const Instr& i) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignInstr>) {
          return n.var + " := " + to_sexpr(n.value);
        } else if constexpr (std::is_same_v<T, HavocInstr>) {
          return "havoc " + n.var;
        } else if constexpr (std::is_same_v<T, GetInstr>) {
          return "get " + n.relvar + " " + join_vars(n.temps);
        } else if constexpr (std::is_same_v<T, SetInstr>) {
          return "set " + n.relvar + " " + join_vars(n.args);
        } else if constexpr (std::is_same_v<T, AssumeInstr>) {
          return "assume " + cond_text(n.cond);
        } else {
          return "assert " + cond_text(n.cond);
        }
      },
      i);
}

std::string print_imp(const Program& p) {
  std::string out;
  for (const auto& [k, sig] : p.relvars) {
    out += ";; relvar " + k + " arity " + std::to_string(sig.arity()) + " types";
    for (const auto& t : sig.types) out += " " + t.str();
    out += "\n";
  }
  for (const auto& [x, t] : p.var_types) out += ";; var " + x + " " + t.str() + "\n";
  for (const auto& f : p.funcs.funcs()) {
    out += ";; uninterp (" + f.name + " (";
    for (std::size_t i = 0; i < f.arg_types.size(); ++i) {
      if (i > 0) out += ' ';
      out += f.arg_types[i].str();
    }
    out += ") " + f.ret_type.str() + ")\n";
  }
  for (const auto& [k, cs] : p.clones) {
    out += ";; clone " + k + " =";
    for (const auto& c : cs) out += " " + c;
    out += "\n";
  }
  out += "loop {\n";
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    if (bi > 0) out += "[]\n";
    const Block& b = p.blocks[bi];
    out += "  /* " + b.label + " */\n";
    for (std::size_t i = 0; i < b.body.size(); ++i) {
      out += "  " + print_instr(b.body[i]);
      out += i + 1 < b.body.size() ? ";\n" : "\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace hmc
