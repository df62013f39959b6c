#include "hmc/constraints.hpp"
#include "hmc/error.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {

namespace {

Refinement parse_refinement(const SExpr& s) {
  if (s.has_head("kapp")) {
    if (s.items.size() < 2) parse_fail(s, "(kapp NAME ARG...)");
    std::string k = parse_identifier(s.items[1], "a kvar name");
    std::vector<Expr> args;
    for (std::size_t i = 2; i < s.items.size(); ++i) args.push_back(parse_expr(s.items[i]));
    return Refinement::kapp(std::move(k), std::move(args));
  }
  return Refinement::concrete(parse_pred(s));
}

RefType parse_side(const SExpr& s, const char* head) {
  if (!s.has_head(head) || s.items.size() != 3) {
    parse_fail(s, std::string("(") + head + " TYPE REF)");
  }
  return RefType{parse_base_type(s.items[1]), parse_refinement(s.items[2])};
}

KVarSig parse_kvar(const SExpr& s) {
  if (s.items.size() < 3) parse_fail(s, "(kvar NAME (v TYPE) (PARAM TYPE)...)");
  KVarSig k;
  k.id = parse_identifier(s.items[1], "a kvar name");
  const SExpr& vv = s.items[2];
  if (!vv.is_list() || vv.items.size() != 2 || !vv.items[0].is_atom || vv.items[0].atom != kValueVar) {
    parse_fail(vv, "(v TYPE)");
  }
  k.value_type = parse_base_type(vv.items[1]);
  for (std::size_t i = 3; i < s.items.size(); ++i) {
    const SExpr& p = s.items[i];
    if (!p.is_list() || p.items.size() != 2) parse_fail(p, "(PARAM TYPE)");
    k.params.emplace_back(parse_identifier(p.items[0], "a parameter name"),
                          parse_base_type(p.items[1]));
  }
  return k;
}

FuncSig parse_uninterp(const SExpr& s) {
  if (s.items.size() != 2 || !s.items[1].is_list() || s.items[1].items.size() != 3 ||
      !s.items[1].items[1].is_list()) {
    parse_fail(s, "(uninterp (NAME (ARGTYPE...) RETTYPE))");
  }
  const SExpr& body = s.items[1];
  FuncSig f;
  f.name = parse_identifier(body.items[0], "a function name");
  for (const auto& a : body.items[1].items) f.arg_types.push_back(parse_base_type(a));
  f.ret_type = parse_base_type(body.items[2]);
  return f;
}

SubConstraint parse_sub(const SExpr& s) {
  if (s.items.size() != 5) parse_fail(s, "(sub LABEL (env ...) (lhs ...) (rhs ...))");
  SubConstraint c;
  if (!s.items[1].is_atom) parse_fail(s.items[1], "a constraint label");
  c.label = s.items[1].atom;
  const SExpr& env = s.items[2];
  if (!env.has_head("env")) parse_fail(env, "(env (NAME TYPE REF)...)");
  for (std::size_t i = 1; i < env.items.size(); ++i) {
    const SExpr& b = env.items[i];
    if (!b.is_list() || b.items.size() != 3) parse_fail(b, "(NAME TYPE REF)");
    c.env.emplace_back(parse_identifier(b.items[0], "a variable name"),
                       RefType{parse_base_type(b.items[1]), parse_refinement(b.items[2])});
  }
  c.lhs = parse_side(s.items[3], "lhs");
  c.rhs = parse_side(s.items[4], "rhs");
  return c;
}

}  // namespace

std::string print_refinement(const Refinement& r) {
  if (!r.is_kapp()) return to_sexpr(r.pred());
  std::string out = "(kapp " + r.app().kvar;
  for (const auto& a : r.app().args) out += " " + to_sexpr(a);
  return out + ")";
}

ConstraintSet parse_constraints(std::string_view text) {
  ConstraintSet cs;
  for (const SExpr& form : read_sexprs(text)) {
    if (form.has_head("uninterp")) {
      FuncSig f = parse_uninterp(form);
      if (cs.funcs.find(f.name) != nullptr) parse_fail(form, "a fresh function name");
      cs.funcs.add(std::move(f));
    } else if (form.has_head("kvar")) {
      KVarSig k = parse_kvar(form);
      if (cs.find_kvar(k.id) != nullptr) parse_fail(form, "a fresh kvar name");
      cs.kvars.push_back(std::move(k));
    } else if (form.has_head("sub")) {
      cs.subs.push_back(parse_sub(form));
    } else {
      parse_fail(form, "uninterp, kvar or sub");
    }
  }
  return cs;
}

std::string print_constraints(const ConstraintSet& cs) {
  std::string out;
  for (const auto& f : cs.funcs.funcs()) {
    out += "(uninterp (" + f.name + " (";
    for (std::size_t i = 0; i < f.arg_types.size(); ++i) {
      if (i > 0) out += ' ';
      out += f.arg_types[i].str();
    }
    out += ") " + f.ret_type.str() + "))\n";
  }
  for (const auto& k : cs.kvars) {
    out += "(kvar " + k.id + " (v " + k.value_type.str() + ")";
    for (const auto& [name, t] : k.params) out += " (" + name + " " + t.str() + ")";
    out += ")\n";
  }
  for (const auto& c : cs.subs) {
    out += "(sub " + c.label + " (env";
    for (const auto& [name, t] : c.env) {
      out += " (" + name + " " + t.value_type.str() + " " + print_refinement(t.refinement) + ")";
    }
    out += ") (lhs " + c.lhs.value_type.str() + " " + print_refinement(c.lhs.refinement) + ")";
    out += " (rhs " + c.rhs.value_type.str() + " " + print_refinement(c.rhs.refinement) + "))\n";
  }
  return out;
}

Solution parse_solution(std::string_view text) {
  auto forms = read_sexprs(text);
  if (forms.size() != 1 || !forms[0].has_head("solution")) {
    throw ParseError(forms.empty() ? 1 : forms[0].line, forms.empty() ? 1 : forms[0].column,
                     "(solution (NAME PRED)...)");
  }
  const SExpr& top = forms[0];
  Solution s;
  bool any = false;
  for (std::size_t i = 1; i < top.items.size(); ++i) {
    const SExpr& e = top.items[i];
    if (!e.is_list() || e.items.size() != 2) parse_fail(e, "(NAME PRED) or (NAME (tuples ...))");
    std::string k = parse_identifier(e.items[0], "a kvar name");
    const bool ext = e.items[1].has_head("tuples");
    if (!any) {
      s.form = ext ? Solution::Form::kExtensional : Solution::Form::kIntensional;
      any = true;
    } else if (ext != (s.form == Solution::Form::kExtensional)) {
      parse_fail(e, "entries of one form (all predicates or all tuples)");
    }
    if (s.covers(k)) parse_fail(e, "one entry per kvar");
    if (ext) {
      std::set<Tuple>& rel = s.relations[k];
      for (std::size_t j = 1; j < e.items[1].items.size(); ++j) {
        const SExpr& t = e.items[1].items[j];
        if (!t.is_list() || t.items.empty()) parse_fail(t, "a tuple (V0 V1 ...)");
        Tuple tup;
        for (const auto& x : t.items) {
          Expr ex = parse_expr(x);
          const auto* lit = std::get_if<LitExpr>(&ex.node().v);
          if (lit == nullptr) parse_fail(x, "an integer");
          tup.push_back(lit->value);
        }
        rel.insert(std::move(tup));
      }
    } else {
      s.predicates.emplace(k, parse_pred(e.items[1]));
    }
  }
  return s;
}

std::string print_solution(const Solution& s) {
  std::string out = "(solution";
  if (s.form == Solution::Form::kIntensional) {
    for (const auto& [k, p] : s.predicates) out += " (" + k + " " + to_sexpr(p) + ")";
  } else {
    for (const auto& [k, rel] : s.relations) {
      out += " (" + k + " (tuples";
      for (const auto& t : rel) {
        out += " (";
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (i > 0) out += ' ';
          out += std::to_string(t[i]);
        }
        out += ")";
      }
      out += "))";
    }
  }
  return out + ")\n";
}

}  // namespace hmc
