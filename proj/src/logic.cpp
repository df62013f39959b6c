#include "hmc/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "hmc/error.hpp"

namespace hmc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnboundVariable: return "UnboundVariable";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kUnknownFunction: return "UnknownFunction";
    case ErrorCode::kNonBoolAtom: return "NonBoolAtom";
    case ErrorCode::kMissingBinding: return "MissingBinding";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kUndeclaredKVar: return "UndeclaredKVar";
    case ErrorCode::kUnresolvedKVar: return "UnresolvedKVar";
    case ErrorCode::kMissingKVar: return "MissingKVar";
    case ErrorCode::kIllFormed: return "IllFormed";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kSolverUnavailable: return "SolverUnavailable";
    case ErrorCode::kSolverProtocol: return "SolverProtocolError";
  }
  return "Error";
}

std::string BaseType::str() const {
  switch (kind_) {
    case Kind::kInt: return "int";
    case Kind::kBool: return "bool";
    case Kind::kUi: return "(ui " + ui_name_ + ")";
  }
  return "?";
}

Signature::Signature(std::vector<FuncSig> funcs) {
  for (auto& f : funcs) add(std::move(f));
}

void Signature::add(FuncSig sig) {
  if (find(sig.name) != nullptr) {
    throw Error(ErrorCode::kIllFormed, "duplicate function signature: " + sig.name);
  }
  funcs_.push_back(std::move(sig));
}

const FuncSig* Signature::find(const std::string& name) const {
  for (const auto& f : funcs_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Expr

Expr Expr::var(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{VarExpr{std::move(name)}}));
}
Expr Expr::lit(Value value) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{LitExpr{value}}));
}
Expr Expr::add(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{AddExpr{std::move(lhs), std::move(rhs)}}));
}
Expr Expr::mul(Value coeff, Expr arg) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{MulExpr{coeff, std::move(arg)}}));
}
Expr Expr::app(std::string func, std::vector<Expr> args) {
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{AppExpr{std::move(func), std::move(args)}}));
}

bool Expr::is_var() const { return std::holds_alternative<VarExpr>(node_->v); }
bool Expr::is_lit() const { return std::holds_alternative<LitExpr>(node_->v); }

const std::string& Expr::var_name() const {
  static const std::string kEmpty;
  if (const auto* v = std::get_if<VarExpr>(&node_->v)) return v->name;
  return kEmpty;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& av = a.node().v;
  const auto& bv = b.node().v;
  if (av.index() != bv.index()) return av.index() <=> bv.index();
  return std::visit(
      [&](const auto& x) -> std::strong_ordering {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(bv);
        if constexpr (std::is_same_v<T, VarExpr>) {
          return x.name <=> y.name;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          return x.value <=> y.value;
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          if (auto c = x.lhs <=> y.lhs; c != 0) return c;
          return x.rhs <=> y.rhs;
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          if (auto c = x.coeff <=> y.coeff; c != 0) return c;
          return x.arg <=> y.arg;
        } else {
          if (auto c = x.func <=> y.func; c != 0) return c;
          return std::lexicographical_compare_three_way(x.args.begin(), x.args.end(),
                                                        y.args.begin(), y.args.end());
        }
      },
      av);
}

bool operator==(const Expr& a, const Expr& b) { return (a <=> b) == 0; }

// ---------------------------------------------------------------------------
// Pred

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return CmpOp::kNe;
    case CmpOp::kNe: return CmpOp::kEq;
    case CmpOp::kLt: return CmpOp::kGe;
    case CmpOp::kLe: return CmpOp::kGt;
    case CmpOp::kGt: return CmpOp::kLe;
    case CmpOp::kGe: return CmpOp::kLt;
  }
  return op;
}

Pred Pred::truth() { return cmp(CmpOp::kEq, Expr::lit(0), Expr::lit(0)); }
Pred Pred::falsity() { return cmp(CmpOp::kEq, Expr::lit(0), Expr::lit(1)); }

Pred Pred::cmp(CmpOp op, Expr lhs, Expr rhs) {
  return Pred(std::make_shared<const PredNode>(
      PredNode{CmpPred{op, std::move(lhs), std::move(rhs)}}));
}
Pred Pred::negation(Pred p) {
  return Pred(std::make_shared<const PredNode>(PredNode{NotPred{std::move(p)}}));
}
Pred Pred::conj(Pred lhs, Pred rhs) {
  return Pred(std::make_shared<const PredNode>(
      PredNode{AndPred{std::move(lhs), std::move(rhs)}}));
}
Pred Pred::disj(Pred lhs, Pred rhs) {
  return Pred(std::make_shared<const PredNode>(
      PredNode{OrPred{std::move(lhs), std::move(rhs)}}));
}
Pred Pred::implies(Pred lhs, Pred rhs) {
  return Pred(std::make_shared<const PredNode>(
      PredNode{ImpliesPred{std::move(lhs), std::move(rhs)}}));
}
Pred Pred::bool_var(std::string name) {
  return Pred(std::make_shared<const PredNode>(PredNode{BoolVarPred{std::move(name)}}));
}

Pred Pred::conj(const std::vector<Pred>& ps) {
  if (ps.empty()) return truth();
  Pred acc = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) acc = conj(acc, ps[i]);
  return acc;
}

Pred Pred::disj(const std::vector<Pred>& ps) {
  if (ps.empty()) return falsity();
  Pred acc = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) acc = disj(acc, ps[i]);
  return acc;
}

namespace {
bool is_lit_cmp(const Pred& p, Value rhs) {
  const auto* c = std::get_if<CmpPred>(&p.node().v);
  if (c == nullptr || c->op != CmpOp::kEq) return false;
  const auto* l = std::get_if<LitExpr>(&c->lhs.node().v);
  const auto* r = std::get_if<LitExpr>(&c->rhs.node().v);
  return l != nullptr && r != nullptr && l->value == 0 && r->value == rhs;
}
}  // namespace

bool Pred::is_true() const { return is_lit_cmp(*this, 0); }
bool Pred::is_false() const { return is_lit_cmp(*this, 1); }

std::strong_ordering operator<=>(const Pred& a, const Pred& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& av = a.node().v;
  const auto& bv = b.node().v;
  if (av.index() != bv.index()) return av.index() <=> bv.index();
  return std::visit(
      [&](const auto& x) -> std::strong_ordering {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(bv);
        if constexpr (std::is_same_v<T, CmpPred>) {
          if (auto c = x.op <=> y.op; c != 0) return c;
          if (auto c = x.lhs <=> y.lhs; c != 0) return c;
          return x.rhs <=> y.rhs;
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return x.arg <=> y.arg;
        } else if constexpr (std::is_same_v<T, BoolVarPred>) {
          return x.name <=> y.name;
        } else {
          if (auto c = x.lhs <=> y.lhs; c != 0) return c;
          return x.rhs <=> y.rhs;
        }
      },
      av);
}

bool operator==(const Pred& a, const Pred& b) { return (a <=> b) == 0; }

std::vector<Pred> conjuncts(const Pred& p) {
  std::vector<Pred> out;
  std::function<void(const Pred&)> go = [&](const Pred& q) {
    if (const auto* a = std::get_if<AndPred>(&q.node().v)) {
      go(a->lhs);
      go(a->rhs);
    } else {
      out.push_back(q);
    }
  };
  go(p);
  return out;
}

// ---------------------------------------------------------------------------
// Environments and domains

TypeEnv::TypeEnv(std::initializer_list<Binding> bindings) {
  for (const auto& b : bindings) bind(b.first, b.second);
}

void TypeEnv::bind(std::string name, BaseType type) {
  if (lookup(name) != nullptr) {
    throw Error(ErrorCode::kIllFormed, "duplicate binding: " + name);
  }
  bindings_.emplace_back(std::move(name), std::move(type));
}

TypeEnv TypeEnv::extended(std::string name, BaseType type) const {
  TypeEnv copy = *this;
  copy.bind(std::move(name), std::move(type));
  return copy;
}

const BaseType* TypeEnv::lookup(const std::string& name) const {
  for (const auto& [n, t] : bindings_) {
    if (n == name) return &t;
  }
  return nullptr;
}

void ValueDomain::validate() const {
  auto check = [](const Range& r, const std::string& what) {
    if (r.lo > r.hi) throw Error(ErrorCode::kIllFormed, "empty range for " + what);
  };
  check(int_range, "int");
  check(default_ui_range, "ui");
  for (const auto& [name, r] : ui_ranges) check(r, "ui " + name);
  if (int_range.lo > 0 || int_range.hi < 1) {
    throw Error(ErrorCode::kIllFormed, "int range must contain 0 and 1");
  }
}

ValueDomain::Range ValueDomain::range(const BaseType& type) const {
  switch (type.kind()) {
    case BaseType::Kind::kInt: return int_range;
    case BaseType::Kind::kBool: return Range{0, 1};
    case BaseType::Kind::kUi: {
      auto it = ui_ranges.find(type.ui_name());
      return it == ui_ranges.end() ? default_ui_range : it->second;
    }
  }
  return int_range;
}

std::vector<Value> ValueDomain::values(const BaseType& type) const {
  const Range r = range(type);
  std::vector<Value> out;
  for (Value v = r.lo; v <= r.hi; ++v) out.push_back(v);
  return out;
}

bool ValueDomain::contains(const BaseType& type, Value v) const {
  const Range r = range(type);
  return r.lo <= v && v <= r.hi;
}

std::size_t ValueDomain::cardinality(const BaseType& type) const {
  const Range r = range(type);
  return static_cast<std::size_t>(r.hi - r.lo + 1);
}

// ---------------------------------------------------------------------------
// Typechecking

namespace {

BaseType check_expr(const Signature& sig, const TypeEnv& env, const Expr& e) {
  return std::visit(
      [&](const auto& n) -> BaseType {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          const BaseType* t = env.lookup(n.name);
          if (t == nullptr) throw Error(ErrorCode::kUnboundVariable, n.name);
          return *t;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          return BaseType::Int();
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          if (!check_expr(sig, env, n.lhs).is_int() || !check_expr(sig, env, n.rhs).is_int()) {
            throw Error(ErrorCode::kTypeMismatch, "non-int operand of + in " + to_sexpr(e));
          }
          return BaseType::Int();
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          if (!check_expr(sig, env, n.arg).is_int()) {
            throw Error(ErrorCode::kTypeMismatch, "non-int operand of * in " + to_sexpr(e));
          }
          return BaseType::Int();
        } else {
          const FuncSig* f = sig.find(n.func);
          if (f == nullptr) throw Error(ErrorCode::kUnknownFunction, n.func);
          if (f->arg_types.size() != n.args.size()) {
            throw Error(ErrorCode::kTypeMismatch, "arity of " + n.func + " in " + to_sexpr(e));
          }
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            BaseType actual = check_expr(sig, env, n.args[i]);
            if (actual != f->arg_types[i]) {
              throw Error(ErrorCode::kTypeMismatch,
                          "argument " + std::to_string(i + 1) + " of " + n.func + ": expected " +
                              f->arg_types[i].str() + ", got " + actual.str());
            }
          }
          return f->ret_type;
        }
      },
      e.node().v);
}

// Comparisons are integer comparisons once bool is read as {0,1}; `=` and
// `!=` also compare two values of the same ui sort.
void check_cmp(const Signature& sig, const TypeEnv& env, const CmpPred& c, const Pred& p) {
  BaseType l = check_expr(sig, env, c.lhs);
  BaseType r = check_expr(sig, env, c.rhs);
  auto numeric = [](const BaseType& t) { return t.is_int() || t.is_bool(); };
  if (numeric(l) && numeric(r)) return;
  const bool eq = c.op == CmpOp::kEq || c.op == CmpOp::kNe;
  if (l == r && eq) return;
  // A literal names a carrier element of a ui sort (extensional solutions).
  if (eq && ((l.is_ui() && c.rhs.is_lit()) || (r.is_ui() && c.lhs.is_lit()))) return;
  throw Error(ErrorCode::kTypeMismatch, "ill-typed comparison " + to_sexpr(p));
}

}  // namespace

BaseType typecheck_expr(const Signature& sig, const TypeEnv& env, const Expr& e) {
  return check_expr(sig, env, e);
}

void typecheck_pred(const Signature& sig, const TypeEnv& env, const Pred& p) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          check_cmp(sig, env, n, p);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          typecheck_pred(sig, env, n.arg);
        } else if constexpr (std::is_same_v<T, BoolVarPred>) {
          const BaseType* t = env.lookup(n.name);
          if (t == nullptr) throw Error(ErrorCode::kUnboundVariable, n.name);
          if (!t->is_bool()) throw Error(ErrorCode::kNonBoolAtom, n.name);
        } else {
          typecheck_pred(sig, env, n.lhs);
          typecheck_pred(sig, env, n.rhs);
        }
      },
      p.node().v);
}

// ---------------------------------------------------------------------------
// Evaluation

Value eval_expr(const VarLookup& vars, const FuncTables& funcs, const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          auto v = vars(n.name);
          if (!v) throw Error(ErrorCode::kMissingBinding, n.name);
          return *v;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          return eval_expr(vars, funcs, n.lhs) + eval_expr(vars, funcs, n.rhs);
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          return n.coeff * eval_expr(vars, funcs, n.arg);
        } else {
          auto table = funcs.find(n.func);
          if (table == funcs.end()) throw Error(ErrorCode::kMissingBinding, n.func);
          Tuple args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(eval_expr(vars, funcs, a));
          auto row = table->second.find(args);
          if (row == table->second.end()) {
            throw Error(ErrorCode::kMissingBinding, n.func + " outside its table at " + to_sexpr(e));
          }
          return row->second;
        }
      },
      e.node().v);
}

bool eval_pred(const VarLookup& vars, const FuncTables& funcs, const Pred& p) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          Value l = eval_expr(vars, funcs, n.lhs);
          Value r = eval_expr(vars, funcs, n.rhs);
          switch (n.op) {
            case CmpOp::kEq: return l == r;
            case CmpOp::kNe: return l != r;
            case CmpOp::kLt: return l < r;
            case CmpOp::kLe: return l <= r;
            case CmpOp::kGt: return l > r;
            case CmpOp::kGe: return l >= r;
          }
          return false;
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return !eval_pred(vars, funcs, n.arg);
        } else if constexpr (std::is_same_v<T, AndPred>) {
          return eval_pred(vars, funcs, n.lhs) && eval_pred(vars, funcs, n.rhs);
        } else if constexpr (std::is_same_v<T, OrPred>) {
          return eval_pred(vars, funcs, n.lhs) || eval_pred(vars, funcs, n.rhs);
        } else if constexpr (std::is_same_v<T, ImpliesPred>) {
          return !eval_pred(vars, funcs, n.lhs) || eval_pred(vars, funcs, n.rhs);
        } else {
          auto v = vars(n.name);
          if (!v) throw Error(ErrorCode::kMissingBinding, n.name);
          return *v == 1;
        }
      },
      p.node().v);
}

namespace {
VarLookup map_lookup(const std::map<std::string, Value>& m) {
  return [&m](const std::string& name) -> std::optional<Value> {
    auto it = m.find(name);
    if (it == m.end()) return std::nullopt;
    return it->second;
  };
}
}  // namespace

Value eval_expr(const Interpretation& interp, const Expr& e) {
  return eval_expr(map_lookup(interp.vars), interp.funcs, e);
}

bool eval_pred(const Interpretation& interp, const Pred& p) {
  return eval_pred(map_lookup(interp.vars), interp.funcs, p);
}

// ---------------------------------------------------------------------------
// Substitution and traversal

Expr substitute(const Expr& e, const Substitution& s) {
  if (s.empty()) return e;
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          auto it = s.find(n.name);
          return it == s.end() ? e : it->second;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          return e;
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          return Expr::add(substitute(n.lhs, s), substitute(n.rhs, s));
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          return Expr::mul(n.coeff, substitute(n.arg, s));
        } else {
          std::vector<Expr> args;
          args.reserve(n.args.size());
          for (const auto& a : n.args) args.push_back(substitute(a, s));
          return Expr::app(n.func, std::move(args));
        }
      },
      e.node().v);
}

Pred substitute(const Pred& p, const Substitution& s) {
  if (s.empty()) return p;
  return std::visit(
      [&](const auto& n) -> Pred {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          return Pred::cmp(n.op, substitute(n.lhs, s), substitute(n.rhs, s));
        } else if constexpr (std::is_same_v<T, NotPred>) {
          return Pred::negation(substitute(n.arg, s));
        } else if constexpr (std::is_same_v<T, AndPred>) {
          return Pred::conj(substitute(n.lhs, s), substitute(n.rhs, s));
        } else if constexpr (std::is_same_v<T, OrPred>) {
          return Pred::disj(substitute(n.lhs, s), substitute(n.rhs, s));
        } else if constexpr (std::is_same_v<T, ImpliesPred>) {
          return Pred::implies(substitute(n.lhs, s), substitute(n.rhs, s));
        } else {
          auto it = s.find(n.name);
          if (it == s.end()) return p;
          if (it->second.is_var()) return Pred::bool_var(it->second.var_name());
          return Pred::cmp(CmpOp::kEq, it->second, Expr::lit(1));
        }
      },
      p.node().v);
}

Expr rename_var(const Expr& e, const std::string& from, const std::string& to) {
  return substitute(e, Substitution{{from, Expr::var(to)}});
}

Pred rename_var(const Pred& p, const std::string& from, const std::string& to) {
  return substitute(p, Substitution{{from, Expr::var(to)}});
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          collect_vars(n.arg, out);
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          for (const auto& a : n.args) collect_vars(a, out);
        }
      },
      e.node().v);
}

void collect_vars(const Pred& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          collect_vars(n.arg, out);
        } else if constexpr (std::is_same_v<T, BoolVarPred>) {
          out.insert(n.name);
        } else {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        }
      },
      p.node().v);
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

std::set<std::string> free_vars(const Pred& p) {
  std::set<std::string> out;
  collect_vars(p, out);
  return out;
}

namespace {
void collect_expr_funcs(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AddExpr>) {
          collect_expr_funcs(n.lhs, out);
          collect_expr_funcs(n.rhs, out);
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          collect_expr_funcs(n.arg, out);
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          out.insert(n.func);
          for (const auto& a : n.args) collect_expr_funcs(a, out);
        }
      },
      e.node().v);
}
}  // namespace

void collect_funcs(const Pred& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          collect_expr_funcs(n.lhs, out);
          collect_expr_funcs(n.rhs, out);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          collect_funcs(n.arg, out);
        } else if constexpr (std::is_same_v<T, BoolVarPred>) {
        } else {
          collect_funcs(n.lhs, out);
          collect_funcs(n.rhs, out);
        }
      },
      p.node().v);
}

std::vector<Pred> atoms(const Pred& p) {
  std::vector<Pred> out;
  std::function<void(const Pred&)> go = [&](const Pred& q) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, CmpPred> || std::is_same_v<T, BoolVarPred>) {
            if (!q.is_true() && !q.is_false()) out.push_back(q);
          } else if constexpr (std::is_same_v<T, NotPred>) {
            go(n.arg);
          } else {
            go(n.lhs);
            go(n.rhs);
          }
        },
        q.node().v);
  };
  go(p);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void flatten_add(const Expr& e, std::vector<Expr>& out) {
  if (const auto* a = std::get_if<AddExpr>(&e.node().v)) {
    flatten_add(a->lhs, out);
    out.push_back(a->rhs);
  } else {
    out.push_back(e);
  }
}

template <class Node>
void flatten_left(const Pred& p, std::vector<Pred>& out) {
  if (const auto* a = std::get_if<Node>(&p.node().v)) {
    flatten_left<Node>(a->lhs, out);
    out.push_back(a->rhs);
  } else {
    out.push_back(p);
  }
}

void print_sexpr(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          std::vector<Expr> terms;
          flatten_add(e, terms);
          const auto* neg = terms.size() == 2 ? std::get_if<MulExpr>(&terms[1].node().v) : nullptr;
          if (neg != nullptr && neg->coeff == -1) {
            os << "(- ";
            print_sexpr(os, terms[0]);
            os << ' ';
            print_sexpr(os, neg->arg);
            os << ')';
            return;
          }
          os << "(+";
          for (const auto& t : terms) {
            os << ' ';
            print_sexpr(os, t);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          if (n.coeff == -1) {
            os << "(- ";
            print_sexpr(os, n.arg);
            os << ')';
            return;
          }
          os << "(* " << n.coeff << ' ';
          print_sexpr(os, n.arg);
          os << ')';
        } else {
          os << '(' << n.func;
          for (const auto& a : n.args) {
            os << ' ';
            print_sexpr(os, a);
          }
          os << ')';
        }
      },
      e.node().v);
}

void print_sexpr(std::ostream& os, const Pred& p) {
  if (p.is_true()) {
    os << "true";
    return;
  }
  if (p.is_false()) {
    os << "false";
    return;
  }
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          os << '(' << to_string(n.op) << ' ';
          print_sexpr(os, n.lhs);
          os << ' ';
          print_sexpr(os, n.rhs);
          os << ')';
        } else if constexpr (std::is_same_v<T, NotPred>) {
          os << "(not ";
          print_sexpr(os, n.arg);
          os << ')';
        } else if constexpr (std::is_same_v<T, AndPred> || std::is_same_v<T, OrPred>) {
          std::vector<Pred> parts;
          flatten_left<T>(p, parts);
          os << (std::is_same_v<T, AndPred> ? "(and" : "(or");
          for (const auto& q : parts) {
            os << ' ';
            print_sexpr(os, q);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, ImpliesPred>) {
          os << "(=> ";
          print_sexpr(os, n.lhs);
          os << ' ';
          print_sexpr(os, n.rhs);
          os << ')';
        } else {
          os << n.name;
        }
      },
      p.node().v);
}

void print_infix(std::ostream& os, const Expr& e, bool nested) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          std::vector<Expr> terms;
          flatten_add(e, terms);
          if (nested) os << '(';
          for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto* lit = std::get_if<LitExpr>(&terms[i].node().v);
            const auto* mul = std::get_if<MulExpr>(&terms[i].node().v);
            if (i > 0 && lit != nullptr && lit->value < 0) {
              os << " - " << -lit->value;
            } else if (i > 0 && mul != nullptr && mul->coeff == -1) {
              os << " - ";
              print_infix(os, mul->arg, true);
            } else {
              if (i > 0) os << " + ";
              print_infix(os, terms[i], true);
            }
          }
          if (nested) os << ')';
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          os << n.coeff << '*';
          print_infix(os, n.arg, true);
        } else {
          os << n.func << '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i > 0) os << ", ";
            print_infix(os, n.args[i], false);
          }
          os << ')';
        }
      },
      e.node().v);
}

const char* infix_op(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

// Precedence: 0 implies, 1 or, 2 and, 3 atoms/not.
void print_infix(std::ostream& os, const Pred& p, int ctx) {
  if (p.is_true()) {
    os << "true";
    return;
  }
  if (p.is_false()) {
    os << "false";
    return;
  }
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          print_infix(os, n.lhs, false);
          os << ' ' << infix_op(n.op) << ' ';
          print_infix(os, n.rhs, false);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          os << '!';
          const bool atomic = std::holds_alternative<BoolVarPred>(n.arg.node().v);
          if (!atomic) os << '(';
          print_infix(os, n.arg, 0);
          if (!atomic) os << ')';
        } else if constexpr (std::is_same_v<T, AndPred> || std::is_same_v<T, OrPred>) {
          const int prec = std::is_same_v<T, AndPred> ? 2 : 1;
          std::vector<Pred> parts;
          flatten_left<T>(p, parts);
          if (ctx > prec) os << '(';
          for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i > 0) os << (prec == 2 ? " && " : " || ");
            print_infix(os, parts[i], prec + 1);
          }
          if (ctx > prec) os << ')';
        } else if constexpr (std::is_same_v<T, ImpliesPred>) {
          if (ctx > 0) os << '(';
          print_infix(os, n.lhs, 1);
          os << " => ";
          print_infix(os, n.rhs, 0);
          if (ctx > 0) os << ')';
        } else {
          os << n.name;
        }
      },
      p.node().v);
}

}  // namespace

std::string to_sexpr(const Expr& e) {
  std::ostringstream os;
  print_sexpr(os, e);
  return os.str();
}

std::string to_sexpr(const Pred& p) {
  std::ostringstream os;
  print_sexpr(os, p);
  return os.str();
}

std::string to_infix(const Expr& e) {
  std::ostringstream os;
  print_infix(os, e, false);
  return os.str();
}

std::string to_infix(const Pred& p) {
  std::ostringstream os;
  print_infix(os, p, 0);
  return os.str();
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  const unsigned char first = static_cast<unsigned char>(s.front());
  if (!std::isalpha(first) && first != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    const unsigned char c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c == '\'' || c == '.';
  });
}

}  // namespace hmc
