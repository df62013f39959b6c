#pragma once

// Refinement logic: base types, affine expressions with uninterpreted
// functions, quantifier-free predicates, environments and evaluation.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hmc {

using Value = std::int64_t;
using Tuple = std::vector<Value>;

class BaseType {
 public:
  enum class Kind { kInt, kBool, kUi };

  static BaseType Int() { return BaseType(Kind::kInt, {}); }
  static BaseType Bool() { return BaseType(Kind::kBool, {}); }
  static BaseType Ui(std::string name) { return BaseType(Kind::kUi, std::move(name)); }

  Kind kind() const { return kind_; }
  bool is_int() const { return kind_ == Kind::kInt; }
  bool is_bool() const { return kind_ == Kind::kBool; }
  bool is_ui() const { return kind_ == Kind::kUi; }
  const std::string& ui_name() const { return ui_name_; }

  // `int`, `bool` or `(ui NAME)`.
  std::string str() const;

  friend bool operator==(const BaseType&, const BaseType&) = default;
  friend auto operator<=>(const BaseType&, const BaseType&) = default;

 private:
  BaseType(Kind kind, std::string name) : kind_(kind), ui_name_(std::move(name)) {}

  Kind kind_;
  std::string ui_name_;
};

struct FuncSig {
  std::string name;
  std::vector<BaseType> arg_types;
  BaseType ret_type = BaseType::Int();

  friend bool operator==(const FuncSig&, const FuncSig&) = default;
};

// The declared uninterpreted functions. Each name has exactly one signature.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<FuncSig> funcs);

  void add(FuncSig sig);
  const FuncSig* find(const std::string& name) const;
  const std::vector<FuncSig>& funcs() const { return funcs_; }
  bool empty() const { return funcs_.empty(); }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<FuncSig> funcs_;
};

// ---------------------------------------------------------------------------
// Expressions

struct ExprNode;

class Expr {
 public:
  static Expr var(std::string name);
  static Expr lit(Value value);
  static Expr add(Expr lhs, Expr rhs);
  static Expr mul(Value coeff, Expr arg);
  static Expr app(std::string func, std::vector<Expr> args);

  const ExprNode& node() const { return *node_; }

  bool is_var() const;
  bool is_lit() const;
  // Name of a Var node; empty otherwise.
  const std::string& var_name() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct VarExpr {
  std::string name;
};
struct LitExpr {
  Value value;
};
struct AddExpr {
  Expr lhs;
  Expr rhs;
};
// Multiplication by a literal coefficient only.
struct MulExpr {
  Value coeff;
  Expr arg;
};
struct AppExpr {
  std::string func;
  std::vector<Expr> args;
};

struct ExprNode {
  std::variant<VarExpr, LitExpr, AddExpr, MulExpr, AppExpr> v;
};

// ---------------------------------------------------------------------------
// Predicates

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

const char* to_string(CmpOp op);
CmpOp negate(CmpOp op);

struct PredNode;

class Pred {
 public:
  // `true` is the comparison 0 = 0 and `false` is 0 = 1.
  static Pred truth();
  static Pred falsity();
  static Pred cmp(CmpOp op, Expr lhs, Expr rhs);
  static Pred negation(Pred p);
  static Pred conj(Pred lhs, Pred rhs);
  static Pred disj(Pred lhs, Pred rhs);
  static Pred implies(Pred lhs, Pred rhs);
  static Pred bool_var(std::string name);

  // Left-nested n-ary forms; empty conjunction is `true`, empty disjunction
  // is `false`, singletons are returned unchanged.
  static Pred conj(const std::vector<Pred>& ps);
  static Pred disj(const std::vector<Pred>& ps);

  const PredNode& node() const { return *node_; }

  bool is_true() const;
  bool is_false() const;

  friend bool operator==(const Pred& a, const Pred& b);
  friend std::strong_ordering operator<=>(const Pred& a, const Pred& b);

 private:
  explicit Pred(std::shared_ptr<const PredNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const PredNode> node_;
};

struct CmpPred {
  CmpOp op;
  Expr lhs;
  Expr rhs;
};
struct NotPred {
  Pred arg;
};
struct AndPred {
  Pred lhs;
  Pred rhs;
};
struct OrPred {
  Pred lhs;
  Pred rhs;
};
struct ImpliesPred {
  Pred lhs;
  Pred rhs;
};
// A bool-typed variable used as an atom; means `name = 1`.
struct BoolVarPred {
  std::string name;
};

struct PredNode {
  std::variant<CmpPred, NotPred, AndPred, OrPred, ImpliesPred, BoolVarPred> v;
};

// Flattens a left- or right-nested conjunction into its conjuncts.
std::vector<Pred> conjuncts(const Pred& p);

// ---------------------------------------------------------------------------
// Environments, domains and interpretations

class TypeEnv {
 public:
  using Binding = std::pair<std::string, BaseType>;

  TypeEnv() = default;
  TypeEnv(std::initializer_list<Binding> bindings);

  // Throws kIllFormed on a duplicate name.
  void bind(std::string name, BaseType type);
  TypeEnv extended(std::string name, BaseType type) const;

  const BaseType* lookup(const std::string& name) const;
  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  friend bool operator==(const TypeEnv&, const TypeEnv&) = default;

 private:
  std::vector<Binding> bindings_;
};

// The finite carrier used by the enumeration oracle and the IMP interpreter.
struct ValueDomain {
  struct Range {
    Value lo;
    Value hi;
    friend bool operator==(const Range&, const Range&) = default;
  };

  Range int_range{-2, 2};
  Range default_ui_range{0, 1};
  std::map<std::string, Range> ui_ranges;

  // Throws kIllFormed if a range is empty or int_range misses 0 or 1.
  void validate() const;

  Range range(const BaseType& type) const;
  std::vector<Value> values(const BaseType& type) const;
  Value minimum(const BaseType& type) const { return range(type).lo; }
  bool contains(const BaseType& type, Value v) const;
  std::size_t cardinality(const BaseType& type) const;
};

using FuncTable = std::map<Tuple, Value>;
using FuncTables = std::map<std::string, FuncTable>;

struct Interpretation {
  std::map<std::string, Value> vars;
  FuncTables funcs;

  friend bool operator==(const Interpretation&, const Interpretation&) = default;
};

// Looks a variable up; nullopt means unbound.
using VarLookup = std::function<std::optional<Value>(const std::string&)>;

// ---------------------------------------------------------------------------
// Operations

BaseType typecheck_expr(const Signature& sig, const TypeEnv& env, const Expr& e);
void typecheck_pred(const Signature& sig, const TypeEnv& env, const Pred& p);

Value eval_expr(const Interpretation& interp, const Expr& e);
bool eval_pred(const Interpretation& interp, const Pred& p);
Value eval_expr(const VarLookup& vars, const FuncTables& funcs, const Expr& e);
bool eval_pred(const VarLookup& vars, const FuncTables& funcs, const Pred& p);

using Substitution = std::map<std::string, Expr>;

// Simultaneous capture-free substitution (the logic has no binders). A
// BoolVar whose name is substituted by a variable is renamed; substituted by
// any other expression it becomes `e = 1`.
Expr substitute(const Expr& e, const Substitution& s);
Pred substitute(const Pred& p, const Substitution& s);

Expr rename_var(const Expr& e, const std::string& from, const std::string& to);
Pred rename_var(const Pred& p, const std::string& from, const std::string& to);

void collect_vars(const Expr& e, std::set<std::string>& out);
void collect_vars(const Pred& p, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& e);
std::set<std::string> free_vars(const Pred& p);
void collect_funcs(const Pred& p, std::set<std::string>& out);

// Atomic comparisons and bool atoms, left to right.
std::vector<Pred> atoms(const Pred& p);

// Canonical s-expression rendering, e.g. `(and (<= 0 v) (< v (len a)))`.
std::string to_sexpr(const Expr& e);
std::string to_sexpr(const Pred& p);
// Infix rendering for reports, e.g. `k1.1 <= k1.0 && k1.0 < len(k1.2)`.
std::string to_infix(const Expr& e);
std::string to_infix(const Pred& p);

bool is_identifier(const std::string& s);

}  // namespace hmc
