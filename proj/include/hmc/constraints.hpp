#pragma once

// Refinement types, environments, WF and subtyping constraints, solutions,
// the embedding into the logic, and constraint satisfaction.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmc/logic.hpp"
#include "hmc/validity.hpp"

namespace hmc {

// Spelling of the value variable in constraint and solution files.
inline constexpr const char* kValueVar = "v";

struct KVarSig {
  std::string id;
  BaseType value_type = BaseType::Int();
  std::vector<std::pair<std::string, BaseType>> params;

  std::size_t arity() const { return params.size() + 1; }
  // (v : value_type; params...)
  TypeEnv scope() const;
  // Component types value_type, then param types.
  std::vector<BaseType> component_types() const;

  friend bool operator==(const KVarSig&, const KVarSig&) = default;
};

struct KApp {
  std::string kvar;
  std::vector<Expr> args;

  friend bool operator==(const KApp&, const KApp&) = default;
};

class Refinement {
 public:
  static Refinement concrete(Pred p) { return Refinement(std::move(p)); }
  static Refinement kapp(std::string kvar, std::vector<Expr> args = {}) {
    return Refinement(KApp{std::move(kvar), std::move(args)});
  }

  bool is_kapp() const { return std::holds_alternative<KApp>(v_); }
  const Pred& pred() const { return std::get<Pred>(v_); }
  const KApp& app() const { return std::get<KApp>(v_); }

  friend bool operator==(const Refinement&, const Refinement&) = default;

 private:
  explicit Refinement(std::variant<Pred, KApp> v) : v_(std::move(v)) {}
  std::variant<Pred, KApp> v_;
};

struct RefType {
  BaseType value_type = BaseType::Int();
  Refinement refinement = Refinement::concrete(Pred::truth());

  friend bool operator==(const RefType&, const RefType&) = default;
};

using RefBinding = std::pair<std::string, RefType>;
using RefEnv = std::vector<RefBinding>;

struct SubConstraint {
  std::string label;
  RefEnv env;
  RefType lhs;
  RefType rhs;

  friend bool operator==(const SubConstraint&, const SubConstraint&) = default;
};

struct ConstraintSet {
  Signature funcs;
  std::vector<KVarSig> kvars;
  std::vector<SubConstraint> subs;

  const KVarSig* find_kvar(const std::string& id) const;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;
};

struct Solution {
  enum class Form { kExtensional, kIntensional };
  Form form = Form::kIntensional;
  std::map<std::string, std::set<Tuple>> relations;
  std::map<std::string, Pred> predicates;

  static Solution extensional(std::map<std::string, std::set<Tuple>> rel = {});
  static Solution intensional(std::map<std::string, Pred> preds = {});

  bool covers(const std::string& kvar) const;

  friend bool operator==(const Solution&, const Solution&) = default;
};

// Fills omitted trailing KApp arguments with the κ's own parameter names.
ConstraintSet normalize(const ConstraintSet& cs);

// Throws kIllFormed / kTypeMismatch / ... describing the first problem:
// undeclared κs, arity, scoping (a binding sees earlier names and v; lhs and
// rhs see the whole env and v), typing, matching lhs/rhs base types, and no
// v inside the arguments of KApps in the env or on the lhs.
void check_well_formed(const ConstraintSet& cs);

Pred embed_type(const RefType& t);
Pred embed_env(const RefEnv& g);
Pred embed_sub(const SubConstraint& c);
TypeEnv shape(const RefEnv& g);

// Replaces every KApp by the κ's solution instantiated at its arguments.
ConstraintSet apply_solution(const ConstraintSet& cs, const Solution& s);
Refinement apply_solution(const ConstraintSet& cs, const Solution& s, const Refinement& r);

struct SatResult {
  enum class Status { kSatisfied, kViolated, kUnknown };
  Status status = Status::kSatisfied;
  std::string label;
  std::optional<Interpretation> witness;
  std::string detail;
};

const char* to_string(SatResult::Status s);

// Checks each constraint in file order; reports the first VIOLATED one, or
// UNKNOWN when none is violated but some answer was UNKNOWN.
SatResult check_satisfied(const ConstraintSet& cs, const Solution& s, const CheckMode& mode);

// The validity query for one constraint after the solution is applied:
// environment shape(G); v and the embedded implication.
std::pair<TypeEnv, Pred> constraint_query(const SubConstraint& applied);

// Solution predicates must mention only v and the κ's parameters.
void check_solution_well_formed(const ConstraintSet& cs, const Solution& s);

// ---------------------------------------------------------------------------
// Text formats

ConstraintSet parse_constraints(std::string_view text);
std::string print_constraints(const ConstraintSet& cs);
// `(solution (NAME PRED)...)`
Solution parse_solution(std::string_view text);
std::string print_solution(const Solution& s);
std::string print_refinement(const Refinement& r);

}  // namespace hmc
