#include "hmc/constraints.hpp"

#include "hmc/error.hpp"

namespace hmc {

TypeEnv KVarSig::scope() const {
  TypeEnv env;
  env.bind(kValueVar, value_type);
  for (const auto& [name, t] : params) env.bind(name, t);
  return env;
}

std::vector<BaseType> KVarSig::component_types() const {
  std::vector<BaseType> out{value_type};
  for (const auto& [name, t] : params) out.push_back(t);
  return out;
}

const KVarSig* ConstraintSet::find_kvar(const std::string& id) const {
  for (const auto& k : kvars) {
    if (k.id == id) return &k;
  }
  return nullptr;
}

Solution Solution::extensional(std::map<std::string, std::set<Tuple>> rel) {
  Solution s;
  s.form = Form::kExtensional;
  s.relations = std::move(rel);
  return s;
}

Solution Solution::intensional(std::map<std::string, Pred> preds) {
  Solution s;
  s.form = Form::kIntensional;
  s.predicates = std::move(preds);
  return s;
}

bool Solution::covers(const std::string& kvar) const {
  return form == Form::kExtensional ? relations.count(kvar) != 0 : predicates.count(kvar) != 0;
}

const char* to_string(SatResult::Status s) {
  switch (s) {
    case SatResult::Status::kSatisfied: return "SATISFIED";
    case SatResult::Status::kViolated: return "VIOLATED";
    case SatResult::Status::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// Normalization and well-formedness

namespace {

RefType normalize_type(const ConstraintSet& cs, const std::string& label, const RefType& t) {
  if (!t.refinement.is_kapp()) return t;
  const KApp& app = t.refinement.app();
  const KVarSig* sig = cs.find_kvar(app.kvar);
  if (sig == nullptr) {
    throw Error(ErrorCode::kUndeclaredKVar, app.kvar + " in constraint " + label);
  }
  if (app.args.size() > sig->params.size()) {
    throw Error(ErrorCode::kArityMismatch,
                app.kvar + " applied to " + std::to_string(app.args.size()) +
                    " arguments (takes " + std::to_string(sig->params.size()) +
                    ") in constraint " + label);
  }
  std::vector<Expr> args = app.args;
  for (std::size_t i = args.size(); i < sig->params.size(); ++i) {
    args.push_back(Expr::var(sig->params[i].first));
  }
  return RefType{t.value_type, Refinement::kapp(app.kvar, std::move(args))};
}

void check_name(const std::string& name, const std::string& where) {
  if (!is_identifier(name) || name.find('.') != std::string::npos) {
    throw Error(ErrorCode::kIllFormed, "bad variable name '" + name + "' in " + where);
  }
  if (name == kValueVar) {
    throw Error(ErrorCode::kIllFormed, "'v' is reserved for the value variable (" + where + ")");
  }
}

void check_refinement(const ConstraintSet& cs, const TypeEnv& scope, const RefType& t,
                      bool allow_v_in_args, const std::string& where) {
  const TypeEnv with_v = scope.extended(kValueVar, t.value_type);
  if (!t.refinement.is_kapp()) {
    try {
      typecheck_pred(cs.funcs, with_v, t.refinement.pred());
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " in " + where);
    }
    return;
  }
  const KApp& app = t.refinement.app();
  const KVarSig* sig = cs.find_kvar(app.kvar);
  if (sig == nullptr) throw Error(ErrorCode::kUndeclaredKVar, app.kvar + " in " + where);
  if (sig->value_type != t.value_type) {
    throw Error(ErrorCode::kTypeMismatch, app.kvar + " has value type " + sig->value_type.str() +
                                              ", used at " + t.value_type.str() + " in " + where);
  }
  if (app.args.size() != sig->params.size()) {
    throw Error(ErrorCode::kArityMismatch, app.kvar + " in " + where);
  }
  const TypeEnv& arg_scope = allow_v_in_args ? with_v : scope;
  for (std::size_t i = 0; i < app.args.size(); ++i) {
    BaseType at = BaseType::Int();
    try {
      at = typecheck_expr(cs.funcs, arg_scope, app.args[i]);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " in argument " + std::to_string(i + 1) +
                                " of " + app.kvar + " in " + where);
    }
    if (at != sig->params[i].second) {
      throw Error(ErrorCode::kTypeMismatch,
                  "argument " + std::to_string(i + 1) + " of " + app.kvar + " has type " +
                      at.str() + ", expected " + sig->params[i].second.str() + " in " + where);
    }
  }
}

}  // namespace

ConstraintSet normalize(const ConstraintSet& cs) {
  ConstraintSet out = cs;
  for (auto& c : out.subs) {
    for (auto& [name, t] : c.env) t = normalize_type(cs, c.label, t);
    c.lhs = normalize_type(cs, c.label, c.lhs);
    c.rhs = normalize_type(cs, c.label, c.rhs);
  }
  return out;
}

void check_well_formed(const ConstraintSet& cs) {
  std::set<std::string> ids;
  for (const auto& k : cs.kvars) {
    if (!is_identifier(k.id)) throw Error(ErrorCode::kIllFormed, "bad kvar name '" + k.id + "'");
    if (!ids.insert(k.id).second) throw Error(ErrorCode::kIllFormed, "duplicate kvar " + k.id);
    std::set<std::string> names;
    for (const auto& [name, t] : k.params) {
      check_name(name, "kvar " + k.id);
      if (!names.insert(name).second) {
        throw Error(ErrorCode::kIllFormed, "duplicate parameter " + name + " of kvar " + k.id);
      }
    }
  }
  std::set<std::string> labels;
  for (const auto& c : cs.subs) {
    if (!labels.insert(c.label).second) {
      throw Error(ErrorCode::kIllFormed, "duplicate constraint label " + c.label);
    }
    TypeEnv scope;
    for (const auto& [name, t] : c.env) {
      check_name(name, "constraint " + c.label);
      check_refinement(cs, scope, t, false, "binding " + name + " of constraint " + c.label);
      if (scope.lookup(name) != nullptr) {
        throw Error(ErrorCode::kIllFormed, "duplicate binding " + name + " in constraint " + c.label);
      }
      scope.bind(name, t.value_type);
    }
    if (c.lhs.value_type != c.rhs.value_type) {
      throw Error(ErrorCode::kTypeMismatch, "lhs and rhs base types differ in constraint " + c.label);
    }
    check_refinement(cs, scope, c.lhs, false, "lhs of constraint " + c.label);
    check_refinement(cs, scope, c.rhs, true, "rhs of constraint " + c.label);
  }
}

// ---------------------------------------------------------------------------
// Embedding

Pred embed_type(const RefType& t) {
  if (t.refinement.is_kapp()) throw Error(ErrorCode::kUnresolvedKVar, t.refinement.app().kvar);
  return t.refinement.pred();
}

Pred embed_env(const RefEnv& g) {
  std::vector<Pred> parts;
  for (const auto& [name, t] : g) parts.push_back(rename_var(embed_type(t), kValueVar, name));
  return Pred::conj(parts);
}

Pred embed_sub(const SubConstraint& c) {
  return Pred::implies(embed_env(c.env), Pred::implies(embed_type(c.lhs), embed_type(c.rhs)));
}

TypeEnv shape(const RefEnv& g) {
  TypeEnv env;
  for (const auto& [name, t] : g) env.bind(name, t.value_type);
  return env;
}

// ---------------------------------------------------------------------------
// Solutions

Refinement apply_solution(const ConstraintSet& cs, const Solution& s, const Refinement& r) {
  if (!r.is_kapp()) return r;
  const KApp& app = r.app();
  const KVarSig* sig = cs.find_kvar(app.kvar);
  if (sig == nullptr) throw Error(ErrorCode::kUndeclaredKVar, app.kvar);
  if (!s.covers(app.kvar)) throw Error(ErrorCode::kMissingKVar, app.kvar);
  if (app.args.size() != sig->params.size()) throw Error(ErrorCode::kArityMismatch, app.kvar);
  if (s.form == Solution::Form::kIntensional) {
    Substitution sub;
    for (std::size_t i = 0; i < app.args.size(); ++i) sub.insert_or_assign(sig->params[i].first, app.args[i]);
    return Refinement::concrete(substitute(s.predicates.at(app.kvar), sub));
  }
  std::vector<Pred> disjuncts;
  for (const Tuple& t : s.relations.at(app.kvar)) {
    if (t.size() != sig->arity()) {
      throw Error(ErrorCode::kArityMismatch, "tuple of wrong width for " + app.kvar);
    }
    std::vector<Pred> eqs{Pred::cmp(CmpOp::kEq, Expr::var(kValueVar), Expr::lit(t[0]))};
    for (std::size_t i = 0; i < app.args.size(); ++i) {
      eqs.push_back(Pred::cmp(CmpOp::kEq, app.args[i], Expr::lit(t[i + 1])));
    }
    disjuncts.push_back(Pred::conj(eqs));
  }
  return Refinement::concrete(Pred::disj(disjuncts));
}

ConstraintSet apply_solution(const ConstraintSet& cs, const Solution& s) {
  ConstraintSet out = cs;
  auto apply = [&](RefType& t) { t.refinement = apply_solution(cs, s, t.refinement); };
  for (auto& c : out.subs) {
    for (auto& [name, t] : c.env) apply(t);
    apply(c.lhs);
    apply(c.rhs);
  }
  return out;
}

std::pair<TypeEnv, Pred> constraint_query(const SubConstraint& applied) {
  TypeEnv env = shape(applied.env);
  env.bind(kValueVar, applied.lhs.value_type);
  return {std::move(env), embed_sub(applied)};
}

SatResult check_satisfied(const ConstraintSet& cs, const Solution& s, const CheckMode& mode) {
  const ConstraintSet applied = apply_solution(normalize(cs), s);
  SatResult result;
  for (const auto& c : applied.subs) {
    auto [env, p] = constraint_query(c);
    ValidityAnswer ans = check_valid(cs.funcs, env, p, mode);
    if (ans.verdict == Validity::kInvalid) {
      result.status = SatResult::Status::kViolated;
      result.label = c.label;
      result.witness = std::move(ans.witness);
      result.detail = "";
      return result;
    }
    if (ans.verdict == Validity::kUnknown && result.status == SatResult::Status::kSatisfied) {
      result.status = SatResult::Status::kUnknown;
      result.label = c.label;
      result.detail = ans.detail;
    }
  }
  return result;
}

void check_solution_well_formed(const ConstraintSet& cs, const Solution& s) {
  if (s.form == Solution::Form::kExtensional) {
    for (const auto& [k, tuples] : s.relations) {
      const KVarSig* sig = cs.find_kvar(k);
      if (sig == nullptr) throw Error(ErrorCode::kUndeclaredKVar, k + " in solution");
      for (const auto& t : tuples) {
        if (t.size() != sig->arity()) {
          throw Error(ErrorCode::kArityMismatch, "tuple of wrong width for " + k);
        }
      }
    }
    return;
  }
  for (const auto& [k, p] : s.predicates) {
    const KVarSig* sig = cs.find_kvar(k);
    if (sig == nullptr) throw Error(ErrorCode::kUndeclaredKVar, k + " in solution");
    try {
      typecheck_pred(cs.funcs, sig->scope(), p);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " in the solution for " + k);
    }
  }
}

}  // namespace hmc
