#include <gtest/gtest.h>

#include <memory>

#include "gen.hpp"
#include "hmc/error.hpp"
#include "hmc/sexpr.hpp"
#include "hmc/validity.hpp"

namespace hmc {
namespace {

Pred P(std::string_view s) { return parse_pred_text(s); }
Expr E(std::string_view s) { return parse_expr_text(s); }

Signature list_sig() {
  Signature sig;
  sig.add(FuncSig{"len", {BaseType::Ui("list")}, BaseType::Int()});
  return sig;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(Typecheck, ArithmeticIsInt) {
  EXPECT_EQ(typecheck_expr({}, TypeEnv{{"x", BaseType::Int()}}, E("(+ x 1)")), BaseType::Int());
}

TEST(Typecheck, UninterpretedApplication) {
  EXPECT_EQ(typecheck_expr(list_sig(), TypeEnv{{"xs", BaseType::Ui("list")}}, E("(len xs)")), BaseType::Int());
}

TEST(Typecheck, UnboundVariable) {
  EXPECT_EQ(code_of([] { typecheck_expr({}, {}, E("x")); }), ErrorCode::kUnboundVariable);
}

TEST(Typecheck, UnknownFunction) {
  EXPECT_EQ(code_of([] { typecheck_expr({}, TypeEnv{{"x", BaseType::Int()}}, E("(f x)")); }),
            ErrorCode::kUnknownFunction);
}

TEST(Typecheck, AddingUiIsMismatch) {
  EXPECT_EQ(code_of([] { typecheck_expr({}, TypeEnv{{"xs", BaseType::Ui("list")}}, E("(+ xs 1)")); }),
            ErrorCode::kTypeMismatch);
}

TEST(Typecheck, Predicates) {
  const TypeEnv env{{"i", BaseType::Int()}, {"xs", BaseType::Ui("list")}};
  EXPECT_NO_THROW(typecheck_pred(list_sig(), env, P("(<= 0 (len xs))")));
  EXPECT_NO_THROW(typecheck_pred({}, {}, Pred::truth()));
  EXPECT_NO_THROW(typecheck_pred({}, TypeEnv{{"b", BaseType::Bool()}}, Pred::bool_var("b")));
  EXPECT_EQ(code_of([] { typecheck_pred({}, TypeEnv{{"x", BaseType::Int()}}, Pred::bool_var("x")); }),
            ErrorCode::kNonBoolAtom);
}

TEST(Eval, Expressions) {
  Interpretation s{{{"x", 3}}, {}};
  EXPECT_EQ(eval_expr(s, E("(+ x 1)")), 4);
  Interpretation t{{{"x", 2}}, {}};
  EXPECT_EQ(eval_expr(t, E("(* 3 x)")), 6);
  Interpretation u{{{"xs", 0}}, {{"len", {{{0}, 2}}}}};
  EXPECT_EQ(eval_expr(u, E("(len xs)")), 2);
}

TEST(Eval, MissingBinding) {
  EXPECT_EQ(code_of([] { eval_expr(Interpretation{}, E("y")); }), ErrorCode::kMissingBinding);
}

TEST(Eval, Predicates) {
  Interpretation s{{{"x", 3}}, {}};
  EXPECT_TRUE(eval_pred(s, P("(>= x 0)")));
  EXPECT_FALSE(eval_pred(s, Pred::falsity()));
  Interpretation one{{{"x", 1}}, {}};
  EXPECT_TRUE(eval_pred(one, P("(=> (= x 1) (= (+ x 1) 2))")));
}

TEST(Eval, TrueAndFalseAreComparisons) {
  EXPECT_EQ(Pred::truth(), P("(= 0 0)"));
  EXPECT_EQ(Pred::falsity(), P("(= 0 1)"));
  EXPECT_EQ(to_sexpr(Pred::truth()), "true");
}

TEST(Eval, BoolAtomDesugarsToEqualsOne) {
  for (Value b : {0, 1}) {
    Interpretation s{{{"b", b}}, {}};
    EXPECT_EQ(eval_pred(s, Pred::bool_var("b")), eval_pred(s, P("(= b 1)")));
  }
}

TEST(Printing, SubtractionAndNegationRoundTrip) {
  for (const char* text : {"(- (len xs) 1)", "(- x)", "(+ i (len xs))", "(* 3 x)"}) {
    const Expr e = E(text);
    EXPECT_EQ(to_sexpr(e), text);
    EXPECT_EQ(E(to_sexpr(e)), e);
  }
}

TEST(Printing, Infix) {
  EXPECT_EQ(to_infix(P("(and (<= i v) (< v (len xs)))")), "i <= v && v < len(xs)");
}

TEST(Substitute, ReplacesSimultaneously) {
  const Pred p = substitute(P("(< x y)"), Substitution{{"x", E("y")}, {"y", E("x")}});
  EXPECT_EQ(p, P("(< y x)"));
}

TEST(Oracle, Examples) {
  const OracleMode mode{};
  const TypeEnv x{{"x", BaseType::Int()}};
  EXPECT_EQ(check_valid({}, x, P("(= x x)"), mode).verdict, Validity::kValid);
  const auto neg = check_valid({}, x, P("(>= x 0)"), mode);
  ASSERT_EQ(neg.verdict, Validity::kInvalid);
  ASSERT_TRUE(neg.witness.has_value());
  EXPECT_LT(neg.witness->vars.at("x"), 0);
  const TypeEnv env{{"i", BaseType::Int()}, {"xs", BaseType::Ui("list")}, {"v", BaseType::Int()}};
  EXPECT_EQ(check_valid(list_sig(), env, P("(=> (and (<= 0 (len xs)) (= v i)) true)"), mode).verdict,
            Validity::kValid);
}

TEST(Oracle, TableSampling) {
  Signature sig;
  sig.add(FuncSig{"f", {BaseType::Int()}, BaseType::Int()});
  ValueDomain d;
  EXPECT_EQ(table_count(sig.funcs()[0], d), 3125U);
  const auto sampled = enumerate_func_tables(sig, d, 16, 7);
  EXPECT_FALSE(sampled.exhaustive);
  EXPECT_EQ(sampled.tables.size(), 16U);
  EXPECT_EQ(enumerate_func_tables(sig, d, 16, 7).tables, sampled.tables);
  d.int_range = {0, 1};
  EXPECT_TRUE(enumerate_func_tables(sig, d, 16, 0).exhaustive);
}

TEST(Domain, RejectsRangesWithoutZeroAndOne) {
  ValueDomain d;
  d.int_range = {1, 3};
  EXPECT_THROW(d.validate(), Error);
  d.int_range = {0, 1};
  EXPECT_NO_THROW(d.validate());
}

TEST(Solver, Examples) {
  SolverMode mode{std::make_shared<SmtSolver>()};
  const TypeEnv x{{"x", BaseType::Int()}};
  EXPECT_EQ(check_valid({}, x, P("(= x x)"), mode).verdict, Validity::kValid);
  const auto neg = check_valid({}, x, P("(>= x 0)"), mode);
  ASSERT_EQ(neg.verdict, Validity::kInvalid);
  ASSERT_TRUE(neg.witness.has_value());
  EXPECT_LT(neg.witness->vars.at("x"), 0);
  EXPECT_EQ(check_valid({}, TypeEnv{{"b", BaseType::Bool()}}, P("(or (= b 0) (= b 1))"), mode).verdict,
            Validity::kValid);
}

TEST(Property, OracleInvalidImpliesSolverInvalid) {
  gen::Rng rng(11);
  SolverMode solver{std::make_shared<SmtSolver>()};
  const std::vector<std::string> vars{"a", "b", "c"};
  TypeEnv env;
  for (const auto& v : vars) env.bind(v, BaseType::Int());
  int oracle_invalid = 0;
  for (int n = 0; n < 60; ++n) {
    const Pred p = Pred::implies(gen::random_pred(rng, vars), gen::random_pred(rng, vars));
    const auto o = check_valid({}, env, p, OracleMode{});
    const auto s = check_valid({}, env, p, solver);
    if (o.verdict == Validity::kInvalid) {
      ++oracle_invalid;
      EXPECT_EQ(s.verdict, Validity::kInvalid) << to_sexpr(p);
    }
    if (s.verdict == Validity::kValid) EXPECT_EQ(o.verdict, Validity::kValid) << to_sexpr(p);
  }
  EXPECT_GT(oracle_invalid, 0);
}

TEST(Property, EvaluationIsTotalOnWellTypedInputs) {
  gen::Rng rng(12);
  const std::vector<std::string> vars{"a", "b"};
  for (int n = 0; n < 200; ++n) {
    const Pred p = gen::random_pred(rng, vars);
    for (Value a : {-2, 0, 2}) {
      for (Value b : {-1, 1}) EXPECT_NO_THROW(eval_pred(Interpretation{{{"a", a}, {"b", b}}, {}}, p));
    }
  }
}

}  // namespace
}  // namespace hmc
