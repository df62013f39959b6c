#include <gtest/gtest.h>

#include <filesystem>

#include "gen.hpp"
#include "hmc/error.hpp"
#include "hmc/sexpr.hpp"
#include "hmc/smt.hpp"
#include "hmc/validity.hpp"

namespace hmc {
namespace {

Pred P(std::string_view s) { return parse_pred_text(s); }

TEST(Query, DeclaresFunctionsAndNegatesGoal) {
  Signature sig;
  sig.add(FuncSig{"len", {BaseType::Ui("obj")}, BaseType::Int()});
  const TypeEnv env{{"a", BaseType::Ui("obj")}, {"v", BaseType::Int()}};
  const Pred p = P("(and (<= 0 v) (< v (len a)))");
  const std::string q = emit_solver_query(sig, env, p);
  EXPECT_NE(q.find("(set-logic QF_UFLIA)"), std::string::npos);
  EXPECT_NE(q.find("(declare-sort obj 0)"), std::string::npos);
  EXPECT_NE(q.find("(declare-fun len (obj) Int)"), std::string::npos);
  EXPECT_NE(q.find("(assert (not "), std::string::npos);
  EXPECT_EQ(q.substr(q.size() - 12), "(check-sat)\n");
  EXPECT_EQ(q, emit_solver_query(sig, env, p));
}

TEST(Query, BoolsAreRangedIntegers) {
  const std::string q = emit_solver_query({}, TypeEnv{{"b", BaseType::Bool()}}, Pred::bool_var("b"));
  EXPECT_NE(q.find("(declare-fun b () Int)"), std::string::npos);
  EXPECT_NE(q.find("(assert (and (<= 0 b) (<= b 1)))"), std::string::npos);
}

TEST(Query, ReflexivityIsUnsat) {
  SmtSolver solver;
  const auto out = solver.run(emit_solver_query({}, TypeEnv{{"x", BaseType::Int()}}, P("(= x x)")), {});
  EXPECT_EQ(out.answer, SatAnswer::kUnsat);
}

TEST(Symbols, QuotesWhenNeeded) {
  EXPECT_EQ(smt_symbol("xs"), "xs");
  EXPECT_EQ(smt_symbol("k1.0"), "k1.0");
  EXPECT_EQ(smt_symbol("w#1"), "|w#1|");
  EXPECT_EQ(smt_symbol("and"), "|and|");
}

TEST(Models, ParsesGetValue) {
  const auto m = parse_model_values("((x (- 3))\n (y 4)\n (a obj!val!1))");
  EXPECT_EQ(m.at("x"), -3);
  EXPECT_EQ(m.at("y"), 4);
  EXPECT_EQ(m.at("a"), 1);
}

TEST(Config, FlagBeatsEnvironment) {
  ::setenv("HMC_SMT_CMD", "cvc5 --lang smt2", 1);
  EXPECT_EQ(SolverConfig::from_flags(std::nullopt, std::nullopt, std::nullopt).argv,
            (std::vector<std::string>{"cvc5", "--lang", "smt2"}));
  EXPECT_EQ(SolverConfig::from_flags(std::string("z3 -in"), std::nullopt, 3.0).argv,
            (std::vector<std::string>{"z3", "-in"}));
  ::unsetenv("HMC_SMT_CMD");
  EXPECT_FALSE(SolverConfig::from_flags(std::nullopt, std::nullopt, std::nullopt).persistent);
  EXPECT_TRUE(SolverConfig::from_flags(std::nullopt, std::nullopt, std::nullopt, true).persistent);
}

TEST(Process, MissingSolverIsUnavailable) {
  SolverConfig c;
  c.argv = {"/nonexistent/solver"};
  SmtSolver solver(c);
  try {
    solver.check_valid({}, TypeEnv{{"x", BaseType::Int()}}, P("(= x x)"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSolverUnavailable);
  }
}

TEST(Process, GarbageOutputIsProtocolError) {
  SolverConfig c;
  c.argv = {"/bin/echo", "hello"};
  SmtSolver solver(c);
  try {
    solver.check_valid({}, TypeEnv{{"x", BaseType::Int()}}, P("(= x x)"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSolverProtocol);
  }
}

TEST(Process, EmitSmtDumpsScripts) {
  const auto dir = std::filesystem::temp_directory_path() / "hmc_emit_smt_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  SmtSolver solver(SolverConfig::from_flags(std::nullopt, dir.string(), std::nullopt));
  solver.check_valid({}, TypeEnv{{"x", BaseType::Int()}}, P("(>= x 0)"));
  EXPECT_TRUE(std::filesystem::exists(dir / "q_0.smt2"));
}

TEST(Sessions, AgreeWithOneShot) {
  SolverConfig session;
  session.persistent = true;
  SmtSolver a, b(session);
  gen::Rng rng(5);
  const std::vector<std::string> vars{"x", "y"};
  const TypeEnv env{{"x", BaseType::Int()}, {"y", BaseType::Int()}};
  for (int n = 0; n < 25; ++n) {
    const Pred p = Pred::implies(gen::random_pred(rng, vars), gen::random_pred(rng, vars));
    EXPECT_EQ(a.check_valid({}, env, p).verdict, b.check_valid({}, env, p).verdict) << to_sexpr(p);
  }
}

}  // namespace
}  // namespace hmc
