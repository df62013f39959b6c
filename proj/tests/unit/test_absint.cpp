#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "gen.hpp"
#include "hmc/pipeline.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {
namespace {

const std::string kSource = HMC_SOURCE_DIR;

Pred P(std::string_view s) { return parse_pred_text(s); }

Translation iteri() {
  return translate_constraints(parse_constraints(read_file(kSource + "/samples/iteri_mask.hmc")), true, false);
}

Validator smt(const Program& p) { return make_validator(p.funcs, SolverMode{std::make_shared<SmtSolver>()}); }

bool contains(const std::vector<Pred>& ps, const Pred& q) { return std::find(ps.begin(), ps.end(), q) != ps.end(); }

TEST(Harvest, BoundsCheckReachesTheArrayKVar) {
  const auto t = iteri();
  const PredMap syn = syntactic_predicates(t.program);
  EXPECT_TRUE(contains(syn.at("k2"), P("(<= 0 k2.0)")));
  EXPECT_TRUE(contains(syn.at("k2"), P("(< k2.0 (len k2.1))")));
  const PredMap all = harvest_predicates(t.program);
  EXPECT_TRUE(contains(all.at("k2"), P("(<= 0 k2.0)")));
  EXPECT_TRUE(contains(all.at("k2"), P("(< k2.0 (len k2.1))")));
  EXPECT_LE(all.at("k1").size(), HarvestOptions{}.max_per_kvar);
}

TEST(Harvest, BlocksWithoutConditionsGiveNothing) {
  const Program p = parse_imp("loop { /* w */ havoc v; set k (v) }");
  EXPECT_TRUE(syntactic_predicates(p).at("k").empty());
}

TEST(Harvest, DropsAtomsOverUnwrittenVariables) {
  const Program p = parse_imp("loop { /* w */ havoc v; havoc z; assume (< z 3); assume (<= 0 v); set k (v) }");
  const auto preds = syntactic_predicates(p).at("k");
  EXPECT_EQ(preds, (std::vector<Pred>{P("(<= 0 k.0)")}));
}

TEST(Harvest, ExtraPredicatesComeFirst) {
  const auto t = iteri();
  const PredMap extra = parse_predicates("(preds (k1 (<= k1.0 7)))");
  EXPECT_EQ(harvest_predicates(t.program, {}, extra).at("k1").front(), P("(<= k1.0 7)"));
}

TEST(AbstractPost, SeedBlockFixesTheLowerBound) {
  const auto t = iteri();
  const PredMap preds{{"k1", {P("(<= k1.1 k1.0)"), P("(< k1.0 (len k1.2))")}}, {"k2", {}}};
  const PostResult r = abstract_post(t.program, t.program.blocks[0], AbstractInvariant{}, preds, smt(t.program));
  EXPECT_TRUE(r.holds);
  const auto& vs = r.inv.vectors.at("k1");
  EXPECT_EQ(vs.size(), 2U);
  for (const auto& v : vs) EXPECT_TRUE(v[0]);
}

TEST(AbstractPost, TrueAssertHolds) {
  const Program p = parse_imp("loop { /* b */ havoc x; assert (true) }");
  const auto r = abstract_post(p, p.blocks[0], {}, {}, smt(p));
  EXPECT_TRUE(r.holds);
}

TEST(AbstractPost, GetFromEmptyInvariantHalts) {
  const Program p = parse_imp("loop { /* r */ get k (x); assert (= x 5) }");
  const PredMap preds{{"k", {P("(<= 0 k.0)")}}};
  const AbstractInvariant empty{{{"k", {}}}};
  const auto r = abstract_post(p, p.blocks[0], empty, preds, smt(p));
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.inv, empty);
}

TEST(Solve, IteriMaskProves) {
  const auto t = iteri();
  const PredMap preds = harvest_predicates(t.program);
  auto solver = std::make_shared<SmtSolver>();
  const SolveResult sr = solve(t.program, preds, make_validator(t.program.funcs, SolverMode{solver}));
  ASSERT_EQ(sr.status, SolveResult::Status::kProved) << sr.block << ": " << sr.query;

  Signature sig = t.program.funcs;
  const BaseType obj = BaseType::Ui("obj");
  const TypeEnv f1{{"k1.0", BaseType::Int()}, {"k1.1", BaseType::Int()}, {"k1.2", obj}};
  const TypeEnv f2{{"k2.0", BaseType::Int()}, {"k2.1", obj}, {"k2.2", obj}};
  EXPECT_EQ(solver->check_valid(sig, f1, Pred::implies(sr.inv.formula("k1", preds),
                                                       P("(and (<= k1.1 k1.0) (< k1.0 (+ k1.1 (len k1.2))))")))
                .verdict,
            Validity::kValid);
  EXPECT_EQ(solver->check_valid(sig, f2, Pred::implies(sr.inv.formula("k2", preds),
                                                       P("(and (<= 0 k2.0) (< k2.0 (len k2.1)))")))
                .verdict,
            Validity::kValid);

  for (const auto& b : t.program.blocks) {
    const auto again = abstract_post(t.program, b, sr.inv, preds, make_validator(sig, SolverMode{solver}));
    EXPECT_EQ(again.inv, sr.inv) << b.label;
  }

  const Solution s = extract_solution(sr.inv, preds, t.constraints.kvars, t.clones);
  const auto cs = prepare(parse_constraints(read_file(kSource + "/samples/iteri_mask.hmc")));
  EXPECT_EQ(check_satisfied(cs, s, SolverMode{solver}).status, SatResult::Status::kSatisfied);
  EXPECT_NE(invariant_report(sr.inv, preds).find("k1: "), std::string::npos);
}

TEST(Solve, NoPredicatesIsInconclusiveAtTheBoundsCheck) {
  const auto t = iteri();
  const PredMap none{{"k1", {}}, {"k2", {}}};
  const SolveResult sr = solve(t.program, none, smt(t.program));
  EXPECT_EQ(sr.status, SolveResult::Status::kInconclusive);
  EXPECT_EQ(sr.block, "c3");
}

TEST(Solve, ReachableFalseAssert) {
  const Program p = parse_imp("loop { /* bad */ assert (false) }");
  const SolveResult sr = solve(p, {}, smt(p));
  EXPECT_EQ(sr.status, SolveResult::Status::kInconclusive);
  EXPECT_EQ(sr.block, "bad");
}

TEST(Extract, UnreachedKVarIsFalse) {
  const std::vector<KVarSig> sigs{KVarSig{"k", BaseType::Int(), {}}};
  const Solution s = extract_solution(AbstractInvariant{{{"k", {}}}}, {{"k", {}}}, sigs, {});
  EXPECT_EQ(s.predicates.at("k"), Pred::falsity());
}

TEST(Extract, RenamesFieldsToParameters) {
  const std::vector<KVarSig> sigs{KVarSig{"k1", BaseType::Int(), {{"i", BaseType::Int()}}}};
  const PredMap preds{{"k1", {P("(<= k1.1 k1.0)")}}};
  const Solution s = extract_solution(AbstractInvariant{{{"k1", {{true}}}}}, preds, sigs, {});
  EXPECT_EQ(s.predicates.at("k1"), P("(<= i v)"));
}

TEST(Property, ProvedImpliesRelationalSafeAndSatisfied) {
  const auto d = gen::bit_domain();
  const OracleMode oracle{d};
  gen::Rng rng(61);
  ReachOptions opt;
  opt.reset_dead = true;
  int proved = 0;
  for (int n = 0; n < 150; ++n) {
    const auto cs = prepare(gen::random_constraints(rng));
    const auto t = translate_constraints(cs, true, false);
    const PredMap preds = harvest_predicates(t.program);
    const SolveResult sr = solve(t.program, preds, make_validator(t.program.funcs, oracle));
    double bound = static_cast<double>(std::max<std::size_t>(t.program.blocks.size(), 1));
    for (const auto& [k, ps] : preds) bound *= std::pow(2.0, static_cast<double>(ps.size()));
    EXPECT_LE(static_cast<double>(sr.posts), bound * static_cast<double>(t.program.blocks.size() + 1));
    if (sr.status != SolveResult::Status::kProved) continue;
    ++proved;
    EXPECT_EQ(reach(t.program, Semantics::kRelational, d, {FuncTables{}}, opt).verdict,
              ReachResult::Verdict::kSafe)
        << print_constraints(cs);
    const Solution s = extract_solution(sr.inv, preds, t.constraints.kvars, t.clones);
    EXPECT_EQ(check_satisfied(cs, s, oracle).status, SatResult::Status::kSatisfied) << print_constraints(cs);
  }
  EXPECT_GT(proved, 50);
}

TEST(Property, SolverModeExtractionSatisfies) {
  gen::Rng rng(62);
  auto solver = std::make_shared<SmtSolver>();
  int proved = 0;
  for (int n = 0; n < 12; ++n) {
    const auto cs = prepare(gen::random_constraints(rng));
    const auto t = translate_constraints(cs, true, false);
    const PredMap preds = harvest_predicates(t.program);
    const SolveResult sr = solve(t.program, preds, make_validator(t.program.funcs, SolverMode{solver}));
    if (sr.status != SolveResult::Status::kProved) continue;
    ++proved;
    const Solution s = extract_solution(sr.inv, preds, t.constraints.kvars, t.clones);
    EXPECT_EQ(check_satisfied(cs, s, SolverMode{solver}).status, SatResult::Status::kSatisfied)
        << print_constraints(cs);
  }
  EXPECT_GT(proved, 0);
}

}  // namespace
}  // namespace hmc
