#include <gtest/gtest.h>

#include "gen.hpp"
#include "hmc/pipeline.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {
namespace {

const std::string kSource = HMC_SOURCE_DIR;

ConstraintSet sample(const std::string& name) {
  return prepare(parse_constraints(read_file(kSource + "/samples/" + name)));
}

std::vector<std::string> lines(const std::vector<Instr>& is) {
  std::vector<std::string> out;
  for (const auto& i : is) out.push_back(print_instr(i));
  return out;
}

using Lines = std::vector<std::string>;

RefType concrete(std::string_view p) { return RefType{BaseType::Int(), Refinement::concrete(parse_pred_text(p))}; }

TEST(TranslateGet, Examples) {
  NameGen g(sample("iteri_mask.hmc"));
  EXPECT_EQ(lines(translate_get(concrete("(= v i)"), g)), (Lines{"havoc v", "assume (= v i)"}));
  EXPECT_EQ(lines(translate_get(concrete("true"), g)), (Lines{"havoc v", "assume (true)"}));
  const RefType k1{BaseType::Int(), Refinement::kapp("k1", {parse_expr_text("(+ i 1)"), parse_expr_text("xs2")})};
  EXPECT_EQ(lines(translate_get(k1, g)),
            (Lines{"get k1 (t0, t1, t2)", "assume (= (+ i 1) t1)", "assume (= xs2 t2)", "v := t0"}));
}

TEST(TranslateSet, Examples) {
  NameGen g(sample("iteri_mask.hmc"));
  EXPECT_EQ(lines(translate_set(concrete("(and (<= 0 v) (< v (len a)))"), g)),
            (Lines{"assert (and (<= 0 v) (< v (len a)))"}));
  const RefType k1{BaseType::Int(), Refinement::kapp("k1", {parse_expr_text("i"), parse_expr_text("xs")})};
  EXPECT_EQ(lines(translate_set(k1, g)), (Lines{"set k1 (v, i, xs)"}));
  g.start_block();
  const RefType shifted{BaseType::Int(), Refinement::kapp("k", {parse_expr_text("(+ i 1)")})};
  EXPECT_EQ(lines(translate_set(shifted, g)), (Lines{"u0 := (+ i 1)", "set k (v, u0)"}));
}

TEST(TranslateEnv, Examples) {
  const auto cs = sample("iteri_mask.hmc");
  NameGen g(cs);
  EXPECT_EQ(lines(translate_env({}, g)), (Lines{"assume (true)"}));
  const RefEnv j{{"j", RefType{BaseType::Int(), Refinement::kapp("k2", {parse_expr_text("a"), parse_expr_text("xs")})}}};
  EXPECT_EQ(lines(translate_env(j, g)),
            (Lines{"get k2 (t0, t1, t2)", "assume (= a t1)", "assume (= xs t2)", "v := t0", "j := v"}));
  const auto c1 = lines(translate_env(cs.subs[0].env, g));
  EXPECT_EQ(std::count(c1.begin(), c1.end(), "havoc v_obj"), 3);
  EXPECT_EQ(c1.back(), "xs2 := v_obj");
}

TEST(TranslateConstraint, Trivial) {
  NameGen g;
  const SubConstraint c{"c", {}, concrete("true"), concrete("true")};
  const Block b = translate_constraint(c, g);
  EXPECT_EQ(b.label, "c");
  EXPECT_EQ(lines(b.body), (Lines{"assume (true)", "havoc v", "assume (true)", "assert (true)"}));
}

TEST(TranslateSet, EmptyIsVacuouslySafe) {
  const Program p = translate_set_of_constraints(ConstraintSet{});
  EXPECT_TRUE(p.blocks.empty());
  EXPECT_EQ(reach(p, Semantics::kRelational, ValueDomain{}, {FuncTables{}}).verdict, ReachResult::Verdict::kSafe);
}

TEST(Golden, IteriMaskWithoutCloning) {
  const Program p = translate_constraints(sample("iteri_mask.hmc"), false, false).program;
  EXPECT_EQ(print_imp(p), read_file(kSource + "/tests/golden/iteri_mask.imp"));
  EXPECT_NO_THROW(check_program(p));
}

TEST(Golden, BlocksInFileOrderWithDerivedSignatures) {
  const Program p = translate_constraints(sample("iteri_mask.hmc"), false, false).program;
  ASSERT_EQ(p.blocks.size(), 4U);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p.blocks[i].label, "c" + std::to_string(i + 1));
  EXPECT_EQ(p.relvars.at("k1").types, (std::vector<BaseType>{BaseType::Int(), BaseType::Int(), BaseType::Ui("obj")}));
  EXPECT_EQ(p.relvars.at("k2").types,
            (std::vector<BaseType>{BaseType::Int(), BaseType::Ui("obj"), BaseType::Ui("obj")}));
}

TEST(TwoReads, UnclonedTranslationIsTheTwoReadsProgram) {
  const Program p = translate_constraints(sample("tworead.hmc"), false, false).program;
  const auto r = is_rwo(p);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.block, "r");
  const auto d = [] {
    ValueDomain d;
    d.int_range = {-1, 1};
    return d;
  }();
  const auto expect_same = [&](const Program& q) {
    for (auto sem : {Semantics::kRelational, Semantics::kImperative}) {
      EXPECT_EQ(reach(p, sem, d, {FuncTables{}}).verdict, reach(q, sem, d, {FuncTables{}}).verdict);
    }
  };
  expect_same(parse_imp(read_file(kSource + "/samples/tworead.imp")));
}

TEST(Simplify, RenamesWithoutDroppingChecks) {
  const Program p = translate_constraints(sample("iteri_mask.hmc"), false, true).program;
  const std::string text = print_imp(p);
  EXPECT_EQ(text.find("v_obj"), std::string::npos);
  EXPECT_NE(text.find("assert (and (<= 0 v) (< v (len a)))"), std::string::npos);
}

TEST(Property, TranslationIsWellTypedAndDeterministic) {
  gen::Rng rng(51);
  for (int n = 0; n < 300; ++n) {
    const auto cs = gen::random_constraints(rng);
    for (bool cl : {false, true}) {
      const auto a = translate_constraints(cs, cl, false).program;
      EXPECT_NO_THROW(check_program(a));
      EXPECT_EQ(print_imp(a), print_imp(translate_constraints(cs, cl, false).program));
    }
  }
}

TEST(Property, SimplifyPreservesVerdicts) {
  const auto d = gen::bit_domain();
  gen::Rng rng(52);
  ReachOptions opt;
  opt.reset_dead = true;
  for (int n = 0; n < 300; ++n) {
    const auto cs = gen::random_constraints(rng);
    const auto plain = translate_constraints(cs, false, false).program;
    const auto simple = translate_constraints(cs, false, true).program;
    EXPECT_EQ(reach(plain, Semantics::kRelational, d, {FuncTables{}}, opt).verdict,
              reach(simple, Semantics::kRelational, d, {FuncTables{}}, opt).verdict)
        << print_imp(plain) << print_imp(simple);
  }
}

TEST(Property, SatisfiableIffRelationalSafe) {
  const auto d = gen::bit_domain();
  gen::Rng rng(53);
  ReachOptions opt;
  opt.reset_dead = true;
  int unsat = 0;
  for (int n = 0; n < 300; ++n) {
    const auto cs = prepare(gen::random_constraints(rng));
    const auto sols = gen::enumerate_solutions(cs, d);
    const auto p = translate_constraints(cs, false, false).program;
    const bool safe = reach(p, Semantics::kRelational, d, {FuncTables{}}, opt).verdict == ReachResult::Verdict::kSafe;
    EXPECT_EQ(safe, !sols.empty()) << print_constraints(cs);
    unsat += sols.empty() ? 1 : 0;
    if (sols.empty()) continue;
    const Solution least = alpha(p, reach_set_rel(p, d, {}, opt).states);
    EXPECT_TRUE(gen::satisfies(cs, least, d));
    for (const auto& s : sols) EXPECT_TRUE(gen::contained(least, s));
  }
  EXPECT_GT(unsat, 10);
}

}  // namespace
}  // namespace hmc
