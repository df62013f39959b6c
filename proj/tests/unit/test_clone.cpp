#include <gtest/gtest.h>

#include "gen.hpp"
#include "hmc/pipeline.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {
namespace {

const std::string kSamples = std::string(HMC_SOURCE_DIR) + "/samples/";

ConstraintSet sample(const std::string& name) {
  return prepare(parse_constraints(read_file(kSamples + name)));
}

const SubConstraint& sub(const ConstraintSet& cs, const std::string& label) {
  for (const auto& c : cs.subs) {
    if (c.label == label) return c;
  }
  throw std::runtime_error("no constraint " + label);
}

TEST(ReadOccurrences, Examples) {
  const auto tw = sample("tworead.hmc");
  EXPECT_EQ(read_occurrences(sub(tw, "r"), "k"), 2U);
  EXPECT_EQ(read_occurrences(sub(tw, "w"), "k"), 0U);
  const auto im = sample("iteri_mask.hmc");
  EXPECT_EQ(read_occurrences(sub(im, "c2"), "k1"), 1U);
  EXPECT_EQ(read_occurrences(sub(im, "c1"), "k1"), 0U);
}

TEST(Clone, TwoReads) {
  const auto [cs, m] = clone(sample("tworead.hmc"));
  EXPECT_EQ(m.at("k"), (std::vector<std::string>{"k.1", "k.2"}));
  ASSERT_EQ(cs.kvars.size(), 2U);
  EXPECT_EQ(cs.kvars[0].id, "k.1");
  EXPECT_EQ(cs.kvars[1].id, "k.2");
  ASSERT_EQ(cs.subs.size(), 3U);
  EXPECT_EQ(cs.subs[0].label, "w#1");
  EXPECT_EQ(cs.subs[0].rhs.refinement.app().kvar, "k.1");
  EXPECT_EQ(cs.subs[1].label, "w#2");
  EXPECT_EQ(cs.subs[1].rhs.refinement.app().kvar, "k.2");
  const auto& r = sub(cs, "r");
  EXPECT_EQ(r.env[0].second.refinement.app().kvar, "k.1");
  EXPECT_EQ(r.env[1].second.refinement.app().kvar, "k.2");
}

TEST(Clone, NoOpWhenReadAtMostOnce) {
  const auto im = sample("iteri_mask.hmc");
  const auto [cs, m] = clone(im);
  EXPECT_EQ(cs, im);
  for (const auto& [k, names] : m) EXPECT_EQ(names, (std::vector<std::string>{k}));
  EXPECT_EQ(clone(ConstraintSet{}).first, ConstraintSet{});
}

TEST(Fold, Examples) {
  const CloneMap m{{"k", {"k.1", "k.2"}}};
  const Solution ext = Solution::extensional({{"k.1", {{1}, {2}}}, {"k.2", {{2}, {3}}}});
  EXPECT_EQ(fold_solution(ext, m).relations.at("k"), (std::set<Tuple>{{2}}));
  const CloneMap single{{"k", {"k"}}};
  EXPECT_EQ(fold_solution(Solution::extensional({{"k", {{1}}}}), single).relations.at("k"),
            (std::set<Tuple>{{1}}));
  const Solution in = Solution::intensional(
      {{"k.1", parse_pred_text("(>= v 0)")}, {"k.2", parse_pred_text("(<= v 5)")}});
  EXPECT_EQ(fold_solution(in, m).predicates.at("k"), parse_pred_text("(and (>= v 0) (<= v 5))"));
}

TEST(Property, ClonedTranslationIsReadWriteOnce) {
  gen::Rng rng(31);
  for (const char* name : {"iteri_mask.hmc", "tworead.hmc", "empty.hmc"}) {
    EXPECT_TRUE(is_rwo(translate_constraints(sample(name), true, false).program).ok) << name;
  }
  for (int n = 0; n < 300; ++n) {
    const auto cs = gen::random_constraints(rng);
    const auto r = is_rwo(translate_constraints(cs, true, false).program);
    EXPECT_TRUE(r.ok) << r.describe() << "\n" << print_constraints(cs);
  }
}

TEST(Property, SolutionsTransferAcrossCloning) {
  const ValueDomain d = gen::bit_domain();
  gen::Rng rng(32);
  int cloned = 0;
  for (int n = 0; n < 300 && cloned < 40; ++n) {
    const ConstraintSet cs = prepare(gen::random_constraints(rng));
    const auto [cl, m] = clone(cs);
    if (cl.kvars.size() == cs.kvars.size() || cl.kvars.size() > 3) continue;
    ++cloned;
    for (const auto& s : gen::enumerate_solutions(cs, d)) {
      EXPECT_TRUE(gen::satisfies(cl, unfold_solution(s, m), d)) << print_constraints(cs);
    }
    for (const auto& s : gen::enumerate_solutions(cl, d)) {
      EXPECT_TRUE(gen::satisfies(cs, fold_solution(s, m), d)) << print_constraints(cs);
    }
  }
  EXPECT_GT(cloned, 5);
}

}  // namespace
}  // namespace hmc
