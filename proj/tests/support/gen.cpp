#include "gen.hpp"

#include <algorithm>
#include <string>

namespace hmc::gen {

namespace {

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

Expr operand(Rng& rng, const std::vector<std::string>& vars) {
  const std::size_t n = vars.size() + 2;
  const std::size_t i = pick(rng, n);
  if (i < vars.size()) return Expr::var(vars[i]);
  return Expr::lit(static_cast<Value>(i - vars.size()));
}

Pred atom(Rng& rng, const std::vector<std::string>& vars) {
  static constexpr CmpOp kOps[] = {CmpOp::kEq, CmpOp::kNe, CmpOp::kLt, CmpOp::kLe};
  if (vars.empty() || coin(rng, 0.1)) return Pred::truth();
  return Pred::cmp(kOps[pick(rng, 4)], Expr::var(vars[pick(rng, vars.size())]), operand(rng, vars));
}

Pred pred(Rng& rng, const std::vector<std::string>& vars) {
  switch (pick(rng, 6)) {
    case 0: return Pred::conj(atom(rng, vars), atom(rng, vars));
    case 1: return Pred::disj(atom(rng, vars), atom(rng, vars));
    case 2: return Pred::negation(atom(rng, vars));
    default: return atom(rng, vars);
  }
}

}  // namespace

Pred random_pred(Rng& rng, const std::vector<std::string>& vars) { return pred(rng, vars); }

namespace {

std::vector<Expr> read_args(Rng& rng, const KVarSig& k, const std::vector<std::string>& scope) {
  std::vector<Expr> args;
  for (std::size_t i = 0; i < k.params.size(); ++i) {
    Expr e = operand(rng, scope);
    if (!scope.empty() && coin(rng, 0.15)) e = Expr::add(Expr::var(scope[pick(rng, scope.size())]), Expr::lit(1));
    args.push_back(std::move(e));
  }
  return args;
}

std::vector<Tuple> all_tuples(std::size_t arity, const ValueDomain& d) {
  std::vector<Tuple> out{{}};
  const auto vals = d.values(BaseType::Int());
  for (std::size_t i = 0; i < arity; ++i) {
    std::vector<Tuple> next;
    for (const auto& t : out) {
      for (Value v : vals) {
        Tuple u = t;
        u.push_back(v);
        next.push_back(std::move(u));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool holds(const Refinement& r, Value self, const std::map<std::string, Value>& sigma, const Solution& s) {
  auto lookup = [&](const std::string& x) -> std::optional<Value> {
    if (x == kValueVar) return self;
    auto it = sigma.find(x);
    if (it == sigma.end()) return std::nullopt;
    return it->second;
  };
  if (!r.is_kapp()) return eval_pred(lookup, {}, r.pred());
  Tuple t{self};
  for (const auto& a : r.app().args) t.push_back(eval_expr(lookup, {}, a));
  auto it = s.relations.find(r.app().kvar);
  return it != s.relations.end() && it->second.count(t) > 0;
}

}  // namespace

ValueDomain bit_domain() {
  ValueDomain d;
  d.int_range = {0, 1};
  return d;
}

ConstraintSet random_constraints(Rng& rng) {
  ConstraintSet cs;
  const std::size_t nk = 1 + pick(rng, 2);
  for (std::size_t i = 0; i < nk; ++i) {
    KVarSig k;
    k.id = "k" + std::to_string(i + 1);
    if (coin(rng)) k.params.emplace_back("p", BaseType::Int());
    cs.kvars.push_back(std::move(k));
  }
  const std::size_t nc = 1 + pick(rng, 3);
  for (std::size_t c = 0; c < nc; ++c) {
    SubConstraint sub;
    sub.label = "c" + std::to_string(c + 1);
    std::vector<std::string> scope;
    for (const char* x : {"x", "y"}) {
      if (!coin(rng, 0.6)) continue;
      RefType t;
      if (coin(rng, 0.4)) {
        const auto& k = cs.kvars[pick(rng, nk)];
        t.refinement = Refinement::kapp(k.id, read_args(rng, k, scope));
      } else {
        auto vars = scope;
        vars.push_back(kValueVar);
        t.refinement = Refinement::concrete(pred(rng, vars));
      }
      sub.env.emplace_back(x, std::move(t));
      scope.push_back(x);
    }
    auto with_v = scope;
    with_v.push_back(kValueVar);
    // The first constraint seeds a κ and the last one, when there are
    // several, checks one.
    const bool seed = c == 0, check = c + 1 == nc && nc > 1;
    if (!seed && coin(rng, 0.6)) {
      const auto& k = cs.kvars[pick(rng, nk)];
      sub.lhs.refinement = Refinement::kapp(k.id, read_args(rng, k, scope));
    } else {
      sub.lhs.refinement = Refinement::concrete(pred(rng, with_v));
    }
    const auto& k = cs.kvars[pick(rng, nk)];
    if (!check && (seed || coin(rng, 0.45)) && (k.params.empty() || !scope.empty())) {
      std::vector<Expr> args;
      for (std::size_t i = 0; i < k.params.size(); ++i) args.push_back(Expr::var(scope[pick(rng, scope.size())]));
      sub.rhs.refinement = Refinement::kapp(k.id, std::move(args));
    } else {
      sub.rhs.refinement = Refinement::concrete(pred(rng, with_v));
    }
    cs.subs.push_back(std::move(sub));
  }
  return cs;
}

bool satisfies(const ConstraintSet& cs, const Solution& s, const ValueDomain& d) {
  const auto vals = d.values(BaseType::Int());
  for (const auto& c : cs.subs) {
    std::vector<std::string> names;
    for (const auto& [x, t] : c.env) names.push_back(x);
    const std::size_t n = names.size() + 1;
    const auto rows = all_tuples(n, d);
    for (const auto& row : rows) {
      std::map<std::string, Value> sigma;
      for (std::size_t i = 0; i < names.size(); ++i) sigma[names[i]] = row[i];
      const Value v = row.back();
      bool env_ok = true;
      for (const auto& [x, t] : c.env) {
        if (!holds(t.refinement, sigma.at(x), sigma, s)) {
          env_ok = false;
          break;
        }
      }
      if (!env_ok || !holds(c.lhs.refinement, v, sigma, s)) continue;
      if (!holds(c.rhs.refinement, v, sigma, s)) return false;
    }
  }
  return true;
}

std::vector<Solution> enumerate_solutions(const ConstraintSet& cs, const ValueDomain& d) {
  std::vector<std::vector<Tuple>> universe;
  for (const auto& k : cs.kvars) universe.push_back(all_tuples(k.arity(), d));
  std::vector<Solution> out;
  std::vector<std::uint64_t> masks(cs.kvars.size(), 0);
  while (true) {
    Solution s = Solution::extensional();
    for (std::size_t i = 0; i < cs.kvars.size(); ++i) {
      auto& rel = s.relations[cs.kvars[i].id];
      for (std::size_t j = 0; j < universe[i].size(); ++j) {
        if ((masks[i] >> j) & 1U) rel.insert(universe[i][j]);
      }
    }
    if (satisfies(cs, s, d)) out.push_back(std::move(s));
    std::size_t i = 0;
    for (; i < masks.size(); ++i) {
      if (++masks[i] < (std::uint64_t{1} << universe[i].size())) break;
      masks[i] = 0;
    }
    if (i == masks.size()) break;
  }
  return out;
}

bool contained(const Solution& a, const Solution& b) {
  for (const auto& [k, rel] : a.relations) {
    auto it = b.relations.find(k);
    const std::set<Tuple> empty;
    const auto& other = it == b.relations.end() ? empty : it->second;
    if (!std::includes(other.begin(), other.end(), rel.begin(), rel.end())) return false;
  }
  return true;
}

Solution intersect(const Solution& a, const Solution& b) {
  Solution out = Solution::extensional();
  for (const auto& [k, rel] : a.relations) {
    auto it = b.relations.find(k);
    auto& dst = out.relations[k];
    if (it == b.relations.end()) continue;
    std::set_intersection(rel.begin(), rel.end(), it->second.begin(), it->second.end(),
                          std::inserter(dst, dst.end()));
  }
  return out;
}

Program random_rwo_program(Rng& rng) {
  Program p;
  const std::vector<std::string> vars{"x", "y", "z"};
  const std::size_t nk = 1 + pick(rng, 2);
  std::vector<std::string> ks;
  for (std::size_t i = 0; i < nk; ++i) {
    ks.push_back("k" + std::to_string(i + 1));
    p.relvars[ks.back()] = RelvarSig{std::vector<BaseType>(1 + pick(rng, 2), BaseType::Int())};
  }
  auto tuple_vars = [&](std::size_t n) {
    std::vector<std::string> pool = vars;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(n);
    return pool;
  };
  const std::size_t nb = 1 + pick(rng, 3);
  for (std::size_t b = 0; b < nb; ++b) {
    Block block;
    block.label = "b" + std::to_string(b + 1);
    std::set<std::string> got, set;
    const std::size_t len = 1 + pick(rng, 5);
    for (std::size_t i = 0; i < len; ++i) {
      const std::string& k = ks[pick(rng, ks.size())];
      switch (pick(rng, 6)) {
        case 0:
          block.body.push_back(HavocInstr{vars[pick(rng, 3)]});
          break;
        case 1:
          block.body.push_back(AssignInstr{vars[pick(rng, 3)], operand(rng, vars)});
          break;
        case 2:
          block.body.push_back(AssumeInstr{atom(rng, vars)});
          break;
        case 3:
          block.body.push_back(AssertInstr{atom(rng, vars)});
          break;
        case 4:
          if (got.insert(k).second) block.body.push_back(GetInstr{k, tuple_vars(p.relvars[k].arity())});
          break;
        default:
          if (set.insert(k).second) block.body.push_back(SetInstr{k, tuple_vars(p.relvars[k].arity())});
          break;
      }
    }
    if (block.body.empty()) block.body.push_back(skip_instr());
    p.blocks.push_back(std::move(block));
  }
  return p;
}

RelState random_rel_state(const Program& p, const ValueDomain& d, Rng& rng) {
  RelState s;
  const auto vals = d.values(BaseType::Int());
  for (const auto& x : p.variables()) s.base[x] = vals[pick(rng, vals.size())];
  for (const auto& [k, sig] : p.relvars) {
    auto& rel = s.rels[k];
    for (const auto& t : all_tuples(sig.arity(), d)) {
      if (coin(rng, 0.4)) rel.insert(t);
    }
  }
  return s;
}

std::set<ImpState> post_imp_of_expand(const RelState& s, const Block& b, const ExecContext& ctx) {
  std::set<ImpState> out;
  for (const auto& e : expand(s)) {
    auto next = post_imp_block(e, b, ctx);
    out.insert(next.begin(), next.end());
  }
  return out;
}

}  // namespace hmc::gen
