#include "hmc/translate.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "hmc/error.hpp"

namespace hmc {

namespace {

void collect_refinement_vars(const RefType& t, std::set<std::string>& out) {
  if (!t.refinement.is_kapp()) {
    collect_vars(t.refinement.pred(), out);
    return;
  }
  for (const auto& a : t.refinement.app().args) collect_vars(a, out);
}

bool shadows(const std::set<std::string>& names, const std::string& prefix) {
  for (const auto& n : names) {
    if (n.size() <= prefix.size() || n.compare(0, prefix.size(), prefix) != 0) continue;
    bool digits = true;
    for (std::size_t i = prefix.size(); i < n.size(); ++i) {
      digits = digits && std::isdigit(static_cast<unsigned char>(n[i]));
    }
    if (digits) return true;
  }
  return false;
}

std::string rename_v(const std::string& x, const std::string& vv) { return x == kValueVar ? vv : x; }

}  // namespace

NameGen::NameGen(const ConstraintSet& cs) {
  for (const auto& k : cs.kvars) {
    for (const auto& [name, t] : k.params) taken_.insert(name);
  }
  for (const auto& c : cs.subs) {
    for (const auto& [name, t] : c.env) {
      taken_.insert(name);
      collect_refinement_vars(t, taken_);
    }
    collect_refinement_vars(c.lhs, taken_);
    collect_refinement_vars(c.rhs, taken_);
  }
  while (shadows(taken_, t_prefix_)) t_prefix_ += "_";
  while (shadows(taken_, u_prefix_)) u_prefix_ += "_";
}

std::string NameGen::value_var(const BaseType& t) const {
  if (t.is_int()) return kValueVar;
  std::string name = std::string(kValueVar) + "_" + (t.is_bool() ? std::string("bool") : t.ui_name());
  while (taken_.count(name) != 0) name += "_";
  return name;
}

std::string NameGen::temp(std::size_t i) const { return t_prefix_ + std::to_string(i); }

std::string NameGen::aux() { return u_prefix_ + std::to_string(next_aux_++); }

std::vector<Instr> translate_get(const RefType& t, NameGen& g) {
  const std::string vv = g.value_var(t.value_type);
  if (!t.refinement.is_kapp()) {
    return {HavocInstr{vv}, AssumeInstr{rename_var(t.refinement.pred(), kValueVar, vv)}};
  }
  const KApp& app = t.refinement.app();
  std::vector<std::string> temps;
  for (std::size_t i = 0; i <= app.args.size(); ++i) temps.push_back(g.temp(i));
  std::vector<Instr> out{GetInstr{app.kvar, temps}};
  for (std::size_t i = 0; i < app.args.size(); ++i) {
    out.push_back(AssumeInstr{Pred::cmp(CmpOp::kEq, rename_var(app.args[i], kValueVar, vv),
                                        Expr::var(temps[i + 1]))});
  }
  out.push_back(AssignInstr{vv, Expr::var(temps[0])});
  return out;
}

std::vector<Instr> translate_set(const RefType& t, NameGen& g) {
  const std::string vv = g.value_var(t.value_type);
  if (!t.refinement.is_kapp()) {
    return {AssertInstr{rename_var(t.refinement.pred(), kValueVar, vv)}};
  }
  const KApp& app = t.refinement.app();
  std::vector<Instr> out;
  std::vector<std::string> args{vv};
  for (const auto& a : app.args) {
    if (a.is_var()) {
      args.push_back(rename_v(a.var_name(), vv));
      continue;
    }
    std::string u = g.aux();
    out.push_back(AssignInstr{u, rename_var(a, kValueVar, vv)});
    args.push_back(std::move(u));
  }
  out.push_back(SetInstr{app.kvar, std::move(args)});
  return out;
}

std::vector<Instr> translate_env(const RefEnv& env, NameGen& g) {
  if (env.empty()) return {skip_instr()};
  std::vector<Instr> out;
  for (const auto& [name, t] : env) {
    for (auto& i : translate_get(t, g)) out.push_back(std::move(i));
    out.push_back(AssignInstr{name, Expr::var(g.value_var(t.value_type))});
  }
  return out;
}

Block translate_constraint(const SubConstraint& c, NameGen& g) {
  g.start_block();
  Block b{c.label, translate_env(c.env, g)};
  for (auto& i : translate_get(c.lhs, g)) b.body.push_back(std::move(i));
  for (auto& i : translate_set(c.rhs, g)) b.body.push_back(std::move(i));
  return b;
}

Program translate_set_of_constraints(const ConstraintSet& input, const CloneMap& clones) {
  const ConstraintSet cs = normalize(input);
  NameGen g(cs);
  Program p;
  p.funcs = cs.funcs;
  p.clones = clones;
  for (const auto& k : cs.kvars) p.relvars[k.id] = RelvarSig{k.component_types()};
  auto declare = [&](const BaseType& t) {
    if (!t.is_int()) p.var_types.insert_or_assign(g.value_var(t), t);
  };
  for (const auto& c : cs.subs) {
    for (const auto& [name, t] : c.env) declare(t.value_type);
    declare(c.lhs.value_type);
    declare(c.rhs.value_type);
    p.blocks.push_back(translate_constraint(c, g));
  }
  return p;
}

// ---------------------------------------------------------------------------
// simplify

namespace {

std::set<std::string> reads_of(const Instr& ins) {
  return std::visit(
      [](const auto& n) -> std::set<std::string> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AssignInstr>) {
          return free_vars(n.value);
        } else if constexpr (std::is_same_v<T, HavocInstr> || std::is_same_v<T, GetInstr>) {
          return {};
        } else if constexpr (std::is_same_v<T, SetInstr>) {
          return {n.args.begin(), n.args.end()};
        } else {
          return free_vars(n.cond);
        }
      },
      ins);
}

std::set<std::string> writes_of(const Instr& ins) {
  if (const auto* a = std::get_if<AssignInstr>(&ins)) return {a->var};
  if (const auto* h = std::get_if<HavocInstr>(&ins)) return {h->var};
  if (const auto* g = std::get_if<GetInstr>(&ins)) return {g->temps.begin(), g->temps.end()};
  return {};
}

// After body[from..], is `a` overwritten (or the block ends with a dead)
// before anything reads it?
bool dead_after(const std::vector<Instr>& body, std::size_t from, const std::string& a,
                const std::set<std::string>& live) {
  for (std::size_t i = from; i < body.size(); ++i) {
    if (reads_of(body[i]).count(a) != 0) return false;
    if (writes_of(body[i]).count(a) != 0) return true;
  }
  return live.count(a) == 0;
}

struct Collapse {
  std::size_t block;
  std::size_t at;
};

// havoc a; assume(p); x := a
bool collapsible(const std::vector<Instr>& body, std::size_t i, std::string* a_out,
                 std::string* x_out) {
  if (i + 2 >= body.size()) return false;
  const auto* h = std::get_if<HavocInstr>(&body[i]);
  const auto* as = std::get_if<AssumeInstr>(&body[i + 1]);
  const auto* x = std::get_if<AssignInstr>(&body[i + 2]);
  if (h == nullptr || as == nullptr || x == nullptr) return false;
  if (!x->value.is_var() || x->value.var_name() != h->var || x->var == h->var) return false;
  if (free_vars(as->cond).count(x->var) != 0) return false;
  *a_out = h->var;
  *x_out = x->var;
  return true;
}

Program collapse_bindings(const Program& p) {
  const auto live = live_at_head(p);
  // Types every candidate x would take; a name with two is left alone.
  std::map<std::string, std::set<BaseType>> types;
  for (const auto& name : p.variables()) {
    if (p.var_types.count(name) != 0) types[name].insert(p.var_types.at(name));
  }
  std::vector<Collapse> found;
  for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
    const auto& body = p.blocks[bi].body;
    for (std::size_t i = 0; i < body.size(); ++i) {
      std::string a;
      std::string x;
      if (!collapsible(body, i, &a, &x)) continue;
      if (!dead_after(body, i + 3, a, live)) continue;
      types[x].insert(p.var_type(a));
      found.push_back({bi, i});
      i += 2;
    }
  }
  Program out = p;
  for (auto it = found.rbegin(); it != found.rend(); ++it) {
    auto& body = out.blocks[it->block].body;
    const std::string a = std::get<HavocInstr>(body[it->at]).var;
    const std::string x = std::get<AssignInstr>(body[it->at + 2]).var;
    if (types[x].size() != 1) continue;
    // A variable that only ever took the int default stays undeclared.
    const BaseType t = *types[x].begin();
    if (!t.is_int()) out.var_types.insert_or_assign(x, t);
    const Pred cond = rename_var(std::get<AssumeInstr>(body[it->at + 1]).cond, a, x);
    body[it->at] = HavocInstr{x};
    body[it->at + 1] = AssumeInstr{cond};
    body.erase(body.begin() + static_cast<std::ptrdiff_t>(it->at) + 2);
  }
  for (auto it = out.var_types.begin(); it != out.var_types.end();) {
    bool mentioned = false;
    for (const auto& b : out.blocks) {
      for (const auto& ins : b.body) {
        mentioned = mentioned || reads_of(ins).count(it->first) != 0 ||
                    writes_of(ins).count(it->first) != 0;
      }
    }
    it = mentioned ? std::next(it) : out.var_types.erase(it);
  }
  return out;
}

void fold_temps(const Program& p, Block& b) {
  auto& body = b.body;
  for (std::size_t gi = 0; gi < body.size(); ++gi) {
    auto* g = std::get_if<GetInstr>(&body[gi]);
    if (g == nullptr) continue;
    const RelvarSig* sig = p.relvars.count(g->relvar) ? &p.relvars.at(g->relvar) : nullptr;
    std::size_t j = gi + 1;
    while (j < body.size()) {
      const auto* as = std::get_if<AssumeInstr>(&body[j]);
      const auto* cmp = as ? std::get_if<CmpPred>(&as->cond.node().v) : nullptr;
      if (cmp == nullptr || cmp->op != CmpOp::kEq || !cmp->lhs.is_var() || !cmp->rhs.is_var()) break;
      const std::string y = cmp->lhs.var_name();
      const std::string t = cmp->rhs.var_name();
      std::size_t field = g->temps.size();
      for (std::size_t k = 1; k < g->temps.size(); ++k) {
        if (g->temps[k] == t) field = k;
      }
      bool ok = field < g->temps.size() && sig != nullptr;
      ok = ok && std::find(g->temps.begin(), g->temps.end(), y) == g->temps.end();
      ok = ok && p.var_type(y) == sig->types[field];
      // y must come straight from a havoc, unread since.
      std::optional<std::size_t> def;
      for (std::size_t k = 0; ok && k < gi; ++k) {
        if (writes_of(body[k]).count(y) != 0) def = k;
      }
      ok = ok && def && std::holds_alternative<HavocInstr>(body[*def]);
      for (std::size_t k = def ? *def + 1 : 0; ok && k < j; ++k) {
        if (k != gi && reads_of(body[k]).count(y) != 0) ok = false;
      }
      // t is read only by this assume.
      for (std::size_t k = gi + 1; ok && k < body.size(); ++k) {
        if (k != j && reads_of(body[k]).count(t) != 0) ok = false;
      }
      if (!ok) {
        ++j;
        continue;
      }
      g->temps[field] = y;
      body.erase(body.begin() + static_cast<std::ptrdiff_t>(j));
    }
  }
}

}  // namespace

Program simplify(const Program& p) {
  Program out = collapse_bindings(p);
  for (auto& b : out.blocks) fold_temps(out, b);
  return out;
}

}  // namespace hmc
