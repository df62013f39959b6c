#include "hmc/absint.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <future>

#include "hmc/error.hpp"
#include "hmc/linear.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {

std::string field_name(const std::string& kvar, std::size_t i) {
  return kvar + "." + std::to_string(i);
}

std::optional<std::size_t> field_index(const std::string& kvar, const std::string& var) {
  if (var.size() <= kvar.size() + 1 || var.compare(0, kvar.size(), kvar) != 0 ||
      var[kvar.size()] != '.') {
    return std::nullopt;
  }
  std::size_t i = 0;
  for (std::size_t k = kvar.size() + 1; k < var.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(var[k]))) return std::nullopt;
    i = i * 10 + static_cast<std::size_t>(var[k] - '0');
  }
  return i;
}

namespace {

// Symbolic execution state: each program variable maps to a term over
// fresh symbols s0, s1, ...
class SymExec {
 public:
  explicit SymExec(const Program& p) : p_(p) {}

  Expr fresh(const BaseType& t) {
    std::string name = "s" + std::to_string(types_.size());
    types_.emplace(name, t);
    order_.push_back(name);
    return Expr::var(std::move(name));
  }

  Expr value_of(const std::string& x) {
    auto it = sigma_.find(x);
    if (it != sigma_.end()) return it->second;
    Expr e = fresh(p_.var_type(x));
    sigma_.emplace(x, e);
    return e;
  }

  Expr eval(const Expr& e) {
    for (const auto& v : free_vars(e)) value_of(v);
    return substitute(e, sigma_);
  }

  Pred eval(const Pred& q) {
    for (const auto& v : free_vars(q)) value_of(v);
    return substitute(q, sigma_);
  }

  void assign(const std::string& x, Expr e) { sigma_.insert_or_assign(x, std::move(e)); }

  TypeEnv env_for(const Pred& q) const {
    TypeEnv env;
    for (const auto& v : free_vars(q)) env.bind(v, types_.at(v));
    return env;
  }

  const BaseType& type_of(const std::string& sym) const { return types_.at(sym); }
  std::size_t index_of(const std::string& sym) const {
    return static_cast<std::size_t>(std::stoul(sym.substr(1)));
  }

 private:
  const Program& p_;
  std::map<std::string, Expr> sigma_;
  std::map<std::string, BaseType> types_;
  std::vector<std::string> order_;
};

std::vector<BaseType> relvar_types(const Program& p, const std::string& k, std::size_t width) {
  auto it = p.relvars.find(k);
  if (it != p.relvars.end() && it->second.arity() == width) return it->second.types;
  return std::vector<BaseType>(width, BaseType::Int());
}

Pred literal(const Pred& p, bool positive) {
  if (positive) return p;
  if (const auto* c = std::get_if<CmpPred>(&p.node().v)) return Pred::cmp(negate(c->op), c->lhs, c->rhs);
  if (const auto* n = std::get_if<NotPred>(&p.node().v)) return n->arg;
  return Pred::negation(p);
}

Substitution fields_to(const std::string& kvar, const std::vector<Expr>& values) {
  Substitution s;
  for (std::size_t i = 0; i < values.size(); ++i) s.emplace(field_name(kvar, i), values[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Predicate harvesting

struct Access {
  std::string kvar;
  bool is_set = false;
  std::vector<Expr> fields;
};

class Classes {
 public:
  explicit Classes(std::set<std::string> temps) : temps_(std::move(temps)) {}

  std::string find(const std::string& s) {
    auto it = parent_.find(s);
    if (it == parent_.end() || it->second == s) return s;
    std::string r = find(it->second);
    parent_[s] = r;
    return r;
  }

  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a);
    std::string rb = find(b);
    if (ra == rb) return;
    if (key(rb) < key(ra)) std::swap(ra, rb);
    parent_[rb] = ra;
    parent_.try_emplace(ra, ra);
  }

 private:
  std::pair<int, std::size_t> key(const std::string& s) const {
    return {temps_.count(s) ? 0 : 1, static_cast<std::size_t>(std::stoul(s.substr(1)))};
  }
  std::set<std::string> temps_;
  std::map<std::string, std::string> parent_;
};

struct BlockFacts {
  std::vector<Pred> atoms;
  // Atoms of asserts; also in `atoms`.
  std::vector<Pred> goals;
  std::vector<Pred> eqs;
  std::vector<Access> accesses;
  std::set<std::string> temps;
  std::set<std::string> symbols;
};

BlockFacts facts_of(const Program& p, const Block& b) {
  BlockFacts f;
  SymExec x(p);
  auto note = [&](const Pred& q) {
    for (const auto& a : atoms(q)) f.atoms.push_back(a);
    for (const auto& c : conjuncts(q)) {
      const auto* cmp = std::get_if<CmpPred>(&c.node().v);
      if (cmp != nullptr && cmp->op == CmpOp::kEq) f.eqs.push_back(c);
    }
  };
  for (const auto& ins : b.body) {
    if (const auto* a = std::get_if<AssignInstr>(&ins)) {
      x.assign(a->var, x.eval(a->value));
    } else if (const auto* h = std::get_if<HavocInstr>(&ins)) {
      x.assign(h->var, x.fresh(p.var_type(h->var)));
    } else if (const auto* g = std::get_if<GetInstr>(&ins)) {
      Access acc{g->relvar, false, {}};
      const auto types = relvar_types(p, g->relvar, g->temps.size());
      for (std::size_t i = 0; i < g->temps.size(); ++i) {
        Expr s = x.fresh(types[i]);
        f.temps.insert(s.var_name());
        x.assign(g->temps[i], s);
        acc.fields.push_back(std::move(s));
      }
      f.accesses.push_back(std::move(acc));
    } else if (const auto* s = std::get_if<SetInstr>(&ins)) {
      Access acc{s->relvar, true, {}};
      for (const auto& a : s->args) acc.fields.push_back(x.value_of(a));
      f.accesses.push_back(std::move(acc));
    } else if (const auto* a = std::get_if<AssumeInstr>(&ins)) {
      note(x.eval(a->cond));
    } else if (const auto* a = std::get_if<AssertInstr>(&ins)) {
      const Pred c = x.eval(a->cond);
      note(c);
      for (const auto& q : atoms(c)) f.goals.push_back(q);
    }
  }
  for (const auto& q : f.atoms) {
    for (const auto& v : free_vars(q)) f.symbols.insert(v);
  }
  for (const auto& acc : f.accesses) {
    for (const auto& e : acc.fields) {
      for (const auto& v : free_vars(e)) f.symbols.insert(v);
    }
  }
  return f;
}

// A predicate in linear normal form with the key of its negation, so that a
// predicate and its complement count as one.
struct Normal {
  std::string key;
  std::string neg_key;
  Pred pred;
};

// Equalities and disequalities give two inequalities.
std::vector<Normal> normal_forms(const Pred& q) {
  std::vector<Normal> out;
  const auto* c = std::get_if<CmpPred>(&q.node().v);
  std::optional<LinearConstraint> lin;
  if (c != nullptr && c->op == CmpOp::kNe) {
    lin = linearize(Pred::cmp(CmpOp::kEq, c->lhs, c->rhs));
  } else {
    lin = linearize(q);
  }
  if (!lin) {
    const std::string key = "P" + to_sexpr(q);
    out.push_back({key, key, q});
    return out;
  }
  auto add_le = [&](const LinearForm& form) {
    const LinearConstraint le = canonical(LinearConstraint{form, LinearConstraint::Rel::kLe});
    if (le.form.is_constant()) return;
    const LinearConstraint neg =
        canonical(LinearConstraint{le.form.scaled(-1) + LinearForm::number(1), LinearConstraint::Rel::kLe});
    const Pred p = to_pred(le);
    out.push_back({"L" + to_sexpr(p), "L" + to_sexpr(to_pred(neg)), p});
  };
  add_le(lin->form);
  if (lin->rel == LinearConstraint::Rel::kEq) add_le(lin->form.scaled(-1));
  return out;
}

// Ranked predicate lists per κ; tier 0 ranks first. A predicate found again
// in a better tier moves there.
class PredBag {
 public:
  explicit PredBag(std::size_t tiers = 1) : lists_(tiers) {}

  // The predicates that are new to `tier`.
  std::vector<Pred> add(std::size_t tier, const Pred& q) {
    std::vector<Pred> fresh;
    for (auto& n : normal_forms(q)) {
      auto it = tier_of_.find(n.key);
      if (it == tier_of_.end()) it = tier_of_.find(n.neg_key);
      if (it != tier_of_.end()) {
        if (it->second <= tier) continue;
        auto& old = lists_[it->second];
        const std::string key = it->first;
        old.erase(std::find_if(old.begin(), old.end(), [&](const auto& e) { return e.first == key; }));
        tier_of_.erase(it);
      }
      tier_of_.emplace(n.key, tier);
      lists_[tier].emplace_back(n.key, n.pred);
      fresh.push_back(std::move(n.pred));
    }
    return fresh;
  }

  std::vector<Pred> ranked() const {
    std::vector<Pred> out;
    for (const auto& list : lists_) {
      for (const auto& [key, q] : list) out.push_back(q);
    }
    return out;
  }

 private:
  std::vector<std::vector<std::pair<std::string, Pred>>> lists_;
  std::map<std::string, std::size_t> tier_of_;
};

std::optional<std::size_t> field_of(const Access& acc, const std::string& sym, Classes& cls) {
  for (std::size_t i = 0; i < acc.fields.size(); ++i) {
    if (acc.fields[i].is_var() && acc.fields[i].var_name() == sym) return i;
  }
  const std::string r = cls.find(sym);
  for (std::size_t i = 0; i < acc.fields.size(); ++i) {
    if (acc.fields[i].is_var() && cls.find(acc.fields[i].var_name()) == r) return i;
  }
  return std::nullopt;
}

std::optional<Pred> to_fields(const Pred& q, const Access& acc, Classes& cls) {
  Substitution s;
  for (const auto& v : free_vars(q)) {
    auto i = field_of(acc, v, cls);
    if (!i) return std::nullopt;
    s.emplace(v, Expr::var(field_name(acc.kvar, *i)));
  }
  return substitute(q, s);
}

bool atom_allowed(const Expr& a, const std::set<std::string>& allowed) {
  for (const auto& v : free_vars(a)) {
    if (allowed.count(v) == 0) return false;
  }
  return true;
}

bool eliminate(LinearForm& l, const std::vector<LinearForm>& eqs, const std::set<std::string>& allowed) {
  std::vector<bool> used(eqs.size(), false);
  for (std::size_t step = 0; step < 2 * eqs.size() + 1; ++step) {
    const Expr* bad = nullptr;
    for (const auto& [a, c] : l.terms) {
      if (!atom_allowed(a, allowed)) {
        bad = &a;
        break;
      }
    }
    if (bad == nullptr) return true;
    const Expr target = *bad;
    bool done = false;
    for (std::size_t j = 0; j < eqs.size() && !done; ++j) {
      const Value k = eqs[j].coeff(target);
      if (used[j] || (k != 1 && k != -1)) continue;
      l = l - eqs[j].scaled(l.coeff(target) * k);
      used[j] = true;
      done = true;
    }
    if (!done) return false;
  }
  return false;
}

struct Analysis {
  BlockFacts facts;
  Classes classes{{}};
  Substitution to_rep;
  std::vector<LinearForm> eqs;
};

Analysis analyse(const Program& p, const Block& b) {
  Analysis a;
  a.facts = facts_of(p, b);
  a.classes = Classes(a.facts.temps);
  for (const auto& e : a.facts.eqs) {
    const auto& c = std::get<CmpPred>(e.node().v);
    if (c.lhs.is_var() && c.rhs.is_var()) a.classes.unite(c.lhs.var_name(), c.rhs.var_name());
  }
  for (const auto& s : a.facts.symbols) {
    const std::string r = a.classes.find(s);
    if (r != s) a.to_rep.emplace(s, Expr::var(r));
  }
  for (const auto& e : a.facts.eqs) {
    auto lin = linearize(substitute(e, a.to_rep));
    if (lin && !lin->form.is_constant()) a.eqs.push_back(lin->form);
  }
  return a;
}

// The predicates of `w` pulled back through the block to the fields of `g`.
void pull_back(Analysis& a, const Access& g, const Access& w, const std::vector<Pred>& preds,
               std::vector<Pred>& out) {
  std::set<std::string> allowed;
  std::map<std::string, std::size_t> field;
  for (std::size_t i = 0; i < g.fields.size(); ++i) {
    const std::string r = a.classes.find(g.fields[i].var_name());
    allowed.insert(r);
    field.try_emplace(r, i);
  }
  Substitution rename;
  for (const auto& [r, i] : field) rename.emplace(r, Expr::var(field_name(g.kvar, i)));
  // Read fields fixed to constants, for generalization.
  std::vector<std::pair<std::string, Value>> fixed;
  for (const auto& e : a.eqs) {
    if (e.terms.size() != 1) continue;
    const auto& [atom, k] = *e.terms.begin();
    if (!atom.is_var() || allowed.count(atom.var_name()) == 0 || (k != 1 && k != -1)) continue;
    fixed.emplace_back(atom.var_name(), -e.constant * k);
  }
  for (const auto& pred : preds) {
    const Pred q = substitute(substitute(pred, fields_to(w.kvar, w.fields)), a.to_rep);
    auto lin = linearize(q);
    if (!lin) {
      bool ok = true;
      for (const auto& v : free_vars(q)) ok = ok && allowed.count(v) != 0;
      if (ok) out.push_back(substitute(q, rename));
      continue;
    }
    std::vector<LinearForm> forms;
    if (lin->rel == LinearConstraint::Rel::kEq) {
      forms = {lin->form, lin->form.scaled(-1)};
    } else {
      forms = {lin->form};
    }
    for (auto& l : forms) {
      if (!eliminate(l, a.eqs, allowed)) continue;
      auto emit = [&](const LinearForm& f) {
        const LinearConstraint c = canonical(LinearConstraint{f, LinearConstraint::Rel::kLe});
        if (c.form.is_constant()) return;
        out.push_back(substitute(to_pred(c), rename));
      };
      emit(l);
      for (const auto& [sym, value] : fixed) {
        if (l.coeff(Expr::var(sym)) != 0) continue;
        const LinearForm d = LinearForm::atom(Expr::var(sym)) - LinearForm::number(value);
        emit(l + d);
        emit(l - d);
      }
    }
  }
}

}  // namespace

PredMap syntactic_predicates(const Program& p) {
  std::map<std::string, PredBag> bags;
  for (const auto& [k, sig] : p.relvars) bags[k];
  for (const auto& b : p.blocks) {
    Analysis a = analyse(p, b);
    for (const auto& atom : a.facts.atoms) {
      for (const auto& acc : a.facts.accesses) {
        if (auto q = to_fields(atom, acc, a.classes)) bags[acc.kvar].add(0, *q);
      }
    }
  }
  PredMap out;
  for (const auto& [k, bag] : bags) out[k] = bag.ranked();
  return out;
}

// Tier 0 holds user predicates, tier 1 predicates from asserts (directly or
// pulled back) and tier 2 the rest.
PredMap harvest_predicates(const Program& p, const HarvestOptions& opt, const PredMap& extra) {
  std::map<std::string, PredBag> bags;
  auto bag = [&](const std::string& k) -> PredBag& { return bags.try_emplace(k, 3).first->second; };
  for (const auto& [k, sig] : p.relvars) bag(k);
  std::map<std::string, std::size_t> user;
  for (const auto& [k, qs] : extra) {
    for (const auto& q : qs) user[k] += bag(k).add(0, q).size();
  }

  std::vector<Analysis> analyses;
  for (const auto& b : p.blocks) analyses.push_back(analyse(p, b));
  std::array<PredMap, 3> frontier;
  frontier[0] = extra;
  for (std::size_t tier : {1, 2}) {
    for (auto& a : analyses) {
      const auto& atoms = tier == 1 ? a.facts.goals : a.facts.atoms;
      for (const auto& atom : atoms) {
        for (const auto& acc : a.facts.accesses) {
          if (auto q = to_fields(atom, acc, a.classes)) {
            auto fresh = bag(acc.kvar).add(tier, *q);
            auto& f = frontier[tier][acc.kvar];
            f.insert(f.end(), fresh.begin(), fresh.end());
          }
        }
      }
    }
  }
  for (std::size_t round = 0; round < opt.wp_rounds; ++round) {
    std::array<PredMap, 3> next;
    for (std::size_t tier : {0, 1, 2}) {
      for (auto& a : analyses) {
        const auto& acc = a.facts.accesses;
        for (std::size_t i = 0; i < acc.size(); ++i) {
          if (acc[i].is_set) continue;
          for (std::size_t j = i + 1; j < acc.size(); ++j) {
            if (!acc[j].is_set) continue;
            auto src = frontier[tier].find(acc[j].kvar);
            if (src == frontier[tier].end()) continue;
            std::vector<Pred> pulled;
            pull_back(a, acc[i], acc[j], src->second, pulled);
            for (const auto& q : pulled) {
              auto fresh = bag(acc[i].kvar).add(std::max<std::size_t>(tier, 1), q);
              auto& n = next[std::max<std::size_t>(tier, 1)][acc[i].kvar];
              n.insert(n.end(), fresh.begin(), fresh.end());
            }
          }
        }
      }
    }
    frontier = std::move(next);
  }
  PredMap out;
  for (const auto& [k, b] : bags) {
    auto ranked = b.ranked();
    const std::size_t cap = user[k] + opt.max_per_kvar;
    if (ranked.size() > cap) ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(cap), ranked.end());
    out[k] = std::move(ranked);
  }
  return out;
}

PredMap parse_predicates(std::string_view text) {
  PredMap out;
  for (const auto& form : read_sexprs(text)) {
    if (!form.has_head("preds")) parse_fail(form, "(preds (KVAR PRED...)...)");
    for (std::size_t i = 1; i < form.items.size(); ++i) {
      const SExpr& e = form.items[i];
      if (!e.is_list() || e.items.empty()) parse_fail(e, "(KVAR PRED...)");
      auto& list = out[parse_identifier(e.items[0], "a kvar name")];
      for (std::size_t j = 1; j < e.items.size(); ++j) list.push_back(parse_pred(e.items[j]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abstract invariants

namespace {

// Literals shared by every vector, then the disjunction of the rest.
Pred compact(const std::set<BitVec>& vectors, const std::vector<Pred>& preds) {
  if (vectors.empty()) return Pred::falsity();
  const std::size_t n = preds.size();
  std::vector<Pred> common;
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < n; ++j) {
    const bool first = (*vectors.begin())[j];
    bool same = true;
    for (const auto& v : vectors) same = same && v[j] == first;
    if (same) {
      common.push_back(literal(preds[j], first));
    } else {
      rest.push_back(j);
    }
  }
  std::set<BitVec> projected;
  for (const auto& v : vectors) {
    BitVec pv;
    for (std::size_t j : rest) pv.push_back(v[j]);
    projected.insert(std::move(pv));
  }
  const bool everything = rest.size() < 63 && projected.size() == (std::size_t{1} << rest.size());
  if (!rest.empty() && !everything) {
    std::vector<Pred> disjuncts;
    for (const auto& pv : projected) {
      std::vector<Pred> lits;
      for (std::size_t k = 0; k < rest.size(); ++k) lits.push_back(literal(preds[rest[k]], pv[k]));
      disjuncts.push_back(Pred::conj(lits));
    }
    common.push_back(Pred::disj(disjuncts));
  }
  return Pred::conj(common);
}

const std::vector<Pred>& preds_of(const PredMap& preds, const std::string& k) {
  static const std::vector<Pred> none;
  auto it = preds.find(k);
  return it == preds.end() ? none : it->second;
}

}  // namespace

Pred AbstractInvariant::formula(const std::string& kvar, const PredMap& preds) const {
  auto it = vectors.find(kvar);
  if (it == vectors.end()) return Pred::falsity();
  return compact(it->second, preds_of(preds, kvar));
}

Validator make_validator(const Signature& sig, const CheckMode& mode) {
  return [sig, mode](const TypeEnv& env, const Pred& q) { return check_valid(sig, env, q, mode).verdict; };
}

const char* to_string(SolveResult::Status s) {
  return s == SolveResult::Status::kProved ? "PROVED" : "INCONCLUSIVE";
}

PostResult abstract_post(const Program& p, const Block& b, const AbstractInvariant& inv,
                         const PredMap& preds, const Validator& valid) {
  PostResult r;
  r.inv = inv;
  SymExec x(p);
  std::vector<Pred> path;
  auto goal_query = [&](const std::vector<Pred>& hyps, const Pred& goal) {
    return Pred::implies(Pred::conj(hyps), goal);
  };
  auto ask = [&](const Pred& q) { return valid(x.env_for(q), q); };

  for (const auto& ins : b.body) {
    if (const auto* a = std::get_if<AssignInstr>(&ins)) {
      x.assign(a->var, x.eval(a->value));
    } else if (const auto* h = std::get_if<HavocInstr>(&ins)) {
      x.assign(h->var, x.fresh(p.var_type(h->var)));
    } else if (const auto* a = std::get_if<AssumeInstr>(&ins)) {
      Pred c = x.eval(a->cond);
      if (c.is_false()) return r;
      if (!c.is_true()) path.push_back(std::move(c));
    } else if (const auto* a = std::get_if<AssertInstr>(&ins)) {
      Pred c = x.eval(a->cond);
      if (!c.is_true()) {
        const Pred q = goal_query(path, c);
        ++r.queries;
        if (ask(q) != Validity::kValid && r.holds) {
          r.holds = false;
          r.failed_query = to_infix(q);
        }
        path.push_back(std::move(c));
      }
    } else if (const auto* g = std::get_if<GetInstr>(&ins)) {
      auto it = inv.vectors.find(g->relvar);
      if (it == inv.vectors.end() || it->second.empty()) return r;
      const auto types = relvar_types(p, g->relvar, g->temps.size());
      std::vector<Expr> temps;
      for (std::size_t i = 0; i < g->temps.size(); ++i) {
        temps.push_back(x.fresh(types[i]));
        x.assign(g->temps[i], temps.back());
      }
      const auto& ps = preds_of(preds, g->relvar);
      const Substitution s = fields_to(g->relvar, temps);
      std::vector<Pred> inst;
      for (const auto& q : ps) inst.push_back(substitute(q, s));
      Pred drawn = compact(it->second, inst);
      if (!drawn.is_true()) path.push_back(std::move(drawn));
    } else if (const auto* st = std::get_if<SetInstr>(&ins)) {
      std::vector<Expr> args;
      for (const auto& a : st->args) args.push_back(x.value_of(a));
      const Substitution s = fields_to(st->relvar, args);
      std::vector<Pred> targets;
      for (const auto& q : preds_of(preds, st->relvar)) targets.push_back(substitute(q, s));
      std::set<BitVec>& out = r.inv.vectors[st->relvar];
      std::vector<Pred> hyps = path;
      BitVec bits;
      std::function<void(std::size_t)> split = [&](std::size_t j) {
        if (j == targets.size()) {
          if (targets.empty()) {
            ++r.queries;
            if (ask(goal_query(hyps, Pred::falsity())) == Validity::kValid) return;
          }
          out.insert(bits);
          return;
        }
        const Pred when_true = goal_query(hyps, targets[j]);
        const Pred when_false = goal_query(hyps, literal(targets[j], false));
        auto pending = std::async(std::launch::async, [&] { return ask(when_false); });
        const Validity t = ask(when_true);
        const Validity f = pending.get();
        r.queries += 2;
        if (t == Validity::kValid && f == Validity::kValid) return;
        for (bool value : {true, false}) {
          if ((value && f == Validity::kValid) || (!value && t == Validity::kValid)) continue;
          hyps.push_back(literal(targets[j], value));
          bits.push_back(value);
          split(j + 1);
          bits.pop_back();
          hyps.pop_back();
        }
      };
      split(0);
    }
  }
  return r;
}

SolveResult solve(const Program& p, const PredMap& preds, const Validator& valid) {
  SolveResult res;
  for (const auto& [k, sig] : p.relvars) res.inv.vectors[k];
  std::map<std::string, std::size_t> version;
  const std::size_t n = p.blocks.size();
  std::vector<std::optional<std::map<std::string, std::size_t>>> seen(n);
  std::vector<PostResult> last(n);
  std::vector<std::set<std::string>> reads(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& ins : p.blocks[i].body) {
      if (const auto* g = std::get_if<GetInstr>(&ins)) reads[i].insert(g->relvar);
    }
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::map<std::string, std::size_t> snap;
      for (const auto& k : reads[i]) snap[k] = version[k];
      if (seen[i] && *seen[i] == snap) continue;
      seen[i] = snap;
      PostResult pr = abstract_post(p, p.blocks[i], res.inv, preds, valid);
      ++res.posts;
      res.queries += pr.queries;
      for (auto& [k, vecs] : pr.inv.vectors) {
        if (vecs.size() != res.inv.vectors[k].size()) ++version[k];
      }
      res.inv = std::move(pr.inv);
      pr.inv = {};
      last[i] = std::move(pr);
      progress = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!last[i].holds) {
      res.status = SolveResult::Status::kInconclusive;
      res.block = p.blocks[i].label;
      res.query = last[i].failed_query;
      break;
    }
  }
  return res;
}

Solution extract_solution(const AbstractInvariant& inv, const PredMap& preds,
                          const std::vector<KVarSig>& sigs, const CloneMap& clones) {
  std::map<std::string, Pred> out;
  for (const auto& k : sigs) {
    Substitution s;
    s.emplace(field_name(k.id, 0), Expr::var(kValueVar));
    for (std::size_t i = 0; i < k.params.size(); ++i) {
      s.emplace(field_name(k.id, i + 1), Expr::var(k.params[i].first));
    }
    out.emplace(k.id, substitute(inv.formula(k.id, preds), s));
  }
  CloneMap m = clones;
  std::set<std::string> covered;
  for (const auto& [k, cs] : clones) covered.insert(cs.begin(), cs.end());
  for (const auto& k : sigs) {
    if (covered.count(k.id) == 0 && m.count(k.id) == 0) m[k.id] = {k.id};
  }
  return fold_solution(Solution::intensional(std::move(out)), m);
}

std::string invariant_report(const AbstractInvariant& inv, const PredMap& preds) {
  std::string out;
  for (const auto& [k, vecs] : inv.vectors) out += k + ": " + to_infix(inv.formula(k, preds)) + "\n";
  return out;
}

}  // namespace hmc
