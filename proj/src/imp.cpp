#include "hmc/imp.hpp"

#include <deque>
#include <sstream>

#include "hmc/error.hpp"

namespace hmc {

Instr skip_instr() { return AssumeInstr{Pred::truth()}; }

BaseType Program::var_type(const std::string& name) const {
  auto it = var_types.find(name);
  return it == var_types.end() ? BaseType::Int() : it->second;
}

std::set<std::string> Program::variables() const {
  std::set<std::string> out;
  for (const auto& [name, t] : var_types) out.insert(name);
  for (const auto& b : blocks) {
    for (const auto& ins : b.body) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AssignInstr>) {
              out.insert(n.var);
              collect_vars(n.value, out);
            } else if constexpr (std::is_same_v<T, HavocInstr>) {
              out.insert(n.var);
            } else if constexpr (std::is_same_v<T, GetInstr>) {
              out.insert(n.temps.begin(), n.temps.end());
            } else if constexpr (std::is_same_v<T, SetInstr>) {
              out.insert(n.args.begin(), n.args.end());
            } else {
              collect_vars(n.cond, out);
            }
          },
          ins);
    }
  }
  return out;
}

const Block* Program::find_block(const std::string& label) const {
  for (const auto& b : blocks) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

namespace {

TypeEnv env_of(const std::map<std::string, BaseType>& types) {
  TypeEnv env;
  for (const auto& [name, t] : types) env.bind(name, t);
  return env;
}

std::string where(const Block& b, std::size_t i) {
  return "block " + b.label + ", instruction " + std::to_string(i + 1);
}

}  // namespace

std::vector<std::map<std::string, BaseType>> block_types(const Program& p, const Block& b) {
  std::map<std::string, BaseType> types;
  for (const auto& name : p.variables()) types.emplace(name, p.var_type(name));
  std::vector<std::map<std::string, BaseType>> out;
  out.reserve(b.body.size() + 1);
  for (std::size_t i = 0; i < b.body.size(); ++i) {
    out.push_back(types);
    const Instr& ins = b.body[i];
    if (const auto* a = std::get_if<AssignInstr>(&ins)) {
      types.insert_or_assign(a->var, typecheck_expr(p.funcs, env_of(types), a->value));
    } else if (const auto* h = std::get_if<HavocInstr>(&ins)) {
      types.insert_or_assign(h->var, p.var_type(h->var));
    } else if (const auto* g = std::get_if<GetInstr>(&ins)) {
      auto it = p.relvars.find(g->relvar);
      if (it == p.relvars.end()) throw Error(ErrorCode::kUndeclaredKVar, g->relvar + " in " + where(b, i));
      for (std::size_t k = 0; k < g->temps.size() && k < it->second.arity(); ++k) {
        types.insert_or_assign(g->temps[k], it->second.types[k]);
      }
    }
  }
  out.push_back(types);
  return out;
}

void check_program(const Program& p) {
  std::set<std::string> labels;
  for (const auto& b : p.blocks) {
    if (!labels.insert(b.label).second) {
      throw Error(ErrorCode::kIllFormed, "duplicate block label " + b.label);
    }
    auto types = block_types(p, b);
    for (std::size_t i = 0; i < b.body.size(); ++i) {
      const Instr& ins = b.body[i];
      const TypeEnv env = env_of(types[i]);
      auto rel = [&](const std::string& k, std::size_t width) -> const RelvarSig& {
        auto it = p.relvars.find(k);
        if (it == p.relvars.end()) throw Error(ErrorCode::kUndeclaredKVar, k + " in " + where(b, i));
        if (it->second.arity() != width) {
          throw Error(ErrorCode::kArityMismatch,
                      k + " has arity " + std::to_string(it->second.arity()) + ", used with " +
                          std::to_string(width) + " fields in " + where(b, i));
        }
        return it->second;
      };
      try {
        if (const auto* g = std::get_if<GetInstr>(&ins)) {
          rel(g->relvar, g->temps.size());
          std::set<std::string> distinct(g->temps.begin(), g->temps.end());
          if (distinct.size() != g->temps.size()) {
            throw Error(ErrorCode::kIllFormed, "repeated temporary in get");
          }
        } else if (const auto* s = std::get_if<SetInstr>(&ins)) {
          const RelvarSig& sig = rel(s->relvar, s->args.size());
          for (std::size_t k = 0; k < s->args.size(); ++k) {
            const BaseType* t = env.lookup(s->args[k]);
            if (t == nullptr || *t != sig.types[k]) {
              throw Error(ErrorCode::kTypeMismatch,
                          "field " + std::to_string(k) + " of " + s->relvar + " expects " +
                              sig.types[k].str() + ", got " + s->args[k]);
            }
          }
        } else if (const auto* a = std::get_if<AssumeInstr>(&ins)) {
          typecheck_pred(p.funcs, env, a->cond);
        } else if (const auto* a = std::get_if<AssertInstr>(&ins)) {
          typecheck_pred(p.funcs, env, a->cond);
        }
      } catch (const Error& e) {
        std::string msg = e.what();
        if (msg.find(" in block ") == std::string::npos) msg += " in " + where(b, i);
        throw Error(e.code(), msg);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// States

RelState RelState::error_state() {
  RelState s;
  s.error = true;
  return s;
}

ImpState ImpState::error_state() {
  ImpState s;
  s.error = true;
  return s;
}

namespace {

std::string tuple_str(const Tuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

std::string base_str(const std::map<std::string, Value>& base) {
  std::string out;
  bool first = true;
  for (const auto& [name, v] : base) {
    if (!first) out += ", ";
    first = false;
    out += name + "=" + std::to_string(v);
  }
  return out;
}

}  // namespace

std::string to_string(const RelState& s) {
  if (s.error) return "E";
  std::string out = "{" + base_str(s.base) + " |";
  for (const auto& [k, tuples] : s.rels) {
    out += " " + k + "={";
    bool first = true;
    for (const auto& t : tuples) {
      if (!first) out += ", ";
      first = false;
      out += tuple_str(t);
    }
    out += "}";
  }
  return out + "}";
}

std::string to_string(const ImpState& s) {
  if (s.error) return "E";
  std::string out = "{" + base_str(s.base) + " |";
  for (const auto& [k, t] : s.rels) out += " " + k + "=" + (t ? tuple_str(*t) : std::string("_|_"));
  return out + "}";
}

const char* to_string(Semantics s) {
  return s == Semantics::kRelational ? "relational" : "imperative";
}

RelState initial_rel_state(const Program& p, const ValueDomain& d) {
  RelState s;
  for (const auto& name : p.variables()) s.base[name] = d.minimum(p.var_type(name));
  for (const auto& [k, sig] : p.relvars) s.rels[k];
  return s;
}

ImpState initial_imp_state(const Program& p, const ValueDomain& d) {
  ImpState s;
  for (const auto& name : p.variables()) s.base[name] = d.minimum(p.var_type(name));
  for (const auto& [k, sig] : p.relvars) s.rels[k] = std::nullopt;
  return s;
}

namespace {

VarLookup lookup_in(const std::map<std::string, Value>& base) {
  return [&base](const std::string& n) -> std::optional<Value> {
    auto it = base.find(n);
    if (it == base.end()) return std::nullopt;
    return it->second;
  };
}

Value read_var(const std::map<std::string, Value>& base, const std::string& n) {
  auto it = base.find(n);
  if (it == base.end()) throw Error(ErrorCode::kMissingBinding, n);
  return it->second;
}

// Shared by both semantics: everything except get and set.
template <class State>
bool post_common(const State& s, const Instr& i, const ExecContext& ctx, std::vector<State>& out) {
  if (const auto* a = std::get_if<AssignInstr>(&i)) {
    State n = s;
    n.base[a->var] = eval_expr(lookup_in(s.base), ctx.funcs, a->value);
    out.push_back(std::move(n));
    return true;
  }
  if (const auto* h = std::get_if<HavocInstr>(&i)) {
    for (Value v : ctx.domain.values(ctx.program.var_type(h->var))) {
      State n = s;
      n.base[h->var] = v;
      out.push_back(std::move(n));
    }
    return true;
  }
  if (const auto* a = std::get_if<AssumeInstr>(&i)) {
    if (eval_pred(lookup_in(s.base), ctx.funcs, a->cond)) out.push_back(s);
    return true;
  }
  if (const auto* a = std::get_if<AssertInstr>(&i)) {
    if (eval_pred(lookup_in(s.base), ctx.funcs, a->cond)) {
      out.push_back(s);
    } else {
      out.push_back(State::error_state());
    }
    return true;
  }
  return false;
}

}  // namespace

std::vector<RelState> post_rel(const RelState& s, const Instr& i, const ExecContext& ctx) {
  if (s.error) return {s};
  std::vector<RelState> out;
  if (post_common(s, i, ctx, out)) return out;
  if (const auto* g = std::get_if<GetInstr>(&i)) {
    auto it = s.rels.find(g->relvar);
    if (it == s.rels.end()) return out;
    for (const Tuple& t : it->second) {
      RelState n = s;
      for (std::size_t k = 0; k < g->temps.size() && k < t.size(); ++k) n.base[g->temps[k]] = t[k];
      out.push_back(std::move(n));
    }
    return out;
  }
  const auto& st = std::get<SetInstr>(i);
  RelState n = s;
  Tuple t;
  for (const auto& a : st.args) t.push_back(read_var(s.base, a));
  n.rels[st.relvar].insert(std::move(t));
  out.push_back(std::move(n));
  return out;
}

std::vector<ImpState> post_imp(const ImpState& s, const Instr& i, const ExecContext& ctx) {
  if (s.error) return {s};
  std::vector<ImpState> out;
  if (post_common(s, i, ctx, out)) return out;
  if (const auto* g = std::get_if<GetInstr>(&i)) {
    auto it = s.rels.find(g->relvar);
    if (it == s.rels.end() || !it->second) return out;
    ImpState n = s;
    const Tuple& t = *it->second;
    for (std::size_t k = 0; k < g->temps.size() && k < t.size(); ++k) n.base[g->temps[k]] = t[k];
    out.push_back(std::move(n));
    return out;
  }
  const auto& st = std::get<SetInstr>(i);
  ImpState n = s;
  Tuple t;
  for (const auto& a : st.args) t.push_back(read_var(s.base, a));
  n.rels[st.relvar] = std::move(t);
  out.push_back(std::move(n));
  return out;
}

namespace {

template <class State, class Post>
std::set<State> post_block_generic(const State& s, const Block& b, const ExecContext& ctx, Post post) {
  std::set<State> current{s};
  for (const auto& ins : b.body) {
    std::set<State> next;
    for (const auto& st : current) {
      for (auto& n : post(st, ins, ctx)) next.insert(std::move(n));
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

}  // namespace

std::set<RelState> post_rel_block(const RelState& s, const Block& b, const ExecContext& ctx) {
  return post_block_generic(s, b, ctx, post_rel);
}

std::set<ImpState> post_imp_block(const ImpState& s, const Block& b, const ExecContext& ctx) {
  return post_block_generic(s, b, ctx, post_imp);
}

// ---------------------------------------------------------------------------
// Reachability

const char* to_string(ReachResult::Verdict v) {
  switch (v) {
    case ReachResult::Verdict::kSafe: return "SAFE";
    case ReachResult::Verdict::kUnsafe: return "UNSAFE";
    case ReachResult::Verdict::kBoundExhausted: return "BOUND_EXHAUSTED";
  }
  return "?";
}

std::set<std::string> live_at_head(const Program& p) {
  std::set<std::string> live;
  for (const auto& b : p.blocks) {
    std::set<std::string> defined;
    auto use = [&](const std::set<std::string>& vars) {
      for (const auto& v : vars) {
        if (defined.count(v) == 0) live.insert(v);
      }
    };
    for (const auto& ins : b.body) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AssignInstr>) {
              use(free_vars(n.value));
              defined.insert(n.var);
            } else if constexpr (std::is_same_v<T, HavocInstr>) {
              defined.insert(n.var);
            } else if constexpr (std::is_same_v<T, GetInstr>) {
              defined.insert(n.temps.begin(), n.temps.end());
            } else if constexpr (std::is_same_v<T, SetInstr>) {
              use(std::set<std::string>(n.args.begin(), n.args.end()));
            } else {
              use(free_vars(n.cond));
            }
          },
          ins);
    }
  }
  return live;
}

namespace {

template <class State>
struct Explorer {
  struct Node {
    State state;
    std::size_t parent;
    std::size_t block;
  };
  std::vector<Node> nodes;
  std::map<State, std::size_t> index;
  bool complete = true;
  std::optional<std::size_t> error_node;
};

template <class State, class PostBlock>
Explorer<State> explore(const Program& p, const State& init, const ExecContext& ctx,
                        const ReachOptions& opt, bool stop_at_error, PostBlock post_block) {
  Explorer<State> ex;
  const std::size_t none = static_cast<std::size_t>(-1);
  std::set<std::string> dead;
  if (opt.reset_dead) {
    auto live = live_at_head(p);
    for (const auto& v : p.variables()) {
      if (live.count(v) == 0) dead.insert(v);
    }
  }
  auto canon = [&](State s) {
    if (!s.error) {
      for (const auto& v : dead) s.base[v] = init.base.count(v) ? init.base.at(v) : 0;
    }
    return s;
  };
  State start = canon(init);
  ex.nodes.push_back({start, none, none});
  ex.index.emplace(start, 0);
  std::vector<std::size_t> frontier{0};
  std::size_t level = 0;
  while (!frontier.empty()) {
    if (opt.fuel && level >= *opt.fuel) {
      ex.complete = false;
      break;
    }
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      if (ex.nodes[idx].state.error) continue;
      for (std::size_t bi = 0; bi < p.blocks.size(); ++bi) {
        const State current = ex.nodes[idx].state;
        for (const auto& succ : post_block(current, p.blocks[bi], ctx)) {
          State c = canon(succ);
          if (ex.index.count(c) != 0) continue;
          const std::size_t id = ex.nodes.size();
          const bool is_error = c.error;
          ex.index.emplace(c, id);
          ex.nodes.push_back({std::move(c), idx, bi});
          if (is_error) {
            ex.error_node = id;
            if (stop_at_error) return ex;
            continue;
          }
          next.push_back(id);
          if (ex.nodes.size() > opt.max_states) {
            ex.complete = false;
            return ex;
          }
        }
      }
    }
    frontier = std::move(next);
    ++level;
  }
  return ex;
}

template <class State>
std::vector<TraceStep> trace_of(const Explorer<State>& ex, const Program& p, std::size_t id) {
  std::vector<TraceStep> out;
  const std::size_t none = static_cast<std::size_t>(-1);
  while (id != none) {
    const auto& n = ex.nodes[id];
    out.push_back({n.block == none ? std::string() : p.blocks[n.block].label, to_string(n.state)});
    id = n.parent;
  }
  return {out.rbegin(), out.rend()};
}

template <class State, class PostBlock>
ReachResult reach_one(const Program& p, const State& init, const ExecContext& ctx,
                      const ReachOptions& opt, PostBlock post_block) {
  auto ex = explore(p, init, ctx, opt, true, post_block);
  ReachResult r;
  r.states = ex.nodes.size();
  if (ex.error_node) {
    r.verdict = ReachResult::Verdict::kUnsafe;
    r.trace = trace_of(ex, p, *ex.error_node);
  } else if (!ex.complete) {
    r.verdict = ReachResult::Verdict::kBoundExhausted;
  }
  return r;
}

}  // namespace

ReachResult reach(const Program& p, Semantics sem, const ValueDomain& d,
                  const std::vector<FuncTables>& interps, const ReachOptions& opt) {
  ReachResult overall;
  const std::vector<FuncTables> single{FuncTables{}};
  const auto& list = interps.empty() ? single : interps;
  for (std::size_t k = 0; k < list.size(); ++k) {
    ExecContext ctx{p, d, list[k]};
    ReachResult r = sem == Semantics::kRelational
                        ? reach_one(p, initial_rel_state(p, d), ctx, opt, post_rel_block)
                        : reach_one(p, initial_imp_state(p, d), ctx, opt, post_imp_block);
    overall.states += r.states;
    if (r.verdict == ReachResult::Verdict::kUnsafe) {
      r.interpretation = k;
      r.funcs = list[k];
      r.states = overall.states;
      return r;
    }
    if (r.verdict == ReachResult::Verdict::kBoundExhausted) {
      overall.verdict = ReachResult::Verdict::kBoundExhausted;
    }
  }
  return overall;
}

TableEnumeration program_interpretations(const Program& p, const ValueDomain& d,
                                         std::size_t budget, std::uint64_t seed) {
  std::set<std::string> used;
  for (const auto& b : p.blocks) {
    for (const auto& ins : b.body) {
      if (const auto* a = std::get_if<AssignInstr>(&ins)) {
        collect_funcs(Pred::cmp(CmpOp::kEq, a->value, a->value), used);
      } else if (const auto* a = std::get_if<AssumeInstr>(&ins)) {
        collect_funcs(a->cond, used);
      } else if (const auto* a = std::get_if<AssertInstr>(&ins)) {
        collect_funcs(a->cond, used);
      }
    }
  }
  return enumerate_func_tables(p.funcs, d, budget, seed, &used);
}

RelReachSet reach_set_rel(const Program& p, const ValueDomain& d, const FuncTables& funcs,
                          const ReachOptions& opt) {
  ExecContext ctx{p, d, funcs};
  auto ex = explore(p, initial_rel_state(p, d), ctx, opt, false, post_rel_block);
  RelReachSet out;
  out.complete = ex.complete;
  for (auto& n : ex.nodes) out.states.insert(n.state);
  return out;
}

ImpReachSet reach_set_imp(const Program& p, const ValueDomain& d, const FuncTables& funcs,
                          const ReachOptions& opt) {
  ExecContext ctx{p, d, funcs};
  auto ex = explore(p, initial_imp_state(p, d), ctx, opt, false, post_imp_block);
  ImpReachSet out;
  out.complete = ex.complete;
  for (auto& n : ex.nodes) out.states.insert(n.state);
  return out;
}

// ---------------------------------------------------------------------------
// RWO, alpha, Expand

std::string RwoResult::describe() const {
  if (ok) return "OK";
  return "block " + block + ": " + relvar + " " + (kind == Kind::kReads ? "READS " : "WRITES ") +
         std::to_string(count);
}

RwoResult is_rwo(const Program& p) {
  for (const auto& b : p.blocks) {
    std::map<std::string, std::size_t> reads;
    std::map<std::string, std::size_t> writes;
    for (const auto& ins : b.body) {
      if (const auto* g = std::get_if<GetInstr>(&ins)) ++reads[g->relvar];
      if (const auto* s = std::get_if<SetInstr>(&ins)) ++writes[s->relvar];
    }
    for (const auto& [k, n] : reads) {
      if (n > 1) return RwoResult{false, b.label, k, RwoResult::Kind::kReads, n};
    }
    for (const auto& [k, n] : writes) {
      if (n > 1) return RwoResult{false, b.label, k, RwoResult::Kind::kWrites, n};
    }
  }
  return RwoResult{};
}

Solution alpha(const Program& p, const std::set<RelState>& states) {
  std::map<std::string, std::set<Tuple>> rel;
  for (const auto& [k, sig] : p.relvars) rel[k];
  for (const auto& s : states) {
    if (s.error) continue;
    for (const auto& [k, tuples] : s.rels) rel[k].insert(tuples.begin(), tuples.end());
  }
  return Solution::extensional(std::move(rel));
}

std::set<ImpState> expand(const RelState& s) {
  if (s.error) return {ImpState::error_state()};
  std::vector<ImpState> acc;
  ImpState base;
  base.base = s.base;
  acc.push_back(base);
  for (const auto& [k, tuples] : s.rels) {
    std::vector<ImpState> next;
    for (const auto& partial : acc) {
      if (tuples.empty()) {
        ImpState n = partial;
        n.rels[k] = std::nullopt;
        next.push_back(std::move(n));
        continue;
      }
      for (const auto& t : tuples) {
        ImpState n = partial;
        n.rels[k] = t;
        next.push_back(std::move(n));
      }
    }
    acc = std::move(next);
  }
  return {acc.begin(), acc.end()};
}

std::set<ImpState> expand(const std::set<RelState>& states) {
  std::set<ImpState> out;
  for (const auto& s : states) {
    auto e = expand(s);
    out.insert(e.begin(), e.end());
  }
  return out;
}

}  // namespace hmc
