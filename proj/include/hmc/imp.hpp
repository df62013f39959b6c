#pragma once

// IMP: one nondeterministic loop over straight-line blocks with base and
// relation variables, under the Relational (set-valued) and Imperative
// (tuple-or-undefined) semantics.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hmc/clone.hpp"
#include "hmc/constraints.hpp"
#include "hmc/logic.hpp"

namespace hmc {

struct AssignInstr {
  std::string var;
  Expr value;
};
struct HavocInstr {
  std::string var;
};
struct GetInstr {
  std::string relvar;
  std::vector<std::string> temps;
};
struct SetInstr {
  std::string relvar;
  std::vector<std::string> args;
};
struct AssumeInstr {
  Pred cond;
};
struct AssertInstr {
  Pred cond;
};

using Instr = std::variant<AssignInstr, HavocInstr, GetInstr, SetInstr, AssumeInstr, AssertInstr>;

// `skip` is assume(true).
Instr skip_instr();

struct Block {
  std::string label;
  std::vector<Instr> body;
};

struct RelvarSig {
  std::vector<BaseType> types;
  std::size_t arity() const { return types.size(); }
  friend bool operator==(const RelvarSig&, const RelvarSig&) = default;
};

struct Program {
  std::map<std::string, RelvarSig> relvars;
  // Declared base-variable types; undeclared variables are int.
  std::map<std::string, BaseType> var_types;
  Signature funcs;
  std::vector<Block> blocks;
  // Recorded in the header for traceability.
  CloneMap clones;

  BaseType var_type(const std::string& name) const;
  // Every base variable mentioned anywhere, sorted.
  std::set<std::string> variables() const;
  const Block* find_block(const std::string& label) const;
};

// Arity of get/set against the relvar signatures, declared relvars and
// functions, typing of expressions, predicates and set arguments (types flow
// through each block in order). Throws on the first problem.
void check_program(const Program& p);

// Types of the variables after each instruction prefix of a block: entry i
// holds the types visible before instruction i.
std::vector<std::map<std::string, BaseType>> block_types(const Program& p, const Block& b);

// ---------------------------------------------------------------------------
// States

struct RelState {
  bool error = false;
  std::map<std::string, Value> base;
  std::map<std::string, std::set<Tuple>> rels;

  static RelState error_state();
  friend auto operator<=>(const RelState&, const RelState&) = default;
  friend bool operator==(const RelState&, const RelState&) = default;
};

struct ImpState {
  bool error = false;
  std::map<std::string, Value> base;
  std::map<std::string, std::optional<Tuple>> rels;

  static ImpState error_state();
  friend auto operator<=>(const ImpState&, const ImpState&) = default;
  friend bool operator==(const ImpState&, const ImpState&) = default;
};

std::string to_string(const RelState& s);
std::string to_string(const ImpState& s);

enum class Semantics { kRelational, kImperative };
const char* to_string(Semantics s);

struct ExecContext {
  const Program& program;
  const ValueDomain& domain;
  const FuncTables& funcs;
};

// Base variables at the domain minimum of their type; relations empty / ⊥.
RelState initial_rel_state(const Program& p, const ValueDomain& d);
ImpState initial_imp_state(const Program& p, const ValueDomain& d);

std::vector<RelState> post_rel(const RelState& s, const Instr& i, const ExecContext& ctx);
std::vector<ImpState> post_imp(const ImpState& s, const Instr& i, const ExecContext& ctx);
std::set<RelState> post_rel_block(const RelState& s, const Block& b, const ExecContext& ctx);
std::set<ImpState> post_imp_block(const ImpState& s, const Block& b, const ExecContext& ctx);

// ---------------------------------------------------------------------------
// Reachability

struct ReachOptions {
  // Loop iterations to explore; nullopt runs to saturation.
  std::optional<std::size_t> fuel;
  std::size_t max_states = 2000000;
  // Resets base variables that no block reads before writing, at the loop
  // head. Verdicts and relation contents are unchanged.
  bool reset_dead = false;
};

struct TraceStep {
  std::string label;  // empty for the initial state
  std::string state;
};

struct ReachResult {
  enum class Verdict { kSafe, kUnsafe, kBoundExhausted };
  Verdict verdict = Verdict::kSafe;
  std::vector<TraceStep> trace;
  std::size_t interpretation = 0;
  FuncTables funcs;
  std::size_t states = 0;
};

const char* to_string(ReachResult::Verdict v);

ReachResult reach(const Program& p, Semantics sem, const ValueDomain& d,
                  const std::vector<FuncTables>& interps, const ReachOptions& opt = {});

// Interpretations of the functions the program uses.
TableEnumeration program_interpretations(const Program& p, const ValueDomain& d,
                                         std::size_t budget, std::uint64_t seed);

struct RelReachSet {
  std::set<RelState> states;
  bool complete = true;
};
struct ImpReachSet {
  std::set<ImpState> states;
  bool complete = true;
};

// Every state reachable at the loop head (including the initial state and,
// when reachable, the error state).
RelReachSet reach_set_rel(const Program& p, const ValueDomain& d, const FuncTables& funcs,
                          const ReachOptions& opt = {});
ImpReachSet reach_set_imp(const Program& p, const ValueDomain& d, const FuncTables& funcs,
                          const ReachOptions& opt = {});

// Base variables read by some block before being written in it.
std::set<std::string> live_at_head(const Program& p);

// ---------------------------------------------------------------------------
// Read-write-once, alpha and Expand

struct RwoResult {
  bool ok = true;
  std::string block;
  std::string relvar;
  enum class Kind { kReads, kWrites } kind = Kind::kReads;
  std::size_t count = 0;

  std::string describe() const;
};

RwoResult is_rwo(const Program& p);

Solution alpha(const Program& p, const std::set<RelState>& states);
std::set<ImpState> expand(const RelState& s);
std::set<ImpState> expand(const std::set<RelState>& states);

// ---------------------------------------------------------------------------
// Text format

Program parse_imp(std::string_view text);
std::string print_imp(const Program& p);
std::string print_instr(const Instr& i);

}  // namespace hmc
