#pragma once

// Translation of constraint sets into IMP programs: one loop block per
// subtyping constraint, κ variables as relation variables.

#include <set>
#include <string>
#include <vector>

#include "hmc/clone.hpp"
#include "hmc/constraints.hpp"
#include "hmc/imp.hpp"

namespace hmc {

// Deterministic names for the value variable of each base type and for the
// get/set temporaries, chosen to avoid every name in the constraint set.
class NameGen {
 public:
  NameGen() = default;
  explicit NameGen(const ConstraintSet& cs);

  // `v` for int, `v_bool` for bool, `v_NAME` for `(ui NAME)`.
  std::string value_var(const BaseType& t) const;
  // Field i of a get; every get of a block reuses t0..tn.
  std::string temp(std::size_t i) const;
  // Next set-argument temporary of the current block (u0, u1, ...).
  std::string aux();
  void start_block() { next_aux_ = 0; }

 private:
  std::set<std::string> taken_;
  std::string t_prefix_ = "t";
  std::string u_prefix_ = "u";
  std::size_t next_aux_ = 0;
};

std::vector<Instr> translate_get(const RefType& t, NameGen& g);
std::vector<Instr> translate_set(const RefType& t, NameGen& g);
// Empty environments give `skip`.
std::vector<Instr> translate_env(const RefEnv& env, NameGen& g);
Block translate_constraint(const SubConstraint& c, NameGen& g);

// Normalizes first. `clones` is recorded in the program header.
Program translate_set_of_constraints(const ConstraintSet& cs, const CloneMap& clones = {});

// Verdict-preserving renames that bring the output closer to hand-written
// programs:
//   havoc a; assume(p); x := a   ->  havoc x; assume(p[a:=x])
// when `a` is dead afterwards and x has one type everywhere, and
//   havoc y; ...; get k (.., t, ..); assume(y = t)  ->  get k (.., y, ..)
// when nothing reads y between the havoc and the get. Assumes are only ever
// removed by such a rename.
Program simplify(const Program& p);

}  // namespace hmc
