#pragma once

// Cloning of κ variables read more than once in a constraint, so that the
// translated program is read-write-once.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hmc/constraints.hpp"

namespace hmc {

// κ -> its clones, in order. Uncloned κs map to themselves.
using CloneMap = std::map<std::string, std::vector<std::string>>;

// Reads of κ in the env and the lhs; the rhs is a write.
std::size_t read_occurrences(const SubConstraint& c, const std::string& kvar);

std::string clone_name(const std::string& kvar, std::size_t i);

std::pair<ConstraintSet, CloneMap> clone(const ConstraintSet& cs);

// Intersection (extensional) or conjunction (intensional) over each κ's
// clones. Entries for names outside the map are dropped.
Solution fold_solution(const Solution& s, const CloneMap& m);

// Gives every clone of κ the solution of κ.
Solution unfold_solution(const Solution& s, const CloneMap& m);

}  // namespace hmc
