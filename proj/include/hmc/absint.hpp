#pragma once

// Cartesian predicate abstraction over translated IMP programs: per κ, the
// set of reachable truth vectors over a fixed list of field predicates.

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmc/clone.hpp"
#include "hmc/constraints.hpp"
#include "hmc/imp.hpp"
#include "hmc/validity.hpp"

namespace hmc {

// κ -> predicates over the fields κ.0 ... κ.n.
using PredMap = std::map<std::string, std::vector<Pred>>;

std::string field_name(const std::string& kvar, std::size_t i);
// Index of `var` as a field of `kvar`, if it is one.
std::optional<std::size_t> field_index(const std::string& kvar, const std::string& var);

// Atoms of each block's assumes and asserts rewritten into the fields of a
// κ the block reads or writes, in block then atom order.
PredMap syntactic_predicates(const Program& p);

struct HarvestOptions {
  std::size_t max_per_kvar = 8;
  // Rounds of pulling a written κ's predicates back to the fields of the κ
  // read in the same block.
  std::size_t wp_rounds = 2;
};

// `extra` entries come first and are kept even past the cap.
PredMap harvest_predicates(const Program& p, const HarvestOptions& opt = {},
                           const PredMap& extra = {});

// `(preds (KID PRED...) ...)` with field names such as `k1.0`.
PredMap parse_predicates(std::string_view text);

using BitVec = std::vector<bool>;

struct AbstractInvariant {
  std::map<std::string, std::set<BitVec>> vectors;

  // Disjunction of the reachable literal conjunctions, over fields.
  Pred formula(const std::string& kvar, const PredMap& preds) const;
  friend bool operator==(const AbstractInvariant&, const AbstractInvariant&) = default;
};

// Validity of a closed query over the given variables.
using Validator = std::function<Validity(const TypeEnv&, const Pred&)>;

Validator make_validator(const Signature& sig, const CheckMode& mode);

struct PostResult {
  AbstractInvariant inv;
  bool holds = true;
  // The first assert that could not be proved, as an infix implication.
  std::string failed_query;
  std::size_t queries = 0;
};

// Symbolically executes one block from `inv`: gets draw from the source κ's
// vectors, sets split three ways on each predicate of the target κ.
PostResult abstract_post(const Program& p, const Block& b, const AbstractInvariant& inv,
                         const PredMap& preds, const Validator& valid);

struct SolveResult {
  enum class Status { kProved, kInconclusive };
  Status status = Status::kProved;
  AbstractInvariant inv;
  std::string block;
  std::string query;
  std::size_t posts = 0;
  std::size_t queries = 0;
};

const char* to_string(SolveResult::Status s);

SolveResult solve(const Program& p, const PredMap& preds, const Validator& valid);

// Field 0 becomes `v` and field i the i-th parameter; clones are folded.
Solution extract_solution(const AbstractInvariant& inv, const PredMap& preds,
                          const std::vector<KVarSig>& sigs, const CloneMap& clones);

// One line per κ, e.g. `k1: k1.1 <= k1.0 && k1.0 < k1.1 + len(k1.2)`.
std::string invariant_report(const AbstractInvariant& inv, const PredMap& preds);

}  // namespace hmc
