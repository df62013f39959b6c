#pragma once

// Validity checking: exhaustive enumeration over a finite domain, or an
// external solver.

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "hmc/logic.hpp"
#include "hmc/smt.hpp"

namespace hmc {

struct OracleMode {
  ValueDomain domain;
  std::size_t table_budget = 256;
  std::uint64_t seed = 0;
};

struct SolverMode {
  std::shared_ptr<SmtSolver> solver;
};

using CheckMode = std::variant<OracleMode, SolverMode>;

// Number of total tables for `f` over the domain, saturating at SIZE_MAX.
std::size_t table_count(const FuncSig& f, const ValueDomain& domain);

struct TableEnumeration {
  std::vector<FuncTables> tables;
  bool exhaustive = true;
};

// All interpretations of the functions in `sig` when there are at most
// `budget` of them; otherwise `budget` uniformly sampled ones (seeded).
// Only functions named in `used` are tabulated (all when `used` is null).
TableEnumeration enumerate_func_tables(const Signature& sig, const ValueDomain& domain,
                                       std::size_t budget, std::uint64_t seed,
                                       const std::set<std::string>* used = nullptr);

// Calls `visit` for every valuation of `env` over the domain; stops early
// when `visit` returns false. Returns whether enumeration completed.
bool for_each_valuation(const TypeEnv& env, const ValueDomain& domain,
                        const std::function<bool(const std::map<std::string, Value>&)>& visit);

ValidityAnswer check_valid(const Signature& sig, const TypeEnv& env, const Pred& p,
                           const CheckMode& mode);

}  // namespace hmc
