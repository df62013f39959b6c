#pragma once

// The end-to-end commands behind the CLI.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hmc/absint.hpp"
#include "hmc/clone.hpp"
#include "hmc/constraints.hpp"
#include "hmc/imp.hpp"
#include "hmc/translate.hpp"
#include "hmc/validity.hpp"

namespace hmc {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// normalize + check_well_formed.
ConstraintSet prepare(const ConstraintSet& cs);

// Normalized constraints (cloned unless `no_clone`) and their translation.
struct Translation {
  ConstraintSet constraints;
  CloneMap clones;
  Program program;
};
Translation translate_constraints(const ConstraintSet& cs, bool clone_kvars, bool simplify_output);

struct CheckOptions {
  bool clone_kvars = true;
  bool oracle = false;
  CheckMode mode = SolverMode{};
  ValueDomain domain;
  std::size_t table_budget = 256;
  std::uint64_t seed = 0;
  std::optional<std::size_t> fuel;
  HarvestOptions harvest;
  PredMap extra_preds;
  std::optional<std::string> emit_imp;
  bool minimize = true;
};

struct RunReport {
  enum class Verdict { kSafe, kUnsafe, kInconclusive };
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::optional<Solution> solution;
  std::string invariant;
  std::vector<TraceStep> trace;
  std::vector<std::string> artifacts;
  std::string detail;
  std::size_t posts = 0;
  std::size_t queries = 0;
};

const char* to_string(RunReport::Verdict v);
int exit_code(RunReport::Verdict v);

// Greedily drops conjuncts of each predicate while `s` still satisfies `cs`.
// Returns `s` unchanged if it does not satisfy `cs`.
Solution minimize_solution(const ConstraintSet& cs, const Solution& s, const CheckMode& mode);

RunReport cmd_check(const ConstraintSet& cs, const CheckOptions& opt);
std::string report_text(const RunReport& r);
std::string report_json(const RunReport& r);

struct ExecOptions {
  Semantics semantics = Semantics::kRelational;
  ValueDomain domain;
  std::size_t table_budget = 256;
  std::uint64_t seed = 0;
  ReachOptions reach;
};

struct ExecReport {
  ReachResult result;
  bool sampled_interpretations = false;
  std::size_t interpretations = 0;
};

ExecReport cmd_exec(const Program& p, const ExecOptions& opt);
std::string exec_text(const ExecReport& r, Semantics sem);
std::string exec_json(const ExecReport& r, Semantics sem);
int exit_code(const ExecReport& r);

SatResult cmd_validate(const ConstraintSet& cs, const Solution& s, const CheckMode& mode);
std::string validate_text(const SatResult& r);
std::string validate_json(const SatResult& r);
int exit_code(const SatResult& r);

std::string format_interpretation(const Interpretation& i);

}  // namespace hmc
