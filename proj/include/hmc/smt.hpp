#pragma once

// SMT-LIB (QF_UFLIA) query emission and an external solver driven over
// pipes, either as long-lived interactive sessions or one process per query.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hmc/logic.hpp"

namespace hmc {

// A script declaring the sorts, functions and variables of `env`, asserting
// the negation of `p` and ending with (check-sat). Deterministic.
std::string emit_solver_query(const Signature& sig, const TypeEnv& env, const Pred& p);

// Quotes a symbol with |...| unless it is a simple, non-reserved symbol.
std::string smt_symbol(const std::string& name);

enum class SatAnswer { kSat, kUnsat, kUnknown };

struct SolverOutput {
  SatAnswer answer = SatAnswer::kUnknown;
  std::string raw;
  bool timed_out = false;
};

struct SolverConfig {
  std::vector<std::string> argv{"z3", "-in"};
  double timeout_seconds = 20.0;
  // When set, every script is written to DIR/q_<n>.smt2.
  std::optional<std::string> dump_dir;
  // Reuse solver processes across queries with (reset) instead of one
  // process per query. Falls back if the solver closes its session.
  bool persistent = false;

  // Splits a command line on whitespace.
  static std::vector<std::string> split_command(const std::string& cmd);
  // `--smt-cmd` wins over $HMC_SMT_CMD, which wins over the default.
  // Sessions are on with `session` or a nonempty $HMC_SMT_SESSION other than "0".
  static SolverConfig from_flags(const std::optional<std::string>& smt_cmd,
                                 const std::optional<std::string>& dump_dir,
                                 std::optional<double> timeout, bool session = false);
};

// Runs `argv` with `input` on stdin and returns stdout. Kills the child after
// `timeout_seconds`. Throws kSolverUnavailable if it cannot be started.
struct ProcessResult {
  std::string out;
  int exit_status = 0;
  bool timed_out = false;
};
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          double timeout_seconds);

struct ValidityAnswer;
class SolverSession;

// Thread-safe; answers are cached by script text.
class SmtSolver {
 public:
  explicit SmtSolver(SolverConfig config = {});
  ~SmtSolver();
  SmtSolver(const SmtSolver&) = delete;
  SmtSolver& operator=(const SmtSolver&) = delete;

  const SolverConfig& config() const { return config_; }

  // Sends a script; when `model_vars` is non-empty and the answer is sat,
  // (get-value ...) is appended and the raw model text is kept in `raw`.
  SolverOutput run(const std::string& script, const std::vector<std::string>& model_vars);

  ValidityAnswer check_valid(const Signature& sig, const TypeEnv& env, const Pred& p);

  std::size_t queries_issued() const { return issued_.load(); }
  std::size_t cache_hits() const { return hits_.load(); }

 private:
  SolverConfig config_;
  std::atomic<std::size_t> counter_{0};
  std::atomic<std::size_t> issued_{0};
  std::atomic<std::size_t> hits_{0};
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const ValidityAnswer>> cache_;
  std::mutex pool_mu_;
  std::vector<std::unique_ptr<SolverSession>> idle_;
  std::atomic<bool> persistent_ok_{true};

  std::optional<std::string> run_persistent(const std::string& input, bool& timed_out);
};

enum class Validity { kValid, kInvalid, kUnknown };

const char* to_string(Validity v);

struct ValidityAnswer {
  Validity verdict = Validity::kUnknown;
  // Variable part of a counter-model; function tables only in oracle mode.
  std::optional<Interpretation> witness;
  std::string detail;
};

// Parses a (get-value ...) response into variable values. UI constants of
// the form `sort!val!N` map to N.
std::map<std::string, Value> parse_model_values(const std::string& text);

}  // namespace hmc
