#include "hmc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "hmc/error.hpp"
#include "json.hpp"

namespace hmc {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

ConstraintSet prepare(const ConstraintSet& cs) {
  ConstraintSet n = normalize(cs);
  check_well_formed(n);
  return n;
}

Translation translate_constraints(const ConstraintSet& cs, bool clone_kvars, bool simplify_output) {
  Translation t;
  t.constraints = prepare(cs);
  CloneMap shown;
  if (clone_kvars) {
    auto [cloned, m] = clone(t.constraints);
    t.constraints = std::move(cloned);
    t.clones = std::move(m);
    for (const auto& [k, names] : t.clones) {
      if (names.size() != 1 || names[0] != k) shown[k] = names;
    }
  }
  t.program = translate_set_of_constraints(t.constraints, shown);
  if (simplify_output) t.program = simplify(t.program);
  return t;
}

const char* to_string(RunReport::Verdict v) {
  switch (v) {
    case RunReport::Verdict::kSafe: return "SAFE";
    case RunReport::Verdict::kUnsafe: return "UNSAFE";
    case RunReport::Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

int exit_code(RunReport::Verdict v) {
  switch (v) {
    case RunReport::Verdict::kSafe: return 0;
    case RunReport::Verdict::kUnsafe: return 1;
    case RunReport::Verdict::kInconclusive: return 2;
  }
  return 2;
}

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& r) : r_(r), start_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    r_.timings_ms.emplace_back(stage, std::chrono::duration<double, std::milli>(now - start_).count());
    start_ = now;
  }

 private:
  RunReport& r_;
  std::chrono::steady_clock::time_point start_;
};

json witness_json(const std::optional<Interpretation>& w) {
  if (!w) return nullptr;
  json j;
  j["vars"] = json::object();
  for (const auto& [x, v] : w->vars) j["vars"][x] = v;
  j["funcs"] = json::object();
  for (const auto& [f, table] : w->funcs) {
    json rows = json::array();
    for (const auto& [args, v] : table) rows.push_back({{"args", args}, {"value", v}});
    j["funcs"][f] = rows;
  }
  return j;
}

json trace_json(const std::vector<TraceStep>& trace) {
  json arr = json::array();
  for (const auto& s : trace) arr.push_back({{"block", s.label}, {"state", s.state}});
  return arr;
}

std::string trace_text(const std::vector<TraceStep>& trace) {
  std::string out;
  for (const auto& s : trace) {
    out += "  " + (s.label.empty() ? std::string("init") : s.label) + " -> " + s.state + "\n";
  }
  return out;
}

json solution_json(const Solution& s) {
  json j = json::object();
  if (s.form == Solution::Form::kIntensional) {
    for (const auto& [k, p] : s.predicates) j[k] = {{"sexpr", to_sexpr(p)}, {"infix", to_infix(p)}};
  } else {
    for (const auto& [k, rel] : s.relations) j[k] = rel;
  }
  return j;
}

}  // namespace

std::string format_interpretation(const Interpretation& w) {
  std::string out;
  for (const auto& [x, v] : w.vars) out += (out.empty() ? "" : ", ") + x + "=" + std::to_string(v);
  for (const auto& [f, table] : w.funcs) {
    for (const auto& [args, v] : table) {
      out += (out.empty() ? "" : ", ") + f + "(";
      for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + std::to_string(args[i]);
      out += ")=" + std::to_string(v);
    }
  }
  return out;
}

Solution minimize_solution(const ConstraintSet& cs, const Solution& s, const CheckMode& mode) {
  if (s.form != Solution::Form::kIntensional) return s;
  Solution best = s;
  auto holds = [&](const Solution& cand) {
    return check_satisfied(cs, cand, mode).status == SatResult::Status::kSatisfied;
  };
  if (!holds(best)) return s;
  for (const auto& [k, p] : s.predicates) {
    std::vector<Pred> parts = conjuncts(p);
    // Disjunctions first, then the remaining conjuncts from the back.
    std::stable_partition(parts.begin(), parts.end(),
                          [](const Pred& q) { return !std::holds_alternative<OrPred>(q.node().v); });
    for (std::size_t n = parts.size(); n-- > 0;) {
      std::vector<Pred> fewer = parts;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(n));
      Solution cand = best;
      cand.predicates.insert_or_assign(k, Pred::conj(fewer));
      if (holds(cand)) {
        parts = std::move(fewer);
        best = std::move(cand);
      }
    }
  }
  return best;
}

RunReport cmd_check(const ConstraintSet& input, const CheckOptions& opt) {
  RunReport r;
  Stopwatch clock(r);
  Translation t = translate_constraints(input, opt.clone_kvars, false);
  clock.lap("translate");
  check_program(t.program);
  if (opt.emit_imp) {
    write_file(*opt.emit_imp, print_imp(t.program));
    r.artifacts.push_back(*opt.emit_imp);
  }

  if (opt.oracle) {
    const auto interps = program_interpretations(t.program, opt.domain, opt.table_budget, opt.seed);
    ReachOptions ro;
    ro.fuel = opt.fuel;
    ro.reset_dead = true;
    ReachResult rr = reach(t.program, Semantics::kRelational, opt.domain, interps.tables, ro);
    clock.lap("oracle");
    if (rr.verdict == ReachResult::Verdict::kUnsafe) {
      r.verdict = RunReport::Verdict::kUnsafe;
      r.trace = std::move(rr.trace);
      if (!rr.funcs.empty()) r.detail = "interpretation: " + format_interpretation({{}, rr.funcs});
      return r;
    }
  }

  const PredMap preds = harvest_predicates(t.program, opt.harvest, opt.extra_preds);
  clock.lap("harvest");
  const SolveResult sr = solve(t.program, preds, make_validator(t.program.funcs, opt.mode));
  clock.lap("solve");
  r.posts = sr.posts;
  r.queries = sr.queries;
  r.invariant = invariant_report(sr.inv, preds);
  if (sr.status != SolveResult::Status::kProved) {
    r.verdict = RunReport::Verdict::kInconclusive;
    r.detail = "could not prove the assertion of block " + sr.block + ": " + sr.query;
    return r;
  }
  Solution s = extract_solution(sr.inv, preds, t.constraints.kvars, t.clones);
  clock.lap("extract");
  const ConstraintSet prepared = prepare(input);
  if (opt.minimize) {
    s = minimize_solution(prepared, s, opt.mode);
    clock.lap("minimize");
  }
  const SatResult check = check_satisfied(prepared, s, opt.mode);
  clock.lap("validate");
  if (check.status != SatResult::Status::kSatisfied) {
    r.verdict = RunReport::Verdict::kInconclusive;
    r.detail = std::string("extracted solution did not re-validate: ") + to_string(check.status) +
               " at " + check.label;
    return r;
  }
  r.verdict = RunReport::Verdict::kSafe;
  r.solution = std::move(s);
  return r;
}

std::string report_text(const RunReport& r) {
  std::string out = std::string(to_string(r.verdict)) + "\n";
  if (r.solution) {
    out += "solution:\n";
    for (const auto& [k, p] : r.solution->predicates) out += "  " + k + " := " + to_infix(p) + "\n";
  }
  if (!r.invariant.empty() && r.verdict == RunReport::Verdict::kInconclusive) {
    out += "invariant:\n";
    std::istringstream lines(r.invariant);
    for (std::string line; std::getline(lines, line);) out += "  " + line + "\n";
  }
  if (!r.trace.empty()) out += "trace:\n" + trace_text(r.trace);
  if (!r.detail.empty()) out += r.detail + "\n";
  for (const auto& a : r.artifacts) out += "wrote " + a + "\n";
  return out;
}

std::string report_json(const RunReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  json timings = json::object();
  for (const auto& [stage, ms] : r.timings_ms) timings[stage] = ms;
  j["timings_ms"] = timings;
  j["solution"] = r.solution ? solution_json(*r.solution) : json(nullptr);
  j["invariant"] = r.invariant;
  j["trace"] = trace_json(r.trace);
  j["artifacts"] = r.artifacts;
  j["detail"] = r.detail;
  j["abstract_posts"] = r.posts;
  j["queries"] = r.queries;
  return j.dump(2) + "\n";
}

ExecReport cmd_exec(const Program& p, const ExecOptions& opt) {
  check_program(p);
  opt.domain.validate();
  const auto interps = program_interpretations(p, opt.domain, opt.table_budget, opt.seed);
  ExecReport r;
  r.sampled_interpretations = !interps.exhaustive;
  r.interpretations = interps.tables.size();
  r.result = reach(p, opt.semantics, opt.domain, interps.tables, opt.reach);
  return r;
}

int exit_code(const ExecReport& r) {
  switch (r.result.verdict) {
    case ReachResult::Verdict::kSafe: return r.sampled_interpretations ? 2 : 0;
    case ReachResult::Verdict::kUnsafe: return 1;
    case ReachResult::Verdict::kBoundExhausted: return 2;
  }
  return 2;
}

std::string exec_text(const ExecReport& r, Semantics sem) {
  std::string out = std::string(to_string(r.result.verdict)) + " (" + to_string(sem) + ", " +
                    std::to_string(r.result.states) + " states)\n";
  if (r.sampled_interpretations) out += "function interpretations were sampled\n";
  if (!r.result.trace.empty()) {
    out += "trace:\n" + trace_text(r.result.trace);
    if (!r.result.funcs.empty()) out += "interpretation: " + format_interpretation({{}, r.result.funcs}) + "\n";
  }
  return out;
}

std::string exec_json(const ExecReport& r, Semantics sem) {
  json j;
  j["verdict"] = to_string(r.result.verdict);
  j["semantics"] = to_string(sem);
  j["states"] = r.result.states;
  j["interpretations"] = r.interpretations;
  j["sampled_interpretations"] = r.sampled_interpretations;
  j["trace"] = trace_json(r.result.trace);
  return j.dump(2) + "\n";
}

SatResult cmd_validate(const ConstraintSet& cs, const Solution& s, const CheckMode& mode) {
  const ConstraintSet n = prepare(cs);
  check_solution_well_formed(n, s);
  return check_satisfied(n, s, mode);
}

int exit_code(const SatResult& r) {
  switch (r.status) {
    case SatResult::Status::kSatisfied: return 0;
    case SatResult::Status::kViolated: return 1;
    case SatResult::Status::kUnknown: return 2;
  }
  return 2;
}

std::string validate_text(const SatResult& r) {
  std::string out = to_string(r.status);
  if (!r.label.empty()) out += " " + r.label;
  out += "\n";
  if (r.witness) out += "witness: " + format_interpretation(*r.witness) + "\n";
  if (!r.detail.empty()) out += r.detail + "\n";
  return out;
}

std::string validate_json(const SatResult& r) {
  json j;
  j["status"] = to_string(r.status);
  j["constraint"] = r.label.empty() ? json(nullptr) : json(r.label);
  j["witness"] = witness_json(r.witness);
  j["detail"] = r.detail;
  return j.dump(2) + "\n";
}

}  // namespace hmc
