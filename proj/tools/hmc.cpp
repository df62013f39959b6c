// hmc: check, translate, clone, run and validate refinement constraint sets.

#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hmc/error.hpp"
#include "hmc/pipeline.hpp"

namespace {

struct DomainFlags {
  std::string int_range;
  std::vector<std::string> ui_ranges;
  std::size_t table_budget = 256;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--int-range", int_range, "int carrier as LO..HI (default -2..2)");
    cmd->add_option("--ui-range", ui_ranges, "[NAME=]LO..HI for uninterpreted sorts (default 0..1)");
    cmd->add_option("--table-budget", table_budget, "function interpretations to enumerate before sampling");
    cmd->add_option("--seed", seed, "seed for sampled interpretations");
  }

  hmc::ValueDomain domain() const {
    hmc::ValueDomain d;
    if (!int_range.empty()) d.int_range = parse_range(int_range);
    for (const auto& r : ui_ranges) {
      const auto eq = r.find('=');
      if (eq == std::string::npos) {
        d.default_ui_range = parse_range(r);
      } else {
        d.ui_ranges[r.substr(0, eq)] = parse_range(r.substr(eq + 1));
      }
    }
    d.validate();
    return d;
  }

  static hmc::ValueDomain::Range parse_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
      if (dots == std::string::npos) throw std::invalid_argument(s);
      return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
    } catch (const std::exception&) {
      throw hmc::Error(hmc::ErrorCode::kIllFormed, "bad range '" + s + "', expected LO..HI");
    }
  }
};

struct SolverFlags {
  std::string smt_cmd;
  std::string emit_smt;
  double timeout = 0;
  std::string mode = "solver";
  bool session = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--smt-cmd", smt_cmd, "solver command line (default: $HMC_SMT_CMD or 'z3 -in')");
    cmd->add_option("--emit-smt", emit_smt, "write every solver query to DIR");
    cmd->add_option("--solver-timeout", timeout, "seconds per solver query (default 20)");
    cmd->add_option("--mode", mode, "validity checking: solver or oracle")
        ->check(CLI::IsMember({"solver", "oracle"}));
    cmd->add_flag("--smt-session", session, "reuse solver processes across queries (also $HMC_SMT_SESSION)");
  }

  hmc::CheckMode check_mode(const DomainFlags& d) const {
    if (mode == "oracle") return hmc::OracleMode{d.domain(), d.table_budget, d.seed};
    auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
    auto config = hmc::SolverConfig::from_flags(opt(smt_cmd), opt(emit_smt),
                                                timeout > 0 ? std::optional<double>(timeout) : std::nullopt, session);
    return hmc::SolverMode{std::make_shared<hmc::SmtSolver>(config)};
  }
};

bool is_imp_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".imp") == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refinement constraint solving through IMP model checking"};
  app.require_subcommand(1);
  std::string current_file;

  bool json_out = false;
  app.add_flag("--json", json_out, "machine-readable report");

  DomainFlags check_domain;
  SolverFlags check_solver;
  std::string check_file, preds_file, check_emit_imp;
  bool check_oracle = false, check_no_clone = false, check_raw = false;
  std::size_t check_fuel = 0, max_preds = 8;
  auto* check = app.add_subcommand("check", "solve a constraint set");
  check->add_option("file", check_file, ".hmc constraint file")->required();
  check->add_flag("--oracle", check_oracle, "search for a counterexample by running the program");
  check->add_flag("--no-clone", check_no_clone, "translate without cloning");
  check->add_option("--preds", preds_file, "extra field predicates");
  check->add_option("--max-preds", max_preds, "harvested predicates per kvar");
  check->add_option("--emit-imp", check_emit_imp, "write the translated program");
  check->add_flag("--raw-solution", check_raw, "report the extracted solution without dropping conjuncts");
  check->add_option("--fuel", check_fuel, "loop iterations for --oracle (default: to saturation)");
  check->add_flag("--json", json_out, "machine-readable report");
  check_domain.add_to(check);
  check_solver.add_to(check);

  std::string tr_file, tr_emit;
  bool tr_no_clone = false, tr_simplify = false;
  auto* translate = app.add_subcommand("translate", "print the IMP program for a constraint set");
  translate->add_option("file", tr_file, ".hmc constraint file")->required();
  translate->add_flag("--no-clone", tr_no_clone, "skip cloning");
  translate->add_flag("--simplify", tr_simplify, "rename away value-variable hops");
  translate->add_option("--emit-imp", tr_emit, "also write the program to PATH");

  std::string cl_file;
  auto* clone_cmd = app.add_subcommand("clone", "print the cloned constraint set");
  clone_cmd->add_option("file", cl_file, ".hmc constraint file")->required();

  DomainFlags ex_domain;
  std::string ex_file, ex_semantics = "relational";
  bool ex_no_clone = false;
  std::size_t ex_fuel = 0, ex_max_states = 2000000;
  auto* exec = app.add_subcommand("exec", "explore a program under one semantics");
  exec->add_option("file", ex_file, ".imp program or .hmc constraint file")->required();
  exec->add_option("--semantics", ex_semantics, "relational or imperative")
      ->check(CLI::IsMember({"relational", "imperative"}));
  exec->add_option("--fuel", ex_fuel, "loop iterations (default: to saturation)");
  exec->add_option("--max-states", ex_max_states, "state budget");
  exec->add_flag("--no-clone", ex_no_clone, "for .hmc input, translate without cloning");
  exec->add_flag("--json", json_out, "machine-readable report");
  ex_domain.add_to(exec);

  DomainFlags va_domain;
  SolverFlags va_solver;
  std::string va_file, va_solution;
  auto* validate = app.add_subcommand("validate", "check a candidate solution");
  validate->add_option("file", va_file, ".hmc constraint file")->required();
  validate->add_option("--solution", va_solution, ".sol file")->required();
  validate->add_flag("--json", json_out, "machine-readable report");
  va_domain.add_to(validate);
  va_solver.add_to(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  auto load_constraints = [&](const std::string& path) {
    current_file = path;
    return hmc::parse_constraints(hmc::read_file(path));
  };

  try {
    if (*check) {
      hmc::CheckOptions opt;
      const auto cs = load_constraints(check_file);
      opt.clone_kvars = !check_no_clone;
      opt.oracle = check_oracle;
      opt.minimize = !check_raw;
      opt.domain = check_domain.domain();
      opt.table_budget = check_domain.table_budget;
      opt.seed = check_domain.seed;
      if (check_fuel > 0) opt.fuel = check_fuel;
      opt.harvest.max_per_kvar = max_preds;
      opt.mode = check_solver.check_mode(check_domain);
      if (!check_emit_imp.empty()) opt.emit_imp = check_emit_imp;
      if (!preds_file.empty()) {
        current_file = preds_file;
        opt.extra_preds = hmc::parse_predicates(hmc::read_file(preds_file));
        current_file = check_file;
      }
      const auto report = hmc::cmd_check(cs, opt);
      std::cout << (json_out ? hmc::report_json(report) : hmc::report_text(report));
      return hmc::exit_code(report.verdict);
    }
    if (*translate) {
      const auto t = hmc::translate_constraints(load_constraints(tr_file), !tr_no_clone, tr_simplify);
      hmc::check_program(t.program);
      const std::string text = hmc::print_imp(t.program);
      if (!tr_emit.empty()) hmc::write_file(tr_emit, text);
      std::cout << text;
      return 0;
    }
    if (*clone_cmd) {
      const auto cs = hmc::prepare(load_constraints(cl_file));
      std::cout << hmc::print_constraints(hmc::clone(cs).first);
      return 0;
    }
    if (*exec) {
      hmc::Program p;
      current_file = ex_file;
      if (is_imp_path(ex_file)) {
        p = hmc::parse_imp(hmc::read_file(ex_file));
      } else {
        p = hmc::translate_constraints(load_constraints(ex_file), !ex_no_clone, false).program;
      }
      hmc::ExecOptions opt;
      opt.semantics = ex_semantics == "imperative" ? hmc::Semantics::kImperative : hmc::Semantics::kRelational;
      opt.domain = ex_domain.domain();
      opt.table_budget = ex_domain.table_budget;
      opt.seed = ex_domain.seed;
      if (ex_fuel > 0) opt.reach.fuel = ex_fuel;
      opt.reach.max_states = ex_max_states;
      opt.reach.reset_dead = true;
      const auto r = hmc::cmd_exec(p, opt);
      std::cout << (json_out ? hmc::exec_json(r, opt.semantics) : hmc::exec_text(r, opt.semantics));
      return hmc::exit_code(r);
    }
    if (*validate) {
      const auto cs = load_constraints(va_file);
      current_file = va_solution;
      const auto s = hmc::parse_solution(hmc::read_file(va_solution));
      current_file = va_file;
      const auto r = hmc::cmd_validate(cs, s, va_solver.check_mode(va_domain));
      std::cout << (json_out ? hmc::validate_json(r) : hmc::validate_text(r));
      return hmc::exit_code(r);
    }
  } catch (const hmc::ParseError& e) {
    std::cerr << current_file << ":" << e.what() << "\n";
    return 3;
  } catch (const hmc::Error& e) {
    const bool solver = e.code() == hmc::ErrorCode::kSolverUnavailable ||
                        e.code() == hmc::ErrorCode::kSolverProtocol;
    std::cerr << (current_file.empty() ? "" : current_file + ": ") << hmc::to_string(e.code()) << ": "
              << e.what() << "\n";
    return solver ? 4 : 3;
  }
  return 3;
}
