#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "hmc/error.hpp"
#include "hmc/pipeline.hpp"

namespace py = pybind11;

namespace {

hmc::ValueDomain domain(hmc::Value lo, hmc::Value hi) {
  hmc::ValueDomain d;
  d.int_range = {lo, hi};
  d.validate();
  return d;
}

hmc::CheckMode mode(const std::string& name, const hmc::ValueDomain& d, const std::optional<std::string>& smt_cmd) {
  if (name == "oracle") return hmc::OracleMode{d};
  if (name != "solver") throw hmc::Error(hmc::ErrorCode::kIllFormed, "mode must be 'solver' or 'oracle'");
  return hmc::SolverMode{std::make_shared<hmc::SmtSolver>(hmc::SolverConfig::from_flags(smt_cmd, std::nullopt, std::nullopt))};
}

std::string check(const std::string& text, bool oracle, bool clone, const std::string& mode_name, hmc::Value lo,
                  hmc::Value hi, std::size_t max_preds, const std::optional<std::string>& smt_cmd) {
  hmc::CheckOptions opt;
  opt.clone_kvars = clone;
  opt.oracle = oracle;
  opt.domain = domain(lo, hi);
  opt.mode = mode(mode_name, opt.domain, smt_cmd);
  opt.harvest.max_per_kvar = max_preds;
  py::gil_scoped_release release;
  return hmc::report_json(hmc::cmd_check(hmc::parse_constraints(text), opt));
}

std::string translate(const std::string& text, bool clone, bool simplify) {
  const auto t = hmc::translate_constraints(hmc::parse_constraints(text), clone, simplify);
  hmc::check_program(t.program);
  return hmc::print_imp(t.program);
}

std::string validate(const std::string& text, const std::string& solution, const std::string& mode_name,
                     hmc::Value lo, hmc::Value hi, const std::optional<std::string>& smt_cmd) {
  const auto cs = hmc::parse_constraints(text);
  const auto s = hmc::parse_solution(solution);
  const auto m = mode(mode_name, domain(lo, hi), smt_cmd);
  py::gil_scoped_release release;
  return hmc::validate_json(hmc::cmd_validate(cs, s, m));
}

std::string exec(const std::string& imp, const std::string& semantics, hmc::Value lo, hmc::Value hi,
                 std::optional<std::size_t> fuel) {
  if (semantics != "relational" && semantics != "imperative") {
    throw hmc::Error(hmc::ErrorCode::kIllFormed, "semantics must be 'relational' or 'imperative'");
  }
  hmc::ExecOptions opt;
  opt.semantics = semantics == "imperative" ? hmc::Semantics::kImperative : hmc::Semantics::kRelational;
  opt.domain = domain(lo, hi);
  opt.reach.fuel = fuel;
  opt.reach.reset_dead = true;
  const auto p = hmc::parse_imp(imp);
  py::gil_scoped_release release;
  return hmc::exec_json(hmc::cmd_exec(p, opt), opt.semantics);
}

}  // namespace

PYBIND11_MODULE(_hmc, m) {
  m.doc() = "Refinement constraint solving through IMP model checking";
  py::register_exception<hmc::Error>(m, "HmcError");
  m.def("check", &check, py::arg("text"), py::arg("oracle") = false, py::arg("clone") = true,
        py::arg("mode") = "solver", py::arg("int_lo") = -2, py::arg("int_hi") = 2, py::arg("max_preds") = 8,
        py::arg("smt_cmd") = py::none());
  m.def("translate", &translate, py::arg("text"), py::arg("clone") = true, py::arg("simplify") = false);
  m.def("validate", &validate, py::arg("text"), py::arg("solution"), py::arg("mode") = "solver",
        py::arg("int_lo") = -2, py::arg("int_hi") = 2, py::arg("smt_cmd") = py::none());
  m.def("exec", &exec, py::arg("imp"), py::arg("semantics") = "relational", py::arg("int_lo") = -2,
        py::arg("int_hi") = 2, py::arg("fuel") = py::none());
}
