#include "hmc/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hmc/error.hpp"
#include "hmc/sexpr.hpp"

namespace hmc {

namespace {

const std::set<std::string>& smt_reserved() {
  static const std::set<std::string> words = {
      "_", "!", "as", "let", "exists", "forall", "match", "par", "assert", "check-sat",
      "declare-fun", "declare-sort", "define-fun", "set-logic", "get-value", "true", "false",
      "and", "or", "not", "xor", "=>", "ite", "distinct", "Int", "Bool", "div", "mod", "abs",
      "BINARY", "DECIMAL", "HEXADECIMAL", "NUMERAL", "STRING"};
  return words;
}

bool simple_symbol(const std::string& s) {
  if (s.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) {
      return false;
    }
  }
  return true;
}

std::string sort_of(const BaseType& t) {
  if (t.is_ui()) return smt_symbol(t.ui_name());
  return "Int";
}

void emit_expr(std::ostream& os, const Expr& e);

void emit_lit(std::ostream& os, Value v) {
  if (v < 0) {
    os << "(- " << -v << ')';
  } else {
    os << v;
  }
}

void flatten_add(const Expr& e, std::vector<Expr>& out) {
  if (const auto* a = std::get_if<AddExpr>(&e.node().v)) {
    flatten_add(a->lhs, out);
    out.push_back(a->rhs);
  } else {
    out.push_back(e);
  }
}

void emit_expr(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          os << smt_symbol(n.name);
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          emit_lit(os, n.value);
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          std::vector<Expr> terms;
          flatten_add(e, terms);
          os << "(+";
          for (const auto& t : terms) {
            os << ' ';
            emit_expr(os, t);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          os << "(* ";
          emit_lit(os, n.coeff);
          os << ' ';
          emit_expr(os, n.arg);
          os << ')';
        } else {
          if (n.args.empty()) {
            os << smt_symbol(n.func);
            return;
          }
          os << '(' << smt_symbol(n.func);
          for (const auto& a : n.args) {
            os << ' ';
            emit_expr(os, a);
          }
          os << ')';
        }
      },
      e.node().v);
}

const char* smt_op(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "=";
}

template <class Node>
void flatten_pred(const Pred& p, std::vector<Pred>& out) {
  if (const auto* a = std::get_if<Node>(&p.node().v)) {
    flatten_pred<Node>(a->lhs, out);
    flatten_pred<Node>(a->rhs, out);
  } else {
    out.push_back(p);
  }
}

void emit_pred(std::ostream& os, const Pred& p) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          if (n.op == CmpOp::kNe) os << "(not ";
          os << '(' << smt_op(n.op) << ' ';
          emit_expr(os, n.lhs);
          os << ' ';
          emit_expr(os, n.rhs);
          os << ')';
          if (n.op == CmpOp::kNe) os << ')';
        } else if constexpr (std::is_same_v<T, NotPred>) {
          os << "(not ";
          emit_pred(os, n.arg);
          os << ')';
        } else if constexpr (std::is_same_v<T, AndPred> || std::is_same_v<T, OrPred>) {
          std::vector<Pred> parts;
          flatten_pred<T>(p, parts);
          os << (std::is_same_v<T, AndPred> ? "(and" : "(or");
          for (const auto& q : parts) {
            os << ' ';
            emit_pred(os, q);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, ImpliesPred>) {
          os << "(=> ";
          emit_pred(os, n.lhs);
          os << ' ';
          emit_pred(os, n.rhs);
          os << ')';
        } else {
          os << "(= " << smt_symbol(n.name) << " 1)";
        }
      },
      p.node().v);
}

// Applications of bool-returning functions need the 0..1 range too.
void collect_bool_apps(const Signature& sig, const Expr& e, std::set<std::string>& seen,
                       std::vector<Expr>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AddExpr>) {
          collect_bool_apps(sig, n.lhs, seen, out);
          collect_bool_apps(sig, n.rhs, seen, out);
        } else if constexpr (std::is_same_v<T, MulExpr>) {
          collect_bool_apps(sig, n.arg, seen, out);
        } else if constexpr (std::is_same_v<T, AppExpr>) {
          for (const auto& a : n.args) collect_bool_apps(sig, a, seen, out);
          const FuncSig* f = sig.find(n.func);
          if (f != nullptr && f->ret_type.is_bool() && seen.insert(to_sexpr(e)).second) {
            out.push_back(e);
          }
        }
      },
      e.node().v);
}

void collect_bool_apps(const Signature& sig, const Pred& p, std::set<std::string>& seen,
                       std::vector<Expr>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CmpPred>) {
          collect_bool_apps(sig, n.lhs, seen, out);
          collect_bool_apps(sig, n.rhs, seen, out);
        } else if constexpr (std::is_same_v<T, NotPred>) {
          collect_bool_apps(sig, n.arg, seen, out);
        } else if constexpr (std::is_same_v<T, BoolVarPred>) {
        } else {
          collect_bool_apps(sig, n.lhs, seen, out);
          collect_bool_apps(sig, n.rhs, seen, out);
        }
      },
      p.node().v);
}

void emit_range(std::ostream& os, const Expr& e) {
  os << "(assert (and (<= 0 ";
  emit_expr(os, e);
  os << ") (<= ";
  emit_expr(os, e);
  os << " 1)))\n";
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

std::optional<Value> model_value(const SExpr& s) {
  if (s.is_atom) {
    const std::string& a = s.atom;
    auto bang = a.rfind('!');
    std::string digits = bang == std::string::npos ? a : a.substr(bang + 1);
    try {
      std::size_t used = 0;
      Value v = std::stoll(digits, &used);
      if (used == digits.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  if (s.items.size() == 2 && s.has_head("-")) {
    if (auto v = model_value(s.items[1])) return -*v;
  }
  return std::nullopt;
}

}  // namespace

std::string smt_symbol(const std::string& name) {
  if (simple_symbol(name) && smt_reserved().count(name) == 0) return name;
  std::string inner;
  for (char c : name) {
    if (c != '|' && c != '\\') inner += c;
  }
  return "|" + inner + "|";
}

std::string emit_solver_query(const Signature& sig, const TypeEnv& env, const Pred& p) {
  std::ostringstream os;
  os << "(set-logic QF_UFLIA)\n";
  std::set<std::string> sorts;
  for (const auto& [name, t] : env.bindings()) {
    if (t.is_ui()) sorts.insert(t.ui_name());
  }
  for (const auto& f : sig.funcs()) {
    for (const auto& a : f.arg_types) {
      if (a.is_ui()) sorts.insert(a.ui_name());
    }
    if (f.ret_type.is_ui()) sorts.insert(f.ret_type.ui_name());
  }
  for (const auto& s : sorts) os << "(declare-sort " << smt_symbol(s) << " 0)\n";
  for (const auto& f : sig.funcs()) {
    os << "(declare-fun " << smt_symbol(f.name) << " (";
    for (std::size_t i = 0; i < f.arg_types.size(); ++i) {
      if (i > 0) os << ' ';
      os << sort_of(f.arg_types[i]);
    }
    os << ") " << sort_of(f.ret_type) << ")\n";
  }
  for (const auto& [name, t] : env.bindings()) {
    os << "(declare-fun " << smt_symbol(name) << " () " << sort_of(t) << ")\n";
  }
  for (const auto& [name, t] : env.bindings()) {
    if (t.is_bool()) emit_range(os, Expr::var(name));
  }
  std::set<std::string> seen;
  std::vector<Expr> bool_apps;
  collect_bool_apps(sig, p, seen, bool_apps);
  for (const auto& e : bool_apps) emit_range(os, e);
  os << "(assert (not ";
  emit_pred(os, p);
  os << "))\n(check-sat)\n";
  return os.str();
}

std::vector<std::string> SolverConfig::split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream is(cmd);
  std::string word;
  while (is >> word) out.push_back(word);
  return out;
}

SolverConfig SolverConfig::from_flags(const std::optional<std::string>& smt_cmd,
                                      const std::optional<std::string>& dump_dir,
                                      std::optional<double> timeout, bool session) {
  SolverConfig c;
  const char* env_session = std::getenv("HMC_SMT_SESSION");
  c.persistent = session || (env_session != nullptr && *env_session != '\0' && std::string(env_session) != "0");
  std::string cmd;
  if (smt_cmd) {
    cmd = *smt_cmd;
  } else if (const char* env = std::getenv("HMC_SMT_CMD"); env != nullptr && *env != '\0') {
    cmd = env;
  }
  if (!cmd.empty()) c.argv = split_command(cmd);
  if (c.argv.empty()) throw Error(ErrorCode::kSolverUnavailable, "empty solver command");
  c.dump_dir = dump_dir;
  if (timeout) c.timeout_seconds = *timeout;
  return c;
}

namespace {

struct Child {
  pid_t pid = -1;
  int in_fd = -1;
  int out_fd = -1;
};

Child spawn(const std::vector<std::string>& argv) {
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  if (argv.empty()) throw Error(ErrorCode::kSolverUnavailable, "empty command");

  int in_pipe[2];
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0 ||
      ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSolverUnavailable, std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::kSolverUnavailable, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], 0);
    ::dup2(out_pipe[1], 1);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, 2);
    ::execvp(cargv[0], cargv.data());
    int e = errno;
    ssize_t ignored = ::write(err_pipe[1], &e, sizeof e);
    (void)ignored;
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  int exec_errno = 0;
  ssize_t got = ::read(err_pipe[0], &exec_errno, sizeof exec_errno);
  ::close(err_pipe[0]);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::kSolverUnavailable,
                "cannot run '" + argv[0] + "': " + std::strerror(exec_errno));
  }
  return Child{pid, in_pipe[1], out_pipe[0]};
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          double timeout_seconds) {
  const Child child = spawn(argv);
  const pid_t pid = child.pid;
  int out_pipe[2] = {child.out_fd, -1};
  int in_pipe[2] = {-1, child.in_fd};
  ProcessResult result;
  std::size_t written = 0;
  int in_fd = in_pipe[1];
  ::fcntl(in_fd, F_SETFL, O_NONBLOCK);
  if (input.empty()) {
    ::close(in_fd);
    in_fd = -1;
  }
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_seconds);
  bool out_open = true;
  char buf[4096];
  while (out_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      ::kill(pid, SIGKILL);
      break;
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    pollfd fds[2];
    int nfds = 0;
    fds[nfds++] = pollfd{out_pipe[0], POLLIN, 0};
    if (in_fd >= 0) fds[nfds++] = pollfd{in_fd, POLLOUT, 0};
    int rc = ::poll(fds, nfds, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP)) != 0) {
      ssize_t n = ::write(in_fd, input.data() + written, input.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) {
        ::close(in_fd);
        in_fd = -1;
      }
    }
    if ((fds[0].revents & (POLLIN | POLLHUP | POLLERR)) != 0) {
      ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
      if (n > 0) {
        result.out.append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        out_open = false;
      }
    }
  }
  if (in_fd >= 0) ::close(in_fd);
  ::close(out_pipe[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  result.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

constexpr const char* kEndMarker = "hmc-end";

class SolverSession {
 public:
  explicit SolverSession(const std::vector<std::string>& argv) : child_(spawn(argv)) {
    ::fcntl(child_.in_fd, F_SETFL, O_NONBLOCK);
  }
  ~SolverSession() {
    ::close(child_.in_fd);
    ::close(child_.out_fd);
    ::kill(child_.pid, SIGKILL);
    ::waitpid(child_.pid, nullptr, 0);
  }
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  // Output up to the end marker; nullopt if the solver went away or the
  // deadline passed (then `timed_out` is set).
  std::optional<std::string> exchange(const std::string& input, double timeout_seconds, bool& timed_out) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    std::size_t written = 0;
    std::string out;
    char buf[4096];
    while (true) {
      if (auto end = marker_end(out)) return out.substr(0, *end);
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) {
        timed_out = true;
        return std::nullopt;
      }
      const int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
      pollfd fds[2];
      int nfds = 0;
      fds[nfds++] = pollfd{child_.out_fd, POLLIN, 0};
      if (written < input.size()) fds[nfds++] = pollfd{child_.in_fd, POLLOUT, 0};
      const int rc = ::poll(fds, nfds, wait_ms);
      if (rc < 0) {
        if (errno == EINTR) continue;
        return std::nullopt;
      }
      if (nfds == 2 && (fds[1].revents & (POLLERR | POLLHUP)) != 0) return std::nullopt;
      if (nfds == 2 && (fds[1].revents & POLLOUT) != 0) {
        const ssize_t n = ::write(child_.in_fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN && errno != EINTR) return std::nullopt;
      }
      if ((fds[0].revents & (POLLIN | POLLHUP | POLLERR)) != 0) {
        const ssize_t n = ::read(child_.out_fd, buf, sizeof buf);
        if (n > 0) {
          out.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EINTR) {
          return std::nullopt;
        }
      }
    }
  }

 private:
  // Offset of the line holding the marker, once it is complete.
  static std::optional<std::size_t> marker_end(const std::string& out) {
    for (const std::string& m : {std::string(kEndMarker), "\"" + std::string(kEndMarker) + "\""}) {
      const std::string line = m + "\n";
      if (out.compare(0, line.size(), line) == 0) return 0;
      const auto at = out.find("\n" + line);
      if (at != std::string::npos) return at + 1;
    }
    return std::nullopt;
  }

  Child child_;
};

SmtSolver::SmtSolver(SolverConfig config) : config_(std::move(config)) {}

SmtSolver::~SmtSolver() = default;

std::optional<std::string> SmtSolver::run_persistent(const std::string& input, bool& timed_out) {
  std::unique_ptr<SolverSession> session;
  {
    std::lock_guard<std::mutex> lock(pool_mu_);
    if (!idle_.empty()) {
      session = std::move(idle_.back());
      idle_.pop_back();
    }
  }
  if (!session) session = std::make_unique<SolverSession>(config_.argv);
  auto out = session->exchange("(reset)\n" + input + "(echo \"" + kEndMarker + "\")\n",
                               config_.timeout_seconds, timed_out);
  if (out) {
    std::lock_guard<std::mutex> lock(pool_mu_);
    idle_.push_back(std::move(session));
  }
  return out;
}

SolverOutput SmtSolver::run(const std::string& script, const std::vector<std::string>& model_vars) {
  const std::size_t n = counter_.fetch_add(1);
  issued_.fetch_add(1);
  if (config_.dump_dir) {
    std::filesystem::create_directories(*config_.dump_dir);
    std::ofstream f(std::filesystem::path(*config_.dump_dir) / ("q_" + std::to_string(n) + ".smt2"));
    f << script;
  }
  std::string input = script;
  if (!model_vars.empty()) {
    input += "(get-value (";
    for (std::size_t i = 0; i < model_vars.size(); ++i) {
      if (i > 0) input += ' ';
      input += model_vars[i];
    }
    input += "))\n";
  }
  ProcessResult pr;
  bool done = false;
  if (config_.persistent && persistent_ok_.load()) {
    bool timed_out = false;
    if (auto text = run_persistent(input, timed_out)) {
      pr.out = std::move(*text);
      done = true;
    } else if (timed_out) {
      pr.timed_out = true;
      done = true;
    } else {
      persistent_ok_.store(false);
    }
  }
  if (!done) pr = run_process(config_.argv, input, config_.timeout_seconds);
  SolverOutput out;
  if (pr.timed_out) {
    out.timed_out = true;
    out.answer = SatAnswer::kUnknown;
    return out;
  }
  std::istringstream is(pr.out);
  std::string first_line;
  std::getline(is, first_line);
  std::string token = first_line;
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.pop_back();
  if (token == "sat") {
    out.answer = SatAnswer::kSat;
  } else if (token == "unsat") {
    out.answer = SatAnswer::kUnsat;
  } else if (token == "unknown") {
    out.answer = SatAnswer::kUnknown;
  } else {
    throw Error(ErrorCode::kSolverProtocol,
                "solver answered '" + first_line + "' (query q_" + std::to_string(n) + ")");
  }
  std::string rest((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  out.raw = rest;
  return out;
}

ValidityAnswer SmtSolver::check_valid(const Signature& sig, const TypeEnv& env, const Pred& p) {
  const std::string script = emit_solver_query(sig, env, p);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(script);
    if (it != cache_.end()) {
      hits_.fetch_add(1);
      return *it->second;
    }
  }
  std::vector<std::string> vars;
  for (const auto& [name, t] : env.bindings()) vars.push_back(smt_symbol(name));
  SolverOutput out = run(script, vars);
  ValidityAnswer ans;
  switch (out.answer) {
    case SatAnswer::kUnsat:
      ans.verdict = Validity::kValid;
      break;
    case SatAnswer::kSat: {
      ans.verdict = Validity::kInvalid;
      Interpretation w;
      auto values = parse_model_values(out.raw);
      for (const auto& [name, t] : env.bindings()) {
        auto it = values.find(name);
        if (it != values.end()) w.vars[name] = it->second;
      }
      ans.witness = std::move(w);
      break;
    }
    case SatAnswer::kUnknown:
      ans.verdict = Validity::kUnknown;
      ans.detail = out.timed_out ? "solver timeout" : "solver answered unknown";
      break;
  }
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(script, std::make_shared<const ValidityAnswer>(ans));
  return ans;
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::kValid: return "VALID";
    case Validity::kInvalid: return "INVALID";
    case Validity::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::map<std::string, Value> parse_model_values(const std::string& text) {
  std::map<std::string, Value> out;
  std::vector<SExpr> forms;
  try {
    auto tokens = tokenize(text, LexMode::kSexpr);
    std::size_t pos = 0;
    if (tokens[pos].kind == Token::Kind::kEnd) return out;
    forms.push_back(read_sexpr(tokens, pos));
  } catch (const Error&) {
    return out;
  }
  const SExpr& top = forms.front();
  if (!top.is_list()) return out;
  for (const auto& pair : top.items) {
    if (!pair.is_list() || pair.items.size() != 2 || !pair.items[0].is_atom) continue;
    if (auto v = model_value(pair.items[1])) out[unquote(pair.items[0].atom)] = *v;
  }
  return out;
}

}  // namespace hmc
