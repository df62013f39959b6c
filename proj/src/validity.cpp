#include "hmc/validity.hpp"

#include <limits>
#include <random>

#include "hmc/error.hpp"

namespace hmc {

namespace {

constexpr std::size_t kSaturated = std::numeric_limits<std::size_t>::max();

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::size_t sat_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    r = sat_mul(r, base);
    if (r == kSaturated) break;
  }
  return r;
}

// All argument tuples of `f` over the domain, in lexicographic order.
std::vector<Tuple> argument_rows(const FuncSig& f, const ValueDomain& domain) {
  std::vector<Tuple> rows{Tuple{}};
  for (const auto& t : f.arg_types) {
    std::vector<Tuple> next;
    for (const auto& row : rows) {
      for (Value v : domain.values(t)) {
        Tuple r = row;
        r.push_back(v);
        next.push_back(std::move(r));
      }
    }
    rows = std::move(next);
  }
  return rows;
}

}  // namespace

std::size_t table_count(const FuncSig& f, const ValueDomain& domain) {
  std::size_t rows = 1;
  for (const auto& t : f.arg_types) rows = sat_mul(rows, domain.cardinality(t));
  if (rows == kSaturated) return kSaturated;
  return sat_pow(domain.cardinality(f.ret_type), rows);
}

TableEnumeration enumerate_func_tables(const Signature& sig, const ValueDomain& domain,
                                       std::size_t budget, std::uint64_t seed,
                                       const std::set<std::string>* used) {
  std::vector<const FuncSig*> funcs;
  for (const auto& f : sig.funcs()) {
    if (used == nullptr || used->count(f.name) != 0) funcs.push_back(&f);
  }
  std::size_t total = 1;
  for (const FuncSig* f : funcs) total = sat_mul(total, table_count(*f, domain));

  std::vector<std::vector<Tuple>> rows;
  std::vector<std::vector<Value>> rets;
  for (const FuncSig* f : funcs) {
    rows.push_back(argument_rows(*f, domain));
    rets.push_back(domain.values(f->ret_type));
  }

  TableEnumeration out;
  if (total <= budget) {
    out.exhaustive = true;
    // Mixed-radix counter over every (function, row) cell.
    std::vector<std::size_t> radix;
    for (std::size_t k = 0; k < funcs.size(); ++k) {
      for (std::size_t r = 0; r < rows[k].size(); ++r) radix.push_back(rets[k].size());
    }
    std::vector<std::size_t> digit(radix.size(), 0);
    while (true) {
      FuncTables tables;
      std::size_t cell = 0;
      for (std::size_t k = 0; k < funcs.size(); ++k) {
        FuncTable& t = tables[funcs[k]->name];
        for (std::size_t r = 0; r < rows[k].size(); ++r, ++cell) {
          t[rows[k][r]] = rets[k][digit[cell]];
        }
      }
      out.tables.push_back(std::move(tables));
      std::size_t i = 0;
      while (i < digit.size()) {
        if (++digit[i] < radix[i]) break;
        digit[i] = 0;
        ++i;
      }
      if (i == digit.size()) break;
    }
    return out;
  }

  out.exhaustive = false;
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < budget; ++n) {
    FuncTables tables;
    for (std::size_t k = 0; k < funcs.size(); ++k) {
      FuncTable& t = tables[funcs[k]->name];
      std::uniform_int_distribution<std::size_t> pick(0, rets[k].size() - 1);
      for (const auto& row : rows[k]) t[row] = rets[k][pick(rng)];
    }
    out.tables.push_back(std::move(tables));
  }
  return out;
}

bool for_each_valuation(const TypeEnv& env, const ValueDomain& domain,
                        const std::function<bool(const std::map<std::string, Value>&)>& visit) {
  const auto& bs = env.bindings();
  std::vector<std::vector<Value>> values;
  for (const auto& [name, t] : bs) values.push_back(domain.values(t));
  std::vector<std::size_t> idx(bs.size(), 0);
  std::map<std::string, Value> current;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (values[i].empty()) return true;
    current[bs[i].first] = values[i][0];
  }
  while (true) {
    if (!visit(current)) return false;
    std::size_t i = 0;
    while (i < bs.size()) {
      if (++idx[i] < values[i].size()) {
        current[bs[i].first] = values[i][idx[i]];
        break;
      }
      idx[i] = 0;
      current[bs[i].first] = values[i][0];
      ++i;
    }
    if (i == bs.size()) return true;
  }
}

ValidityAnswer check_valid(const Signature& sig, const TypeEnv& env, const Pred& p,
                           const CheckMode& mode) {
  typecheck_pred(sig, env, p);
  if (const auto* sm = std::get_if<SolverMode>(&mode)) {
    if (!sm->solver) throw Error(ErrorCode::kSolverUnavailable, "no solver configured");
    return sm->solver->check_valid(sig, env, p);
  }
  const auto& om = std::get<OracleMode>(mode);
  std::set<std::string> used;
  collect_funcs(p, used);
  TableEnumeration tabs = enumerate_func_tables(sig, om.domain, om.table_budget, om.seed, &used);
  ValidityAnswer ans;
  ans.verdict = Validity::kValid;
  for (const auto& tables : tabs.tables) {
    std::optional<Interpretation> bad;
    for_each_valuation(env, om.domain, [&](const std::map<std::string, Value>& vals) {
      auto lookup = [&vals](const std::string& n) -> std::optional<Value> {
        auto it = vals.find(n);
        if (it == vals.end()) return std::nullopt;
        return it->second;
      };
      if (!eval_pred(lookup, tables, p)) {
        bad = Interpretation{vals, tables};
        return false;
      }
      return true;
    });
    if (bad) {
      ans.verdict = Validity::kInvalid;
      ans.witness = std::move(bad);
      return ans;
    }
  }
  if (!tabs.exhaustive) {
    ans.verdict = Validity::kUnknown;
    ans.detail = "no counterexample in " + std::to_string(tabs.tables.size()) +
                 " sampled function tables";
  }
  return ans;
}

}  // namespace hmc
