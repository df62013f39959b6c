#include "hmc/clone.hpp"

#include "hmc/error.hpp"

namespace hmc {

namespace {

bool reads(const RefType& t, const std::string& kvar) {
  return t.refinement.is_kapp() && t.refinement.app().kvar == kvar;
}

RefType renamed(const RefType& t, const std::string& kvar) {
  return RefType{t.value_type, Refinement::kapp(kvar, t.refinement.app().args)};
}

}  // namespace

std::size_t read_occurrences(const SubConstraint& c, const std::string& kvar) {
  std::size_t n = 0;
  for (const auto& [name, t] : c.env) n += reads(t, kvar) ? 1 : 0;
  return n + (reads(c.lhs, kvar) ? 1 : 0);
}

std::string clone_name(const std::string& kvar, std::size_t i) {
  return kvar + "." + std::to_string(i);
}

std::pair<ConstraintSet, CloneMap> clone(const ConstraintSet& cs) {
  CloneMap m;
  std::map<std::string, std::size_t> copies;
  for (const auto& k : cs.kvars) {
    std::size_t n = 0;
    for (const auto& c : cs.subs) n = std::max(n, read_occurrences(c, k.id));
    copies[k.id] = n;
    if (n <= 1) {
      m[k.id] = {k.id};
    } else {
      for (std::size_t i = 1; i <= n; ++i) m[k.id].push_back(clone_name(k.id, i));
    }
  }

  ConstraintSet out;
  out.funcs = cs.funcs;
  for (const auto& k : cs.kvars) {
    for (const auto& name : m[k.id]) {
      KVarSig copy = k;
      copy.id = name;
      out.kvars.push_back(std::move(copy));
    }
  }

  for (const auto& c : cs.subs) {
    SubConstraint rewritten = c;
    std::map<std::string, std::size_t> seen;
    auto step1 = [&](RefType& t) {
      if (!t.refinement.is_kapp()) return;
      const std::string& k = t.refinement.app().kvar;
      auto it = copies.find(k);
      if (it == copies.end() || it->second <= 1) return;
      t = renamed(t, m[k][seen[k]++]);
    };
    for (auto& [name, t] : rewritten.env) step1(t);
    step1(rewritten.lhs);

    if (!rewritten.rhs.refinement.is_kapp()) {
      out.subs.push_back(std::move(rewritten));
      continue;
    }
    const std::string k = rewritten.rhs.refinement.app().kvar;
    auto it = copies.find(k);
    if (it == copies.end() || it->second <= 1) {
      out.subs.push_back(std::move(rewritten));
      continue;
    }
    for (std::size_t i = 1; i <= it->second; ++i) {
      SubConstraint copy = rewritten;
      copy.label = c.label + "#" + std::to_string(i);
      copy.rhs = renamed(rewritten.rhs, m[k][i - 1]);
      out.subs.push_back(std::move(copy));
    }
  }
  return {std::move(out), std::move(m)};
}

Solution fold_solution(const Solution& s, const CloneMap& m) {
  Solution out;
  out.form = s.form;
  for (const auto& [k, names] : m) {
    if (s.form == Solution::Form::kExtensional) {
      std::set<Tuple> acc;
      bool first = true;
      for (const auto& name : names) {
        auto it = s.relations.find(name);
        if (it == s.relations.end()) throw Error(ErrorCode::kMissingKVar, name);
        if (first) {
          acc = it->second;
          first = false;
        } else {
          std::set<Tuple> both;
          for (const auto& t : acc) {
            if (it->second.count(t) != 0) both.insert(t);
          }
          acc = std::move(both);
        }
      }
      out.relations[k] = std::move(acc);
    } else {
      std::vector<Pred> parts;
      for (const auto& name : names) {
        auto it = s.predicates.find(name);
        if (it == s.predicates.end()) throw Error(ErrorCode::kMissingKVar, name);
        parts.push_back(it->second);
      }
      out.predicates.emplace(k, Pred::conj(parts));
    }
  }
  return out;
}

Solution unfold_solution(const Solution& s, const CloneMap& m) {
  Solution out;
  out.form = s.form;
  for (const auto& [k, names] : m) {
    if (!s.covers(k)) throw Error(ErrorCode::kMissingKVar, k);
    for (const auto& name : names) {
      if (s.form == Solution::Form::kExtensional) {
        out.relations[name] = s.relations.at(k);
      } else {
        out.predicates.emplace(name, s.predicates.at(k));
      }
    }
  }
  return out;
}

}  // namespace hmc
