#include "hmc/linear.hpp"

#include <numeric>

namespace hmc {

LinearForm LinearForm::atom(Expr e) {
  LinearForm f;
  f.terms.emplace(std::move(e), 1);
  return f;
}

LinearForm LinearForm::number(Value c) {
  LinearForm f;
  f.constant = c;
  return f;
}

std::optional<LinearForm> LinearForm::of(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::optional<LinearForm> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr> || std::is_same_v<T, AppExpr>) {
          return atom(e);
        } else if constexpr (std::is_same_v<T, LitExpr>) {
          return number(n.value);
        } else if constexpr (std::is_same_v<T, AddExpr>) {
          auto a = of(n.lhs);
          auto b = of(n.rhs);
          if (!a || !b) return std::nullopt;
          return *a + *b;
        } else {
          auto a = of(n.arg);
          if (!a) return std::nullopt;
          return a->scaled(n.coeff);
        }
      },
      e.node().v);
}

Value LinearForm::coeff(const Expr& a) const {
  auto it = terms.find(a);
  return it == terms.end() ? 0 : it->second;
}

LinearForm LinearForm::scaled(Value k) const {
  if (k == 0) return number(0);
  LinearForm f;
  for (const auto& [a, c] : terms) f.terms.emplace(a, c * k);
  f.constant = constant * k;
  return f;
}

LinearForm& LinearForm::operator+=(const LinearForm& o) {
  for (const auto& [a, c] : o.terms) {
    Value& slot = terms[a];
    slot += c;
    if (slot == 0) terms.erase(a);
  }
  constant += o.constant;
  return *this;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
  LinearForm f = *this;
  f += o;
  return f;
}

LinearForm LinearForm::operator-(const LinearForm& o) const { return *this + o.scaled(-1); }

namespace {

Expr sum(const std::vector<std::pair<Expr, Value>>& parts, Value constant) {
  std::optional<Expr> acc;
  auto push = [&](Expr e) { acc = acc ? Expr::add(*acc, std::move(e)) : std::move(e); };
  for (const auto& [a, c] : parts) push(c == 1 ? a : Expr::mul(c, a));
  if (constant != 0 || !acc) push(Expr::lit(constant));
  return *acc;
}

}  // namespace

Expr LinearForm::to_expr() const {
  return sum(std::vector<std::pair<Expr, Value>>(terms.begin(), terms.end()), constant);
}

std::optional<LinearConstraint> linearize(const Pred& p) {
  const auto* c = std::get_if<CmpPred>(&p.node().v);
  if (c == nullptr || c->op == CmpOp::kNe) return std::nullopt;
  auto l = LinearForm::of(c->lhs);
  auto r = LinearForm::of(c->rhs);
  if (!l || !r) return std::nullopt;
  switch (c->op) {
    case CmpOp::kEq: return LinearConstraint{*l - *r, LinearConstraint::Rel::kEq};
    case CmpOp::kLe: return LinearConstraint{*l - *r, LinearConstraint::Rel::kLe};
    case CmpOp::kLt: return LinearConstraint{*l - *r + LinearForm::number(1), LinearConstraint::Rel::kLe};
    case CmpOp::kGe: return LinearConstraint{*r - *l, LinearConstraint::Rel::kLe};
    case CmpOp::kGt: return LinearConstraint{*r - *l + LinearForm::number(1), LinearConstraint::Rel::kLe};
    case CmpOp::kNe: break;
  }
  return std::nullopt;
}

LinearConstraint canonical(const LinearConstraint& in) {
  LinearConstraint c = in;
  Value g = 0;
  for (const auto& [a, k] : c.form.terms) g = std::gcd(g, k < 0 ? -k : k);
  if (g > 1) {
    if (c.rel == LinearConstraint::Rel::kLe) {
      for (auto& [a, k] : c.form.terms) k /= g;
      // sum <= -constant/g, rounded down on the right.
      const Value bound = -c.form.constant;
      const Value q = bound >= 0 ? bound / g : -((-bound + g - 1) / g);
      c.form.constant = -q;
    } else if (c.form.constant % g == 0) {
      for (auto& [a, k] : c.form.terms) k /= g;
      c.form.constant /= g;
    }
  }
  if (c.rel == LinearConstraint::Rel::kEq && !c.form.terms.empty() &&
      c.form.terms.begin()->second < 0) {
    c.form = c.form.scaled(-1);
  }
  return c;
}

Pred to_pred(const LinearConstraint& c) {
  std::vector<std::pair<Expr, Value>> pos;
  std::vector<std::pair<Expr, Value>> neg;
  for (const auto& [a, k] : c.form.terms) {
    if (k > 0) {
      pos.emplace_back(a, k);
    } else {
      neg.emplace_back(a, -k);
    }
  }
  const Value k = c.form.constant;
  if (c.rel == LinearConstraint::Rel::kEq) {
    return Pred::cmp(CmpOp::kEq, sum(pos, k > 0 ? k : 0), sum(neg, k < 0 ? -k : 0));
  }
  if (k >= 1) return Pred::cmp(CmpOp::kLt, sum(pos, k - 1), sum(neg, 0));
  return Pred::cmp(CmpOp::kLe, sum(pos, 0), sum(neg, -k));
}

}  // namespace hmc
