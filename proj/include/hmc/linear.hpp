#pragma once

// Linear normal forms over variables and opaque function applications.

#include <map>
#include <optional>

#include "hmc/logic.hpp"

namespace hmc {

struct LinearForm {
  // Atom (a Var or an App) -> nonzero coefficient.
  std::map<Expr, Value> terms;
  Value constant = 0;

  static std::optional<LinearForm> of(const Expr& e);
  static LinearForm atom(Expr e);
  static LinearForm number(Value c);

  Value coeff(const Expr& atom) const;
  bool is_constant() const { return terms.empty(); }
  LinearForm scaled(Value k) const;
  LinearForm& operator+=(const LinearForm& o);
  LinearForm operator+(const LinearForm& o) const;
  LinearForm operator-(const LinearForm& o) const;

  Expr to_expr() const;

  friend auto operator<=>(const LinearForm&, const LinearForm&) = default;
  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

// `form <= 0` or `form = 0`.
struct LinearConstraint {
  enum class Rel { kLe, kEq };
  LinearForm form;
  Rel rel = Rel::kLe;

  friend auto operator<=>(const LinearConstraint&, const LinearConstraint&) = default;
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// Comparisons other than `!=` over linear sides; nullopt otherwise.
std::optional<LinearConstraint> linearize(const Pred& p);

// Divides out the gcd of the coefficients (tightening the constant of `<=`)
// and makes the leading coefficient of an equality positive.
LinearConstraint canonical(const LinearConstraint& c);

// Positive terms on the left, negative on the right; `L + c <= 0` with c >= 1
// is written strictly, e.g. `t0 < len(t2)`.
Pred to_pred(const LinearConstraint& c);

}  // namespace hmc
