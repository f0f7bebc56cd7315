#pragma once

// Closed-form scalar functions as immutable expression DAGs, with exact
// symbolic derivatives, double / exact-rational / jet evaluation.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whitney/jet.hpp"
#include "whitney/multi_index.hpp"
#include "whitney/rational.hpp"

namespace whitney {

struct EvalOptions {
  /// Points within this distance of a singular locus or guard boundary are rejected.
  double tau_sing = 1e-9;
};

enum class ExprOp { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kSqrt, kAbs, kMin, kMax, kPiecewise };

enum class GuardSign { kPositive, kNegative };

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct GuardCondition {
  ExprNodePtr expr;
  GuardSign sign;
};

struct PiecewiseBranch {
  std::vector<GuardCondition> guard;  // conjunction
  ExprNodePtr value;
};

struct ExprNode {
  ExprOp op = ExprOp::kConst;
  Rational constant;
  double constant_d = 0.0;
  int var = -1;
  int exponent = 0;
  std::vector<ExprNodePtr> args;
  std::vector<PiecewiseBranch> branches;
};

struct ExprBranch;

class ExprFn {
 public:
  ExprFn(int arity, ExprNodePtr root);

  static ExprFn constant(int arity, const Rational& value);
  static ExprFn constant(int arity, double value) { return constant(arity, rational_from_double(value)); }
  static ExprFn variable(int arity, int index);

  static ExprFn piecewise(int arity, const std::vector<ExprBranch>& branches);

  int arity() const { return arity_; }
  const ExprNodePtr& root() const { return root_; }

  std::optional<Rational> constant_value() const;
  bool is_constant() const { return root_->op == ExprOp::kConst; }

  /// True when no sqrt node appears, so evaluate_exact can succeed.
  bool exact_evaluable() const;

  /// True when the DAG shares subexpressions (evaluation memoizes then).
  bool shares_nodes() const { return shares_nodes_; }

  ExprFn pow(int exponent) const;

  friend ExprFn operator+(const ExprFn& a, const ExprFn& b);
  friend ExprFn operator-(const ExprFn& a, const ExprFn& b);
  friend ExprFn operator*(const ExprFn& a, const ExprFn& b);
  friend ExprFn operator/(const ExprFn& a, const ExprFn& b);
  friend ExprFn operator-(const ExprFn& a);
  ExprFn& operator+=(const ExprFn& b) { return *this = *this + b; }
  ExprFn& operator-=(const ExprFn& b) { return *this = *this - b; }

  std::string to_string() const;
  /// FNV-1a hash of the canonical printed form.
  std::uint64_t hash() const;

 private:
  int arity_;
  ExprNodePtr root_;
  bool shares_nodes_ = false;
};

/// One arm of a piecewise function: a conjunction of sign conditions and a value.
struct ExprBranch {
  std::vector<std::pair<ExprFn, GuardSign>> guard;
  ExprFn value;
};

ExprFn sqrt(const ExprFn& a);
ExprFn abs(const ExprFn& a);
ExprFn min(const ExprFn& a, const ExprFn& b);
ExprFn max(const ExprFn& a, const ExprFn& b);

double evaluate(const ExprFn& f, std::span<const double> x, const EvalOptions& opts = {});
inline double evaluate(const ExprFn& f, const std::vector<double>& x, const EvalOptions& opts = {}) {
  return evaluate(f, std::span<const double>(x), opts);
}

/// Exact evaluation; sqrt raises NotExact, ties on min/max/abs/guards raise SingularPoint.
Rational evaluate_exact(const ExprFn& f, std::span<const Rational> x);
inline Rational evaluate_exact(const ExprFn& f, const std::vector<Rational>& x) {
  return evaluate_exact(f, std::span<const Rational>(x));
}

/// Forward-mode Taylor jet of f at x, up to `order`.
PointJet<double> evaluate_jet(const ExprFn& f, std::span<const double> x, int order, const EvalOptions& opts = {});

/// f(g_1, ..., g_arity) where the arguments are given as jets (composition of jets).
PointJet<double> evaluate_jet(const ExprFn& f, const std::vector<PointJet<double>>& inputs,
                              const EvalOptions& opts = {});

ExprFn differentiate(const ExprFn& f, int var);
ExprFn differentiate(const ExprFn& f, const MultiIndex& alpha);

/// f(g_1, ..., g_arity); all g share one arity, which becomes the result arity.
ExprFn substitute(const ExprFn& f, const std::vector<ExprFn>& inputs);

/// Symbolic derivatives D^alpha f for all |alpha| <= order, in graded-lex order,
/// built incrementally (each from a lower-order parent).
std::vector<ExprFn> all_derivatives(const ExprFn& f, int order);

template <>
struct ScalarTraits<ExprFn> {
  static ExprFn from_int(std::int64_t v, const ExprFn& like) {
    return ExprFn::constant(like.arity(), Rational(static_cast<long>(v)));
  }
  static ExprFn from_ratio(std::int64_t num, std::int64_t den, const ExprFn& like) {
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return ExprFn::constant(like.arity(), r);
  }
  static bool same_base(const ExprFn& a, const ExprFn& b) {
    return a.root() == b.root() || a.to_string() == b.to_string();
  }
  static bool is_zero(const ExprFn& a) {
    const auto c = a.constant_value();
    return c && sgn(*c) == 0;
  }
};

}  // namespace whitney
