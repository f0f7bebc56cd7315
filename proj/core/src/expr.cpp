#include "whitney/expr.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "whitney/error.hpp"

namespace whitney {
namespace {

// ---------------------------------------------------------------------------
// Node construction with light constant folding.
// ---------------------------------------------------------------------------

ExprNodePtr make_const(const Rational& c) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kConst;
  n->constant = c;
  n->constant_d = c.get_d();
  return n;
}

ExprNodePtr make_var(int i) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kVar;
  n->var = i;
  return n;
}

bool is_const(const ExprNodePtr& n) { return n->op == ExprOp::kConst; }
bool is_const_value(const ExprNodePtr& n, long v) { return is_const(n) && n->constant == v; }

ExprNodePtr make_node(ExprOp op, std::vector<ExprNodePtr> args, int exponent = 0) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = std::move(args);
  n->exponent = exponent;
  return n;
}

ExprNodePtr make_mul(const ExprNodePtr& a, const ExprNodePtr& b);

ExprNodePtr make_add(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->constant + b->constant);
  if (is_const_value(a, 0)) return b;
  if (is_const_value(b, 0)) return a;
  return make_node(ExprOp::kAdd, {a, b});
}

ExprNodePtr make_sub(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->constant - b->constant);
  if (is_const_value(b, 0)) return a;
  if (a == b) return make_const(Rational(0));
  if (is_const_value(a, 0)) return make_mul(make_const(Rational(-1)), b);
  return make_node(ExprOp::kSub, {a, b});
}

ExprNodePtr make_mul(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b)) return make_const(a->constant * b->constant);
  if (is_const_value(a, 0) || is_const_value(b, 0)) return make_const(Rational(0));
  if (is_const_value(a, 1)) return b;
  if (is_const_value(b, 1)) return a;
  if (is_const(b)) return make_mul(b, a);
  if (is_const(a) && b->op == ExprOp::kMul && is_const(b->args[0])) {
    return make_mul(make_const(a->constant * b->args[0]->constant), b->args[1]);
  }
  return make_node(ExprOp::kMul, {a, b});
}

ExprNodePtr make_div(const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const_value(b, 1)) return a;
  if (is_const(a) && is_const(b) && b->constant != 0) return make_const(a->constant / b->constant);
  if (is_const_value(a, 0)) return make_const(Rational(0));
  if (is_const(b) && b->constant != 0) return make_mul(make_const(1 / b->constant), a);
  return make_node(ExprOp::kDiv, {a, b});
}

Rational rational_pow(const Rational& base, int exponent) {
  Rational out(1);
  Rational factor = exponent >= 0 ? base : Rational(1 / base);
  for (int k = 0; k < std::abs(exponent); ++k) out *= factor;
  return out;
}

ExprNodePtr make_pow(const ExprNodePtr& a, int k) {
  if (k == 0) return make_const(Rational(1));
  if (k == 1) return a;
  if (is_const(a) && (k > 0 || a->constant != 0)) return make_const(rational_pow(a->constant, k));
  if (a->op == ExprOp::kPow) return make_pow(a->args[0], a->exponent * k);
  return make_node(ExprOp::kPow, {a}, k);
}

ExprNodePtr make_sqrt(const ExprNodePtr& a) {
  if (is_const_value(a, 1)) return a;
  return make_node(ExprOp::kSqrt, {a});
}

ExprNodePtr make_abs(const ExprNodePtr& a) {
  if (is_const(a) && a->constant != 0) return make_const(abs(a->constant));
  return make_node(ExprOp::kAbs, {a});
}

ExprNodePtr make_minmax(ExprOp op, const ExprNodePtr& a, const ExprNodePtr& b) {
  if (is_const(a) && is_const(b) && a->constant != b->constant) {
    const bool a_less = a->constant < b->constant;
    return (op == ExprOp::kMin) == a_less ? a : b;
  }
  return make_node(op, {a, b});
}

ExprNodePtr make_piecewise(std::vector<PiecewiseBranch> branches) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprOp::kPiecewise;
  n->branches = std::move(branches);
  return n;
}

// ---------------------------------------------------------------------------
// DAG traversal helpers.
// ---------------------------------------------------------------------------

template <class Visit>
void for_each_child(const ExprNode& n, Visit&& visit) {
  for (const auto& a : n.args) visit(a);
  for (const auto& br : n.branches) {
    for (const auto& g : br.guard) visit(g.expr);
    visit(br.value);
  }
}

void check_vars(const ExprNodePtr& root, int arity) {
  std::unordered_set<const ExprNode*> seen;
  std::function<void(const ExprNodePtr&)> walk = [&](const ExprNodePtr& n) {
    if (!seen.insert(n.get()).second) return;
    if (n->op == ExprOp::kVar && (n->var < 0 || n->var >= arity)) {
      fail(ErrorCode::kArityMismatch,
           "variable index " + std::to_string(n->var) + " out of range for arity " + std::to_string(arity));
    }
    for_each_child(*n, walk);
  };
  walk(root);
}

bool detect_sharing(const ExprNodePtr& root) {
  std::unordered_set<const ExprNode*> seen;
  bool shared = false;
  std::function<void(const ExprNodePtr&)> walk = [&](const ExprNodePtr& n) {
    if (shared) return;
    if (n->op == ExprOp::kConst || n->op == ExprOp::kVar) return;
    if (!seen.insert(n.get()).second) {
      shared = true;
      return;
    }
    for_each_child(*n, walk);
  };
  walk(root);
  return shared;
}

const char* op_name(ExprOp op) {
  switch (op) {
    case ExprOp::kConst: return "const";
    case ExprOp::kVar: return "var";
    case ExprOp::kAdd: return "add";
    case ExprOp::kSub: return "sub";
    case ExprOp::kMul: return "mul";
    case ExprOp::kDiv: return "div";
    case ExprOp::kPow: return "pow";
    case ExprOp::kSqrt: return "sqrt";
    case ExprOp::kAbs: return "abs";
    case ExprOp::kMin: return "min";
    case ExprOp::kMax: return "max";
    case ExprOp::kPiecewise: return "piecewise";
  }
  return "?";
}

void print(const ExprNode& n, std::ostream& os) {
  switch (n.op) {
    case ExprOp::kConst: os << n.constant.get_str(); return;
    case ExprOp::kVar: os << "x" << n.var; return;
    case ExprOp::kPow:
      os << "(pow ";
      print(*n.args[0], os);
      os << " " << n.exponent << ")";
      return;
    case ExprOp::kPiecewise:
      os << "(piecewise";
      for (const auto& br : n.branches) {
        os << " [";
        for (const auto& g : br.guard) {
          os << (g.sign == GuardSign::kPositive ? "(gt " : "(lt ");
          print(*g.expr, os);
          os << ")";
        }
        os << " -> ";
        print(*br.value, os);
        os << "]";
      }
      os << ")";
      return;
    default:
      os << "(" << op_name(n.op);
      for (const auto& a : n.args) {
        os << " ";
        print(*a, os);
      }
      os << ")";
      return;
  }
}

// ---------------------------------------------------------------------------
// Generic evaluation over a scalar domain.
// ---------------------------------------------------------------------------

[[noreturn]] void singular(const char* what) {
  fail(ErrorCode::kSingularPoint, std::string("point lies on the singular locus of ") + what);
}

struct DoubleDomain {
  using S = double;
  double tau;

  S constant(const ExprNode& n) const { return n.constant_d; }
  int sign(const S& v) const { return v > tau ? 1 : (v < -tau ? -1 : 0); }
  S add(const S& a, const S& b) const { return a + b; }
  S sub(const S& a, const S& b) const { return a - b; }
  S mul(const S& a, const S& b) const { return a * b; }
  S div(const S& a, const S& b) const {
    if (sign(b) == 0) singular("a quotient");
    return a / b;
  }
  S pow(const S& a, int k) const {
    if (k < 0 && sign(a) == 0) singular("a negative power");
    S out = 1.0;
    S f = k >= 0 ? a : 1.0 / a;
    for (int e = std::abs(k); e; e >>= 1) {
      if (e & 1) out *= f;
      f *= f;
    }
    return out;
  }
  S sqrt(const S& a) const {
    if (sign(a) <= 0) singular("sqrt");
    return std::sqrt(a);
  }
  S negate(const S& a) const { return -a; }
};

struct ExactDomain {
  using S = Rational;

  S constant(const ExprNode& n) const { return n.constant; }
  int sign(const S& v) const { return sgn(v); }
  S add(const S& a, const S& b) const { return a + b; }
  S sub(const S& a, const S& b) const { return a - b; }
  S mul(const S& a, const S& b) const { return a * b; }
  S div(const S& a, const S& b) const {
    if (sgn(b) == 0) singular("a quotient");
    return a / b;
  }
  S pow(const S& a, int k) const {
    if (k < 0 && sgn(a) == 0) singular("a negative power");
    return rational_pow(a, k);
  }
  S sqrt(const S&) const { fail(ErrorCode::kNotExact, "sqrt has no exact rational evaluation"); }
  S negate(const S& a) const { return -a; }
};

struct JetDomain {
  using S = PointJet<double>;
  double tau;
  const PointJet<double>* proto;

  S constant(const ExprNode& n) const {
    return PointJet<double>::constant(proto->dim(), proto->order(), proto->base(), n.constant_d);
  }
  int sign(const S& v) const { return v.value() > tau ? 1 : (v.value() < -tau ? -1 : 0); }
  S add(const S& a, const S& b) const { return jet_add(a, b); }
  S sub(const S& a, const S& b) const { return jet_sub(a, b); }
  S mul(const S& a, const S& b) const { return jet_mul(a, b); }
  S reciprocal(const S& b) const {
    if (sign(b) == 0) singular("a quotient");
    const double c = b.value();
    std::vector<double> d(static_cast<std::size_t>(b.order() + 1));
    double fact = 1.0;
    for (int k = 0; k <= b.order(); ++k) {
      if (k) fact *= k;
      d[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) * fact / std::pow(c, k + 1);
    }
    return apply_univariate(b, d);
  }
  S div(const S& a, const S& b) const { return jet_mul(a, reciprocal(b)); }
  S pow(const S& a, int k) const {
    S base = k >= 0 ? a : reciprocal(a);
    S out = PointJet<double>::constant(a.dim(), a.order(), a.base(), 1.0);
    for (int e = std::abs(k); e; e >>= 1) {
      if (e & 1) out = jet_mul(out, base);
      if (e > 1) base = jet_mul(base, base);
    }
    return out;
  }
  S sqrt(const S& a) const {
    if (sign(a) <= 0) singular("sqrt");
    const double c = a.value();
    std::vector<double> d(static_cast<std::size_t>(a.order() + 1));
    double coef = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
      if (k) coef *= (0.5 - (k - 1));
      d[static_cast<std::size_t>(k)] = coef * std::pow(c, 0.5 - k);
    }
    return apply_univariate(a, d);
  }
  S negate(const S& a) const { return jet_scale(a, -1.0); }
};

template <class Domain>
class Evaluator {
 public:
  using S = typename Domain::S;

  Evaluator(const Domain& dom, std::span<const S> inputs, bool memoize)
      : dom_(dom), inputs_(inputs), memoize_(memoize) {}

  S eval(const ExprNodePtr& node) {
    if (memoize_ && node->op != ExprOp::kConst && node->op != ExprOp::kVar) {
      auto it = memo_.find(node.get());
      if (it != memo_.end()) return it->second;
      S value = compute(*node);
      memo_.emplace(node.get(), value);
      return value;
    }
    return compute(*node);
  }

 private:
  S compute(const ExprNode& n) {
    switch (n.op) {
      case ExprOp::kConst: return dom_.constant(n);
      case ExprOp::kVar: return inputs_[static_cast<std::size_t>(n.var)];
      case ExprOp::kAdd: return dom_.add(eval(n.args[0]), eval(n.args[1]));
      case ExprOp::kSub: return dom_.sub(eval(n.args[0]), eval(n.args[1]));
      case ExprOp::kMul: return dom_.mul(eval(n.args[0]), eval(n.args[1]));
      case ExprOp::kDiv: return dom_.div(eval(n.args[0]), eval(n.args[1]));
      case ExprOp::kPow: return dom_.pow(eval(n.args[0]), n.exponent);
      case ExprOp::kSqrt: return dom_.sqrt(eval(n.args[0]));
      case ExprOp::kAbs: {
        S a = eval(n.args[0]);
        const int s = dom_.sign(a);
        if (s == 0) singular("abs");
        return s > 0 ? a : dom_.negate(a);
      }
      case ExprOp::kMin:
      case ExprOp::kMax: {
        S a = eval(n.args[0]);
        S b = eval(n.args[1]);
        const int s = dom_.sign(dom_.sub(a, b));
        if (s == 0) singular(n.op == ExprOp::kMin ? "min (tie)" : "max (tie)");
        const bool a_smaller = s < 0;
        return (n.op == ExprOp::kMin) == a_smaller ? a : b;
      }
      case ExprOp::kPiecewise: {
        const ExprNodePtr* chosen = nullptr;
        int active = 0;
        for (const auto& br : n.branches) {
          bool inactive = false;
          bool on_boundary = false;
          for (const auto& g : br.guard) {
            const int s = dom_.sign(eval(g.expr));
            const int want = g.sign == GuardSign::kPositive ? 1 : -1;
            if (s == 0) {
              on_boundary = true;
            } else if (s != want) {
              inactive = true;
              break;
            }
          }
          if (inactive) continue;
          if (on_boundary) singular("a piecewise guard boundary");
          ++active;
          chosen = &br.value;
        }
        if (active != 1) {
          fail(ErrorCode::kPiecewiseGap, active == 0 ? "no piecewise branch is active at this point"
                                                     : "several piecewise branches are active at this point");
        }
        return eval(*chosen);
      }
    }
    fail(ErrorCode::kUnsupportedNode, "unknown expression node");
  }

  const Domain& dom_;
  std::span<const S> inputs_;
  bool memoize_;
  std::unordered_map<const ExprNode*, S> memo_;
};

void require_arity(const ExprFn& f, std::size_t got) {
  if (static_cast<int>(got) != f.arity()) {
    fail(ErrorCode::kArityMismatch,
         "expected " + std::to_string(f.arity()) + " arguments, got " + std::to_string(got));
  }
}

// ---------------------------------------------------------------------------
// Symbolic differentiation.
// ---------------------------------------------------------------------------

class Differentiator {
 public:
  explicit Differentiator(int var) : var_(var) {}

  ExprNodePtr d(const ExprNodePtr& node) {
    auto it = memo_.find(node.get());
    if (it != memo_.end()) return it->second;
    ExprNodePtr out = compute(node);
    memo_.emplace(node.get(), out);
    return out;
  }

 private:
  ExprNodePtr compute(const ExprNodePtr& node) {
    const ExprNode& n = *node;
    switch (n.op) {
      case ExprOp::kConst: return make_const(Rational(0));
      case ExprOp::kVar: return make_const(Rational(n.var == var_ ? 1 : 0));
      case ExprOp::kAdd: return make_add(d(n.args[0]), d(n.args[1]));
      case ExprOp::kSub: return make_sub(d(n.args[0]), d(n.args[1]));
      case ExprOp::kMul:
        return make_add(make_mul(d(n.args[0]), n.args[1]), make_mul(n.args[0], d(n.args[1])));
      case ExprOp::kDiv: {
        const auto& a = n.args[0];
        const auto& b = n.args[1];
        return make_sub(make_div(d(a), b), make_div(make_mul(a, d(b)), make_pow(b, 2)));
      }
      case ExprOp::kPow: {
        const auto& a = n.args[0];
        return make_mul(make_mul(make_const(Rational(n.exponent)), make_pow(a, n.exponent - 1)), d(a));
      }
      case ExprOp::kSqrt:
        return make_div(d(n.args[0]), make_mul(make_const(Rational(2)), node));
      case ExprOp::kAbs: {
        const auto& a = n.args[0];
        const auto da = d(a);
        return make_piecewise({PiecewiseBranch{{GuardCondition{a, GuardSign::kPositive}}, da},
                               PiecewiseBranch{{GuardCondition{a, GuardSign::kNegative}},
                                               make_mul(make_const(Rational(-1)), da)}});
      }
      case ExprOp::kMin:
      case ExprOp::kMax: {
        const auto diff = make_sub(n.args[0], n.args[1]);
        const GuardSign first_wins = n.op == ExprOp::kMin ? GuardSign::kNegative : GuardSign::kPositive;
        const GuardSign second_wins = n.op == ExprOp::kMin ? GuardSign::kPositive : GuardSign::kNegative;
        return make_piecewise({PiecewiseBranch{{GuardCondition{diff, first_wins}}, d(n.args[0])},
                               PiecewiseBranch{{GuardCondition{diff, second_wins}}, d(n.args[1])}});
      }
      case ExprOp::kPiecewise: {
        std::vector<PiecewiseBranch> branches;
        branches.reserve(n.branches.size());
        for (const auto& br : n.branches) branches.push_back(PiecewiseBranch{br.guard, d(br.value)});
        return make_piecewise(std::move(branches));
      }
    }
    fail(ErrorCode::kUnsupportedNode, std::string("no derivative rule for ") + op_name(n.op));
  }

  int var_;
  std::unordered_map<const ExprNode*, ExprNodePtr> memo_;
};

class Substituter {
 public:
  explicit Substituter(const std::vector<ExprFn>& inputs) : inputs_(inputs) {}

  ExprNodePtr s(const ExprNodePtr& node) {
    auto it = memo_.find(node.get());
    if (it != memo_.end()) return it->second;
    ExprNodePtr out = compute(node);
    memo_.emplace(node.get(), out);
    return out;
  }

 private:
  ExprNodePtr compute(const ExprNodePtr& node) {
    const ExprNode& n = *node;
    switch (n.op) {
      case ExprOp::kConst: return node;
      case ExprOp::kVar: return inputs_[static_cast<std::size_t>(n.var)].root();
      case ExprOp::kAdd: return make_add(s(n.args[0]), s(n.args[1]));
      case ExprOp::kSub: return make_sub(s(n.args[0]), s(n.args[1]));
      case ExprOp::kMul: return make_mul(s(n.args[0]), s(n.args[1]));
      case ExprOp::kDiv: return make_div(s(n.args[0]), s(n.args[1]));
      case ExprOp::kPow: return make_pow(s(n.args[0]), n.exponent);
      case ExprOp::kSqrt: return make_sqrt(s(n.args[0]));
      case ExprOp::kAbs: return make_abs(s(n.args[0]));
      case ExprOp::kMin:
      case ExprOp::kMax: return make_minmax(n.op, s(n.args[0]), s(n.args[1]));
      case ExprOp::kPiecewise: {
        std::vector<PiecewiseBranch> branches;
        for (const auto& br : n.branches) {
          PiecewiseBranch nb;
          for (const auto& g : br.guard) nb.guard.push_back(GuardCondition{s(g.expr), g.sign});
          nb.value = s(br.value);
          branches.push_back(std::move(nb));
        }
        return make_piecewise(std::move(branches));
      }
    }
    fail(ErrorCode::kUnsupportedNode, "unknown expression node");
  }

  const std::vector<ExprFn>& inputs_;
  std::unordered_map<const ExprNode*, ExprNodePtr> memo_;
};

void require_same_arity(const ExprFn& a, const ExprFn& b) {
  if (a.arity() != b.arity()) fail(ErrorCode::kArityMismatch, "operands have different arity");
}

}  // namespace

// ---------------------------------------------------------------------------
// ExprFn
// ---------------------------------------------------------------------------

ExprFn::ExprFn(int arity, ExprNodePtr root) : arity_(arity), root_(std::move(root)) {
  if (arity_ < 1) fail(ErrorCode::kArityMismatch, "arity must be >= 1");
  if (!root_) fail(ErrorCode::kUnsupportedNode, "null expression");
  check_vars(root_, arity_);
  shares_nodes_ = detect_sharing(root_);
}

ExprFn ExprFn::constant(int arity, const Rational& value) { return ExprFn(arity, make_const(value)); }

ExprFn ExprFn::variable(int arity, int index) { return ExprFn(arity, make_var(index)); }

ExprFn ExprFn::piecewise(int arity, const std::vector<ExprBranch>& branches) {
  std::vector<PiecewiseBranch> out;
  for (const auto& br : branches) {
    PiecewiseBranch pb;
    for (const auto& [g, sign] : br.guard) {
      if (g.arity() != arity) fail(ErrorCode::kArityMismatch, "guard arity mismatch");
      pb.guard.push_back(GuardCondition{g.root(), sign});
    }
    if (br.value.arity() != arity) fail(ErrorCode::kArityMismatch, "branch arity mismatch");
    pb.value = br.value.root();
    out.push_back(std::move(pb));
  }
  return ExprFn(arity, make_piecewise(std::move(out)));
}

std::optional<Rational> ExprFn::constant_value() const {
  if (root_->op != ExprOp::kConst) return std::nullopt;
  return root_->constant;
}

bool ExprFn::exact_evaluable() const {
  std::unordered_set<const ExprNode*> seen;
  bool ok = true;
  std::function<void(const ExprNodePtr&)> walk = [&](const ExprNodePtr& n) {
    if (!ok || !seen.insert(n.get()).second) return;
    if (n->op == ExprOp::kSqrt) {
      ok = false;
      return;
    }
    for_each_child(*n, walk);
  };
  walk(root_);
  return ok;
}

ExprFn ExprFn::pow(int exponent) const { return ExprFn(arity_, make_pow(root_, exponent)); }

ExprFn operator+(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_add(a.root(), b.root()));
}
ExprFn operator-(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_sub(a.root(), b.root()));
}
ExprFn operator*(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_mul(a.root(), b.root()));
}
ExprFn operator/(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_div(a.root(), b.root()));
}
ExprFn operator-(const ExprFn& a) { return ExprFn(a.arity(), make_mul(make_const(Rational(-1)), a.root())); }

ExprFn sqrt(const ExprFn& a) { return ExprFn(a.arity(), make_sqrt(a.root())); }
ExprFn abs(const ExprFn& a) { return ExprFn(a.arity(), make_abs(a.root())); }
ExprFn min(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_minmax(ExprOp::kMin, a.root(), b.root()));
}
ExprFn max(const ExprFn& a, const ExprFn& b) {
  require_same_arity(a, b);
  return ExprFn(a.arity(), make_minmax(ExprOp::kMax, a.root(), b.root()));
}

std::string ExprFn::to_string() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

std::uint64_t ExprFn::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  const std::string s = std::to_string(arity_) + ":" + to_string();
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Evaluation entry points.
// ---------------------------------------------------------------------------

double evaluate(const ExprFn& f, std::span<const double> x, const EvalOptions& opts) {
  require_arity(f, x.size());
  DoubleDomain dom{opts.tau_sing};
  Evaluator<DoubleDomain> ev(dom, x, f.shares_nodes());
  return ev.eval(f.root());
}

Rational evaluate_exact(const ExprFn& f, std::span<const Rational> x) {
  require_arity(f, x.size());
  ExactDomain dom;
  Evaluator<ExactDomain> ev(dom, x, f.shares_nodes());
  return ev.eval(f.root());
}

PointJet<double> evaluate_jet(const ExprFn& f, std::span<const double> x, int order, const EvalOptions& opts) {
  require_arity(f, x.size());
  std::vector<double> point(x.begin(), x.end());
  return evaluate_jet(f, coordinate_jets(point, order), opts);
}

PointJet<double> evaluate_jet(const ExprFn& f, const std::vector<PointJet<double>>& inputs,
                              const EvalOptions& opts) {
  require_arity(f, inputs.size());
  JetDomain dom{opts.tau_sing, &inputs.front()};
  Evaluator<JetDomain> ev(dom, std::span<const PointJet<double>>(inputs), true);
  return ev.eval(f.root());
}

ExprFn differentiate(const ExprFn& f, int var) {
  if (var < 0 || var >= f.arity()) fail(ErrorCode::kArityMismatch, "differentiation variable out of range");
  Differentiator d(var);
  return ExprFn(f.arity(), d.d(f.root()));
}

ExprFn differentiate(const ExprFn& f, const MultiIndex& alpha) {
  if (alpha.size() != f.arity()) fail(ErrorCode::kArityMismatch, "multi-index length != arity");
  ExprFn out = f;
  for (int i = 0; i < alpha.size(); ++i) {
    for (int k = 0; k < alpha[i]; ++k) out = differentiate(out, i);
  }
  return out;
}

ExprFn substitute(const ExprFn& f, const std::vector<ExprFn>& inputs) {
  require_arity(f, inputs.size());
  if (inputs.empty()) fail(ErrorCode::kArityMismatch, "substitution needs arguments");
  for (const auto& g : inputs) require_same_arity(g, inputs.front());
  Substituter sub(inputs);
  return ExprFn(inputs.front().arity(), sub.s(f.root()));
}

std::vector<ExprFn> all_derivatives(const ExprFn& f, int order) {
  const auto idx = index_set(f.arity(), order);
  std::vector<ExprFn> out;
  out.reserve(idx->size());
  out.push_back(f);
  for (std::size_t k = 1; k < idx->size(); ++k) {
    const MultiIndex& alpha = (*idx)[k];
    int last = alpha.size() - 1;
    while (alpha[last] == 0) --last;
    const MultiIndex parent = alpha - MultiIndex::unit(alpha.size(), last);
    out.push_back(differentiate(out[idx->index_of(parent)], last));
  }
  return out;
}

}  // namespace whitney
