#pragma once

// Overloads that let one formula run on plain doubles (values) or on
// PointJet<double> (forward-mode Taylor jets).

#include <cmath>
#include <vector>

#include "whitney/expr.hpp"
#include "whitney/jet.hpp"

namespace whitney::ops {

using Jet = PointJet<double>;

inline double val(double v) { return v; }
inline double val(const Jet& j) { return j.value(); }

inline double constant(const double&, double c) { return c; }
inline Jet constant(const Jet& like, double c) { return Jet::constant(like.dim(), like.order(), like.base(), c); }

inline double scale(double a, double s) { return a * s; }
inline Jet scale(const Jet& a, double s) { return jet_scale(a, s); }

inline double add_const(double a, double c) { return a + c; }
inline Jet add_const(Jet a, double c) {
  a.at(0) += c;
  return a;
}

inline double ipow(double a, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= a;
  return out;
}
inline Jet ipow(const Jet& a, int k) {
  Jet out = constant(a, 1.0);
  Jet base = a;
  for (int e = k; e; e >>= 1) {
    if (e & 1) out = jet_mul(out, base);
    if (e > 1) base = jet_mul(base, base);
  }
  return out;
}

/// a^e for a > 0 and real e.
inline double real_pow(double a, double e) { return std::pow(a, e); }
inline Jet real_pow(const Jet& a, double e) {
  const double c = a.value();
  std::vector<double> d(static_cast<std::size_t>(a.order() + 1));
  double coef = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k) coef *= (e - (k - 1));
    d[static_cast<std::size_t>(k)] = coef * std::pow(c, e - k);
  }
  return apply_univariate(a, d);
}

/// t^k where t > 0, zero otherwise (C^{k-1} across t = 0).
template <class S>
S positive_pow(const S& t, int k) {
  return val(t) > 0 ? ipow(t, k) : constant(t, 0.0);
}

/// Polynomial sum c_i s^i.
inline double poly(const std::vector<double>& c, double s) {
  double out = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) out = out * s + *it;
  return out;
}
inline Jet poly(const std::vector<double>& c, const Jet& s) {
  std::vector<double> d;
  std::vector<double> cur(c);
  for (int k = 0; k <= s.order(); ++k) {
    d.push_back(poly(cur, s.value()));
    std::vector<double> next;
    for (std::size_t i = 1; i < cur.size(); ++i) next.push_back(cur[i] * static_cast<double>(i));
    cur = std::move(next);
  }
  return apply_univariate(s, d);
}

inline double call(const ExprFn& f, const std::vector<double>& args) { return evaluate(f, args); }
inline Jet call(const ExprFn& f, const std::vector<Jet>& args) { return evaluate_jet(f, args); }

/// Coordinates of x as scalars: plain values, or coordinate jets of the given order.
inline std::vector<double> inputs(std::span<const double> x, const double*) { return {x.begin(), x.end()}; }
inline std::vector<Jet> inputs(std::span<const double> x, int order) {
  return coordinate_jets(std::vector<double>(x.begin(), x.end()), order);
}

}  // namespace whitney::ops
