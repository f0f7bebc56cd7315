#pragma once

// Brute-force multivariate polynomials over exact rationals. Kept free of the
// library's jet and index machinery so it can serve as an independent oracle.

#include <map>
#include <vector>

#include "whitney/expr.hpp"
#include "whitney/random.hpp"
#include "whitney/rational.hpp"

namespace oracle {

using whitney::Rational;
using Exps = std::vector<int>;
using Poly = std::map<Exps, Rational>;

inline int degree(const Exps& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

inline long factorial(const Exps& e) {
  long f = 1;
  for (int v : e)
    for (int k = 2; k <= v; ++k) f *= k;
  return f;
}

inline void prune(Poly& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (sgn(it->second) == 0) {
      it = p.erase(it);
    } else {
      ++it;
    }
  }
}

inline Poly constant(int n, const Rational& c) {
  Poly p;
  if (sgn(c) != 0) p[Exps(static_cast<std::size_t>(n), 0)] = c;
  return p;
}

inline Poly variable(int n, int i) {
  Exps e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return {{e, Rational(1)}};
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [e, c] : b) out[e] += c;
  prune(out);
  return out;
}

inline Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Exps e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  }
  prune(out);
  return out;
}

inline Poly power(const Poly& a, int k, int n) {
  Poly out = constant(n, Rational(1));
  for (int i = 0; i < k; ++i) out = mul(out, a);
  return out;
}

inline Poly truncate(const Poly& a, int p) {
  Poly out;
  for (const auto& [e, c] : a)
    if (degree(e) <= p) out[e] = c;
  return out;
}

/// H(G_1, ..., G_m), fully expanded; all G share n variables.
inline Poly compose(const Poly& h, const std::vector<Poly>& gs, int n) {
  Poly out;
  for (const auto& [e, c] : h) {
    Poly term = constant(n, c);
    for (std::size_t i = 0; i < e.size(); ++i) term = mul(term, power(gs[i], e[i], n));
    out = add(out, term);
  }
  return out;
}

/// pi_p of H(G_1, ..., G_m), truncating after every product.
inline Poly compose_truncated(const Poly& h, const std::vector<Poly>& gs, int n, int p) {
  Poly out;
  for (const auto& [e, c] : h) {
    Poly term = constant(n, c);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) term = truncate(mul(term, gs[i]), p);
    out = add(out, term);
  }
  return out;
}

/// P(x0 + X) as a polynomial in the offset X.
inline Poly shift(const Poly& p, const std::vector<Rational>& x0) {
  const int n = static_cast<int>(x0.size());
  std::vector<Poly> gs;
  for (int i = 0; i < n; ++i) gs.push_back(add(constant(n, x0[static_cast<std::size_t>(i)]), variable(n, i)));
  return compose(p, gs, n);
}

/// Coefficient of X^e.
inline Rational coeff(const Poly& p, const Exps& e) {
  const auto it = p.find(e);
  return it == p.end() ? Rational(0) : it->second;
}

/// D^e P(x0) = e! [X^e] P(x0 + X).
inline Rational derivative_at(const Poly& p, const std::vector<Rational>& x0, const Exps& e) {
  return coeff(shift(p, x0), e) * factorial(e);
}

inline Rational random_rational(whitney::Rng& rng, long span = 9, long max_den = 7) {
  const long num = static_cast<long>(rng.below(static_cast<std::size_t>(2 * span + 1))) - span;
  const long den = 1 + static_cast<long>(rng.below(static_cast<std::size_t>(max_den)));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Every monomial of degree <= deg present with probability `density`.
inline Poly random_poly(int n, int deg, whitney::Rng& rng, double density = 0.6) {
  Poly out;
  Exps e(static_cast<std::size_t>(n), 0);
  const auto visit = [&](auto&& self, int i, int left) -> void {
    if (i == n) {
      if (rng.uniform() < density) out[e] = random_rational(rng);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(i)] = k;
      self(self, i + 1, left - k);
    }
    e[static_cast<std::size_t>(i)] = 0;
  };
  visit(visit, 0, deg);
  prune(out);
  return out;
}

inline whitney::ExprFn to_expr(const Poly& p, int n) {
  using whitney::ExprFn;
  ExprFn out = ExprFn::constant(n, Rational(0));
  for (const auto& [e, c] : p) {
    ExprFn term = ExprFn::constant(n, c);
    for (int i = 0; i < n; ++i)
      if (e[static_cast<std::size_t>(i)]) term = term * ExprFn::variable(n, i).pow(e[static_cast<std::size_t>(i)]);
    out = out + term;
  }
  return out;
}

}  // namespace oracle
