#pragma once

// Whitney fields over strata: coefficient functions u -> F^alpha(u) on a
// stratum's parameter domain, Taylor fields, the Glaeser identification on
// graph cells, restriction, and the shift by Phi(u, w) = (u, w + phi(u)).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "whitney/expr.hpp"
#include "whitney/geometry.hpp"
#include "whitney/jet.hpp"

namespace whitney {

struct FieldSpec {
  std::string stratum;
  int n = 1;
  int p = 0;
  /// F^alpha for alpha in index_set(n, p) (graded-lex, ambient coordinates); all
  /// share the arity of the stratum's parameter domain (1 for points).
  std::vector<ExprFn> coeffs;

  int arity() const { return coeffs.front().arity(); }
  const ExprFn& coeff(const MultiIndex& alpha) const;
  /// Jet at the embedded point of u.
  PointJet<double> jet_at(const Cell& cell, std::span<const double> u) const;
  /// Exact jet; the cell's embedding must be exactly evaluable.
  PointJet<Rational> jet_exact(const Cell& cell, std::span<const Rational> u) const;
};

using FieldFamily = std::vector<FieldSpec>;

/// T_u^p f: coefficients D^alpha f(u).
PointJet<double> taylor_field(const ExprFn& f, int p, std::span<const double> u);
PointJet<Rational> taylor_field_exact(const ExprFn& f, int p, std::span<const Rational> u);

/// Field Tg restricted to a stratum: F^alpha(u) = D^alpha g(x(u)).
FieldSpec taylor_field_spec(const ExprFn& g, const Cell& cell, int p, std::string stratum);

/// The identically zero field on a stratum.
FieldSpec zero_field(const Cell& cell, int p, std::string stratum);

struct GlaeserReport {
  std::size_t samples = 0;
  std::size_t relations = 0;
  double max_residual = 0.0;
  std::vector<double> witness;
  std::string witness_relation;
  bool consistent = true;
};

/// Samples the first-order chain-rule relations
///   d/du_i F^gamma(u) = F^{gamma + e_i}(u) + sum_j d_i phi_j(u) F^{gamma + e_{m+j}}(u)
/// (local coordinates, |gamma| < p), which reduce to D^alpha F^{(0,beta)} = F^{(alpha,beta)}
/// on flat slices. The residual is relative: |lhs - rhs| / (1 + |lhs| + |rhs|).
GlaeserReport check_glaeser(const FieldSpec& field, const Cell& cell, std::size_t samples = 50,
                            double tol = 1e-9, std::uint64_t seed = 0);

/// u -> F^{(0,beta)}(u) for beta over the n - m normal local coordinates, after
/// checking the field's consistency on samples.
ExprFn glaeser_lift(const FieldSpec& field, const Cell& cell, const MultiIndex& beta, double tol = 1e-9);

/// Fields of the listed strata, in the order given.
FieldFamily restrict_field(const FieldFamily& family, const std::vector<std::string>& strata);

/// G = F o T Phi with Phi(u, w) = (u, w + phi(u)), as coefficient functions of u in
/// local coordinates (perm applied, so G lives on D x {0}).
FieldSpec shift_field(const FieldSpec& field, const Cell& cell);

}  // namespace whitney
