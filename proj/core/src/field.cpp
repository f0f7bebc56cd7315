#include "whitney/field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "whitney/error.hpp"
#include "whitney/random.hpp"

namespace whitney {

const ExprFn& FieldSpec::coeff(const MultiIndex& alpha) const {
  return coeffs[index_set(n, p)->index_of(alpha)];
}

PointJet<double> FieldSpec::jet_at(const Cell& cell, std::span<const double> u) const {
  std::vector<double> base;
  std::vector<double> values;
  values.reserve(coeffs.size());
  if (cell.is_point()) {
    base = cell.coords();
    const double zero[1] = {0.0};
    for (const auto& c : coeffs) values.push_back(evaluate(c, std::span<const double>(zero, 1)));
  } else {
    base = cell.embed(u);
    for (const auto& c : coeffs) values.push_back(evaluate(c, u));
  }
  return PointJet<double>(index_set(n, p), std::move(base), std::move(values));
}

PointJet<Rational> FieldSpec::jet_exact(const Cell& cell, std::span<const Rational> u) const {
  std::vector<Rational> base;
  std::vector<Rational> values;
  std::vector<Rational> args(u.begin(), u.end());
  if (cell.is_point()) {
    for (double c : cell.coords()) base.push_back(rational_from_double(c));
    args.assign(1, Rational(0));
  } else {
    for (const auto& e : cell.embed_exprs()) base.push_back(evaluate_exact(e, args));
  }
  for (const auto& c : coeffs) values.push_back(evaluate_exact(c, args));
  return PointJet<Rational>(index_set(n, p), std::move(base), std::move(values));
}

PointJet<double> taylor_field(const ExprFn& f, int p, std::span<const double> u) {
  return evaluate_jet(f, u, p);
}

PointJet<Rational> taylor_field_exact(const ExprFn& f, int p, std::span<const Rational> u) {
  if (static_cast<int>(u.size()) != f.arity()) fail(ErrorCode::kArityMismatch, "point length != arity");
  const auto derivs = all_derivatives(f, p);
  std::vector<Rational> values;
  values.reserve(derivs.size());
  for (const auto& d : derivs) values.push_back(evaluate_exact(d, u));
  return PointJet<Rational>(index_set(f.arity(), p), std::vector<Rational>(u.begin(), u.end()), std::move(values));
}

FieldSpec taylor_field_spec(const ExprFn& g, const Cell& cell, int p, std::string stratum) {
  if (g.arity() != cell.ambient_dim()) fail(ErrorCode::kArityMismatch, "function arity != ambient dimension");
  FieldSpec out;
  out.stratum = std::move(stratum);
  out.n = cell.ambient_dim();
  out.p = p;
  const auto embed = cell.embed_exprs();
  for (const auto& d : all_derivatives(g, p)) out.coeffs.push_back(substitute(d, embed));
  return out;
}

FieldSpec zero_field(const Cell& cell, int p, std::string stratum) {
  FieldSpec out;
  out.stratum = std::move(stratum);
  out.n = cell.ambient_dim();
  out.p = p;
  const int arity = std::max(cell.intrinsic_dim(), 1);
  out.coeffs.assign(index_set(out.n, p)->size(), ExprFn::constant(arity, Rational(0)));
  return out;
}

GlaeserReport check_glaeser(const FieldSpec& field, const Cell& cell, std::size_t samples, double tol,
                            std::uint64_t seed) {
  GlaeserReport rep;
  if (cell.is_point() || field.p == 0) return rep;
  const int n = field.n;
  const int m = cell.intrinsic_dim();
  const auto idx = index_set(n, field.p);
  auto local = [&](const MultiIndex& gamma) -> const ExprFn& { return field.coeff(cell.to_ambient_index(gamma)); };

  struct Relation {
    MultiIndex gamma;
    int i;
    ExprFn lhs;
  };
  std::vector<Relation> relations;
  for (std::size_t k = 0; k < idx->size(); ++k) {
    const MultiIndex& gamma = (*idx)[k];
    if (gamma.degree() >= field.p) break;
    for (int i = 0; i < m; ++i) relations.push_back({gamma, i, differentiate(local(gamma), i)});
  }
  std::vector<std::vector<ExprFn>> dphi;
  for (const auto& f : cell.map()) {
    std::vector<ExprFn> row;
    for (int i = 0; i < m; ++i) row.push_back(differentiate(f, i));
    dphi.push_back(std::move(row));
  }

  Rng rng(seed);
  const auto points = sample_open_cell(*cell.base(), samples, rng, std::min(default_bbox(), 5.0));
  for (const auto& u : points) {
    try {
      std::vector<double> res;
      for (const auto& rel : relations) {
        const double lhs = evaluate(rel.lhs, u);
        double rhs = evaluate(local(rel.gamma + MultiIndex::unit(n, rel.i)), u);
        for (std::size_t j = 0; j < dphi.size(); ++j) {
          const int w = m + static_cast<int>(j);
          rhs += evaluate(dphi[j][static_cast<std::size_t>(rel.i)], u) * evaluate(local(rel.gamma + MultiIndex::unit(n, w)), u);
        }
        const double r = std::abs(lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
        res.push_back(r);
      }
      ++rep.samples;
      for (std::size_t k = 0; k < res.size(); ++k) {
        ++rep.relations;
        if (res[k] > rep.max_residual) {
          rep.max_residual = res[k];
          rep.witness = u;
          std::ostringstream os;
          os << "d/du" << relations[k].i << " F^" << cell.to_ambient_index(relations[k].gamma).to_string();
          rep.witness_relation = os.str();
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularPoint && e.code() != ErrorCode::kPiecewiseGap) throw;
    }
  }
  rep.consistent = rep.max_residual <= tol;
  return rep;
}

ExprFn glaeser_lift(const FieldSpec& field, const Cell& cell, const MultiIndex& beta, double tol) {
  if (cell.is_point()) fail(ErrorCode::kNotAGraphCell, "stratum " + field.stratum + " is a point");
  const int m = cell.intrinsic_dim();
  if (beta.size() != field.n - m) fail(ErrorCode::kShapeMismatch, "beta must range over the normal coordinates");
  if (beta.degree() > field.p) fail(ErrorCode::kShapeMismatch, "|beta| exceeds the field order");
  const auto rep = check_glaeser(field, cell, 50, tol);
  if (!rep.consistent) {
    std::ostringstream os;
    os << "field on " << field.stratum << " violates the slice identification (" << rep.witness_relation
       << ", residual " << rep.max_residual << ")";
    fail(ErrorCode::kConsistencyViolation, os.str());
  }
  return field.coeff(cell.to_ambient_index(MultiIndex::zero(m).concat(beta)));
}

FieldFamily restrict_field(const FieldFamily& family, const std::vector<std::string>& strata) {
  FieldFamily out;
  for (const auto& id : strata) {
    auto it = std::find_if(family.begin(), family.end(), [&](const FieldSpec& f) { return f.stratum == id; });
    if (it == family.end()) fail(ErrorCode::kUnknownStratum, "no field on stratum '" + id + "'");
    out.push_back(*it);
  }
  return out;
}

FieldSpec shift_field(const FieldSpec& field, const Cell& cell) {
  if (cell.is_point()) fail(ErrorCode::kNotAGraphCell, "cannot shift a point stratum");
  const int n = field.n;
  const int m = cell.intrinsic_dim();
  const int p = field.p;
  const auto idx = index_set(n, p);
  const int arity = m;

  // F in local coordinates, anchored at (u, phi(u)).
  std::vector<ExprFn> base;
  for (int i = 0; i < m; ++i) base.push_back(ExprFn::variable(arity, i));
  for (const auto& f : cell.map()) base.push_back(f);
  std::vector<ExprFn> fc;
  for (std::size_t k = 0; k < idx->size(); ++k) fc.push_back(field.coeff(cell.to_ambient_index((*idx)[k])));
  PointJet<ExprFn> outer(idx, base, fc);

  // T Phi at (u, 0), one jet per component.
  std::vector<ExprFn> at_zero;
  for (int i = 0; i < m; ++i) at_zero.push_back(ExprFn::variable(arity, i));
  for (int j = m; j < n; ++j) at_zero.push_back(ExprFn::constant(arity, Rational(0)));
  std::vector<PointJet<ExprFn>> phi_jets;
  for (int c = 0; c < n; ++c) {
    auto jet = PointJet<ExprFn>::zero(n, p, at_zero);
    if (c < m) {
      jet.at(0) = ExprFn::variable(arity, c);
      if (p >= 1) jet[MultiIndex::unit(n, c)] = ExprFn::constant(arity, Rational(1));
    } else {
      const ExprFn& f = cell.map()[static_cast<std::size_t>(c - m)];
      jet.at(0) = f;
      for (std::size_t k = 1; k < idx->size(); ++k) {
        const MultiIndex& a = (*idx)[k];
        bool pure_u = true;
        for (int i = m; i < n; ++i) pure_u = pure_u && a[i] == 0;
        if (!pure_u) continue;
        std::vector<int> ua(a.exponents().begin(), a.exponents().begin() + m);
        jet.at(k) = differentiate(f, MultiIndex(ua));
      }
      if (p >= 1) jet[MultiIndex::unit(n, c)] = ExprFn::constant(arity, Rational(1));
    }
    phi_jets.push_back(std::move(jet));
  }

  const auto shifted = jet_compose(outer, phi_jets);
  FieldSpec out;
  out.stratum = field.stratum;
  out.n = n;
  out.p = p;
  out.coeffs = shifted.coeffs();
  return out;
}

}  // namespace whitney
