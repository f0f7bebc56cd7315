#pragma once

// Truncated Taylor polynomials anchored at a point, stored in the
// derivative convention: coeff(alpha) = F^alpha, the polynomial being
// sum (1/alpha!) F^alpha X^alpha. Multiplication is the Leibniz rule
// truncated at order p, which is pi_p applied to the full product.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "whitney/error.hpp"
#include "whitney/multi_index.hpp"
#include "whitney/rational.hpp"

namespace whitney {

/// Coefficient-ring hooks. `like` supplies context (e.g. expression arity) for
/// scalar types that need it.
template <class T>
struct ScalarTraits {
  static T from_int(std::int64_t v, const T& /*like*/) { return T(static_cast<double>(v)); }
  static T from_ratio(std::int64_t num, std::int64_t den, const T& like) {
    return from_int(num, like) / from_int(den, like);
  }
  static bool same_base(const T& a, const T& b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= 1e-12 * scale;
  }
  static bool is_zero(const T& a) { return a == T(0); }
};

template <>
struct ScalarTraits<Rational> {
  static Rational from_int(std::int64_t v, const Rational&) { return Rational(static_cast<long>(v)); }
  static Rational from_ratio(std::int64_t num, std::int64_t den, const Rational&) {
    Rational out(static_cast<long>(num), static_cast<long>(den));
    out.canonicalize();
    return out;
  }
  static bool same_base(const Rational& a, const Rational& b) { return a == b; }
  static bool is_zero(const Rational& a) { return sgn(a) == 0; }
};

/// Sparse polynomial in the monomial convention (coefficient of X^alpha).
template <class T>
using Polynomial = std::map<MultiIndex, T>;

template <class T>
class PointJet {
 public:
  PointJet(std::shared_ptr<const IndexSet> indices, std::vector<T> base, std::vector<T> coeffs)
      : indices_(std::move(indices)), base_(std::move(base)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(base_.size()) != indices_->dim() || coeffs_.size() != indices_->size()) {
      fail(ErrorCode::kShapeMismatch, "jet base or coefficient count does not match (n, p)");
    }
  }

  static PointJet zero(int n, int p, std::vector<T> base) {
    auto idx = index_set(n, p);
    const T& like = base.at(0);
    std::vector<T> coeffs(idx->size(), ScalarTraits<T>::from_int(0, like));
    return PointJet(std::move(idx), std::move(base), std::move(coeffs));
  }

  static PointJet constant(int n, int p, std::vector<T> base, const T& value) {
    PointJet out = zero(n, p, std::move(base));
    out.coeffs_[0] = value;
    return out;
  }

  /// Jet of the coordinate function x_i at `base`.
  static PointJet coordinate(int n, int p, std::vector<T> base, int i) {
    const T value = base.at(static_cast<std::size_t>(i));
    PointJet out = constant(n, p, std::move(base), value);
    if (p >= 1) out.coeffs_[out.indices_->index_of(MultiIndex::unit(n, i))] = ScalarTraits<T>::from_int(1, value);
    return out;
  }

  int dim() const { return indices_->dim(); }
  int order() const { return indices_->order(); }
  const IndexSet& indices() const { return *indices_; }
  const std::shared_ptr<const IndexSet>& index_ptr() const { return indices_; }
  const std::vector<T>& base() const { return base_; }
  const std::vector<T>& coeffs() const { return coeffs_; }
  std::vector<T>& coeffs() { return coeffs_; }

  const T& value() const { return coeffs_[0]; }
  const T& operator[](const MultiIndex& alpha) const { return coeffs_[indices_->index_of(alpha)]; }
  T& operator[](const MultiIndex& alpha) { return coeffs_[indices_->index_of(alpha)]; }
  const T& at(std::size_t k) const { return coeffs_[k]; }
  T& at(std::size_t k) { return coeffs_[k]; }

  bool same_shape(const PointJet& other) const {
    return indices_->dim() == other.indices_->dim() && indices_->order() == other.indices_->order();
  }

  bool same_base(const PointJet& other) const {
    if (base_.size() != other.base_.size()) return false;
    for (std::size_t i = 0; i < base_.size(); ++i) {
      if (!ScalarTraits<T>::same_base(base_[i], other.base_[i])) return false;
    }
    return true;
  }

 private:
  std::shared_ptr<const IndexSet> indices_;
  std::vector<T> base_;
  std::vector<T> coeffs_;
};

namespace detail {

template <class T>
void require_compatible(const PointJet<T>& a, const PointJet<T>& b) {
  if (!a.same_shape(b)) fail(ErrorCode::kShapeMismatch, "jets differ in dimension or order");
  if (!a.same_base(b)) fail(ErrorCode::kBaseMismatch, "jets anchored at different points");
}

// Dense truncated product in the monomial convention.
template <class T>
std::vector<T> mono_mul(const IndexSet& idx, const std::vector<T>& a, const std::vector<T>& b, const T& like) {
  std::vector<T> out(idx.size(), ScalarTraits<T>::from_int(0, like));
  for (const auto& pr : idx.products()) {
    if (ScalarTraits<T>::is_zero(a[pr.left]) || ScalarTraits<T>::is_zero(b[pr.right])) continue;
    out[pr.result] += a[pr.left] * b[pr.right];
  }
  return out;
}

template <class T>
std::vector<T> to_mono(const PointJet<T>& a) {
  const auto& idx = a.indices();
  std::vector<T> out(a.coeffs());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx.factorial(k) != 1) out[k] = out[k] * ScalarTraits<T>::from_ratio(1, idx.factorial(k), a.value());
  }
  return out;
}

template <class T>
std::vector<T> from_mono(const IndexSet& idx, std::vector<T> mono) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx.factorial(k) != 1) mono[k] = mono[k] * ScalarTraits<T>::from_int(idx.factorial(k), mono[0]);
  }
  return mono;
}

}  // namespace detail

template <class T>
PointJet<T> jet_add(const PointJet<T>& a, const PointJet<T>& b) {
  detail::require_compatible(a, b);
  std::vector<T> c(a.coeffs());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] += b.at(k);
  return PointJet<T>(a.index_ptr(), a.base(), std::move(c));
}

template <class T>
PointJet<T> jet_sub(const PointJet<T>& a, const PointJet<T>& b) {
  detail::require_compatible(a, b);
  std::vector<T> c(a.coeffs());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] -= b.at(k);
  return PointJet<T>(a.index_ptr(), a.base(), std::move(c));
}

template <class T>
PointJet<T> jet_scale(const PointJet<T>& a, const T& s) {
  std::vector<T> c(a.coeffs());
  for (auto& v : c) v = v * s;
  return PointJet<T>(a.index_ptr(), a.base(), std::move(c));
}

/// pi_p(a * b), computed directly in the derivative convention by the Leibniz rule.
template <class T>
PointJet<T> jet_mul(const PointJet<T>& a, const PointJet<T>& b) {
  detail::require_compatible(a, b);
  const auto& idx = a.indices();
  std::vector<T> c(idx.size(), ScalarTraits<T>::from_int(0, a.value()));
  for (const auto& pr : idx.products()) {
    if (ScalarTraits<T>::is_zero(a.at(pr.left)) || ScalarTraits<T>::is_zero(b.at(pr.right))) continue;
    if (pr.leibniz == 1) {
      c[pr.result] += a.at(pr.left) * b.at(pr.right);
    } else {
      c[pr.result] += ScalarTraits<T>::from_int(pr.leibniz, a.value()) * a.at(pr.left) * b.at(pr.right);
    }
  }
  return PointJet<T>(a.index_ptr(), a.base(), std::move(c));
}

template <class T>
PointJet<T> operator+(const PointJet<T>& a, const PointJet<T>& b) { return jet_add(a, b); }
template <class T>
PointJet<T> operator-(const PointJet<T>& a, const PointJet<T>& b) { return jet_sub(a, b); }
template <class T>
PointJet<T> operator*(const PointJet<T>& a, const PointJet<T>& b) { return jet_mul(a, b); }

/// Drops monomials of total degree > p and returns the jet at `base`.
template <class T>
PointJet<T> pi_p(const Polynomial<T>& poly, int n, int p, std::vector<T> base) {
  PointJet<T> out = PointJet<T>::zero(n, p, std::move(base));
  const auto& idx = out.indices();
  for (const auto& [alpha, c] : poly) {
    if (alpha.size() != n) fail(ErrorCode::kShapeMismatch, "polynomial variable count mismatch");
    if (alpha.degree() > p) continue;
    const std::size_t k = idx.index_of(alpha);
    out.at(k) += c * ScalarTraits<T>::from_int(idx.factorial(k), c);
  }
  return out;
}

/// Monomial-convention polynomial of a jet (coefficient F^alpha / alpha!).
template <class T>
Polynomial<T> to_polynomial(const PointJet<T>& a) {
  Polynomial<T> out;
  const auto mono = detail::to_mono(a);
  for (std::size_t k = 0; k < mono.size(); ++k) out.emplace(a.indices()[k], mono[k]);
  return out;
}

/// Evaluates sum (1/alpha!) F^alpha X^alpha; X is the offset from the base point.
template <class T>
T jet_eval(const PointJet<T>& a, std::span<const T> offset) {
  if (static_cast<int>(offset.size()) != a.dim()) fail(ErrorCode::kShapeMismatch, "offset length != n");
  const auto& idx = a.indices();
  const int n = a.dim();
  // powers[i][e] = X_i^e
  std::vector<std::vector<T>> powers(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& row = powers[static_cast<std::size_t>(i)];
    row.push_back(ScalarTraits<T>::from_int(1, a.value()));
    for (int e = 1; e <= a.order(); ++e) row.push_back(row.back() * offset[static_cast<std::size_t>(i)]);
  }
  T sum = ScalarTraits<T>::from_int(0, a.value());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (ScalarTraits<T>::is_zero(a.at(k))) continue;
    T term = a.at(k);
    for (int i = 0; i < n; ++i) {
      const int e = idx[k][i];
      if (e) term = term * powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
    }
    if (idx.factorial(k) != 1) term = term * ScalarTraits<T>::from_ratio(1, idx.factorial(k), a.value());
    sum += term;
  }
  return sum;
}

template <class T>
T jet_eval(const PointJet<T>& a, const std::vector<T>& offset) {
  return jet_eval(a, std::span<const T>(offset));
}

/// Same jet truncated to a lower order.
template <class T>
PointJet<T> truncate(const PointJet<T>& a, int order) {
  if (order > a.order()) fail(ErrorCode::kShapeMismatch, "cannot raise jet order by truncation");
  auto idx = index_set(a.dim(), order);
  std::vector<T> c(a.coeffs().begin(), a.coeffs().begin() + static_cast<std::ptrdiff_t>(idx->size()));
  return PointJet<T>(std::move(idx), a.base(), std::move(c));
}

/// Jet of D^beta of the underlying function: order drops by |beta|.
template <class T>
PointJet<T> derivative_shift(const PointJet<T>& a, const MultiIndex& beta) {
  if (beta.degree() > a.order()) fail(ErrorCode::kShapeMismatch, "derivative order exceeds jet order");
  auto idx = index_set(a.dim(), a.order() - beta.degree());
  std::vector<T> c;
  c.reserve(idx->size());
  for (const auto& alpha : idx->list()) c.push_back(a[alpha + beta]);
  return PointJet<T>(std::move(idx), a.base(), std::move(c));
}

namespace detail {

template <class T>
std::vector<T> horner(const PointJet<T>& h, const std::vector<std::vector<T>>& ys, const IndexSet& out_idx,
                      std::vector<int>& prefix, int used, const T& like) {
  const int m = h.dim();
  const int j = static_cast<int>(prefix.size());
  if (j == m) {
    std::vector<T> out(out_idx.size(), ScalarTraits<T>::from_int(0, like));
    const std::size_t k = h.indices().index_of(MultiIndex(prefix));
    out[0] = h.at(k);
    if (h.indices().factorial(k) != 1) out[0] = out[0] * ScalarTraits<T>::from_ratio(1, h.indices().factorial(k), like);
    return out;
  }
  const int top = h.order() - used;
  prefix.push_back(top);
  std::vector<T> acc = horner(h, ys, out_idx, prefix, used + top, like);
  prefix.pop_back();
  for (int k = top - 1; k >= 0; --k) {
    acc = mono_mul(out_idx, acc, ys[static_cast<std::size_t>(j)], like);
    prefix.push_back(k);
    const std::vector<T> lower = horner(h, ys, out_idx, prefix, used + k, like);
    prefix.pop_back();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += lower[i];
  }
  return acc;
}

}  // namespace detail

/// (H o F)(u, X) = pi_p[ H(F_1^0, ..., F_m^0; F_1 - F_1^0, ..., F_m - F_m^0) ],
/// evaluated by nested Horner substitution over H's variables.
template <class T>
PointJet<T> jet_compose(const PointJet<T>& h, const std::vector<PointJet<T>>& fs) {
  if (static_cast<int>(fs.size()) != h.dim()) fail(ErrorCode::kShapeMismatch, "need one inner jet per outer variable");
  if (fs.empty()) fail(ErrorCode::kShapeMismatch, "empty composition");
  const auto& first = fs.front();
  for (const auto& f : fs) {
    if (!f.same_shape(first)) fail(ErrorCode::kShapeMismatch, "inner jets differ in dimension or order");
    if (!f.same_base(first)) fail(ErrorCode::kBaseMismatch, "inner jets anchored at different points");
  }
  if (h.order() != first.order()) fail(ErrorCode::kShapeMismatch, "outer and inner jets differ in order");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!ScalarTraits<T>::same_base(h.base()[i], fs[i].value())) {
      fail(ErrorCode::kBaseMismatch, "outer jet base differs from inner constant terms");
    }
  }
  const auto& out_idx = first.indices();
  const T& like = first.value();
  std::vector<std::vector<T>> ys;
  ys.reserve(fs.size());
  for (const auto& f : fs) {
    auto y = detail::to_mono(f);
    y[0] = ScalarTraits<T>::from_int(0, like);
    ys.push_back(std::move(y));
  }
  std::vector<int> prefix;
  auto mono = detail::horner(h, ys, out_idx, prefix, 0, like);
  return PointJet<T>(first.index_ptr(), first.base(), detail::from_mono(out_idx, std::move(mono)));
}

/// g o J for a univariate g given by its derivatives g^(k)(J^0), k = 0..p.
template <class T>
PointJet<T> apply_univariate(const PointJet<T>& j, const std::vector<T>& derivs) {
  if (static_cast<int>(derivs.size()) < j.order() + 1) fail(ErrorCode::kShapeMismatch, "need p+1 derivatives");
  std::vector<T> coeffs(derivs.begin(), derivs.begin() + j.order() + 1);
  PointJet<T> outer(index_set(1, j.order()), std::vector<T>{j.value()}, std::move(coeffs));
  return jet_compose(outer, std::vector<PointJet<T>>{j});
}

/// Variable substitution helper: jets of x_0..x_{n-1} at `point`.
template <class T>
std::vector<PointJet<T>> coordinate_jets(const std::vector<T>& point, int order) {
  std::vector<PointJet<T>> out;
  const int n = static_cast<int>(point.size());
  out.reserve(point.size());
  for (int i = 0; i < n; ++i) out.push_back(PointJet<T>::coordinate(n, order, point, i));
  return out;
}

}  // namespace whitney
