#include "whitney/numdiff.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "whitney/error.hpp"

namespace whitney {
namespace {

struct Stencil {
  double value;
  double rounding;  // eps * sum |w_j f_j| / h^k
};

Stencil central(const ScalarFn& f, const MultiIndex& alpha, std::span<const double> x, double h) {
  const int n = alpha.size();
  std::vector<int> j(static_cast<std::size_t>(n), 0);
  std::vector<double> point(x.begin(), x.end());
  double sum = 0.0;
  double mag = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      const int a = alpha[i];
      const int ji = j[static_cast<std::size_t>(i)];
      weight *= static_cast<double>(binomial(a, ji)) * ((ji % 2) ? -1.0 : 1.0);
      point[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + (0.5 * a - ji) * h;
    }
    try {
      const double term = weight * f(point);
      sum += term;
      mag += std::abs(term);
    } catch (const Error& e) {
      fail(ErrorCode::kStencilOutOfDomain, std::string("stencil point not evaluable: ") + e.what());
    }
    int i = 0;
    while (i < n && ++j[static_cast<std::size_t>(i)] > alpha[i]) j[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  const double scale = std::pow(h, alpha.degree());
  return {sum / scale, std::numeric_limits<double>::epsilon() * mag / scale};
}

}  // namespace

FdResult finite_difference(const ScalarFn& f, const MultiIndex& alpha, std::span<const double> x, double h) {
  if (alpha.size() != static_cast<int>(x.size())) fail(ErrorCode::kShapeMismatch, "multi-index length != point dimension");
  FdResult out;
  out.step = h;
  if (alpha.degree() == 0) {
    out.value = central(f, alpha, x, h).value;
    return out;
  }
  const Stencil coarse = central(f, alpha, x, h);
  const Stencil fine = central(f, alpha, x, h / 2);
  out.value = fine.value + (fine.value - coarse.value) / 3.0;
  out.error = std::abs(fine.value - coarse.value) / 3.0 + 2.0 * fine.rounding;
  return out;
}

FdResult finite_difference_adaptive(const ScalarFn& f, const MultiIndex& alpha, std::span<const double> x, double h0,
                                    int levels, double shrink) {
  FdResult best = finite_difference(f, alpha, x, h0);
  if (alpha.degree() == 0) return best;
  double h = h0;
  for (int k = 1; k < levels; ++k) {
    h /= shrink;
    const FdResult r = finite_difference(f, alpha, x, h);
    if (r.error < best.error) best = r;
  }
  return best;
}

}  // namespace whitney
