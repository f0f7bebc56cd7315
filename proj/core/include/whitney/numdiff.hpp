#pragma once

// Central tensor-product finite differences with one Richardson step.

#include <functional>
#include <span>

#include "whitney/multi_index.hpp"

namespace whitney {

using ScalarFn = std::function<double(std::span<const double>)>;

struct FdResult {
  double value = 0.0;
  double error = 0.0;  // |D(h/2) - D(h)| / 3 plus a rounding estimate
  double step = 0.0;
};

/// D^alpha f(x) from central stencils at steps h and h/2, Richardson-combined.
/// Evaluation failures on the stencil raise StencilOutOfDomain.
FdResult finite_difference(const ScalarFn& f, const MultiIndex& alpha, std::span<const double> x, double h);

/// Tries h0, h0/shrink, ... and keeps the estimate with the smallest error estimate.
FdResult finite_difference_adaptive(const ScalarFn& f, const MultiIndex& alpha, std::span<const double> x, double h0,
                                    int levels = 6, double shrink = 4.0);

}  // namespace whitney
