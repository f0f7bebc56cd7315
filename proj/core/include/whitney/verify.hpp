#pragma once

// Whitney condition residuals, rate fitting for little-o claims, and the
// agreement check D^alpha f = F^alpha on E.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "whitney/extension.hpp"
#include "whitney/field.hpp"
#include "whitney/numdiff.hpp"
#include "whitney/scene.hpp"

namespace whitney {

struct RateFit {
  double required = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of the log-log fit
  std::vector<double> scales;      // descending
  std::vector<double> normalized;  // value / scale^required, same order
  bool all_zero = false;
  bool slope_pass = false;
  bool decay_pass = false;
  bool pass = false;
};

/// Tests value = o(scale^e): PASS when the log-log slope is >= e + margin, or the
/// normalized values are non-increasing toward small scales and end below theta.
/// Needs >= 6 samples spanning >= 2 decades (DegenerateScales otherwise).
RateFit rate_fit(const std::vector<std::pair<double, double>>& samples, double e, double margin = 0.25,
                 double theta = 1e-2);

enum class PairGenerator { kRadial, kBall };
const char* to_string(PairGenerator g);

struct ResidualSample {
  std::vector<double> a;
  std::vector<double> b;
  MultiIndex beta;
  double R = 0.0;
  double s = 0.0;  // |a - b|
  double scale = 0.0;
};

struct ResidualOptions {
  PairGenerator generator = PairGenerator::kRadial;
  std::vector<double> scales;  // empty: 8 geometric scales from 1e-1 to 1e-4
  int pairs_per_scale = 6;
  std::uint64_t seed = 0;
  bool allow_exact = true;
};

/// R = F^beta(a) - sum_{|alpha| <= p - |beta|} F^{alpha+beta}(b) (a - b)^alpha / alpha!
/// for pairs a, b of the stratum converging to the point with parameter uc
/// (which may lie on the frontier). Exact rational arithmetic when every
/// coefficient and the embedding are exactly evaluable.
std::vector<ResidualSample> whitney_residual(const FieldSpec& field, const Cell& cell, std::span<const double> uc,
                                             const MultiIndex& beta, const ResidualOptions& opts, bool* exact = nullptr);

/// (scale, max |R|) in generation order, ready for rate_fit.
std::vector<std::pair<double, double>> max_residual_per_scale(const std::vector<ResidualSample>& samples);

struct WhitneySeries {
  std::string stratum;
  std::vector<double> target;
  PairGenerator generator = PairGenerator::kRadial;
  MultiIndex beta;
  bool exact = false;
  std::vector<double> max_residual;  // per scale
  RateFit fit;
};

struct WhitneyReport {
  std::vector<WhitneySeries> series;
  bool pass = true;
};

/// Both pair generators, every |beta| <= p, at an interior target and at each
/// finite frontier target of every stratum of positive dimension.
WhitneyReport check_whitney(const Scene& scene, std::uint64_t seed = 0);

struct AlphaDeviation {
  MultiIndex alpha;
  double max_rel = 0.0;
  std::vector<double> witness;
};

struct StratumCheck {
  std::string stratum;
  std::size_t samples = 0;
  std::size_t failures = 0;  // samples where f could not be differentiated
  std::vector<AlphaDeviation> alphas;
  double max_rel = 0.0;
  bool pass = true;
};

struct CheckOptions {
  std::size_t samples_per_stratum = 100;
  std::uint64_t seed = 0;
  double tol = 1e-4;
};

struct ExtensionCheckReport {
  std::vector<StratumCheck> strata;
  double max_rel = 0.0;
  double tol = 1e-4;
  bool pass = true;
};

/// max |D^alpha f(x) - F^alpha(x)| / (1 + |F^alpha(x)|) per stratum and alpha, with
/// D^alpha from Richardson finite differences (step min(1e-3, d(x, frontier)/10)).
/// Point strata contribute their single point.
ExtensionCheckReport check_extension(const ScalarFn& f, const Scene& scene, const CheckOptions& opts = {});

}  // namespace whitney
