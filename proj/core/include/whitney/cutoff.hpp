#pragma once

// Regularized distances and the cutoff omega = 1 near W, 0 away from W,
// with |D^alpha omega| <= C d(x, Z)^{-|alpha|}.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "whitney/geometry.hpp"
#include "whitney/jet.hpp"

namespace whitney {

/// sigma = 1 - smoothstep of degree 2q+1: equal to 1 on s <= 0, 0 on s >= 1, and
/// C^q across both ends.
struct TransitionProfile {
  int q = 1;
  std::vector<double> coeffs;  // monomial coefficients on [0, 1]

  double value(double s) const;
  /// sigma^{(k)}(s) for k = 0..order.
  std::vector<double> derivatives(double s, int order) const;
};

TransitionProfile smooth_transition(int q);

struct Comparability {
  double c1 = 1.0;
  double c2 = 1.0;
  std::size_t samples = 0;
};

/// Smooth surrogate for d(x, S) off S with c1 d <= d~ <= c2 d.
///
/// Point pieces use |x - a|. A graph piece uses
///   (|w - phi(u)|^k + sum delta^k)^{1/k},  k = 2(q + 1),
/// where delta runs over the positive parts of the wall violations of u. A union
/// is combined by the soft minimum (sum d_i^{-P})^{-1/P}. The empty set gives 1.
class RegularizedDistance {
 public:
  RegularizedDistance() = default;
  RegularizedDistance(SetDesc desc, int q);

  const SetDesc& desc() const { return desc_; }
  int exponent() const { return k_; }
  double value(std::span<const double> x) const;
  /// Jet of order `order` at x; x must lie off the set.
  PointJet<double> jet(std::span<const double> x, int order) const;

  /// Sampled c1, c2 against the true distance, widened by `safety`.
  void calibrate(const std::vector<std::vector<double>>& samples, double safety);
  const Comparability& comparability() const { return comp_; }

 private:
  template <class S>
  S eval(const std::vector<S>& xs) const;

  SetDesc desc_;
  int k_ = 4;
  double softmin_ = 8.0;
  Comparability comp_;
};

/// Points on and around the pieces of each set (log-spaced offsets) plus uniform
/// points in the inflated bounding box.
std::vector<std::vector<double>> calibration_points(const std::vector<const SetDesc*>& sets, int n,
                                                    std::size_t count, Rng& rng);

/// Axis box around the sets (clipped), inflated by `margin`.
void bounding_box(const std::vector<const SetDesc*>& sets, int n, double margin, std::vector<double>& lo,
                  std::vector<double>& hi);

struct CutoffSpec {
  int n = 1;
  SetDesc W;
  SetDesc Z;
  double eta = 0.5;
  /// Plateau size for the true ratio d(x,W)/d(x,Z); default derived from eta.
  std::optional<double> rho;
  int q = 1;
  double safety = 1.25;
  double max_slack = 64.0;
  std::size_t calibration_samples = 600;
  std::uint64_t seed = 0;
};

class CutoffFn {
 public:
  double value(std::span<const double> x) const;
  PointJet<double> jet(std::span<const double> x, int order) const;
  /// d~(x, W) / d~(x, Z).
  double ratio(std::span<const double> x) const;

  const CutoffSpec& spec() const { return state_->spec; }
  double eta() const { return state_->spec.eta; }
  /// Threshold on the regularized ratio where omega reaches 0.
  double eta_s() const { return state_->eta_s; }
  /// Threshold on the regularized ratio below which omega is 1.
  double rho_s() const { return state_->rho_s; }
  /// omega = 1 wherever d(x,W) < rho_prime d(x,Z).
  double rho_prime() const { return state_->rho_prime; }
  const RegularizedDistance& dw() const { return state_->dw; }
  const RegularizedDistance& dz() const { return state_->dz; }
  const TransitionProfile& profile() const { return state_->profile; }

 private:
  friend CutoffFn build_cutoff(const CutoffSpec& spec);
  struct State {
    CutoffSpec spec;
    RegularizedDistance dw;
    RegularizedDistance dz;
    TransitionProfile profile;
    double eta_s = 0.0;
    double rho_s = 0.0;
    double rho_prime = 0.0;
  };
  std::shared_ptr<const State> state_;
};

/// Calibrates both regularized distances and places the transition inside
/// G_eta(W, Z) = {d(x,W) < eta d(x,Z)}. Raises SlackTooLarge when the
/// comparability constants leave no room for the transition.
CutoffFn build_cutoff(const CutoffSpec& spec);

enum class GMembership { kIn, kOut, kIndeterminate };
const char* to_string(GMembership g);

/// Conservative membership in G_eta(W, Z) from bracketed distances; raises OnZ
/// for x in Z.
GMembership in_g_eta(std::span<const double> x, const SetDesc& W, const SetDesc& Z, double eta);

struct CutoffCheckOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::size_t grid_coarse = 4000;  // total grid points on the coarse level
  std::size_t grid_fine = 16000;
  double exclusion = 1e-6;  // grid points this close to Z are skipped
};

struct CutoffBound {
  MultiIndex alpha;
  double c_coarse = 0.0;
  double c_fine = 0.0;
  double ratio = 1.0;
  std::vector<double> witness;
};

struct CutoffReport {
  double eta = 0.0;
  double rho_prime = 0.0;
  double eta_s = 0.0;
  double rho_s = 0.0;
  Comparability w;
  Comparability z;
  std::size_t samples = 0;
  std::size_t plateau_samples = 0;
  std::size_t plateau_failures = 0;
  std::size_t support_samples = 0;
  std::size_t support_failures = 0;
  std::size_t range_failures = 0;
  std::vector<std::vector<double>> witnesses;
  std::vector<CutoffBound> bounds;
  std::size_t excluded = 0;
  bool plateau_ok = true;
  bool support_ok = true;
  bool bounds_stable = true;
  bool pass = true;
};

/// Sampled check of the cutoff: omega = 1 where d(x,W) < rho' d(x,Z), omega = 0 off
/// G_eta, 0 <= omega <= 1, and C_alpha = max |D^alpha omega| d(x,Z)^{|alpha|} for
/// 1 <= |alpha| <= q by finite differences (step d(x,Z)/100) on two grid levels.
CutoffReport verify_cutoff(const CutoffFn& omega, const CutoffCheckOptions& opts = {});

}  // namespace whitney
