#pragma once

// Single-cell extension h = f * omega and the driver that assembles an
// extension of a whole scene by ascending dimension.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "whitney/cutoff.hpp"
#include "whitney/numdiff.hpp"
#include "whitney/scene.hpp"

namespace whitney {

/// One entry of the assembly trace.
struct TraceEntry {
  int level = 0;
  std::string stratum;
  std::string kind;  // "point" or "cell"
  std::string formula_hash;
  std::vector<std::string> zero_set;
  double eta = 0.5;
  int halvings = 0;
  double eta_s = 0.0;
  double rho_s = 0.0;
  double rho_prime = 0.0;
  Comparability w;
  Comparability z;
  bool subtracted = true;
};

class ExtensionTerm {
 public:
  virtual ~ExtensionTerm() = default;
  virtual double value(std::span<const double> x) const = 0;
  virtual PointJet<double> jet(std::span<const double> x, int order) const = 0;
  virtual const TraceEntry& trace() const = 0;
};

using TermPtr = std::shared_ptr<const ExtensionTerm>;

/// A finite sum of terms; evaluation is total on R^n.
class ExtensionFn {
 public:
  ExtensionFn() = default;
  explicit ExtensionFn(int n) : n_(n) {}

  int n() const { return n_; }
  double value(std::span<const double> x) const;
  /// Exact derivatives of the assembled formula (forward-mode jets).
  PointJet<double> jet(std::span<const double> x, int order) const;
  void add(TermPtr term) { terms_.push_back(std::move(term)); }
  const std::vector<TermPtr>& terms() const { return terms_; }
  std::vector<TraceEntry> trace() const;
  ScalarFn as_function() const;

 private:
  int n_ = 1;
  std::vector<TermPtr> terms_;
};

/// Sum over |alpha| <= p of F^alpha(a) (x - a)^alpha / alpha!, times a point cutoff.
class PointTerm final : public ExtensionTerm {
 public:
  PointTerm(PointJet<double> jet, CutoffFn omega, TraceEntry trace);
  double value(std::span<const double> x) const override;
  PointJet<double> jet(std::span<const double> x, int order) const override;
  const TraceEntry& trace() const override { return trace_; }

 private:
  template <class S>
  S eval(const std::vector<S>& xs) const;
  PointJet<double> taylor_;
  CutoffFn omega_;
  TraceEntry trace_;
};

/// h(x) = omega(x) * sum_beta (1/beta!) G^{(0,beta)}(u) (w - phi(u))^beta in local
/// coordinates (u, w) of the cell, where G = F - T g along the cell; zero off the
/// cylinder over the base and wherever omega vanishes.
class CellTerm final : public ExtensionTerm {
 public:
  CellTerm(CellPtr cell, FieldSpec field, std::shared_ptr<const ExtensionFn> subtract, CutoffFn omega, TraceEntry trace);
  double value(std::span<const double> x) const override;
  PointJet<double> jet(std::span<const double> x, int order) const override;
  const TraceEntry& trace() const override { return trace_; }

 private:
  CellPtr cell_;
  FieldSpec field_;
  std::shared_ptr<const ExtensionFn> subtract_;
  CutoffFn omega_;
  TraceEntry trace_;
  std::vector<MultiIndex> betas_;        // local normal multi-indices
  std::vector<MultiIndex> beta_ambient_;  // (0, beta) as ambient indices
  std::vector<double> beta_factorial_;
};

struct ExtendOptions {
  double eta = 0.5;
  int max_halvings = 20;
  std::size_t leak_samples = 400;
  std::uint64_t seed = 0;
  /// Replace F by F - Tg on each level (turning it off breaks the construction;
  /// kept as a switch for demonstrating that).
  bool subtract_skeleton = true;
  std::size_t calibration_samples = 600;
};

/// Extension of a field that is declared flat on every stratum but lambda.
/// Raises FlatnessDeclarationMissing when a stratum of E minus lambda is not
/// declared flat, SupportLeak when no eta keeps G_eta inside the cylinder.
ExtensionFn extend_on_cell(const Scene& scene, const std::string& lambda, const ExtendOptions& opts = {});

/// Coefficients of F - Tg on the strata of a scene.
class SubtractedField {
 public:
  SubtractedField(const Scene& scene, ExtensionFn g);
  /// F^alpha - D^alpha g at the point of the stratum with parameter u (ambient
  /// multi-indices in index_set(n, p) order). Raises DerivativeUnavailable
  /// where g cannot be differentiated.
  std::vector<double> coeffs_at(const std::string& stratum, std::span<const double> u) const;

 private:
  const Scene* scene_;
  ExtensionFn g_;
};

SubtractedField subtract_taylor(const Scene& scene, const ExtensionFn& g);

/// Ascending-dimension assembly: point strata get Taylor polynomials times
/// point cutoffs; each k-dimensional stratum gets a cell term for F - Tg, with
/// g the sum of the earlier terms and zero set E_k minus the stratum.
ExtensionFn extend_field(const Scene& scene, const ExtendOptions& opts = {});

struct FlatnessSeries {
  MultiIndex kappa;
  std::vector<double> scale;       // d(x_j, Z)
  std::vector<double> normalized;  // |D^kappa h(x_j)| d(x_j, Z)^{|kappa| - p}
  bool flat = false;
};

struct FlatnessReport {
  int p = 0;
  double C = 0.0;
  double theta = 1e-2;
  std::vector<std::vector<double>> points;
  std::vector<double> cone_ratio;  // d(x_j, Lambda) / d(x_j, Z)
  std::vector<FlatnessSeries> series;
  bool flat = false;
};

/// Normalized derivatives along a sequence x_j approaching Lambda's frontier
/// inside the cone d(x, Lambda) <= C d(x, Z). A series is flat when its tail is
/// non-increasing and ends below theta. Raises SequenceLeavesCone.
FlatnessReport flatness_rate_probe(const ScalarFn& h, const SetDesc& Z, const SetDesc& lambda, double C, int p,
                                   const std::vector<std::vector<double>>& sequence, double theta = 1e-2);

}  // namespace whitney
