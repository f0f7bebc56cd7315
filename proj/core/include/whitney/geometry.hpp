#pragma once

// Open and graph Lambda_p-regular cells, bracketed distances, and sampling
// probes for regularity, Lipschitz constants, separation and quasi-convexity.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whitney/expr.hpp"
#include "whitney/multi_index.hpp"
#include "whitney/random.hpp"

namespace whitney {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Half-width of the box used to clip unbounded cells: WHITNEY_BBOX or 10.
double default_bbox();

struct OpenCell;
using OpenCellPtr = std::shared_ptr<const OpenCell>;

/// Open cell in R^dim: an interval for dim == 1, otherwise
/// {(u', t) : u' in base, lower(u') < t < upper(u')}.
struct OpenCell {
  int dim = 1;
  double lo = -kInf;
  double hi = kInf;
  OpenCellPtr base;
  std::optional<ExprFn> lower;  // nullopt: -inf
  std::optional<ExprFn> upper;  // nullopt: +inf
  double lower_slope = 0.0;     // sampled Lipschitz constants of the walls
  double upper_slope = 0.0;

  bool is_axis_box() const;
  /// Per-coordinate bounds of an axis box (only valid when is_axis_box()).
  void box_bounds(std::vector<double>& lo_out, std::vector<double>& hi_out) const;
};

OpenCellPtr make_interval(double lo, double hi);
OpenCellPtr make_slab(OpenCellPtr base, std::optional<ExprFn> lower, std::optional<ExprFn> upper);

enum class Membership { kInside, kBoundary, kOutside };
const char* to_string(Membership m);

Membership contains(const OpenCell& cell, std::span<const double> u, double tau = 1e-9);

/// Point of the closure parametrized by t in [0,1]^dim; infinite sides are clipped
/// at +-clip. Returns nullopt where a wall cannot be evaluated.
std::optional<std::vector<double>> closure_point(const OpenCell& cell, std::span<const double> t, double clip);

/// d(u, boundary) by the wall recursion: min over base-boundary distance and
/// slope-corrected vertical gaps to the two walls.
double boundary_distance(const OpenCell& cell, std::span<const double> u);

/// Stratum geometry. A point, or {(u, phi(u)) : u in base} in local coordinates
/// y_i = x_{perm[i]}; intrinsic dimension == ambient dimension means an open cell.
class Cell {
 public:
  static std::shared_ptr<const Cell> point(std::vector<double> coords);
  static std::shared_ptr<const Cell> graph(int n, OpenCellPtr base, std::vector<ExprFn> map, std::vector<int> perm);
  static std::shared_ptr<const Cell> open(OpenCellPtr base);

  int ambient_dim() const { return n_; }
  int intrinsic_dim() const { return m_; }
  bool is_point() const { return m_ == 0; }
  const std::vector<double>& coords() const { return coords_; }
  const OpenCellPtr& base() const { return base_; }
  const std::vector<ExprFn>& map() const { return map_; }
  const std::vector<int>& perm() const { return perm_; }

  std::vector<double> to_local(std::span<const double> x) const;
  std::vector<double> to_ambient(std::span<const double> y) const;
  /// Ambient point of the cell over parameter u (the coordinates for a point cell).
  std::vector<double> embed(std::span<const double> u) const;
  /// The first m local coordinates of x.
  std::vector<double> param_of(std::span<const double> x) const;
  /// Ambient coordinates x_i(u) as expressions in u (arity max(m, 1)).
  std::vector<ExprFn> embed_exprs() const;
  /// Ambient multi-index corresponding to a multi-index over local coordinates.
  MultiIndex to_ambient_index(const MultiIndex& local) const;
  MultiIndex to_local_index(const MultiIndex& ambient) const;

  /// u(x) strictly inside the base: x lies in the open cylinder D x R^{n-m}.
  bool in_cylinder(std::span<const double> x, double tau = 0.0) const;

  /// Closure point for t in [0,1]^m (see closure_point).
  std::optional<std::vector<double>> closure_embed(std::span<const double> t, double clip) const;

  /// Constant graph map over an axis box (distance has a closed form).
  bool closed_form_distance() const;

 private:
  Cell() = default;
  int n_ = 0;
  int m_ = 0;
  std::vector<double> coords_;
  OpenCellPtr base_;
  std::vector<ExprFn> map_;
  std::vector<int> perm_;
};

using CellPtr = std::shared_ptr<const Cell>;

/// Membership in the cell (graph cells: "inside" means on the graph within tau).
Membership contains(const Cell& cell, std::span<const double> x, double tau = 1e-9);

/// Finite union of cell closures; empty means the empty set.
struct SetDesc {
  std::vector<CellPtr> pieces;
  bool empty() const { return pieces.empty(); }
};

struct DistanceOptions {
  bool bracket = false;          // run branch-and-bound for a certified lower bound
  double tol = 1e-9;             // bracket width target
  bool require_tol = false;      // raise ConvergenceFailure when the bracket is wider
  std::size_t eval_cap = 40000;  // branch-and-bound evaluation budget
  double bbox = 0.0;             // 0: default_bbox()
  /// Extra parameter seeds in [0,1]^m for the local search.
  std::vector<std::vector<double>> seeds;
};

struct Distance {
  double value = 0.0;  // best estimate (the upper end of the bracket)
  double lower = 0.0;
  double upper = 0.0;
  bool closed_form = false;
};

Distance cell_distance(const Cell& cell, std::span<const double> x, const DistanceOptions& opts = {});
/// d(x, union of closures); the empty set gives exactly 1.
Distance set_distance(const SetDesc& desc, std::span<const double> x, const DistanceOptions& opts = {});

/// Uniform samples of an open cell (clipped to the bbox where unbounded).
std::vector<std::vector<double>> sample_open_cell(const OpenCell& cell, std::size_t count, Rng& rng,
                                                  double bbox = 0.0);

/// Samples of the closure parameter cube clustered toward its faces:
/// a uniform tensor grid plus geometric layers down to 2^-depth.
std::vector<double> boundary_refined_axis(int uniform, int depth);

struct LipschitzReport {
  double m_hat = 0.0;
  double l_hat = 1.0;
  std::size_t samples = 0;
  std::vector<double> witness;
};

/// Largest sampled Jacobian operator norm of phi over the base (closure included
/// where evaluable).
LipschitzReport lipschitz_estimate(const std::vector<ExprFn>& phi, const OpenCell& base, std::size_t samples,
                                   std::uint64_t seed = 0);

struct RegularityEntry {
  MultiIndex alpha;
  double c_coarse = 0.0;
  double c_fine = 0.0;
  double ratio = 1.0;
  std::vector<double> witness;
};

struct RegularityReport {
  int order = 0;
  std::vector<RegularityEntry> entries;
  std::size_t samples_coarse = 0;
  std::size_t samples_fine = 0;
  bool plausibly_regular = true;
};

struct RegularityGrid {
  int uniform = 16;
  int depth = 12;
};

/// Sampled C_alpha = max |D^alpha f| d(x, boundary)^{|alpha|-1} for 1 <= |alpha| <= q on
/// a boundary-refined grid and on one refinement of it.
RegularityReport check_lambda_regular(const ExprFn& f, const OpenCell& omega, int q, const RegularityGrid& grid = {});

struct SandwichReport {
  double l_hat = 1.0;
  std::size_t inside_samples = 0;
  std::size_t outside_samples = 0;
  std::size_t violations = 0;
  double max_equality_gap = 0.0;  // max | d - |w - phi(u)| | (equality expected for constant maps)
  double max_bracket_width = 0.0;
  std::vector<std::vector<double>> witnesses;
};

/// Checks L|w - phi(u)| <= d(x,S) <= |w - phi(u)| in the cylinder and
/// d(x,S) >= L d(x, boundary of S) outside it.
SandwichReport distance_sandwich_check(const Cell& cell, const LipschitzReport& lip,
                                       const std::vector<std::vector<double>>& samples, double eps = 1e-6);

/// Mixed samples around a graph cell: half inside the cylinder, half outside.
std::vector<std::vector<double>> sandwich_samples(const Cell& cell, std::size_t count, Rng& rng);

struct SeparationReport {
  double m_coarse = 0.0;
  double m_fine = 0.0;
  std::size_t used = 0;
  bool simply_separated = true;
};

/// Ratios d(x, A cap B) / d(x, B) over samples x of A (x in B are skipped). The
/// fine level adds the half of the samples closest to A cap B.
SeparationReport simply_separated_check(const SetDesc& a_cap_b, const SetDesc& b,
                                        const std::vector<std::vector<double>>& samples_of_a);

struct QuasiConvexityReport {
  double constant = 1.0;
  std::size_t pairs = 0;
  std::size_t nodes = 0;
};

/// Shortest mesh path inside the cell between each pair, divided by the chord.
QuasiConvexityReport quasi_convexity_probe(const Cell& cell,
                                           const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
                                           int mesh_per_axis = 64);

}  // namespace whitney
