#include "whitney/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "whitney/error.hpp"

namespace whitney {
namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double clip_for(std::span<const double> x, double bbox) { return std::max(bbox, max_abs(x) + bbox); }

Membership interval_membership(double t, double lo, double hi, double tau) {
  if (t < lo - tau || t > hi + tau) return Membership::kOutside;
  if (std::abs(t - lo) <= tau || std::abs(t - hi) <= tau) return Membership::kBoundary;
  return Membership::kInside;
}

Membership combine(Membership base, Membership own) {
  if (base == Membership::kOutside || own == Membership::kOutside) return Membership::kOutside;
  if (base == Membership::kBoundary || own == Membership::kBoundary) return Membership::kBoundary;
  return Membership::kInside;
}

std::vector<double> head(std::span<const double> v, std::size_t k) { return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)}; }

// Nudged parameter used when a wall cannot be evaluated on the closure itself.
std::vector<double> nudge(std::span<const double> t, double amount) {
  std::vector<double> out(t.begin(), t.end());
  for (double& v : out) v = 0.5 + (v - 0.5) * (1.0 - amount);
  return out;
}

// Inverse of closure_point (clamped into the cube).
std::optional<std::vector<double>> closure_param_of(const OpenCell& cell, std::span<const double> u, double clip) {
  if (cell.dim == 1) {
    const double lo = std::isfinite(cell.lo) ? cell.lo : -clip;
    const double hi = std::isfinite(cell.hi) ? cell.hi : std::max(clip, lo + 1.0);
    const double t = hi > lo ? (u[0] - lo) / (hi - lo) : 0.5;
    return std::vector<double>{std::clamp(t, 0.0, 1.0)};
  }
  const auto sub = head(u, static_cast<std::size_t>(cell.dim - 1));
  auto t = closure_param_of(*cell.base, sub, clip);
  if (!t) return std::nullopt;
  auto ub = closure_point(*cell.base, *t, clip);
  if (!ub) return std::nullopt;
  try {
    const double lo = cell.lower ? evaluate(*cell.lower, *ub) : -clip;
    const double hi = cell.upper ? evaluate(*cell.upper, *ub) : std::max(clip, lo + 1.0);
    const double tn = hi > lo ? (u[static_cast<std::size_t>(cell.dim - 1)] - lo) / (hi - lo) : 0.5;
    t->push_back(std::clamp(tn, 0.0, 1.0));
  } catch (const Error&) {
    return std::nullopt;
  }
  return t;
}

// Compass / golden-section polish of g over the cube around `start`.
double polish(const std::function<std::optional<double>(std::span<const double>)>& g, std::vector<double>& t,
              double value, double step) {
  const std::size_t m = t.size();
  if (m == 1) {
    constexpr double kPhi = 0.6180339887498949;
    double a = std::max(0.0, t[0] - step);
    double b = std::min(1.0, t[0] + step);
    auto eval1 = [&](double s) {
      double v[1] = {s};
      auto r = g(std::span<const double>(v, 1));
      return r ? *r : kInf;
    };
    double c = b - kPhi * (b - a);
    double d = a + kPhi * (b - a);
    double fc = eval1(c);
    double fd = eval1(d);
    for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kPhi * (b - a);
        fc = eval1(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kPhi * (b - a);
        fd = eval1(d);
      }
    }
    for (double cand : {c, d, a, b}) {
      const double v = eval1(cand);
      if (v < value) {
        value = v;
        t[0] = cand;
      }
    }
    return value;
  }
  int evals = 0;
  while (step > 1e-13 && evals < 6000) {
    bool improved = false;
    for (std::size_t i = 0; i < m && !improved; ++i) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> cand(t);
        cand[i] = std::clamp(cand[i] + sgn * step, 0.0, 1.0);
        ++evals;
        auto r = g(cand);
        if (r && *r < value) {
          value = *r;
          t = std::move(cand);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return value;
}

int grid_per_axis(int m) {
  switch (m) {
    case 1: return 129;
    case 2: return 33;
    case 3: return 13;
    default: return 7;
  }
}

// Calls fn(t) for every point of the tensor grid with `per` points per axis on [0,1]^m.
void for_each_grid_point(int m, int per, const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> t(static_cast<std::size_t>(m), 0.0);
  while (true) {
    for (int i = 0; i < m; ++i) t[static_cast<std::size_t>(i)] = per > 1 ? double(idx[static_cast<std::size_t>(i)]) / (per - 1) : 0.5;
    fn(t);
    int i = 0;
    while (i < m && ++idx[static_cast<std::size_t>(i)] == per) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == m) break;
  }
}

Distance minimize_distance(const Cell& cell, std::span<const double> x, const DistanceOptions& opts) {
  const int m = cell.intrinsic_dim();
  const double clip = clip_for(x, opts.bbox > 0 ? opts.bbox : default_bbox());

  auto point_at = [&](std::span<const double> t) -> std::optional<std::vector<double>> {
    auto p = cell.closure_embed(t, clip);
    if (!p) p = cell.closure_embed(nudge(t, 1e-9), clip);
    if (!p) p = cell.closure_embed(nudge(t, 1e-6), clip);
    return p;
  };
  auto g = [&](std::span<const double> t) -> std::optional<double> {
    auto p = point_at(t);
    if (!p) return std::nullopt;
    return dist2(*p, x);
  };

  const int per = grid_per_axis(m);
  struct Seed {
    double value;
    std::vector<double> t;
  };
  std::vector<Seed> seeds;
  double lip = 0.0;
  std::vector<std::optional<std::vector<double>>> grid_points;
  for_each_grid_point(m, per, [&](const std::vector<double>& t) {
    auto p = point_at(t);
    grid_points.push_back(p);
    if (p) seeds.push_back({dist2(*p, x), t});
  });
  // Lipschitz constant of t -> P(t) from neighbouring grid points (axis neighbours).
  {
    const double h = 1.0 / (per - 1);
    std::size_t stride = 1;
    for (int axis = 0; axis < m; ++axis) {
      for (std::size_t k = 0; k + stride < grid_points.size(); ++k) {
        const std::size_t coord = (k / stride) % static_cast<std::size_t>(per);
        if (coord + 1 >= static_cast<std::size_t>(per)) continue;
        const auto& a = grid_points[k];
        const auto& b = grid_points[k + stride];
        if (a && b) lip = std::max(lip, dist2(*a, *b) / h);
      }
      stride *= static_cast<std::size_t>(per);
    }
  }
  const auto local = cell.param_of(x);
  if (auto t = closure_param_of(*cell.base(), local, clip)) {
    if (auto v = g(*t)) seeds.push_back({*v, *t});
  }
  for (const auto& s : opts.seeds) {
    if (auto v = g(s)) seeds.push_back({*v, s});
  }
  if (seeds.empty()) fail(ErrorCode::kConvergenceFailure, "no evaluable point on the cell closure");
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.t < b.t;
  });

  double best = seeds.front().value;
  const std::size_t polish_count = std::min<std::size_t>(seeds.size(), 4);
  for (std::size_t k = 0; k < polish_count; ++k) {
    std::vector<double> t = seeds[k].t;
    best = std::min(best, polish(g, t, seeds[k].value, 1.0 / (per - 1)));
  }

  Distance out;
  out.value = out.upper = best;
  out.lower = best;
  if (!opts.bracket) return out;

  // Branch and bound over the parameter cube with the sampled Lipschitz bound.
  lip = 2.0 * lip + 1e-12;
  struct Box {
    double bound;
    std::vector<double> center;
    double half;
    bool operator>(const Box& o) const { return bound > o.bound; }
  };
  std::priority_queue<Box, std::vector<Box>, std::greater<Box>> queue;
  const double root_half = 0.5;
  const double diag = std::sqrt(static_cast<double>(m));
  std::vector<double> center(static_cast<std::size_t>(m), 0.5);
  auto bound_of = [&](const std::vector<double>& c, double half) {
    auto v = g(c);
    if (v) best = std::min(best, *v);
    return (v ? *v : best) - lip * half * diag;
  };
  queue.push({bound_of(center, root_half), center, root_half});
  std::size_t evals = 1;
  double lower = queue.top().bound;
  while (!queue.empty()) {
    Box box = queue.top();
    lower = box.bound;
    if (box.bound >= best - opts.tol) break;
    if (evals >= opts.eval_cap) break;
    queue.pop();
    const double half = box.half / 2;
    const int children = 1 << m;
    for (int c = 0; c < children; ++c) {
      std::vector<double> cc(box.center);
      for (int i = 0; i < m; ++i) cc[static_cast<std::size_t>(i)] += ((c >> i) & 1) ? half : -half;
      queue.push({bound_of(cc, half), std::move(cc), half});
      ++evals;
    }
    if (queue.empty()) break;
    lower = queue.top().bound;
  }
  out.value = out.upper = best;
  out.lower = std::clamp(std::min(lower, best), 0.0, best);
  if (opts.require_tol && out.upper - out.lower > opts.tol) {
    fail(ErrorCode::kConvergenceFailure, "distance bracket [" + std::to_string(out.lower) + ", " +
                                             std::to_string(out.upper) + "] wider than tolerance");
  }
  return out;
}

}  // namespace

double default_bbox() {
  if (const char* env = std::getenv("WHITNEY_BBOX")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0) return v;
  }
  return 10.0;
}

// ---------------------------------------------------------------------------
// OpenCell
// ---------------------------------------------------------------------------

bool OpenCell::is_axis_box() const {
  if (dim == 1) return true;
  if (lower && !lower->is_constant()) return false;
  if (upper && !upper->is_constant()) return false;
  return base->is_axis_box();
}

void OpenCell::box_bounds(std::vector<double>& lo_out, std::vector<double>& hi_out) const {
  if (dim == 1) {
    lo_out.assign(1, lo);
    hi_out.assign(1, hi);
    return;
  }
  base->box_bounds(lo_out, hi_out);
  lo_out.push_back(lower ? lower->constant_value()->get_d() : -kInf);
  hi_out.push_back(upper ? upper->constant_value()->get_d() : kInf);
}

OpenCellPtr make_interval(double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::kStratificationInvalid, "interval needs lo < hi");
  auto c = std::make_shared<OpenCell>();
  c->dim = 1;
  c->lo = lo;
  c->hi = hi;
  return c;
}

OpenCellPtr make_slab(OpenCellPtr base, std::optional<ExprFn> lower, std::optional<ExprFn> upper) {
  if (!base) fail(ErrorCode::kStratificationInvalid, "slab needs a base cell");
  for (const auto* wall : {&lower, &upper}) {
    if (*wall && (*wall)->arity() != base->dim) fail(ErrorCode::kArityMismatch, "wall arity must equal base dimension");
  }
  auto c = std::make_shared<OpenCell>();
  c->dim = base->dim + 1;
  c->base = base;
  c->lower = std::move(lower);
  c->upper = std::move(upper);
  if (c->lower && !c->lower->is_constant()) c->lower_slope = lipschitz_estimate({*c->lower}, *base, 200, 11).m_hat;
  if (c->upper && !c->upper->is_constant()) c->upper_slope = lipschitz_estimate({*c->upper}, *base, 200, 13).m_hat;
  return c;
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::kInside: return "inside";
    case Membership::kBoundary: return "boundary";
    case Membership::kOutside: return "outside";
  }
  return "?";
}

Membership contains(const OpenCell& cell, std::span<const double> u, double tau) {
  if (static_cast<int>(u.size()) != cell.dim) fail(ErrorCode::kShapeMismatch, "point dimension != cell dimension");
  if (cell.dim == 1) return interval_membership(u[0], cell.lo, cell.hi, tau);
  const auto sub = u.first(static_cast<std::size_t>(cell.dim - 1));
  const Membership base = contains(*cell.base, sub, tau);
  if (base == Membership::kOutside) return base;
  double lo = -kInf;
  double hi = kInf;
  try {
    if (cell.lower) lo = evaluate(*cell.lower, sub);
    if (cell.upper) hi = evaluate(*cell.upper, sub);
  } catch (const Error& e) {
    if (base == Membership::kBoundary && e.code() == ErrorCode::kSingularPoint) return Membership::kBoundary;
    throw;
  }
  return combine(base, interval_membership(u.back(), lo, hi, tau));
}

std::optional<std::vector<double>> closure_point(const OpenCell& cell, std::span<const double> t, double clip) {
  if (cell.dim == 1) {
    const double lo = std::isfinite(cell.lo) ? cell.lo : -clip;
    const double hi = std::isfinite(cell.hi) ? cell.hi : std::max(clip, lo + 1.0);
    return std::vector<double>{lo + t[0] * (hi - lo)};
  }
  auto u = closure_point(*cell.base, t.first(static_cast<std::size_t>(cell.dim - 1)), clip);
  if (!u) return std::nullopt;
  try {
    const double lo = cell.lower ? evaluate(*cell.lower, *u) : -clip;
    const double hi = cell.upper ? evaluate(*cell.upper, *u) : std::max(clip, lo + 1.0);
    u->push_back(lo + t.back() * (hi - lo));
  } catch (const Error&) {
    return std::nullopt;
  }
  return u;
}

namespace {

double raw_boundary_distance(const OpenCell& cell, std::span<const double> u) {
  if (cell.dim == 1) return std::min(u[0] - cell.lo, cell.hi - u[0]);
  const auto sub = u.first(static_cast<std::size_t>(cell.dim - 1));
  double d = raw_boundary_distance(*cell.base, sub);
  const double t = u.back();
  if (cell.lower) d = std::min(d, (t - evaluate(*cell.lower, sub)) / std::sqrt(1.0 + cell.lower_slope * cell.lower_slope));
  if (cell.upper) d = std::min(d, (evaluate(*cell.upper, sub) - t) / std::sqrt(1.0 + cell.upper_slope * cell.upper_slope));
  return d;
}

}  // namespace

double boundary_distance(const OpenCell& cell, std::span<const double> u) {
  const double d = raw_boundary_distance(cell, u);
  return std::isfinite(d) ? d : 1.0;
}

// ---------------------------------------------------------------------------
// Cell
// ---------------------------------------------------------------------------

std::shared_ptr<const Cell> Cell::point(std::vector<double> coords) {
  if (coords.empty()) fail(ErrorCode::kShapeMismatch, "point needs coordinates");
  auto c = std::shared_ptr<Cell>(new Cell());
  c->n_ = static_cast<int>(coords.size());
  c->m_ = 0;
  c->coords_ = std::move(coords);
  c->perm_.resize(static_cast<std::size_t>(c->n_));
  std::iota(c->perm_.begin(), c->perm_.end(), 0);
  return c;
}

std::shared_ptr<const Cell> Cell::graph(int n, OpenCellPtr base, std::vector<ExprFn> map, std::vector<int> perm) {
  if (!base) fail(ErrorCode::kStratificationInvalid, "graph cell needs a base");
  const int m = base->dim;
  if (m > n) fail(ErrorCode::kShapeMismatch, "base dimension exceeds ambient dimension");
  if (static_cast<int>(map.size()) != n - m) fail(ErrorCode::kShapeMismatch, "graph map needs n - m components");
  for (const auto& f : map) {
    if (f.arity() != m) fail(ErrorCode::kArityMismatch, "graph map arity must equal base dimension");
  }
  if (perm.empty()) {
    perm.resize(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
  }
  if (static_cast<int>(perm.size()) != n) fail(ErrorCode::kShapeMismatch, "permutation length != n");
  std::vector<int> sorted(perm);
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i) fail(ErrorCode::kShapeMismatch, "not a permutation of 0..n-1");
  }
  auto c = std::shared_ptr<Cell>(new Cell());
  c->n_ = n;
  c->m_ = m;
  c->base_ = std::move(base);
  c->map_ = std::move(map);
  c->perm_ = std::move(perm);
  return c;
}

std::shared_ptr<const Cell> Cell::open(OpenCellPtr base) {
  const int n = base->dim;
  return graph(n, std::move(base), {}, {});
}

std::vector<double> Cell::to_local(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
  return y;
}

std::vector<double> Cell::to_ambient(std::span<const double> y) const {
  std::vector<double> x(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = y[static_cast<std::size_t>(i)];
  return x;
}

std::vector<double> Cell::embed(std::span<const double> u) const {
  if (m_ == 0) return coords_;
  std::vector<double> y(u.begin(), u.begin() + m_);
  for (const auto& f : map_) y.push_back(evaluate(f, u.first(static_cast<std::size_t>(m_))));
  return to_ambient(y);
}

std::vector<double> Cell::param_of(std::span<const double> x) const {
  if (m_ == 0) return {};
  auto y = to_local(x);
  y.resize(static_cast<std::size_t>(m_));
  return y;
}

std::vector<ExprFn> Cell::embed_exprs() const {
  const int arity = std::max(m_, 1);
  std::vector<ExprFn> y;
  if (m_ == 0) {
    for (double c : coords_) y.push_back(ExprFn::constant(arity, c));
    return y;
  }
  for (int i = 0; i < m_; ++i) y.push_back(ExprFn::variable(arity, i));
  for (const auto& f : map_) y.push_back(f);
  std::vector<ExprFn> x(y);
  for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = y[static_cast<std::size_t>(i)];
  return x;
}

MultiIndex Cell::to_ambient_index(const MultiIndex& local) const {
  std::vector<int> e(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = local[i];
  return MultiIndex(std::move(e));
}

MultiIndex Cell::to_local_index(const MultiIndex& ambient) const {
  std::vector<int> e(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) e[static_cast<std::size_t>(i)] = ambient[perm_[static_cast<std::size_t>(i)]];
  return MultiIndex(std::move(e));
}

bool Cell::in_cylinder(std::span<const double> x, double tau) const {
  if (m_ == 0) return false;
  const auto u = param_of(x);
  try {
    return contains(*base_, u, tau) == Membership::kInside;
  } catch (const Error&) {
    return false;
  }
}

std::optional<std::vector<double>> Cell::closure_embed(std::span<const double> t, double clip) const {
  if (m_ == 0) return coords_;
  auto u = closure_point(*base_, t, clip);
  if (!u) return std::nullopt;
  try {
    return embed(*u);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool Cell::closed_form_distance() const {
  if (m_ == 0) return true;
  if (!base_->is_axis_box()) return false;
  return std::all_of(map_.begin(), map_.end(), [](const ExprFn& f) { return f.is_constant(); });
}

Membership contains(const Cell& cell, std::span<const double> x, double tau) {
  if (static_cast<int>(x.size()) != cell.ambient_dim()) fail(ErrorCode::kShapeMismatch, "point dimension != n");
  if (cell.is_point()) return dist2(x, cell.coords()) <= tau ? Membership::kInside : Membership::kOutside;
  const auto y = cell.to_local(x);
  const int m = cell.intrinsic_dim();
  const auto u = std::span<const double>(y).first(static_cast<std::size_t>(m));
  const Membership base = contains(*cell.base(), u, tau);
  if (base == Membership::kOutside || cell.map().empty()) return base;
  double gap = 0.0;
  try {
    for (std::size_t j = 0; j < cell.map().size(); ++j) {
      const double w = y[static_cast<std::size_t>(m) + j] - evaluate(cell.map()[j], u);
      gap += w * w;
    }
  } catch (const Error&) {
    return base == Membership::kBoundary ? Membership::kBoundary : Membership::kOutside;
  }
  if (std::sqrt(gap) > tau) return Membership::kOutside;
  return base;
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

Distance cell_distance(const Cell& cell, std::span<const double> x, const DistanceOptions& opts) {
  if (static_cast<int>(x.size()) != cell.ambient_dim()) fail(ErrorCode::kShapeMismatch, "point dimension != n");
  Distance out;
  out.closed_form = true;
  if (cell.is_point()) {
    out.value = out.lower = out.upper = dist2(x, cell.coords());
    return out;
  }
  if (cell.closed_form_distance()) {
    const auto y = cell.to_local(x);
    std::vector<double> lo;
    std::vector<double> hi;
    cell.base()->box_bounds(lo, hi);
    double s = 0.0;
    const int m = cell.intrinsic_dim();
    for (int i = 0; i < m; ++i) {
      const double v = y[static_cast<std::size_t>(i)];
      const double c = std::clamp(v, lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
      s += (v - c) * (v - c);
    }
    for (std::size_t j = 0; j < cell.map().size(); ++j) {
      const double w = y[static_cast<std::size_t>(m) + j] - cell.map()[j].constant_value()->get_d();
      s += w * w;
    }
    out.value = out.lower = out.upper = std::sqrt(s);
    return out;
  }
  if (cell.map().empty()) {
    try {
      if (contains(*cell.base(), x, 0.0) != Membership::kOutside) {
        out.value = out.lower = out.upper = 0.0;
        return out;
      }
    } catch (const Error&) {
    }
  }
  return minimize_distance(cell, x, opts);
}

Distance set_distance(const SetDesc& desc, std::span<const double> x, const DistanceOptions& opts) {
  Distance out;
  if (desc.empty()) {
    out.value = out.lower = out.upper = 1.0;
    out.closed_form = true;
    return out;
  }
  out.value = out.lower = out.upper = kInf;
  out.closed_form = true;
  for (const auto& piece : desc.pieces) {
    const Distance d = cell_distance(*piece, x, opts);
    out.value = std::min(out.value, d.value);
    out.lower = std::min(out.lower, d.lower);
    out.upper = std::min(out.upper, d.upper);
    out.closed_form = out.closed_form && d.closed_form;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> sample_open_cell(const OpenCell& cell, std::size_t count, Rng& rng, double bbox) {
  const double clip = bbox > 0 ? bbox : default_bbox();
  std::vector<std::vector<double>> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 100 * count + 100) {
    ++attempts;
    std::vector<double> t(static_cast<std::size_t>(cell.dim));
    for (double& v : t) v = rng.uniform(1e-9, 1.0 - 1e-9);
    if (auto u = closure_point(cell, t, clip)) out.push_back(std::move(*u));
  }
  return out;
}

std::vector<double> boundary_refined_axis(int uniform, int depth) {
  std::vector<double> axis;
  for (int i = 0; i < uniform; ++i) axis.push_back((i + 0.5) / uniform);
  for (int j = 1; j <= depth; ++j) {
    const double s = std::ldexp(1.0, -j);
    axis.push_back(s);
    axis.push_back(1.0 - s);
  }
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  return axis;
}

namespace {

void for_each_tensor(const std::vector<double>& axis, int m, const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> t(static_cast<std::size_t>(m));
  while (true) {
    for (int i = 0; i < m; ++i) t[static_cast<std::size_t>(i)] = axis[idx[static_cast<std::size_t>(i)]];
    fn(t);
    int i = 0;
    while (i < m && ++idx[static_cast<std::size_t>(i)] == axis.size()) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == m) break;
  }
}

double jacobian_norm(const std::vector<std::vector<double>>& jac) {
  // jac[j][i] = d phi_j / d u_i; largest singular value by power iteration on J^T J.
  if (jac.empty()) return 0.0;
  const std::size_t m = jac.front().size();
  if (m == 1) {
    double s = 0.0;
    for (const auto& row : jac) s += row[0] * row[0];
    return std::sqrt(s);
  }
  std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
  for (const auto& row : jac) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) gram[a][b] += row[a] * row[b];
    }
  }
  std::vector<double> v(m, 1.0 / std::sqrt(static_cast<double>(m)));
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> w(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) w[a] += gram[a][b] * v[b];
    }
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t a = 0; a < m; ++a) v[a] = w[a] / nw;
    if (std::abs(nw - lambda) <= 1e-15 * nw) {
      lambda = nw;
      break;
    }
    lambda = nw;
  }
  return std::sqrt(lambda);
}

}  // namespace

LipschitzReport lipschitz_estimate(const std::vector<ExprFn>& phi, const OpenCell& base, std::size_t samples,
                                   std::uint64_t seed) {
  LipschitzReport rep;
  if (phi.empty()) return rep;
  const int m = base.dim;
  std::vector<std::vector<ExprFn>> grads;
  for (const auto& f : phi) {
    std::vector<ExprFn> g;
    for (int i = 0; i < m; ++i) g.push_back(differentiate(f, i));
    grads.push_back(std::move(g));
  }
  const double clip = default_bbox();
  std::vector<std::vector<double>> points;
  Rng rng(seed);
  points = sample_open_cell(base, samples, rng, clip);
  std::vector<double> axis = boundary_refined_axis(m == 1 ? 16 : 6, m == 1 ? 30 : 8);
  axis.insert(axis.begin(), 0.0);
  axis.push_back(1.0);
  for_each_tensor(axis, m, [&](const std::vector<double>& t) {
    if (auto u = closure_point(base, t, clip)) points.push_back(std::move(*u));
  });
  for (const auto& u : points) {
    std::vector<std::vector<double>> jac;
    try {
      for (const auto& g : grads) {
        std::vector<double> row;
        for (const auto& d : g) row.push_back(evaluate(d, u));
        jac.push_back(std::move(row));
      }
    } catch (const Error&) {
      continue;
    }
    ++rep.samples;
    const double nrm = jacobian_norm(jac);
    if (nrm > rep.m_hat) {
      rep.m_hat = nrm;
      rep.witness = u;
    }
  }
  rep.l_hat = 1.0 / std::sqrt(1.0 + rep.m_hat * rep.m_hat);
  return rep;
}

// ---------------------------------------------------------------------------
// Regularity
// ---------------------------------------------------------------------------

RegularityReport check_lambda_regular(const ExprFn& f, const OpenCell& omega, int q, const RegularityGrid& grid) {
  if (f.arity() != omega.dim) fail(ErrorCode::kArityMismatch, "function arity != cell dimension");
  RegularityReport rep;
  rep.order = q;
  const auto derivs = all_derivatives(f, q);
  const auto idx = index_set(f.arity(), q);
  for (std::size_t k = 1; k < idx->size(); ++k) rep.entries.push_back({(*idx)[k], 0.0, 0.0, 1.0, {}});
  const double clip = default_bbox();

  auto run = [&](const std::vector<double>& axis, bool fine) {
    std::size_t used = 0;
    for_each_tensor(axis, omega.dim, [&](const std::vector<double>& t) {
      auto u = closure_point(omega, t, clip);
      if (!u) return;
      try {
        if (contains(omega, *u, 0.0) != Membership::kInside) return;
        const double d = boundary_distance(omega, *u);
        std::vector<double> vals;
        for (std::size_t k = 1; k < idx->size(); ++k) vals.push_back(evaluate(derivs[k], *u));
        ++used;
        for (std::size_t k = 1; k < idx->size(); ++k) {
          auto& e = rep.entries[k - 1];
          const double c = std::abs(vals[k - 1]) * std::pow(d, (*idx)[k].degree() - 1);
          double& slot = fine ? e.c_fine : e.c_coarse;
          if (c > slot) {
            slot = c;
            if (fine) e.witness = *u;
          }
        }
      } catch (const Error&) {
      }
    });
    return used;
  };
  rep.samples_coarse = run(boundary_refined_axis(grid.uniform, grid.depth), false);
  rep.samples_fine = run(boundary_refined_axis(2 * grid.uniform, 2 * grid.depth), true);
  for (auto& e : rep.entries) {
    if (e.c_coarse > 0) {
      e.ratio = e.c_fine / e.c_coarse;
    } else {
      e.ratio = e.c_fine > 1e-300 ? kInf : 1.0;
    }
    if (!(e.ratio < 2.0)) rep.plausibly_regular = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Distance sandwich
// ---------------------------------------------------------------------------

namespace {

// d(x, boundary of the graph cell): minimum over the faces of the parameter cube.
double boundary_set_distance(const Cell& cell, std::span<const double> x) {
  const int m = cell.intrinsic_dim();
  const double clip = clip_for(x, default_bbox());
  double best = kInf;
  for (int face = 0; face < m; ++face) {
    for (double side : {0.0, 1.0}) {
      // Skip faces that come from clipping an infinite side.
      if (m == 1) {
        const double end = side == 0.0 ? cell.base()->lo : cell.base()->hi;
        if (!std::isfinite(end)) continue;
      }
      auto g = [&](std::span<const double> s) -> std::optional<double> {
        std::vector<double> t;
        for (int i = 0, k = 0; i < m; ++i) t.push_back(i == face ? side : s[static_cast<std::size_t>(k++)]);
        auto p = cell.closure_embed(t, clip);
        if (!p) p = cell.closure_embed(nudge(t, 1e-9), clip);
        if (!p) return std::nullopt;
        return dist2(*p, x);
      };
      if (m == 1) {
        if (auto v = g({})) best = std::min(best, *v);
        continue;
      }
      const int per = grid_per_axis(m - 1);
      std::vector<double> best_t;
      double local = kInf;
      for_each_grid_point(m - 1, per, [&](const std::vector<double>& s) {
        if (auto v = g(s); v && *v < local) {
          local = *v;
          best_t = s;
        }
      });
      if (!best_t.empty()) local = polish(g, best_t, local, 1.0 / (per - 1));
      best = std::min(best, local);
    }
  }
  return best;
}

}  // namespace

std::vector<std::vector<double>> sandwich_samples(const Cell& cell, std::size_t count, Rng& rng) {
  std::vector<std::vector<double>> out;
  if (cell.is_point()) return out;
  const int m = cell.intrinsic_dim();
  const int n = cell.ambient_dim();
  const double bbox = default_bbox();
  const auto& base = *cell.base();
  auto with_normal = [&](std::vector<double> u, double scale) -> std::optional<std::vector<double>> {
    std::vector<double> y(u);
    try {
      for (const auto& f : cell.map()) y.push_back(evaluate(f, u) + rng.uniform(-1.0, 1.0) * scale);
    } catch (const Error&) {
      return std::nullopt;
    }
    return cell.to_ambient(y);
  };
  const std::size_t inside = count / 2;
  auto interior = sample_open_cell(base, inside, rng, std::min(bbox, 3.0));
  for (auto& u : interior) {
    if (auto x = with_normal(u, rng.log_uniform(1e-4, 2.0))) out.push_back(std::move(*x));
  }
  // Outside the cylinder: push interior samples across the base boundary.
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 200 * count) {
    ++attempts;
    std::vector<double> u;
    if (m == 1) {
      const bool left = rng.uniform() < 0.5;
      const double end = left ? base.lo : base.hi;
      if (!std::isfinite(end)) continue;
      const double s = rng.log_uniform(1e-4, 1.0);
      u = {left ? end - s : end + s};
    } else {
      auto in = sample_open_cell(base, 1, rng, std::min(bbox, 3.0));
      if (in.empty()) continue;
      u = in.front();
      for (double& v : u) v += rng.uniform(-1.5, 1.5);
      if (contains(base, u, 0.0) != Membership::kOutside) continue;
    }
    if (auto x = with_normal(u, rng.log_uniform(1e-3, 2.0))) {
      out.push_back(std::move(*x));
    } else {
      std::vector<double> y(u);
      for (int j = m; j < n; ++j) y.push_back(rng.uniform(-2.0, 2.0));
      out.push_back(cell.to_ambient(y));
    }
  }
  return out;
}

SandwichReport distance_sandwich_check(const Cell& cell, const LipschitzReport& lip,
                                       const std::vector<std::vector<double>>& samples, double eps) {
  SandwichReport rep;
  rep.l_hat = lip.l_hat;
  if (cell.is_point() || cell.map().empty()) fail(ErrorCode::kNotAGraphCell, "sandwich check needs a graph cell");
  const int m = cell.intrinsic_dim();
  const double clip = default_bbox();
  for (const auto& x : samples) {
    const auto y = cell.to_local(x);
    const auto u = std::span<const double>(y).first(static_cast<std::size_t>(m));
    DistanceOptions opts;
    opts.bracket = true;
    if (auto t = closure_param_of(*cell.base(), u, clip_for(x, clip))) opts.seeds.push_back(*t);
    const Distance d = cell_distance(cell, x, opts);
    rep.max_bracket_width = std::max(rep.max_bracket_width, d.upper - d.lower);
    bool violated = false;
    if (cell.in_cylinder(x)) {
      ++rep.inside_samples;
      double gap = 0.0;
      for (std::size_t j = 0; j < cell.map().size(); ++j) {
        const double w = y[static_cast<std::size_t>(m) + j] - evaluate(cell.map()[j], u);
        gap += w * w;
      }
      gap = std::sqrt(gap);
      rep.max_equality_gap = std::max(rep.max_equality_gap, std::abs(d.value - gap));
      violated = d.value > gap + eps || d.value < rep.l_hat * gap - eps;
    } else {
      ++rep.outside_samples;
      const double db = boundary_set_distance(cell, x);
      if (std::isfinite(db)) violated = d.value < rep.l_hat * db - eps;
    }
    if (violated) {
      ++rep.violations;
      if (rep.witnesses.size() < 10) rep.witnesses.push_back(x);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Simple separation and quasi-convexity
// ---------------------------------------------------------------------------

SeparationReport simply_separated_check(const SetDesc& a_cap_b, const SetDesc& b,
                                        const std::vector<std::vector<double>>& samples_of_a) {
  struct Item {
    double d_ab;
    double ratio;
  };
  std::vector<Item> items;
  for (const auto& x : samples_of_a) {
    const double db = set_distance(b, x).value;
    if (db <= 1e-12) continue;
    const double dab = set_distance(a_cap_b, x).value;
    items.push_back({dab, dab / db});
  }
  SeparationReport rep;
  rep.used = items.size();
  std::stable_sort(items.begin(), items.end(), [](const Item& l, const Item& r) { return l.d_ab > r.d_ab; });
  const std::size_t half = (items.size() + 1) / 2;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k < half) rep.m_coarse = std::max(rep.m_coarse, items[k].ratio);
    rep.m_fine = std::max(rep.m_fine, items[k].ratio);
  }
  rep.simply_separated = rep.m_fine <= 2.0 * rep.m_coarse || rep.m_fine == 0.0;
  return rep;
}

QuasiConvexityReport quasi_convexity_probe(const Cell& cell,
                                           const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
                                           int mesh_per_axis) {
  QuasiConvexityReport rep;
  if (cell.is_point()) {
    rep.pairs = pairs.size();
    return rep;
  }
  const int m = cell.intrinsic_dim();
  const double clip = default_bbox();
  const int per = std::max(2, mesh_per_axis);
  std::vector<std::vector<double>> nodes;
  std::vector<long> node_of(static_cast<std::size_t>(std::pow(per, m)), -1);
  std::size_t flat = 0;
  for_each_grid_point(m, per, [&](const std::vector<double>& t) {
    if (auto p = cell.closure_embed(t, clip)) {
      node_of[flat] = static_cast<long>(nodes.size());
      nodes.push_back(std::move(*p));
    }
    ++flat;
  });
  rep.nodes = nodes.size();
  if (nodes.empty()) fail(ErrorCode::kMeshDisconnected, "no mesh nodes inside the cell");

  // Neighbours: all offsets in {-1,0,1}^m except 0.
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes.size());
  std::vector<int> coord(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < node_of.size(); ++k) {
    if (node_of[k] < 0) continue;
    std::size_t rem = k;
    for (int i = 0; i < m; ++i) {
      coord[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(per));
      rem /= static_cast<std::size_t>(per);
    }
    const int offsets = static_cast<int>(std::pow(3, m));
    for (int o = 0; o < offsets; ++o) {
      int code = o;
      std::size_t other = 0;
      std::size_t stride = 1;
      bool valid = true;
      bool zero = true;
      for (int i = 0; i < m; ++i) {
        const int d = code % 3 - 1;
        code /= 3;
        if (d != 0) zero = false;
        const int c = coord[static_cast<std::size_t>(i)] + d;
        if (c < 0 || c >= per) valid = false;
        other += static_cast<std::size_t>(c) * stride;
        stride *= static_cast<std::size_t>(per);
      }
      if (!valid || zero || node_of[other] < 0) continue;
      const auto a = static_cast<std::size_t>(node_of[k]);
      const auto b = static_cast<std::size_t>(node_of[other]);
      adj[a].push_back({b, dist2(nodes[a], nodes[b])});
    }
  }
  auto nearest = [&](const std::vector<double>& p) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double d = dist2(nodes[i], p);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return std::make_pair(best, bd);
  };
  for (const auto& [a, b] : pairs) {
    ++rep.pairs;
    const double chord = dist2(a, b);
    if (chord == 0.0) continue;
    const auto [sa, da] = nearest(a);
    const auto [sb, db] = nearest(b);
    std::vector<double> dist(nodes.size(), kInf);
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    dist[sa] = 0.0;
    pq.push({0.0, sa});
    while (!pq.empty()) {
      const auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      if (v == sb) break;
      for (const auto& [w, len] : adj[v]) {
        if (d + len < dist[w]) {
          dist[w] = d + len;
          pq.push({dist[w], w});
        }
      }
    }
    if (!std::isfinite(dist[sb])) fail(ErrorCode::kMeshDisconnected, "mesh too coarse to connect the pair");
    rep.constant = std::max(rep.constant, (dist[sb] + da + db) / chord);
  }
  return rep;
}

}  // namespace whitney
