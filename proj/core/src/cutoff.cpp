#include "whitney/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalar_ops.hpp"
#include "whitney/error.hpp"
#include "whitney/numdiff.hpp"

namespace whitney {
namespace {

using ops::Jet;

double choose(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

template <class S>
void add_wall_terms(const OpenCell& cell, const std::vector<S>& u, int k, S& acc) {
  const S& t = u[static_cast<std::size_t>(cell.dim - 1)];
  if (cell.dim == 1) {
    if (std::isfinite(cell.lo)) acc = acc + ops::positive_pow(ops::constant(t, cell.lo) - t, k);
    if (std::isfinite(cell.hi)) acc = acc + ops::positive_pow(t - ops::constant(t, cell.hi), k);
    return;
  }
  const std::vector<S> prefix(u.begin(), u.begin() + (cell.dim - 1));
  add_wall_terms(*cell.base, prefix, k, acc);
  try {
    if (cell.lower) acc = acc + ops::positive_pow(ops::call(*cell.lower, prefix) - t, k);
    if (cell.upper) acc = acc + ops::positive_pow(t - ops::call(*cell.upper, prefix), k);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularPoint && e.code() != ErrorCode::kPiecewiseGap) throw;
  }
}

template <class S>
S piece_surrogate(const Cell& cell, const std::vector<S>& xs, int k) {
  if (cell.is_point()) {
    S sq = ops::constant(xs[0], 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const S d = ops::add_const(xs[i], -cell.coords()[i]);
      sq = sq + d * d;
    }
    if (ops::val(sq) <= 0.0) return ops::constant(xs[0], 0.0);
    return ops::real_pow(sq, 0.5);
  }
  const int m = cell.intrinsic_dim();
  std::vector<S> y;
  for (int p : cell.perm()) y.push_back(xs[static_cast<std::size_t>(p)]);
  const std::vector<S> u(y.begin(), y.begin() + m);
  S acc = ops::constant(xs[0], 0.0);
  if (!cell.map().empty()) {
    S normal = ops::constant(xs[0], 0.0);
    try {
      for (std::size_t j = 0; j < cell.map().size(); ++j) {
        const S d = y[static_cast<std::size_t>(m) + j] - ops::call(cell.map()[j], u);
        normal = normal + d * d;
      }
      acc = ops::ipow(normal, k / 2);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularPoint && e.code() != ErrorCode::kPiecewiseGap) throw;
    }
  }
  add_wall_terms(*cell.base(), u, k, acc);
  if (ops::val(acc) <= 0.0) return ops::constant(xs[0], 0.0);
  return ops::real_pow(acc, 1.0 / k);
}

std::vector<double> random_direction(int n, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (auto& c : v) {
      c = rng.uniform(-1.0, 1.0);
      norm += c * c;
    }
  }
  norm = std::sqrt(norm);
  for (auto& c : v) c /= norm;
  return v;
}

std::optional<std::vector<double>> random_point_on(const Cell& cell, Rng& rng, double clip) {
  if (cell.is_point()) return cell.coords();
  std::vector<double> t(static_cast<std::size_t>(cell.intrinsic_dim()));
  for (auto& c : t) c = rng.uniform();
  return cell.closure_embed(t, clip);
}

}  // namespace

TransitionProfile smooth_transition(int q) {
  if (q < 0) fail(ErrorCode::kShapeMismatch, "q must be non-negative");
  TransitionProfile out;
  out.q = q;
  out.coeffs.assign(static_cast<std::size_t>(2 * q + 2), 0.0);
  out.coeffs[0] = 1.0;
  for (int k = 0; k <= q; ++k) {
    const double c = choose(q + k, k) * choose(2 * q + 1, q - k) * ((k % 2) ? -1.0 : 1.0);
    out.coeffs[static_cast<std::size_t>(q + 1 + k)] -= c;
  }
  return out;
}

double TransitionProfile::value(double s) const {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return ops::poly(coeffs, s);
}

std::vector<double> TransitionProfile::derivatives(double s, int order) const {
  std::vector<double> out(static_cast<std::size_t>(order + 1), 0.0);
  out[0] = value(s);
  if (s <= 0.0 || s >= 1.0) return out;
  std::vector<double> cur(coeffs);
  for (int k = 1; k <= order; ++k) {
    std::vector<double> next;
    for (std::size_t i = 1; i < cur.size(); ++i) next.push_back(cur[i] * static_cast<double>(i));
    cur = std::move(next);
    out[static_cast<std::size_t>(k)] = ops::poly(cur, s);
  }
  return out;
}

RegularizedDistance::RegularizedDistance(SetDesc desc, int q) : desc_(std::move(desc)), k_(2 * (q + 1)) {}

template <class S>
S RegularizedDistance::eval(const std::vector<S>& xs) const {
  if (desc_.empty()) return ops::constant(xs[0], 1.0);
  if (desc_.pieces.size() == 1) return piece_surrogate(*desc_.pieces[0], xs, k_);
  S acc = ops::constant(xs[0], 0.0);
  for (const auto& piece : desc_.pieces) {
    const S d = piece_surrogate(*piece, xs, k_);
    if (ops::val(d) <= 0.0) return ops::constant(xs[0], 0.0);
    acc = acc + ops::real_pow(d, -softmin_);
  }
  return ops::real_pow(acc, -1.0 / softmin_);
}

double RegularizedDistance::value(std::span<const double> x) const {
  return eval(std::vector<double>(x.begin(), x.end()));
}

PointJet<double> RegularizedDistance::jet(std::span<const double> x, int order) const {
  return eval(ops::inputs(x, order));
}

void RegularizedDistance::calibrate(const std::vector<std::vector<double>>& samples, double safety) {
  comp_ = {};
  if (desc_.empty()) return;
  double lo = kInf;
  double hi = 0.0;
  for (const auto& x : samples) {
    const double d = set_distance(desc_, x).value;
    if (!(d > 1e-9) || !std::isfinite(d)) continue;
    const double r = value(x) / d;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    ++comp_.samples;
  }
  if (comp_.samples == 0) return;
  comp_.c1 = lo / safety;
  comp_.c2 = hi * safety;
}

void bounding_box(const std::vector<const SetDesc*>& sets, int n, double margin, std::vector<double>& lo,
                  std::vector<double>& hi) {
  lo.assign(static_cast<std::size_t>(n), kInf);
  hi.assign(static_cast<std::size_t>(n), -kInf);
  const double clip = default_bbox();
  auto absorb = [&](const std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);
    }
  };
  for (const SetDesc* s : sets) {
    for (const auto& piece : s->pieces) {
      if (piece->is_point()) {
        absorb(piece->coords());
        continue;
      }
      const int m = piece->intrinsic_dim();
      const int per_axis = m == 1 ? 33 : (m == 2 ? 9 : 5);
      std::vector<int> idx(static_cast<std::size_t>(m), 0);
      std::vector<double> t(static_cast<std::size_t>(m));
      while (true) {
        for (int i = 0; i < m; ++i) t[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)] / double(per_axis - 1);
        if (auto x = piece->closure_embed(t, clip)) absorb(*x);
        int i = 0;
        while (i < m && ++idx[static_cast<std::size_t>(i)] == per_axis) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == m) break;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (lo[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) {
      lo[static_cast<std::size_t>(i)] = 0.0;
      hi[static_cast<std::size_t>(i)] = 0.0;
    }
    lo[static_cast<std::size_t>(i)] -= margin;
    hi[static_cast<std::size_t>(i)] += margin;
  }
}

std::vector<std::vector<double>> calibration_points(const std::vector<const SetDesc*>& sets, int n,
                                                    std::size_t count, Rng& rng) {
  std::vector<double> lo, hi;
  bounding_box(sets, n, 1.0, lo, hi);
  std::vector<CellPtr> pieces;
  for (const SetDesc* s : sets) pieces.insert(pieces.end(), s->pieces.begin(), s->pieces.end());
  std::vector<std::vector<double>> out;
  out.reserve(count);
  const double clip = default_bbox();
  for (std::size_t k = 0; k < count; ++k) {
    if (pieces.empty() || k % 3 == 2) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = rng.uniform(lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
      out.push_back(std::move(x));
      continue;
    }
    const auto& piece = pieces[static_cast<std::size_t>(rng.below(pieces.size()))];
    auto base = random_point_on(*piece, rng, clip);
    if (!base) continue;
    const double r = rng.log_uniform(1e-3, 2.0);
    const auto dir = random_direction(n, rng);
    for (int i = 0; i < n; ++i) (*base)[static_cast<std::size_t>(i)] += r * dir[static_cast<std::size_t>(i)];
    out.push_back(std::move(*base));
  }
  return out;
}

double CutoffFn::ratio(std::span<const double> x) const {
  const double dz = state_->dz.value(x);
  if (dz <= 0.0) fail(ErrorCode::kOnZ, "ratio undefined on Z");
  return state_->dw.value(x) / dz;
}

double CutoffFn::value(std::span<const double> x) const {
  const State& s = *state_;
  if (s.spec.W.empty()) return 0.0;
  const double dz = s.dz.value(x);
  if (dz <= 0.0) return 0.0;
  const double r = s.dw.value(x) / dz;
  if (r <= s.rho_s) return 1.0;
  if (r >= s.eta_s) return 0.0;
  return s.profile.value((r - s.rho_s) / (s.eta_s - s.rho_s));
}

PointJet<double> CutoffFn::jet(std::span<const double> x, int order) const {
  const State& s = *state_;
  const int n = static_cast<int>(x.size());
  const std::vector<double> base(x.begin(), x.end());
  if (s.spec.W.empty()) return Jet::constant(n, order, base, 0.0);
  const double dzv = s.dz.value(x);
  if (dzv <= 0.0) return Jet::constant(n, order, base, 0.0);
  const double rv = s.dw.value(x) / dzv;
  if (rv <= s.rho_s) return Jet::constant(n, order, base, 1.0);
  if (rv >= s.eta_s) return Jet::constant(n, order, base, 0.0);
  const Jet dw = s.dw.jet(x, order);
  const Jet dz = s.dz.jet(x, order);
  const Jet r = dw * ops::real_pow(dz, -1.0);
  const Jet t = ops::scale(ops::add_const(r, -s.rho_s), 1.0 / (s.eta_s - s.rho_s));
  return apply_univariate(t, s.profile.derivatives(t.value(), order));
}

CutoffFn build_cutoff(const CutoffSpec& spec) {
  if (!(spec.eta > 0.0)) fail(ErrorCode::kShapeMismatch, "eta must be positive");
  if (spec.rho && !(*spec.rho > 0.0 && *spec.rho < spec.eta)) fail(ErrorCode::kShapeMismatch, "rho must lie in (0, eta)");
  auto state = std::make_shared<CutoffFn::State>();
  state->spec = spec;
  state->profile = smooth_transition(spec.q);
  state->dw = RegularizedDistance(spec.W, spec.q);
  state->dz = RegularizedDistance(spec.Z, spec.q);
  Rng rng(spec.seed);
  const auto samples = calibration_points({&spec.W, &spec.Z}, spec.n, spec.calibration_samples, rng);
  state->dw.calibrate(samples, spec.safety);
  state->dz.calibrate(samples, spec.safety);
  const Comparability& cw = state->dw.comparability();
  const Comparability& cz = state->dz.comparability();
  // d~W/d~Z in [cw.c1/cz.c2, cw.c2/cz.c1] times the true ratio.
  const double lo = cw.c1 / cz.c2;
  const double hi = cw.c2 / cz.c1;
  if (hi / lo > spec.max_slack) {
    std::ostringstream os;
    os << "regularized distances too loose: ratio slack " << hi / lo << " > " << spec.max_slack;
    fail(ErrorCode::kSlackTooLarge, os.str());
  }
  state->eta_s = spec.eta * lo;
  if (spec.rho) {
    state->rho_s = *spec.rho * hi;
    state->rho_prime = *spec.rho;
    if (state->rho_s >= state->eta_s) {
      std::ostringstream os;
      os << "rho = " << *spec.rho << " does not fit below eta = " << spec.eta << " with slack " << hi / lo;
      fail(ErrorCode::kSlackTooLarge, os.str());
    }
  } else {
    state->rho_s = state->eta_s / 2.0;
    state->rho_prime = state->rho_s / hi;
  }
  CutoffFn out;
  out.state_ = std::move(state);
  return out;
}

const char* to_string(GMembership g) {
  switch (g) {
    case GMembership::kIn: return "in";
    case GMembership::kOut: return "out";
    case GMembership::kIndeterminate: return "indeterminate";
  }
  return "?";
}

GMembership in_g_eta(std::span<const double> x, const SetDesc& W, const SetDesc& Z, double eta) {
  DistanceOptions opts;
  opts.bracket = true;
  const Distance dz = set_distance(Z, x, opts);
  if (!Z.empty() && dz.upper <= 1e-12) fail(ErrorCode::kOnZ, "point lies on Z");
  if (W.empty()) return GMembership::kOut;
  const Distance dw = set_distance(W, x, opts);
  if (dw.upper < eta * dz.lower) return GMembership::kIn;
  if (dw.lower >= eta * dz.upper) return GMembership::kOut;
  return GMembership::kIndeterminate;
}

CutoffReport verify_cutoff(const CutoffFn& omega, const CutoffCheckOptions& opts) {
  const CutoffSpec& spec = omega.spec();
  const int n = spec.n;
  CutoffReport rep;
  rep.eta = spec.eta;
  rep.rho_prime = omega.rho_prime();
  rep.eta_s = omega.eta_s();
  rep.rho_s = omega.rho_s();
  rep.w = omega.dw().comparability();
  rep.z = omega.dz().comparability();

  auto note = [&](const std::vector<double>& x) {
    if (rep.witnesses.size() < 8) rep.witnesses.push_back(x);
  };

  Rng rng(opts.seed ^ 0x5eed);
  const auto samples = calibration_points({&spec.W, &spec.Z}, n, opts.samples, rng);
  for (const auto& x : samples) {
    const double dz = set_distance(spec.Z, x).value;
    if (!spec.Z.empty() && dz <= opts.exclusion) {
      ++rep.excluded;
      continue;
    }
    ++rep.samples;
    const double v = omega.value(x);
    if (!(v >= 0.0 && v <= 1.0)) {
      ++rep.range_failures;
      note(x);
    }
    if (spec.W.empty()) {
      ++rep.support_samples;
      if (v != 0.0) ++rep.support_failures, note(x);
      continue;
    }
    const double dw = set_distance(spec.W, x).value;
    if (dw < rep.rho_prime * dz * (1.0 - 1e-9)) {
      ++rep.plateau_samples;
      if (v != 1.0) ++rep.plateau_failures, note(x);
    } else if (dw >= spec.eta * dz * (1.0 + 1e-9)) {
      ++rep.support_samples;
      if (v != 0.0) ++rep.support_failures, note(x);
    }
  }
  rep.plateau_ok = rep.plateau_failures == 0;
  rep.support_ok = rep.support_failures == 0 && rep.range_failures == 0;

  std::vector<double> lo, hi;
  bounding_box({&spec.W, &spec.Z}, n, 1.0, lo, hi);
  const ScalarFn f = [&omega](std::span<const double> x) { return omega.value(x); };
  const auto idx = index_set(n, spec.q);
  for (std::size_t k = 1; k < idx->size(); ++k) rep.bounds.push_back({(*idx)[k], 0.0, 0.0, 1.0, {}});

  // Scaled derivative |D^alpha omega(x)| d(x,Z)^{|alpha|}; -1 where x is excluded.
  auto scaled = [&](const MultiIndex& alpha, std::span<const double> x) {
    const double dz = set_distance(spec.Z, x).value;
    if (!spec.Z.empty() && dz <= opts.exclusion) return -1.0;
    return std::abs(finite_difference(f, alpha, x, dz / 100.0).value) * std::pow(dz, alpha.degree());
  };
  struct Candidate {
    double value;
    std::vector<double> x;
  };
  constexpr std::size_t kClimbers = 6;

  // Derivatives vanish off the shell rho_s < r < eta_s; both levels add shell
  // samples, the fine level extending the coarse list.
  std::vector<std::vector<double>> shell;
  if (!spec.W.empty()) {
    Rng shell_rng(opts.seed ^ 0x54e11);
    for (int round = 0; round < 64 && shell.size() < opts.grid_fine; ++round) {
      for (auto& y : calibration_points({&spec.W, &spec.Z}, n, opts.grid_fine, shell_rng)) {
        if (shell.size() == opts.grid_fine) break;
        if (!spec.Z.empty() && set_distance(spec.Z, y).value <= opts.exclusion) continue;
        const double r = omega.ratio(y);
        if (r > omega.rho_s() && r < omega.eta_s()) shell.push_back(std::move(y));
      }
    }
  }

  for (int level = 0; level < 2; ++level) {
    const std::size_t total = level == 0 ? opts.grid_coarse : opts.grid_fine;
    const int per_axis = std::max(2, static_cast<int>(std::lround(std::pow(static_cast<double>(total), 1.0 / n))));
    std::vector<std::vector<Candidate>> best(rep.bounds.size());
    std::vector<int> g(static_cast<std::size_t>(n), 0);
    std::vector<double> x(static_cast<std::size_t>(n));
    while (true) {
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        x[ui] = lo[ui] + (hi[ui] - lo[ui]) * (g[ui] + 0.5) / per_axis;
      }
      const double dz = set_distance(spec.Z, x).value;
      if (spec.Z.empty() || dz > opts.exclusion) {
        const double h = dz / 100.0;
        for (std::size_t b = 0; b < rep.bounds.size(); ++b) {
          const MultiIndex& alpha = rep.bounds[b].alpha;
          const double d = std::abs(finite_difference(f, alpha, x, h).value) * std::pow(dz, alpha.degree());
          auto& top = best[b];
          if (top.size() < kClimbers || d > top.back().value) {
            if (top.size() == kClimbers) top.pop_back();
            top.push_back({d, x});
            std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& c) { return a.value > c.value; });
          }
        }
      }
      int i = 0;
      while (i < n && ++g[static_cast<std::size_t>(i)] == per_axis) g[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
    }
    const std::size_t shell_count = std::min(shell.size(), total);
    for (std::size_t j = 0; j < shell_count; ++j) {
      for (std::size_t b = 0; b < rep.bounds.size(); ++b) {
        const double d = scaled(rep.bounds[b].alpha, shell[j]);
        auto& top = best[b];
        if (top.size() < kClimbers || d > top.back().value) {
          if (top.size() == kClimbers) top.pop_back();
          top.push_back({d, shell[j]});
          std::sort(top.begin(), top.end(), [](const Candidate& a, const Candidate& c) { return a.value > c.value; });
        }
      }
    }
    // The transition shell can be thinner than the grid spacing, so the best
    // grid points are polished by a compass search down to 1/256 of a cell.
    for (std::size_t b = 0; b < rep.bounds.size(); ++b) {
      auto& bound = rep.bounds[b];
      double& slot = level == 0 ? bound.c_coarse : bound.c_fine;
      for (auto cand : best[b]) {
        double step = 0.5 * (hi[0] - lo[0]) / per_axis;
        for (int i = 1; i < n; ++i) step = std::min(step, 0.5 * (hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / per_axis);
        const double stop = step / 128.0;
        while (step >= stop) {
          bool moved = false;
          for (int i = 0; i < n && !moved; ++i) {
            for (double dir : {1.0, -1.0}) {
              auto y = cand.x;
              y[static_cast<std::size_t>(i)] += dir * step;
              const double v = scaled(bound.alpha, y);
              if (v > cand.value) {
                cand = {v, std::move(y)};
                moved = true;
                break;
              }
            }
          }
          if (!moved) step /= 2;
        }
        if (cand.value > slot) {
          slot = cand.value;
          if (level == 1) bound.witness = cand.x;
        }
      }
    }
  }
  for (auto& b : rep.bounds) {
    b.ratio = b.c_coarse > 0.0 ? b.c_fine / b.c_coarse : (b.c_fine > 1e-12 ? kInf : 1.0);
    if (!(b.ratio < 2.0)) rep.bounds_stable = false;
  }
  rep.pass = rep.plateau_ok && rep.support_ok && rep.bounds_stable;
  return rep;
}

}  // namespace whitney
