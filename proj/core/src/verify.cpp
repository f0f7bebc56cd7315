#include "whitney/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "whitney/error.hpp"
#include "whitney/random.hpp"

namespace whitney {

RateFit rate_fit(const std::vector<std::pair<double, double>>& samples, double e, double margin, double theta) {
  RateFit fit;
  fit.required = e;
  auto sorted = samples;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (sorted.size() < 6) fail(ErrorCode::kDegenerateScales, "need at least 6 scales");
  if (!(sorted.back().first > 0.0) || sorted.front().first / sorted.back().first < 100.0 * (1.0 - 1e-12)) {
    fail(ErrorCode::kDegenerateScales, "scales must be positive and span at least two decades");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  fit.all_zero = true;
  for (const auto& [s, v] : sorted) {
    const double a = std::abs(v);
    fit.scales.push_back(s);
    fit.normalized.push_back(a / std::pow(s, e));
    if (a == 0.0) continue;
    fit.all_zero = false;
    const double lx = std::log(s);
    const double ly = std::log(a);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++count;
  }
  if (fit.all_zero) {
    fit.slope_pass = fit.decay_pass = fit.pass = true;
    return fit;
  }
  if (count >= 3) {
    const double k = static_cast<double>(count);
    const double denom = k * sxx - sx * sx;
    fit.slope = (k * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / k;
    double ss = 0.0;
    for (const auto& [s, v] : sorted) {
      if (v == 0.0) continue;
      const double r = std::log(std::abs(v)) - (fit.intercept + fit.slope * std::log(s));
      ss += r * r;
    }
    fit.residual = std::sqrt(ss / k);
    fit.slope_pass = fit.slope >= e + margin;
  }
  bool monotone = true;
  for (std::size_t j = 1; j < fit.normalized.size(); ++j)
    monotone = monotone && fit.normalized[j] <= fit.normalized[j - 1] * (1.0 + 1e-12);
  fit.decay_pass = monotone && fit.normalized.back() < theta;
  fit.pass = fit.slope_pass || fit.decay_pass;
  return fit;
}

const char* to_string(PairGenerator g) { return g == PairGenerator::kRadial ? "radial" : "ball"; }

namespace {

std::vector<double> default_scales() {
  std::vector<double> out;
  for (int k = 0; k < 8; ++k) out.push_back(1e-1 * std::pow(10.0, -3.0 * k / 7.0));
  return out;
}

bool inside(const Cell& cell, const std::vector<double>& u) {
  return contains(*cell.base(), u, 0.0) == Membership::kInside;
}

std::vector<double> unit_vector(int m, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(m));
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

std::optional<std::pair<std::vector<double>, std::vector<double>>> make_pair(const Cell& cell, std::span<const double> uc,
                                                                            double s, PairGenerator gen, Rng& rng) {
  const int m = cell.intrinsic_dim();
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto v = unit_vector(m, rng);
    std::vector<double> a(uc.begin(), uc.end());
    std::vector<double> b(uc.begin(), uc.end());
    if (gen == PairGenerator::kRadial) {
      for (int i = 0; i < m; ++i) a[static_cast<std::size_t>(i)] += s * v[static_cast<std::size_t>(i)];
      for (int i = 0; i < m; ++i) b[static_cast<std::size_t>(i)] -= s * v[static_cast<std::size_t>(i)];
      if (!inside(cell, b)) {
        b.assign(uc.begin(), uc.end());
        for (int i = 0; i < m; ++i) b[static_cast<std::size_t>(i)] += 2.0 * s * v[static_cast<std::size_t>(i)];
      }
    } else {
      const auto w = unit_vector(m, rng);
      const double ra = s * std::pow(rng.uniform(), 1.0 / m);
      const double rb = s * std::pow(rng.uniform(), 1.0 / m);
      for (int i = 0; i < m; ++i) {
        a[static_cast<std::size_t>(i)] += ra * v[static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(i)] += rb * w[static_cast<std::size_t>(i)];
      }
    }
    if (a != b && inside(cell, a) && inside(cell, b)) return std::make_pair(std::move(a), std::move(b));
  }
  return std::nullopt;
}

bool exactly_evaluable(const FieldSpec& field, const Cell& cell) {
  for (const auto& c : field.coeffs)
    if (!c.exact_evaluable()) return false;
  for (const auto& f : cell.map())
    if (!f.exact_evaluable()) return false;
  return true;
}

double residual_double(const FieldSpec& field, const Cell& cell, const std::vector<double>& ua,
                       const std::vector<double>& ub, const MultiIndex& beta, double& sep) {
  const auto Fa = field.jet_at(cell, ua);
  const auto Fb = field.jet_at(cell, ub);
  std::vector<double> off;
  double mag = std::abs(Fa[beta]);
  sep = 0.0;
  for (std::size_t i = 0; i < Fa.base().size(); ++i) {
    off.push_back(Fa.base()[i] - Fb.base()[i]);
    sep += off.back() * off.back();
  }
  sep = std::sqrt(sep);
  const auto shifted = derivative_shift(Fb, beta);
  for (double c : shifted.coeffs()) mag += std::abs(c);
  const double R = Fa[beta] - jet_eval(shifted, off);
  // Below this the residual is rounding noise.
  return std::abs(R) <= 1e-13 * (1.0 + mag) ? 0.0 : R;
}

double residual_exact(const FieldSpec& field, const Cell& cell, const std::vector<double>& ua,
                      const std::vector<double>& ub, const MultiIndex& beta, double& sep) {
  std::vector<Rational> qa, qb;
  for (double c : ua) qa.push_back(rational_from_double(c));
  for (double c : ub) qb.push_back(rational_from_double(c));
  const auto Fa = field.jet_exact(cell, qa);
  const auto Fb = field.jet_exact(cell, qb);
  std::vector<Rational> off;
  sep = 0.0;
  for (std::size_t i = 0; i < Fa.base().size(); ++i) {
    off.push_back(Fa.base()[i] - Fb.base()[i]);
    const double d = to_double(off.back());
    sep += d * d;
  }
  sep = std::sqrt(sep);
  const Rational R = Fa[beta] - jet_eval(derivative_shift(Fb, beta), off);
  return to_double(R);
}

}  // namespace

std::vector<ResidualSample> whitney_residual(const FieldSpec& field, const Cell& cell, std::span<const double> uc,
                                             const MultiIndex& beta, const ResidualOptions& opts, bool* exact) {
  if (cell.is_point()) fail(ErrorCode::kNotAGraphCell, "pairs cannot converge inside a point stratum");
  if (beta.degree() > field.p) fail(ErrorCode::kShapeMismatch, "|beta| exceeds the field order");
  bool use_exact = opts.allow_exact && exactly_evaluable(field, cell);
  const auto scales = opts.scales.empty() ? default_scales() : opts.scales;
  Rng rng(opts.seed ^ (opts.generator == PairGenerator::kRadial ? 0x7ad1a1ull : 0xba11ull));
  std::vector<ResidualSample> out;
  for (double s : scales) {
    for (int k = 0; k < opts.pairs_per_scale; ++k) {
      const auto pair = make_pair(cell, uc, s, opts.generator, rng);
      if (!pair) continue;
      ResidualSample rs;
      rs.beta = beta;
      rs.scale = s;
      try {
        if (use_exact) {
          try {
            rs.R = residual_exact(field, cell, pair->first, pair->second, beta, rs.s);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kNotExact) throw;
            use_exact = false;
          }
        }
        if (!use_exact) rs.R = residual_double(field, cell, pair->first, pair->second, beta, rs.s);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularPoint && e.code() != ErrorCode::kPiecewiseGap) throw;
        continue;
      }
      rs.a = cell.embed(pair->first);
      rs.b = cell.embed(pair->second);
      out.push_back(std::move(rs));
    }
  }
  if (exact) *exact = use_exact;
  return out;
}

std::vector<std::pair<double, double>> max_residual_per_scale(const std::vector<ResidualSample>& samples) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : samples) {
    if (pts.empty() || pts.back().first != r.scale) pts.emplace_back(r.scale, 0.0);
    pts.back().second = std::max(pts.back().second, std::abs(r.R));
  }
  return pts;
}

WhitneyReport check_whitney(const Scene& scene, std::uint64_t seed) {
  WhitneyReport rep;
  const double clip = default_bbox();
  for (const auto& s : scene.strata) {
    if (s.cell->is_point()) continue;
    const int m = s.dim();
    const auto& base = *s.cell->base();
    std::vector<std::vector<double>> targets;
    auto add_target = [&](const std::vector<double>& t) {
      const auto u = closure_point(base, t, clip);
      if (!u) return;
      for (double c : *u)
        if (std::abs(c) >= 0.999 * clip) return;
      targets.push_back(*u);
    };
    add_target(std::vector<double>(static_cast<std::size_t>(m), 0.5));
    for (int i = 0; i < m; ++i) {
      for (double end : {0.0, 1.0}) {
        std::vector<double> t(static_cast<std::size_t>(m), 0.5);
        t[static_cast<std::size_t>(i)] = end;
        add_target(t);
      }
    }
    const FieldSpec& field = scene.field(s.id);
    for (const auto& uc : targets) {
      for (const auto& beta : index_set(scene.n, scene.p)->list()) {
        for (auto gen : {PairGenerator::kRadial, PairGenerator::kBall}) {
          ResidualOptions opts;
          opts.generator = gen;
          opts.seed = seed ^ stable_hash(s.id);
          WhitneySeries series;
          series.stratum = s.id;
          series.target = s.cell->embed(uc);
          series.generator = gen;
          series.beta = beta;
          const auto samples = whitney_residual(field, *s.cell, uc, beta, opts, &series.exact);
          const auto pts = max_residual_per_scale(samples);
          for (const auto& pt : pts) series.max_residual.push_back(pt.second);
          series.fit = rate_fit(pts, scene.p - beta.degree());
          rep.pass = rep.pass && series.fit.pass;
          rep.series.push_back(std::move(series));
        }
      }
    }
  }
  return rep;
}

ExtensionCheckReport check_extension(const ScalarFn& f, const Scene& scene, const CheckOptions& opts) {
  ExtensionCheckReport rep;
  rep.tol = opts.tol;
  const auto idx = index_set(scene.n, scene.p);
  for (const auto& s : scene.strata) {
    StratumCheck sc;
    sc.stratum = s.id;
    for (const auto& a : idx->list()) sc.alphas.push_back({a, 0.0, {}});
    const FieldSpec& field = scene.field(s.id);
    std::vector<std::vector<double>> params;
    if (s.cell->is_point()) {
      params.push_back({0.0});
    } else {
      Rng rng(opts.seed ^ stable_hash(s.id));
      params = sample_open_cell(*s.cell->base(), opts.samples_per_stratum, rng, std::min(default_bbox(), 5.0));
    }
    const SetDesc frontier = scene.set_of(s.boundary);
    for (const auto& u : params) {
      std::vector<double> values;
      std::vector<double> x;
      try {
        const auto F = field.jet_at(*s.cell, u);
        x = F.base();
        const double d = frontier.empty() ? kInf : set_distance(frontier, x).value;
        const double h0 = std::min(1e-3, d / 10.0);
        for (std::size_t k = 0; k < idx->size(); ++k) {
          const auto fd = finite_difference_adaptive(f, (*idx)[k], x, h0);
          values.push_back(std::abs(fd.value - F.at(k)) / (1.0 + std::abs(F.at(k))));
        }
      } catch (const Error& e) {
        ++sc.failures;
        continue;
      }
      ++sc.samples;
      for (std::size_t k = 0; k < values.size(); ++k) {
        auto& dev = sc.alphas[k];
        if (!(values[k] <= dev.max_rel)) {
          dev.max_rel = std::isnan(values[k]) ? kInf : values[k];
          dev.witness = x;
        }
        sc.max_rel = std::max(sc.max_rel, dev.max_rel);
      }
    }
    sc.pass = sc.failures == 0 && sc.max_rel < opts.tol;
    rep.max_rel = std::max(rep.max_rel, sc.max_rel);
    rep.pass = rep.pass && sc.pass;
    rep.strata.push_back(std::move(sc));
  }
  return rep;
}

}  // namespace whitney
