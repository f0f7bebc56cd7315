#include "whitney/extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "scalar_ops.hpp"
#include "whitney/error.hpp"
#include "whitney/random.hpp"

namespace whitney {
namespace {

using ops::Jet;

template <class S>
S taylor_poly(const PointJet<double>& t, const std::vector<S>& xs) {
  const auto& idx = t.indices();
  const int n = idx.dim();
  const int p = idx.order();
  std::vector<std::vector<S>> pw(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& row = pw[static_cast<std::size_t>(i)];
    const S d = ops::add_const(xs[static_cast<std::size_t>(i)], -t.base()[static_cast<std::size_t>(i)]);
    row.push_back(ops::constant(xs[0], 1.0));
    for (int e = 1; e <= p; ++e) row.push_back(row.back() * d);
  }
  S acc = ops::constant(xs[0], 0.0);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (t.at(k) == 0.0) continue;
    S term = ops::constant(xs[0], t.at(k) / static_cast<double>(idx.factorial(k)));
    for (int i = 0; i < n; ++i) {
      const int a = idx[k][i];
      if (a) term = term * pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
    }
    acc = acc + term;
  }
  return acc;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string formula_hash(const FieldSpec& field, const Cell& cell) {
  std::string text;
  for (const auto& c : field.coeffs) text += c.to_string() + ";";
  for (const auto& f : cell.map()) text += f.to_string() + ";";
  for (int p : cell.perm()) text += std::to_string(p) + ",";
  for (double c : cell.coords()) text += std::to_string(c) + ",";
  return hex(stable_hash(text));
}

std::vector<double> zero_arg(const Cell& cell, std::span<const double> u) {
  if (cell.is_point()) return {0.0};
  return {u.begin(), u.end()};
}

struct CutoffChoice {
  CutoffFn omega;
  double eta = 0.5;
  int halvings = 0;
};

/// Halves eta until sampled points of G_eta(W, Z) and of the support of omega
/// stay inside the open cylinder over the base.
CutoffChoice choose_cell_cutoff(const Scene& scene, const Stratum& s, const SetDesc& Z, const ExtendOptions& opts) {
  CutoffSpec spec;
  spec.n = scene.n;
  spec.W.pieces.push_back(s.cell);
  spec.Z = Z;
  spec.q = scene.q;
  spec.calibration_samples = opts.calibration_samples;
  spec.seed = opts.seed ^ stable_hash(s.id);

  Rng rng(spec.seed ^ 0x1ea7);
  struct Probe {
    std::vector<double> x;
    double dw, dz;
  };
  std::vector<Probe> probes;
  for (auto& x : calibration_points({&spec.W, &spec.Z}, scene.n, opts.leak_samples, rng)) {
    if (s.cell->in_cylinder(x)) continue;
    const double dz = set_distance(Z, x).value;
    if (!Z.empty() && dz <= 1e-12) continue;
    const double dw = set_distance(spec.W, x).value;
    probes.push_back({std::move(x), dw, dz});
  }

  double eta = opts.eta;
  for (int h = 0; h <= opts.max_halvings; ++h, eta /= 2) {
    spec.eta = eta;
    const CutoffFn omega = build_cutoff(spec);
    const bool leak = std::any_of(probes.begin(), probes.end(), [&](const Probe& pr) {
      return pr.dw < eta * pr.dz || omega.value(pr.x) > 0.0;
    });
    if (!leak) return {omega, eta, h};
  }
  fail(ErrorCode::kSupportLeak, "stratum " + s.id + ": G_eta leaves the cylinder over the base for every tried eta");
}

TraceEntry make_trace(int level, const Stratum& s, const FieldSpec& field, const std::vector<std::string>& zero_set,
                      const CutoffFn& omega, double eta, int halvings, bool subtracted) {
  TraceEntry t;
  t.level = level;
  t.stratum = s.id;
  t.kind = s.cell->is_point() ? "point" : "cell";
  t.formula_hash = formula_hash(field, *s.cell);
  t.zero_set = zero_set;
  t.eta = eta;
  t.halvings = halvings;
  t.eta_s = omega.eta_s();
  t.rho_s = omega.rho_s();
  t.rho_prime = omega.rho_prime();
  t.w = omega.dw().comparability();
  t.z = omega.dz().comparability();
  t.subtracted = subtracted;
  return t;
}

TermPtr point_term(const Scene& scene, const Stratum& s, const std::vector<std::string>& zero_set,
                   const ExtensionFn* g, const ExtendOptions& opts, int level) {
  const FieldSpec& field = scene.field(s.id);
  PointJet<double> jet = field.jet_at(*s.cell, {});
  if (g && !g->terms().empty()) jet = jet_sub(jet, g->jet(s.cell->coords(), scene.p));
  CutoffSpec spec;
  spec.n = scene.n;
  spec.W.pieces.push_back(s.cell);
  spec.Z = scene.set_of(zero_set);
  spec.eta = opts.eta;
  spec.q = scene.q;
  spec.calibration_samples = opts.calibration_samples;
  spec.seed = opts.seed ^ stable_hash(s.id);
  CutoffFn omega = build_cutoff(spec);
  TraceEntry trace = make_trace(level, s, field, zero_set, omega, opts.eta, 0, g != nullptr);
  return std::make_shared<PointTerm>(std::move(jet), std::move(omega), std::move(trace));
}

TermPtr cell_term(const Scene& scene, const Stratum& s, const std::vector<std::string>& zero_set,
                  std::shared_ptr<const ExtensionFn> g, const ExtendOptions& opts, int level) {
  const FieldSpec& field = scene.field(s.id);
  const CutoffChoice choice = choose_cell_cutoff(scene, s, scene.set_of(zero_set), opts);
  TraceEntry trace = make_trace(level, s, field, zero_set, choice.omega, choice.eta, choice.halvings, g != nullptr);
  return std::make_shared<CellTerm>(s.cell, field, std::move(g), choice.omega, std::move(trace));
}

}  // namespace

double ExtensionFn::value(std::span<const double> x) const {
  double out = 0.0;
  for (const auto& t : terms_) out += t->value(x);
  return out;
}

PointJet<double> ExtensionFn::jet(std::span<const double> x, int order) const {
  auto out = Jet::zero(n_, order, std::vector<double>(x.begin(), x.end()));
  for (const auto& t : terms_) out = jet_add(out, t->jet(x, order));
  return out;
}

std::vector<TraceEntry> ExtensionFn::trace() const {
  std::vector<TraceEntry> out;
  for (const auto& t : terms_) out.push_back(t->trace());
  return out;
}

ScalarFn ExtensionFn::as_function() const {
  return [self = *this](std::span<const double> x) { return self.value(x); };
}

PointTerm::PointTerm(PointJet<double> jet, CutoffFn omega, TraceEntry trace)
    : taylor_(std::move(jet)), omega_(std::move(omega)), trace_(std::move(trace)) {}

double PointTerm::value(std::span<const double> x) const {
  const double w = omega_.value(x);
  if (w == 0.0) return 0.0;
  return w * taylor_poly(taylor_, std::vector<double>(x.begin(), x.end()));
}

PointJet<double> PointTerm::jet(std::span<const double> x, int order) const {
  const std::vector<double> base(x.begin(), x.end());
  if (omega_.value(x) == 0.0) return Jet::zero(static_cast<int>(x.size()), order, base);
  return taylor_poly(taylor_, coordinate_jets(base, order)) * omega_.jet(x, order);
}

CellTerm::CellTerm(CellPtr cell, FieldSpec field, std::shared_ptr<const ExtensionFn> subtract, CutoffFn omega,
                   TraceEntry trace)
    : cell_(std::move(cell)),
      field_(std::move(field)),
      subtract_(std::move(subtract)),
      omega_(std::move(omega)),
      trace_(std::move(trace)) {
  const int m = cell_->intrinsic_dim();
  const int k = cell_->ambient_dim() - m;
  if (k == 0) {
    betas_.push_back(MultiIndex::zero(0));
  } else {
    betas_ = index_set(k, field_.p)->list();
  }
  for (const auto& b : betas_) {
    beta_ambient_.push_back(cell_->to_ambient_index(MultiIndex::zero(m).concat(b)));
    beta_factorial_.push_back(static_cast<double>(b.factorial()));
  }
}

double CellTerm::value(std::span<const double> x) const {
  if (!cell_->in_cylinder(x)) return 0.0;
  const double w = omega_.value(x);
  if (w == 0.0) return 0.0;
  const int m = cell_->intrinsic_dim();
  const auto y = cell_->to_local(x);
  const std::vector<double> u(y.begin(), y.begin() + m);
  std::vector<double> phi;
  for (const auto& f : cell_->map()) phi.push_back(evaluate(f, u));
  std::optional<PointJet<double>> gj;
  if (subtract_) gj = subtract_->jet(cell_->embed(u), field_.p);
  double f = 0.0;
  for (std::size_t b = 0; b < betas_.size(); ++b) {
    double G = evaluate(field_.coeff(beta_ambient_[b]), u);
    if (gj) G -= (*gj)[beta_ambient_[b]];
    double mono = 1.0 / beta_factorial_[b];
    for (int j = 0; j < betas_[b].size(); ++j)
      mono *= ops::ipow(y[static_cast<std::size_t>(m + j)] - phi[static_cast<std::size_t>(j)], betas_[b][j]);
    f += G * mono;
  }
  return w * f;
}

PointJet<double> CellTerm::jet(std::span<const double> x, int order) const {
  const int n = cell_->ambient_dim();
  const int m = cell_->intrinsic_dim();
  const std::vector<double> base(x.begin(), x.end());
  if (!cell_->in_cylinder(x) || omega_.value(x) == 0.0) return Jet::zero(n, order, base);

  const auto xj = coordinate_jets(base, order);
  std::vector<Jet> yj;
  for (int p : cell_->perm()) yj.push_back(xj[static_cast<std::size_t>(p)]);
  const std::vector<Jet> uj(yj.begin(), yj.begin() + m);
  std::vector<Jet> phij;
  for (const auto& f : cell_->map()) phij.push_back(evaluate_jet(f, uj));

  std::optional<PointJet<double>> gj;
  std::vector<Jet> pij;
  if (subtract_) {
    // Ambient coordinates of pi(x) = (u, phi(u)) as jets in x.
    std::vector<Jet> local(uj);
    local.insert(local.end(), phij.begin(), phij.end());
    pij.assign(static_cast<std::size_t>(n), local[0]);
    for (int i = 0; i < n; ++i) pij[static_cast<std::size_t>(cell_->perm()[static_cast<std::size_t>(i)])] = local[static_cast<std::size_t>(i)];
    std::vector<double> px;
    for (const auto& c : pij) px.push_back(c.value());
    gj = subtract_->jet(px, field_.p + order);
  }

  Jet f = Jet::zero(n, order, base);
  for (std::size_t b = 0; b < betas_.size(); ++b) {
    Jet G = evaluate_jet(field_.coeff(beta_ambient_[b]), uj);
    if (gj) G = G - jet_compose(truncate(derivative_shift(*gj, beta_ambient_[b]), order), pij);
    Jet mono = Jet::constant(n, order, base, 1.0 / beta_factorial_[b]);
    for (int j = 0; j < betas_[b].size(); ++j) {
      if (betas_[b][j] == 0) continue;
      mono = mono * ops::ipow(yj[static_cast<std::size_t>(m + j)] - phij[static_cast<std::size_t>(j)], betas_[b][j]);
    }
    f = f + G * mono;
  }
  return f * omega_.jet(x, order);
}

ExtensionFn extend_on_cell(const Scene& scene, const std::string& lambda, const ExtendOptions& opts) {
  const Stratum& s = scene.stratum(lambda);
  std::vector<std::string> zero_set;
  for (const auto& other : scene.strata) {
    if (other.id == lambda) continue;
    if (!scene.declared_flat(other.id)) {
      fail(ErrorCode::kFlatnessDeclarationMissing, "stratum " + other.id + " is not declared flat");
    }
    const FieldSpec& f = scene.field(other.id);
    const auto probe = other.cell->is_point() ? std::vector<std::vector<double>>{{}} : [&] {
      Rng rng(opts.seed);
      return sample_open_cell(*other.cell->base(), 8, rng, std::min(default_bbox(), 5.0));
    }();
    for (const auto& u : probe) {
      for (const auto& c : f.coeffs) {
        if (evaluate(c, zero_arg(*other.cell, u)) != 0.0) {
          fail(ErrorCode::kConsistencyViolation, "stratum " + other.id + " is declared flat but its field is not zero");
        }
      }
    }
    zero_set.push_back(other.id);
  }
  ExtensionFn out(scene.n);
  if (s.cell->is_point()) {
    out.add(point_term(scene, s, zero_set, nullptr, opts, 0));
  } else {
    out.add(cell_term(scene, s, zero_set, nullptr, opts, s.dim()));
  }
  return out;
}

SubtractedField::SubtractedField(const Scene& scene, ExtensionFn g) : scene_(&scene), g_(std::move(g)) {}

std::vector<double> SubtractedField::coeffs_at(const std::string& stratum, std::span<const double> u) const {
  const Stratum& s = scene_->stratum(stratum);
  const FieldSpec& field = scene_->field(stratum);
  const auto arg = zero_arg(*s.cell, u);
  const auto F = field.jet_at(*s.cell, arg);
  PointJet<double> G = F;
  try {
    G = g_.jet(F.base(), field.p);
  } catch (const Error& e) {
    fail(ErrorCode::kDerivativeUnavailable, "stratum " + stratum + ": " + e.what());
  }
  return jet_sub(F, G).coeffs();
}

SubtractedField subtract_taylor(const Scene& scene, const ExtensionFn& g) { return SubtractedField(scene, g); }

ExtensionFn extend_field(const Scene& scene, const ExtendOptions& opts) {
  ValidateOptions vopts;
  vopts.sampling = false;
  const auto rep = validate_scene(scene, vopts);
  if (!rep.structurally_valid()) {
    const auto& issue = rep.issues.front();
    fail(ErrorCode::kStratificationInvalid, (issue.stratum.empty() ? "" : issue.stratum + ": ") + issue.message);
  }

  std::set<int> dims;
  for (const auto& s : scene.strata) dims.insert(s.dim());

  ExtensionFn out(scene.n);
  for (int k : dims) {
    auto g = std::make_shared<const ExtensionFn>(out);
    const bool subtract = opts.subtract_skeleton && !g->terms().empty();
    const auto level = scene.skeleton(k);
    for (const auto& s : scene.strata) {
      if (s.dim() != k) continue;
      std::vector<std::string> zero_set;
      for (const auto& id : level)
        if (id != s.id) zero_set.push_back(id);
      try {
        if (k == 0) {
          out.add(point_term(scene, s, zero_set, subtract ? g.get() : nullptr, opts, k));
        } else {
          out.add(cell_term(scene, s, zero_set, subtract ? g : nullptr, opts, k));
        }
      } catch (const Error& e) {
        throw Error(e.code(), std::string("stratum ") + s.id + ": " + e.what());
      }
    }
  }
  return out;
}

FlatnessReport flatness_rate_probe(const ScalarFn& h, const SetDesc& Z, const SetDesc& lambda, double C, int p,
                                   const std::vector<std::vector<double>>& sequence, double theta) {
  FlatnessReport rep;
  rep.p = p;
  rep.C = C;
  rep.theta = theta;
  rep.points = sequence;
  if (sequence.empty()) fail(ErrorCode::kDegenerateScales, "empty approach sequence");
  const int n = static_cast<int>(sequence.front().size());
  std::vector<double> dz;
  for (const auto& x : sequence) {
    const double d = set_distance(Z, x).value;
    const double dl = set_distance(lambda, x).value;
    rep.cone_ratio.push_back(dl / d);
    if (dl > C * d * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "d(x, Lambda) = " << dl << " exceeds " << C << " * d(x, Z) = " << C * d << " at x = (";
      for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
      os << ")";
      fail(ErrorCode::kSequenceLeavesCone, os.str());
    }
    dz.push_back(d);
  }
  rep.flat = true;
  for (const auto& kappa : index_set(n, p)->list()) {
    FlatnessSeries s;
    s.kappa = kappa;
    for (std::size_t j = 0; j < sequence.size(); ++j) {
      const double d = dz[j];
      const auto fd = finite_difference_adaptive(h, kappa, sequence[j], std::min(1e-3, d / 10.0));
      s.scale.push_back(d);
      s.normalized.push_back(std::abs(fd.value) * std::pow(d, kappa.degree() - p));
    }
    const std::size_t start = s.normalized.size() / 2;
    bool monotone = true;
    for (std::size_t j = start + 1; j < s.normalized.size(); ++j)
      monotone = monotone && s.normalized[j] <= s.normalized[j - 1] * (1.0 + 1e-9) + 1e-12;
    s.flat = monotone && s.normalized.back() < theta;
    rep.flat = rep.flat && s.flat;
    rep.series.push_back(std::move(s));
  }
  return rep;
}

}  // namespace whitney
