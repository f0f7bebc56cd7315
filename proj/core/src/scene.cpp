#include "whitney/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "whitney/error.hpp"
#include "whitney/random.hpp"

namespace whitney {

std::size_t Scene::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < strata.size(); ++i)
    if (strata[i].id == id) return i;
  fail(ErrorCode::kUnknownStratum, "no stratum '" + id + "'");
}

const Stratum& Scene::stratum(const std::string& id) const { return strata[index_of(id)]; }

const FieldSpec& Scene::field(const std::string& id) const {
  for (const auto& f : fields)
    if (f.stratum == id) return f;
  fail(ErrorCode::kUnknownStratum, "no field on stratum '" + id + "'");
}

int Scene::dimension() const {
  int d = -1;
  for (const auto& s : strata) d = std::max(d, s.dim());
  return d;
}

bool Scene::declared_flat(const std::string& id) const {
  return std::find(flat_on.begin(), flat_on.end(), id) != flat_on.end();
}

SetDesc Scene::set_of(const std::vector<std::string>& ids) const {
  SetDesc out;
  for (const auto& id : ids) out.pieces.push_back(stratum(id).cell);
  return out;
}

std::vector<std::string> Scene::skeleton(int k) const {
  std::vector<std::string> out;
  for (const auto& s : strata)
    if (s.dim() <= k) out.push_back(s.id);
  return out;
}

Scene Scene::restrict_to(const std::vector<std::string>& ids) const {
  Scene out = *this;
  out.strata.clear();
  out.fields.clear();
  out.flat_on.clear();
  for (const auto& s : strata) {
    if (std::find(ids.begin(), ids.end(), s.id) == ids.end()) continue;
    out.strata.push_back(s);
    out.fields.push_back(field(s.id));
    if (declared_flat(s.id)) out.flat_on.push_back(s.id);
  }
  return out;
}

bool ValidationReport::structurally_valid() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) { return i.kind == IssueKind::kStructure; });
}

namespace {

/// Closure points on the faces of the parameter cube, skipping clipped ones.
std::vector<std::vector<double>> frontier_points(const Cell& cell, double clip) {
  std::vector<std::vector<double>> out;
  const int m = cell.intrinsic_dim();
  const int per_axis = m == 1 ? 2 : 9;
  std::vector<int> g(static_cast<std::size_t>(m), 0);
  std::vector<double> t(static_cast<std::size_t>(m));
  while (true) {
    bool on_face = false;
    for (int i = 0; i < m; ++i) {
      const int gi = g[static_cast<std::size_t>(i)];
      t[static_cast<std::size_t>(i)] = gi / double(per_axis - 1);
      on_face = on_face || gi == 0 || gi == per_axis - 1;
    }
    if (on_face) {
      if (auto x = cell.closure_embed(t, clip)) {
        double norm = 0.0;
        for (double c : *x) norm = std::max(norm, std::abs(c));
        if (norm < 0.999 * clip) out.push_back(std::move(*x));
      }
    }
    int i = 0;
    while (i < m && ++g[static_cast<std::size_t>(i)] == per_axis) g[static_cast<std::size_t>(i++)] = 0;
    if (i == m) break;
  }
  return out;
}

std::string format_point(const std::vector<double>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

ValidationReport validate_scene(const Scene& scene, const ValidateOptions& opts) {
  ValidationReport rep;
  auto structure = [&](std::string check, std::string stratum, std::string msg) {
    rep.issues.push_back({IssueKind::kStructure, std::move(check), std::move(stratum), std::move(msg)});
  };
  auto sampling = [&](std::string check, std::string stratum, std::string msg) {
    rep.issues.push_back({IssueKind::kSampling, std::move(check), std::move(stratum), std::move(msg)});
  };

  if (scene.n < 1) structure("shape", "", "ambient dimension must be positive");
  if (scene.p < 0 || scene.p > scene.q) structure("orders", "", "orders must satisfy 0 <= p <= q");
  if (scene.strata.empty()) structure("strata", "", "empty strata list");

  std::set<std::string> ids;
  for (const auto& s : scene.strata) {
    if (!ids.insert(s.id).second) structure("ids", s.id, "duplicate stratum id");
    if (s.cell->ambient_dim() != scene.n) structure("shape", s.id, "cell ambient dimension differs from n");
  }
  for (const auto& id : scene.flat_on)
    if (!ids.count(id)) structure("flat_on", id, "flatness declared on an unknown stratum");
  for (const auto& f : scene.fields)
    if (!ids.count(f.stratum)) structure("fields", f.stratum, "field on an unknown stratum");
  if (!rep.ok()) return rep;

  for (const auto& s : scene.strata) {
    const FieldSpec* field = nullptr;
    for (const auto& f : scene.fields)
      if (f.stratum == s.id) field = &f;
    if (!field) {
      structure("fields", s.id, "stratum has no field");
      continue;
    }
    if (field->n != scene.n || field->p != scene.p) structure("fields", s.id, "field order or dimension differs from the scene");
    if (field->coeffs.size() != index_set(scene.n, scene.p)->size()) structure("fields", s.id, "wrong number of coefficients");
    const int arity = std::max(s.dim(), 1);
    for (const auto& c : field->coeffs)
      if (c.arity() != arity) {
        structure("fields", s.id, "coefficient arity differs from the stratum dimension");
        break;
      }
    for (const auto& b : s.boundary) {
      if (!ids.count(b)) {
        structure("boundary", s.id, "unknown boundary stratum '" + b + "'");
        continue;
      }
      if (scene.stratum(b).dim() >= s.dim()) structure("boundary", s.id, "boundary stratum '" + b + "' is not of lower dimension");
    }
  }
  if (!rep.ok()) return rep;

  // E is closed iff every frontier point of every stratum lies on its declared boundary.
  const double clip = default_bbox();
  for (const auto& s : scene.strata) {
    if (s.cell->is_point()) continue;
    const SetDesc bd = scene.set_of(s.boundary);
    for (const auto& x : frontier_points(*s.cell, clip)) {
      double scale = 1.0;
      for (double c : x) scale = std::max(scale, std::abs(c));
      const double d = bd.empty() ? kInf : set_distance(bd, x).value;
      if (!(d <= 1e-7 * scale)) {
        structure("closed", s.id, "stratification not closed: frontier point " + format_point(x) + " lies on no boundary stratum");
        break;
      }
    }
  }
  if (!rep.structurally_valid() || !opts.sampling) return rep;

  Rng rng(opts.seed);
  for (const auto& s : scene.strata) {
    std::vector<std::vector<double>> pts;
    if (s.cell->is_point()) {
      pts.push_back(s.cell->coords());
    } else {
      Rng sub = rng.fork(stable_hash(s.id));
      for (const auto& u : sample_open_cell(*s.cell->base(), opts.samples, sub, std::min(clip, 5.0))) {
        try {
          pts.push_back(s.cell->embed(u));
        } catch (const Error&) {
        }
      }
    }
    for (const auto& other : scene.strata) {
      if (other.id == s.id) continue;
      for (const auto& x : pts) {
        if (contains(*other.cell, x, 1e-9) == Membership::kInside) {
          sampling("disjoint", s.id, "overlaps stratum '" + other.id + "' at " + format_point(x));
          break;
        }
      }
    }
    if (s.cell->is_point()) continue;

    const FieldSpec& field = scene.field(s.id);
    const auto glaeser = check_glaeser(field, *s.cell, opts.samples, 1e-9, opts.seed);
    rep.glaeser.emplace_back(s.id, glaeser);
    if (!glaeser.consistent) {
      std::ostringstream os;
      os << "field violates the slice identification (" << glaeser.witness_relation << ", residual "
         << glaeser.max_residual << " at u = " << format_point(glaeser.witness) << ")";
      sampling("consistency", s.id, os.str());
    }
    if (!s.cell->map().empty())
      rep.lipschitz.emplace_back(s.id, lipschitz_estimate(s.cell->map(), *s.cell->base(), opts.samples, opts.seed));
    for (const auto& f : s.cell->map()) {
      const auto reg = check_lambda_regular(f, *s.cell->base(), scene.q);
      if (!reg.plausibly_regular) {
        sampling("regularity", s.id, "graph map is not plausibly Lambda_q-regular");
        break;
      }
    }
  }
  return rep;
}

}  // namespace whitney
