#include "whitney/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "whitney/error.hpp"

namespace whitney {
namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::kParse, (where.empty() ? "/" : where) + ": " + what);
}

const json& member(const json& j, const std::string& where, const char* key) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing '") + key + "'");
  return *it;
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Rational as_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return rational_from_double(j.get<double>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  bad(where, "expected a number or a rational string");
}

double as_bound(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  return to_double(as_rational(j, where));
}

std::vector<double> as_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of coordinates");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_double(as_rational(j[i], where + "/" + std::to_string(i))));
  return out;
}

ExprFn parse_expr(const json& j, int arity, const std::string& where);

GuardSign parse_guard_sign(const std::string& op, const std::string& where) {
  if (op == "gt") return GuardSign::kPositive;
  if (op == "lt") return GuardSign::kNegative;
  bad(where, "unknown guard '" + op + "' (expected gt or lt)");
}

void parse_guard(const json& j, int arity, const std::string& where, std::vector<std::pair<ExprFn, GuardSign>>& out) {
  if (!j.is_array() || j.empty()) bad(where, "expected a guard [\"gt\"|\"lt\"|\"and\", ...]");
  const auto op = as_string(j[0], where + "/0");
  if (op == "and") {
    for (std::size_t i = 1; i < j.size(); ++i) parse_guard(j[i], arity, where + "/" + std::to_string(i), out);
    return;
  }
  if (j.size() != 2) bad(where, "guard '" + op + "' takes one expression");
  out.emplace_back(parse_expr(j[1], arity, where + "/1"), parse_guard_sign(op, where + "/0"));
}

ExprFn parse_expr(const json& j, int arity, const std::string& where) {
  if (j.is_number() || j.is_string()) return ExprFn::constant(arity, as_rational(j, where));
  if (!j.is_array() || j.empty()) bad(where, "expected an expression");
  const auto op = as_string(j[0], where + "/0");
  const std::size_t argc = j.size() - 1;
  auto arg = [&](std::size_t i) { return parse_expr(j[i], arity, where + "/" + std::to_string(i)); };
  auto need = [&](std::size_t count) {
    if (argc != count) bad(where, "'" + op + "' takes " + std::to_string(count) + " argument(s)");
  };
  try {
    if (op == "var") {
      need(1);
      const int i = as_int(j[1], where + "/1");
      if (i < 0 || i >= arity) bad(where + "/1", "variable index out of range for arity " + std::to_string(arity));
      return ExprFn::variable(arity, i);
    }
    if (op == "const") {
      need(1);
      return ExprFn::constant(arity, as_rational(j[1], where + "/1"));
    }
    if (op == "add" || op == "mul") {
      if (argc < 1) bad(where, "'" + op + "' needs arguments");
      ExprFn acc = arg(1);
      for (std::size_t i = 2; i <= argc; ++i) acc = op == "add" ? acc + arg(i) : acc * arg(i);
      return acc;
    }
    if (op == "sub") return need(2), arg(1) - arg(2);
    if (op == "div") return need(2), arg(1) / arg(2);
    if (op == "neg") return need(1), -arg(1);
    if (op == "pow") {
      need(2);
      return arg(1).pow(as_int(j[2], where + "/2"));
    }
    if (op == "sqrt") return need(1), sqrt(arg(1));
    if (op == "abs") return need(1), abs(arg(1));
    if (op == "min") return need(2), min(arg(1), arg(2));
    if (op == "max") return need(2), max(arg(1), arg(2));
    if (op == "piecewise") {
      std::vector<ExprBranch> branches;
      for (std::size_t i = 1; i <= argc; ++i) {
        const std::string w = where + "/" + std::to_string(i);
        std::vector<std::pair<ExprFn, GuardSign>> guard;
        const json& when = member(j[i], w, "when");
        if (!when.is_array()) bad(w + "/when", "expected a list of guards");
        for (std::size_t k = 0; k < when.size(); ++k) parse_guard(when[k], arity, w + "/when/" + std::to_string(k), guard);
        branches.push_back({std::move(guard), parse_expr(member(j[i], w, "then"), arity, w + "/then")});
      }
      if (branches.empty()) bad(where, "piecewise needs branches");
      return ExprFn::piecewise(arity, branches);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    bad(where, e.what());
  }
  bad(where + "/0", "unknown operator '" + op + "'");
}

OpenCellPtr parse_open_cell(const json& j, const std::string& where) {
  const auto type = as_string(member(j, where, "type"), where + "/type");
  if (type == "interval") {
    const double lo = as_bound(member(j, where, "lo"), where + "/lo");
    const double hi = as_bound(member(j, where, "hi"), where + "/hi");
    if (!(lo < hi)) bad(where, "interval needs lo < hi");
    return make_interval(lo, hi);
  }
  if (type == "slab") {
    auto base = parse_open_cell(member(j, where, "base"), where + "/base");
    const int arity = base->dim;
    std::optional<ExprFn> lower, upper;
    if (j.contains("lower") && !j["lower"].is_null()) lower = parse_expr(j["lower"], arity, where + "/lower");
    if (j.contains("upper") && !j["upper"].is_null()) upper = parse_expr(j["upper"], arity, where + "/upper");
    try {
      return make_slab(std::move(base), std::move(lower), std::move(upper));
    } catch (const Error& e) {
      bad(where, e.what());
    }
  }
  bad(where + "/type", "unknown open cell type '" + type + "' (expected interval or slab)");
}

CellPtr parse_cell(const json& j, int n, const std::string& where) {
  const auto type = as_string(member(j, where, "type"), where + "/type");
  try {
    if (type == "point") {
      auto x = as_point(member(j, where, "coords"), where + "/coords");
      if (static_cast<int>(x.size()) != n) bad(where + "/coords", "point dimension differs from n");
      return Cell::point(std::move(x));
    }
    if (type == "open") {
      auto base = parse_open_cell(member(j, where, "base"), where + "/base");
      if (base->dim != n) bad(where + "/base", "open cell dimension differs from n");
      return Cell::open(std::move(base));
    }
    if (type == "graph") {
      auto base = parse_open_cell(member(j, where, "base"), where + "/base");
      const int m = base->dim;
      std::vector<ExprFn> map;
      const json& mj = member(j, where, "map");
      if (!mj.is_array()) bad(where + "/map", "expected an array of expressions");
      for (std::size_t i = 0; i < mj.size(); ++i) map.push_back(parse_expr(mj[i], m, where + "/map/" + std::to_string(i)));
      if (m + static_cast<int>(map.size()) != n) bad(where + "/map", "base dimension plus map length differs from n");
      std::vector<int> perm;
      if (j.contains("perm")) {
        for (std::size_t i = 0; i < j["perm"].size(); ++i) perm.push_back(as_int(j["perm"][i], where + "/perm/" + std::to_string(i)));
      } else {
        for (int i = 0; i < n; ++i) perm.push_back(i);
      }
      return Cell::graph(n, std::move(base), std::move(map), std::move(perm));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    bad(where, e.what());
  }
  bad(where + "/type", "unknown cell type '" + type + "' (expected point, open or graph)");
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

void require_schema(const json& doc, const std::string& expected) {
  const auto schema = as_string(member(doc, "", "schema"), "/schema");
  if (schema != expected) bad("/schema", "unsupported schema '" + schema + "' (expected " + expected + ")");
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kParse, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Scene parse_scene(const std::string& text) {
  const json doc = parse_json(text);
  require_schema(doc, "whitney-scene/1");
  Scene scene;
  if (doc.contains("name")) scene.name = as_string(doc["name"], "/name");
  scene.n = as_int(member(doc, "", "n"), "/n");
  scene.p = as_int(member(doc, "", "p"), "/p");
  scene.q = as_int(member(doc, "", "q"), "/q");
  if (scene.n < 1 || scene.n > 3) bad("/n", "ambient dimension must be 1, 2 or 3");
  if (scene.p < 0 || scene.p > scene.q) bad("/p", "orders must satisfy 0 <= p <= q");

  const json& strata = member(doc, "", "strata");
  if (!strata.is_array()) bad("/strata", "expected an array");
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string w = "/strata/" + std::to_string(i);
    Stratum s;
    s.id = as_string(member(strata[i], w, "id"), w + "/id");
    s.cell = parse_cell(member(strata[i], w, "cell"), scene.n, w + "/cell");
    if (strata[i].contains("dim") && as_int(strata[i]["dim"], w + "/dim") != s.cell->intrinsic_dim()) {
      bad(w + "/dim", "declared dimension differs from the cell");
    }
    if (strata[i].contains("boundary")) {
      const json& b = strata[i]["boundary"];
      if (!b.is_array()) bad(w + "/boundary", "expected an array of stratum ids");
      for (std::size_t k = 0; k < b.size(); ++k) s.boundary.push_back(as_string(b[k], w + "/boundary/" + std::to_string(k)));
    }
    scene.strata.push_back(std::move(s));
  }

  const json& fields = member(doc, "", "fields");
  if (!fields.is_array()) bad("/fields", "expected an array");
  const auto idx = index_set(scene.n, scene.p);
  for (const auto& s : scene.strata) {
    const json* fj = nullptr;
    std::string w;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string wi = "/fields/" + std::to_string(i);
      if (as_string(member(fields[i], wi, "stratum"), wi + "/stratum") == s.id) {
        if (fj) bad(wi, "second field for stratum '" + s.id + "'");
        fj = &fields[i];
        w = wi;
      }
    }
    if (!fj) bad("/fields", "no field for stratum '" + s.id + "'");
    if (fj->contains("taylor_of")) {
      const ExprFn g = parse_expr((*fj)["taylor_of"], scene.n, w + "/taylor_of");
      scene.fields.push_back(taylor_field_spec(g, *s.cell, scene.p, s.id));
      continue;
    }
    const int arity = std::max(s.dim(), 1);
    FieldSpec f;
    f.stratum = s.id;
    f.n = scene.n;
    f.p = scene.p;
    f.coeffs.assign(idx->size(), ExprFn::constant(arity, Rational(0)));
    std::vector<bool> seen(idx->size(), false);
    const json& coeffs = member(*fj, w, "coeffs");
    if (!coeffs.is_array()) bad(w + "/coeffs", "expected an array");
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const std::string wk = w + "/coeffs/" + std::to_string(k);
      const json& aj = member(coeffs[k], wk, "alpha");
      std::vector<int> alpha;
      if (!aj.is_array()) bad(wk + "/alpha", "expected an exponent array");
      for (std::size_t i = 0; i < aj.size(); ++i) alpha.push_back(as_int(aj[i], wk + "/alpha/" + std::to_string(i)));
      const MultiIndex a(alpha);
      const auto pos = a.size() == scene.n ? idx->find(a) : std::nullopt;
      if (!pos) bad(wk + "/alpha", "multi-index " + a.to_string() + " is not in N^n with |alpha| <= p");
      if (seen[*pos]) bad(wk + "/alpha", "duplicate multi-index " + a.to_string());
      seen[*pos] = true;
      f.coeffs[*pos] = parse_expr(member(coeffs[k], wk, "f"), arity, wk + "/f");
    }
    scene.fields.push_back(std::move(f));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string wi = "/fields/" + std::to_string(i);
    const auto id = as_string(member(fields[i], wi, "stratum"), wi + "/stratum");
    bool known = false;
    for (const auto& s : scene.strata) known = known || s.id == id;
    if (!known) bad(wi + "/stratum", "unknown stratum '" + id + "'");
  }

  if (doc.contains("flat_on")) {
    const json& fo = doc["flat_on"];
    if (!fo.is_array()) bad("/flat_on", "expected an array of stratum ids");
    for (std::size_t i = 0; i < fo.size(); ++i) scene.flat_on.push_back(as_string(fo[i], "/flat_on/" + std::to_string(i)));
  }
  if (doc.contains("plan")) {
    const json& pl = doc["plan"];
    if (!pl.is_object()) bad("/plan", "expected an object");
    if (pl.contains("seed")) {
      if (!pl["seed"].is_number_unsigned()) bad("/plan/seed", "expected a non-negative integer");
      scene.plan.seed = pl["seed"].get<std::uint64_t>();
    }
    if (pl.contains("samples_per_stratum")) {
      const int k = as_int(pl["samples_per_stratum"], "/plan/samples_per_stratum");
      if (k < 1) bad("/plan/samples_per_stratum", "must be positive");
      scene.plan.samples_per_stratum = static_cast<std::size_t>(k);
    }
    if (pl.contains("tol")) {
      if (!pl["tol"].is_number()) bad("/plan/tol", "expected a number");
      scene.plan.tol = pl["tol"].get<double>();
    }
    if (pl.contains("checks")) {
      scene.plan.checks.clear();
      for (std::size_t i = 0; i < pl["checks"].size(); ++i) {
        const auto c = as_string(pl["checks"][i], "/plan/checks/" + std::to_string(i));
        if (c != "extension" && c != "whitney") bad("/plan/checks/" + std::to_string(i), "unknown check '" + c + "'");
        scene.plan.checks.push_back(c);
      }
    }
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  try {
    return parse_scene(read_text(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    const std::string detail = e.what();
    throw Error(ErrorCode::kParse, path.string() + ":" + detail.substr(detail.find(':') + 1));
  }
}

std::vector<NamedCutoff> parse_cutoff_specs(const std::string& text) {
  const json doc = parse_json(text);
  require_schema(doc, "whitney-cutoffs/1");
  const json& specs = member(doc, "", "specs");
  if (!specs.is_array()) bad("/specs", "expected an array");
  std::vector<NamedCutoff> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string w = "/specs/" + std::to_string(i);
    const json& sj = specs[i];
    NamedCutoff nc;
    nc.name = as_string(member(sj, w, "name"), w + "/name");
    nc.spec.n = as_int(member(sj, w, "n"), w + "/n");
    nc.spec.q = as_int(member(sj, w, "q"), w + "/q");
    if (sj.contains("eta")) nc.spec.eta = to_double(as_rational(sj["eta"], w + "/eta"));
    if (sj.contains("seed")) nc.spec.seed = sj["seed"].get<std::uint64_t>();
    for (const char* key : {"W", "Z"}) {
      const json& cells = member(sj, w, key);
      if (!cells.is_array()) bad(w + "/" + key, "expected an array of cells");
      SetDesc& set = std::string(key) == "W" ? nc.spec.W : nc.spec.Z;
      for (std::size_t k = 0; k < cells.size(); ++k)
        set.pieces.push_back(parse_cell(cells[k], nc.spec.n, w + "/" + key + "/" + std::to_string(k)));
    }
    out.push_back(std::move(nc));
  }
  return out;
}

std::vector<NamedCutoff> load_cutoff_specs(const std::filesystem::path& path) {
  return parse_cutoff_specs(read_text(path));
}

}  // namespace whitney
