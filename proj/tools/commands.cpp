#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "whitney/extension.hpp"
#include "whitney/geometry.hpp"
#include "whitney/random.hpp"
#include "whitney/scene_io.hpp"
#include "whitney/verify.hpp"

#ifndef WHITNEY_VERSION
#define WHITNEY_VERSION "unknown"
#endif

namespace whitney::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kRunSchema = "whitney-run/1";
constexpr const char* kVerifySchema = "whitney-verify/1";
constexpr const char* kManifestSchema = "whitney-manifest/1";
constexpr std::size_t kMaxGridPoints = 1000000;

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Shortest round-trip representation.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kParse, "cannot write " + path.string());
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Comparability& c) { return Json{{"c1", c.c1}, {"c2", c.c2}, {"samples", c.samples}}; }

Json to_json(const MultiIndex& a) { return Json(a.exponents()); }

Json trace_json(const TraceEntry& t) {
  return Json{{"level", t.level},       {"stratum", t.stratum},     {"kind", t.kind},
              {"formula_hash", t.formula_hash}, {"zero_set", t.zero_set}, {"eta", t.eta},
              {"halvings", t.halvings}, {"eta_s", t.eta_s},         {"rho_s", t.rho_s},
              {"rho_prime", t.rho_prime}, {"w", to_json(t.w)},      {"z", to_json(t.z)},
              {"subtracted", t.subtracted}};
}

/// Rewrites manifest.json to list every other file of the run directory.
void write_manifest(const fs::path& dir, const Json& header) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  Json list = Json::array();
  for (const auto& f : files) {
    const std::string text = read_text(f);
    list.push_back(Json{{"name", f.filename().string()}, {"bytes", text.size()}, {"fnv1a", hex(stable_hash(text))}});
  }
  Json m = header;
  m["schema"] = kManifestSchema;
  m["tool_version"] = WHITNEY_VERSION;
  m["files"] = std::move(list);
  write_file(dir / "manifest.json", dump(m));
}

struct Axis {
  double lo, hi, step;
  std::size_t count;
};

Axis parse_axis(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "--grid " + spec + ": not a number: '" + item + "'");
    }
  }
  if (parts.size() != 3) fail(ErrorCode::kParse, "--grid " + spec + ": expected a:b:step");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(hi >= lo) || !(step > 0) || !std::isfinite(hi - lo)) fail(ErrorCode::kParse, "--grid " + spec + ": need a <= b, step > 0");
  const double count = std::floor((hi - lo) / step + 1e-9) + 1;
  if (count > static_cast<double>(kMaxGridPoints)) fail(ErrorCode::kParse, "--grid " + spec + ": too many points");
  return {lo, hi, step, static_cast<std::size_t>(count)};
}

std::vector<Axis> grid_axes(const std::vector<std::string>& specs, int n) {
  std::vector<Axis> axes;
  if (specs.empty()) {
    const double b = default_bbox();
    axes.assign(static_cast<std::size_t>(n), Axis{-b, b, b / 20, 41});
  } else if (specs.size() == 1) {
    axes.assign(static_cast<std::size_t>(n), parse_axis(specs[0]));
  } else if (static_cast<int>(specs.size()) == n) {
    for (const auto& s : specs) axes.push_back(parse_axis(s));
  } else {
    fail(ErrorCode::kParse, "--grid given " + std::to_string(specs.size()) + " times for a scene with n = " +
                                std::to_string(n));
  }
  double total = 1;
  for (const auto& a : axes) total *= static_cast<double>(a.count);
  if (total > static_cast<double>(kMaxGridPoints)) fail(ErrorCode::kParse, "grid has more than 1e6 points");
  return axes;
}

std::string scene_sha(const fs::path& path) { return hex(stable_hash(read_text(path))); }

ExtendOptions options_for(std::uint64_t seed) {
  ExtendOptions o;
  o.seed = seed;
  return o;
}

Json options_json(const ExtendOptions& o) {
  return Json{{"eta", o.eta},
              {"max_halvings", o.max_halvings},
              {"leak_samples", o.leak_samples},
              {"calibration_samples", o.calibration_samples},
              {"subtract_skeleton", o.subtract_skeleton}};
}

Json validation_json(const ValidationReport& rep) {
  Json issues = Json::array();
  for (const auto& i : rep.issues) {
    issues.push_back(Json{{"kind", i.kind == IssueKind::kStructure ? "structure" : "sampling"},
                          {"check", i.check},
                          {"stratum", i.stratum},
                          {"message", i.message}});
  }
  Json glaeser = Json::array();
  for (const auto& [id, g] : rep.glaeser) {
    glaeser.push_back(Json{{"stratum", id}, {"samples", g.samples}, {"relations", g.relations},
                           {"max_residual", g.max_residual}, {"consistent", g.consistent}});
  }
  Json lip = Json::array();
  for (const auto& [id, l] : rep.lipschitz) {
    lip.push_back(Json{{"stratum", id}, {"m_hat", l.m_hat}, {"l_hat", l.l_hat}, {"samples", l.samples}});
  }
  return Json{{"ok", rep.ok()}, {"issues", issues}, {"glaeser", glaeser}, {"lipschitz", lip}};
}

/// Flatness of each cell term along its own stratum toward finite frontier
/// points: x_k = embed(u_a + 2^-k (u_c - u_a)), k = 3..14.
Json flatness_json(const Scene& scene, const ExtensionFn& f) {
  Json out = Json::array();
  const double clip = default_bbox();
  for (const auto& term : f.terms()) {
    const TraceEntry& t = term->trace();
    if (t.kind != "cell") continue;
    const Stratum& s = scene.stratum(t.stratum);
    const SetDesc frontier = scene.set_of(s.boundary);
    if (frontier.empty()) continue;
    const int m = s.dim();
    const auto& base = *s.cell->base();
    const auto uc = closure_point(base, std::vector<double>(static_cast<std::size_t>(m), 0.5), clip);
    if (!uc) continue;
    const SetDesc Z = scene.set_of(t.zero_set);
    SetDesc lambda;
    lambda.pieces.push_back(s.cell);
    const ScalarFn h = [term](std::span<const double> x) { return term->value(x); };
    for (std::size_t corner = 0; corner < (std::size_t{1} << m); ++corner) {
      std::vector<double> tc(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) tc[static_cast<std::size_t>(i)] = (corner >> i) & 1 ? 1.0 : 0.0;
      const auto ua = closure_point(base, tc, clip);
      if (!ua) continue;
      const auto a = s.cell->embed(*ua);
      if (set_distance(frontier, a).value > 1e-9) continue;
      std::vector<std::vector<double>> seq;
      for (int k = 3; k <= 14; ++k) {
        std::vector<double> u(*ua);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += std::ldexp((*uc)[i] - (*ua)[i], -k);
        seq.push_back(s.cell->embed(u));
      }
      Json series = Json::array();
      bool flat = false;
      try {
        const auto rep = flatness_rate_probe(h, Z, lambda, 0.5, scene.p, seq);
        flat = rep.flat;
        for (const auto& fs_ : rep.series) {
          series.push_back(Json{{"kappa", to_json(fs_.kappa)}, {"scale", fs_.scale}, {"normalized", fs_.normalized},
                                {"flat", fs_.flat}});
        }
      } catch (const Error& e) {
        series.push_back(Json{{"error", e.what()}});
      }
      out.push_back(Json{{"stratum", t.stratum}, {"target", a}, {"flat", flat}, {"series", series}});
    }
  }
  return out;
}

/// Writes the grid values of f and its gradient plus d(x, E).
struct GridStats {
  std::size_t rows = 0;
  std::size_t failures = 0;
};

GridStats write_grid(const fs::path& path, const Scene& scene, const ExtensionFn& f, const std::vector<Axis>& axes) {
  const int n = scene.n;
  std::vector<std::string> all_ids;
  for (const auto& s : scene.strata) all_ids.push_back(s.id);
  const SetDesc E = scene.set_of(all_ids);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kParse, "cannot write " + path.string());
  for (int i = 0; i < n; ++i) out << "x" << i << ",";
  out << "f";
  for (int i = 0; i < n; ++i) out << ",df_dx" << i;
  out << ",dist_E\n";
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::size_t rows = 0, failures = 0;
  while (true) {
    for (int i = 0; i < n; ++i) {
      const auto& a = axes[static_cast<std::size_t>(i)];
      const std::size_t k = idx[static_cast<std::size_t>(i)];
      x[static_cast<std::size_t>(i)] = k + 1 == a.count && a.count > 1 ? std::min(a.hi, a.lo + a.step * static_cast<double>(k))
                                                                       : a.lo + a.step * static_cast<double>(k);
    }
    std::string line;
    for (double v : x) line += num(v) + ",";
    try {
      const auto jet = f.jet(x, 1);
      line += num(jet.value());
      for (int i = 0; i < n; ++i) line += "," + num(jet[MultiIndex::unit(n, i)]);
    } catch (const Error&) {
      // Singular points of a defective field; the grid records them as nan.
      line += "nan";
      for (int i = 0; i < n; ++i) line += ",nan";
      ++failures;
    }
    line += "," + num(set_distance(E, x).value) + "\n";
    out << line;
    ++rows;
    int i = n - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == axes[static_cast<std::size_t>(i)].count) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return {rows, failures};
}

void print_issues(const ValidationReport& rep, std::ostream& out) {
  for (const auto& i : rep.issues) {
    out << (i.kind == IssueKind::kStructure ? "structure" : "sampling") << " [" << i.check << "]"
        << (i.stratum.empty() ? "" : " " + i.stratum) << ": " << i.message << "\n";
  }
}

fs::path report_path(const fs::path& artifact) {
  return fs::is_directory(artifact) ? artifact / "report.json" : artifact;
}

Json load_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void mismatch(const std::string& what) { fail(ErrorCode::kParse, "artifact mismatch: " + what); }

Json extension_json(const ExtensionCheckReport& rep) {
  Json strata = Json::array();
  for (const auto& s : rep.strata) {
    Json alphas = Json::array();
    for (const auto& a : s.alphas) {
      alphas.push_back(Json{{"alpha", to_json(a.alpha)}, {"max_rel", a.max_rel}, {"witness", a.witness}});
    }
    strata.push_back(Json{{"stratum", s.stratum}, {"samples", s.samples}, {"failures", s.failures},
                          {"max_rel", s.max_rel}, {"pass", s.pass}, {"alphas", alphas}});
  }
  return Json{{"pass", rep.pass}, {"max_rel", rep.max_rel}, {"tol", rep.tol},
              {"derivatives", "finite-difference (Richardson)"}, {"strata", strata}};
}

Json whitney_json(const WhitneyReport& rep) {
  Json series = Json::array();
  for (const auto& s : rep.series) {
    series.push_back(Json{{"stratum", s.stratum},
                          {"target", s.target},
                          {"generator", to_string(s.generator)},
                          {"beta", to_json(s.beta)},
                          {"exact", s.exact},
                          {"scales", s.fit.scales},
                          {"max_residual", s.max_residual},
                          {"required", s.fit.required},
                          {"slope", s.fit.slope},
                          {"slope_pass", s.fit.slope_pass},
                          {"decay_pass", s.fit.decay_pass},
                          {"pass", s.fit.pass}});
  }
  return Json{{"pass", rep.pass}, {"series", series}};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& selector) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size() || out.back() < 0) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "selector " + selector + ": bad index list");
    }
  }
  return out;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kStratificationInvalid:
    case ErrorCode::kUnknownStratum:
    case ErrorCode::kArityMismatch:
    case ErrorCode::kNotAGraphCell:
      return kInputError;
    default:
      return kEngineError;
  }
}

int cmd_validate(const fs::path& scene_path, std::ostream& out) {
  const Scene scene = load_scene(scene_path);
  ValidateOptions vopts;
  vopts.seed = scene.plan.seed;
  const auto rep = validate_scene(scene, vopts);
  print_issues(rep, out);
  for (const auto& [id, l] : rep.lipschitz) out << "lipschitz " << id << ": M = " << num(l.m_hat) << ", L = " << num(l.l_hat) << "\n";
  for (const auto& [id, g] : rep.glaeser) {
    out << "glaeser " << id << ": max residual " << num(g.max_residual) << " over " << g.samples << " samples\n";
  }
  if (!rep.structurally_valid()) {
    out << "FAIL validate " << scene.name << " (structure)\n";
    return kInputError;
  }
  out << (rep.ok() ? "PASS" : "FAIL") << " validate " << scene.name << "\n";
  return rep.ok() ? kPass : kFail;
}

int cmd_extend(const ExtendArgs& args, std::ostream& out) {
  const Scene scene = load_scene(args.scene);
  const auto axes = grid_axes(args.grid, scene.n);
  const std::uint64_t seed = args.seed.value_or(scene.plan.seed);
  ValidateOptions vopts;
  vopts.seed = seed;
  const auto validation = validate_scene(scene, vopts);
  if (!validation.structurally_valid()) {
    print_issues(validation, out);
    out << "FAIL extend " << scene.name << " (invalid stratification)\n";
    return kInputError;
  }
  const ExtendOptions opts = options_for(seed);
  const ExtensionFn f = extend_field(scene, opts);

  fs::create_directories(args.out_dir);
  const GridStats grid_stats = write_grid(args.out_dir / "extension.csv", scene, f, axes);
  const std::size_t rows = grid_stats.rows;

  Json trace = Json::array();
  for (const auto& t : f.trace()) trace.push_back(trace_json(t));
  Json grid = Json::array();
  for (const auto& a : axes) grid.push_back(Json{{"lo", a.lo}, {"hi", a.hi}, {"step", a.step}, {"count", a.count}});
  Json report{{"schema", kRunSchema},
              {"tool_version", WHITNEY_VERSION},
              {"scene", Json{{"name", scene.name}, {"file", args.scene.filename().string()}, {"sha", scene_sha(args.scene)},
                             {"n", scene.n}, {"p", scene.p}, {"q", scene.q}}},
              {"seed", seed},
              {"options", options_json(opts)},
              {"bbox", default_bbox()},
              {"validation", validation_json(validation)},
              {"trace", trace},
              {"grid", Json{{"axes", grid}, {"samples", rows}, {"failures", grid_stats.failures}, {"file", "extension.csv"}}},
              {"flatness", flatness_json(scene, f)}};
  write_file(args.out_dir / "report.json", dump(report));
  write_manifest(args.out_dir, Json{{"scene", scene.name}, {"seed", seed}});
  out << "extended " << scene.name << ": " << f.terms().size() << " terms, " << rows << " grid samples";
  if (grid_stats.failures) out << " (" << grid_stats.failures << " not evaluable)";
  out << " -> " << args.out_dir.string() << "\n";
  return kPass;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  const Scene scene = load_scene(args.scene);
  const fs::path rpath = report_path(args.artifact);
  const Json report = load_json(rpath);
  if (report.value("schema", "") != kRunSchema) mismatch("not a run report: " + rpath.string());
  if (report.value("tool_version", "") != WHITNEY_VERSION) {
    mismatch("written by version " + report.value("tool_version", "?") + ", this is " + WHITNEY_VERSION);
  }
  if (report["scene"].value("sha", "") != scene_sha(args.scene)) mismatch("scene file differs from the extended one");

  const std::uint64_t seed = report.at("seed").get<std::uint64_t>();
  const ExtensionFn f = extend_field(scene, options_for(seed));
  const auto trace = f.trace();
  const Json& recorded = report.at("trace");
  if (recorded.size() != trace.size()) mismatch("term count differs");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (recorded[i].value("formula_hash", "") != trace[i].formula_hash || recorded[i].value("eta", 0.0) != trace[i].eta) {
      mismatch("term " + trace[i].stratum + " differs from the recorded assembly");
    }
  }

  std::vector<std::string> checks = args.checks.value_or(scene.plan.checks);
  for (const auto& c : checks) {
    if (c != "extension" && c != "whitney") fail(ErrorCode::kParse, "unknown check '" + c + "' (extension, whitney)");
  }
  CheckOptions copts;
  copts.seed = seed;
  copts.tol = args.tol.value_or(scene.plan.tol);
  copts.samples_per_stratum = args.samples.value_or(scene.plan.samples_per_stratum);

  Json result{{"schema", kVerifySchema},
              {"tool_version", WHITNEY_VERSION},
              {"scene", Json{{"name", scene.name}, {"sha", report["scene"]["sha"]}}},
              {"seed", seed},
              {"tol", copts.tol},
              {"samples_per_stratum", copts.samples_per_stratum},
              {"checks", checks}};
  bool pass = true;
  for (const auto& c : checks) {
    if (c == "extension") {
      const auto rep = check_extension(f.as_function(), scene, copts);
      pass = pass && rep.pass;
      result["extension"] = extension_json(rep);
      for (const auto& s : rep.strata) {
        out << (s.pass ? "PASS" : "FAIL") << " extension " << s.stratum << " max_rel=" << num(s.max_rel) << "\n";
      }
    } else {
      const auto rep = check_whitney(scene, seed);
      pass = pass && rep.pass;
      result["whitney"] = whitney_json(rep);
      std::size_t failed = 0;
      for (const auto& s : rep.series) failed += s.fit.pass ? 0 : 1;
      out << (rep.pass ? "PASS" : "FAIL") << " whitney " << rep.series.size() - failed << "/" << rep.series.size()
          << " series\n";
    }
  }
  result["verdict"] = pass ? "PASS" : "FAIL";
  const fs::path dir = rpath.parent_path().empty() ? fs::path(".") : rpath.parent_path();
  write_file(dir / "verify.json", dump(result));
  write_manifest(dir, Json{{"scene", scene.name}, {"seed", seed}});
  out << (pass ? "PASS" : "FAIL") << " verify " << scene.name << "\n";
  return pass ? kPass : kFail;
}

int cmd_plotdata(const fs::path& report_file, const std::string& selector, const std::optional<fs::path>& output,
                 std::ostream& out) {
  const fs::path rpath = report_path(report_file);
  const Json report = load_json(rpath);
  if (report.value("schema", "") != kRunSchema) mismatch("not a run report: " + rpath.string());
  const int n = report.at("scene").at("n").get<int>();
  const fs::path dir = rpath.parent_path().empty() ? fs::path(".") : rpath.parent_path();

  const auto colon = selector.find(':');
  const std::string kind = selector.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : selector.substr(colon + 1);
  std::ostringstream table;

  if (kind == "extension" || kind == "distance" || kind == "derivative") {
    // Columns of extension.csv: x0..x{n-1}, f, df_dx0.., dist_E.
    std::vector<std::size_t> keep;
    for (int i = 0; i < n; ++i) keep.push_back(static_cast<std::size_t>(i));
    std::string extra_header;
    if (kind == "extension") {
      if (!arg.empty()) fail(ErrorCode::kParse, "selector extension takes no argument");
      keep.push_back(static_cast<std::size_t>(n));
    } else if (kind == "distance") {
      if (!arg.empty()) fail(ErrorCode::kParse, "selector distance takes no argument");
      keep.push_back(static_cast<std::size_t>(2 * n + 1));
    } else {
      if (arg.rfind("alpha=", 0) != 0) fail(ErrorCode::kParse, "selector derivative needs alpha=a,b,..");
      const auto alpha = parse_ints(arg.substr(6), selector);
      if (static_cast<int>(alpha.size()) != n) fail(ErrorCode::kParse, "selector " + selector + ": alpha needs n entries");
      int degree = 0, axis = 0;
      for (int i = 0; i < n; ++i) {
        degree += alpha[static_cast<std::size_t>(i)];
        if (alpha[static_cast<std::size_t>(i)]) axis = i;
      }
      if (degree > 1) fail(ErrorCode::kParse, "selector " + selector + ": the grid stores derivatives up to order 1");
      keep.push_back(degree == 0 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n + 1 + axis));
    }
    std::ifstream in(dir / report.at("grid").at("file").get<std::string>(), std::ios::binary);
    if (!in) fail(ErrorCode::kParse, "missing grid file next to " + rpath.string());
    std::string line;
    while (std::getline(in, line)) {
      const auto cols = split(line, ',');
      std::string row;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] >= cols.size()) fail(ErrorCode::kParse, "malformed grid file");
        row += (k ? "," : "") + cols[keep[k]];
      }
      table << row << "\n";
    }
  } else if (kind == "flatness") {
    if (arg.rfind("kappa=", 0) != 0) fail(ErrorCode::kParse, "selector flatness needs kappa=k or kappa=a,b,..");
    const auto kappa = parse_ints(arg.substr(6), selector);
    table << "series,s,normalized\n";
    for (const auto& target : report.at("flatness")) {
      std::string tname = target.at("stratum").get<std::string>() + "@";
      for (std::size_t i = 0; i < target.at("target").size(); ++i) tname += (i ? ";" : "") + num(target["target"][i].get<double>());
      for (const auto& s : target.at("series")) {
        if (!s.contains("kappa")) continue;
        const auto k = s["kappa"].get<std::vector<int>>();
        const bool match = kappa.size() == 1 && n > 1 ? std::accumulate(k.begin(), k.end(), 0) == kappa[0] : k == kappa;
        if (!match) continue;
        std::string label = tname + ":";
        for (std::size_t i = 0; i < k.size(); ++i) label += (i ? "," : "") + std::to_string(k[i]);
        const auto& sc = s.at("scale");
        const auto& nv = s.at("normalized");
        for (std::size_t j = 0; j < sc.size(); ++j) {
          const auto cell = [](const Json& v) { return v.is_number() ? num(v.get<double>()) : std::string("nan"); };
          table << "\"" << label << "\"," << cell(sc[j]) << "," << cell(nv[j]) << "\n";
        }
      }
    }
  } else {
    fail(ErrorCode::kParse, "unknown selector '" + selector + "' (extension, derivative:alpha=.., distance, flatness:kappa=..)");
  }

  if (output) {
    write_file(*output, table.str());
  } else {
    out << table.str();
  }
  return kPass;
}

}  // namespace whitney::cli
