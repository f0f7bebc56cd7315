// Acceptance run: one PASS/FAIL line per criterion, with timings.
//
// Exit status is 0 when every criterion passes or fails only where a failure
// is expected and explained (criterion 6, see kExpectedFailures).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "commands.hpp"
#include "poly_oracle.hpp"
#include "whitney/cutoff.hpp"
#include "whitney/error.hpp"
#include "whitney/extension.hpp"
#include "whitney/field.hpp"
#include "whitney/geometry.hpp"
#include "whitney/jet.hpp"
#include "whitney/scene_io.hpp"
#include "whitney/verify.hpp"

namespace {

using namespace whitney;
namespace fs = std::filesystem;
using RJet = PointJet<Rational>;

// The sequence x_j = -2^-j has d(x, Lambda) = d(x, Z) = 2^-j, so it never
// enters the cone d(x, Lambda) <= 0.5 d(x, Z) and the probe must reject it.
const std::set<int> kExpectedFailures = {6};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Scene corpus(const std::string& name) { return load_scene(std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json"); }

const std::vector<std::string> kAgreementScenes = {"finite_set", "half_line", "parabola", "square_boundary",
                                                   "full_space"};

RJet jet_of(const oracle::Poly& mono, int n, int p, std::vector<Rational> base) {
  RJet out = RJet::zero(n, p, std::move(base));
  const auto& idx = out.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) out.at(k) = oracle::coeff(mono, idx[k].exponents()) * idx.factorial(k);
  return out;
}

bool matches(const RJet& got, const oracle::Poly& mono) {
  const auto& idx = got.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (got.at(k) != oracle::coeff(mono, idx[k].exponents()) * idx.factorial(k)) return false;
  }
  return true;
}

std::vector<Rational> random_point(int n, Rng& rng) {
  std::vector<Rational> x;
  for (int i = 0; i < n; ++i) x.push_back(oracle::random_rational(rng, 3, 4));
  return x;
}

Outcome jet_oracle() {
  Rng rng(1001);
  int mul_bad = 0, comp_bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int p = static_cast<int>(rng.below(5));
    const auto base = random_point(n, rng);
    const auto a = oracle::random_poly(n, p, rng);
    const auto b = oracle::random_poly(n, p, rng);
    if (!matches(jet_of(a, n, p, base) * jet_of(b, n, p, base), oracle::truncate(oracle::mul(a, b), p))) ++mul_bad;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int m = 1 + static_cast<int>(rng.below(3));
    const int p = static_cast<int>(rng.below(5));
    const auto base = random_point(n, rng);
    std::vector<RJet> inner;
    std::vector<oracle::Poly> offsets;
    std::vector<Rational> values;
    const oracle::Exps zero(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < m; ++i) {
      auto poly = oracle::random_poly(n, p, rng);
      inner.push_back(jet_of(poly, n, p, base));
      values.push_back(oracle::coeff(poly, zero));
      poly.erase(zero);
      offsets.push_back(std::move(poly));
    }
    const auto outer = oracle::random_poly(m, p, rng);
    const auto got = jet_compose(jet_of(outer, m, p, values), inner);
    if (!matches(got, oracle::compose_truncated(outer, offsets, n, p))) ++comp_bad;
  }
  return {mul_bad == 0 && comp_bad == 0, "jet_mul 500 pairs, " + std::to_string(mul_bad) + " mismatches; jet_compose 200 cases, " +
                                             std::to_string(comp_bad) + " mismatches"};
}

Outcome chain_rule() {
  Rng rng(1002);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int m = 1 + static_cast<int>(rng.below(3));
    const int p = 1 + static_cast<int>(rng.below(3));
    const auto x0 = random_point(n, rng);
    std::vector<oracle::Poly> g;
    std::vector<RJet> tg;
    std::vector<Rational> gx0;
    for (int i = 0; i < m; ++i) {
      g.push_back(oracle::random_poly(n, 2, rng, 0.5));
      tg.push_back(taylor_field_exact(oracle::to_expr(g.back(), n), p, x0));
      gx0.push_back(tg.back().value());
    }
    const auto h = oracle::random_poly(m, 3, rng, 0.5);
    const auto got = jet_compose(taylor_field_exact(oracle::to_expr(h, m), p, gx0), tg);
    const auto want = oracle::shift(oracle::compose(h, g, n), x0);
    if (!matches(got, oracle::truncate(want, p))) ++bad;
  }
  return {bad == 0, "200 random (g, h): " + std::to_string(bad) + " mismatches of jet_compose(T h, T g) vs T(h o g)"};
}

Outcome whitney_condition() {
  const auto cell = Cell::open(make_interval(-1.0, 1.0));
  const std::vector<double> uc = {0.0};
  double worst = kInf;
  for (int p = 1; p <= 3; ++p) {
    const auto field = taylor_field_spec(ExprFn::variable(1, 0).pow(p + 1), *cell, p, "I");
    for (auto gen : {PairGenerator::kRadial, PairGenerator::kBall}) {
      ResidualOptions opts;
      opts.generator = gen;
      const auto fit = rate_fit(max_residual_per_scale(whitney_residual(field, *cell, uc, MultiIndex({0}), opts)), p);
      worst = std::min(worst, fit.slope - p);
    }
  }
  const bool flagged = !check_whitney(corpus("defect_abs_sign")).pass;
  return {worst >= 0.75 && flagged, "T(x^{p+1}), p = 1..3: min slope - p = " + fmt(worst) +
                                        " (need >= 0.75); |x|/sign(x) " + (flagged ? "flagged FAIL" : "NOT flagged")};
}

Outcome agreement(const std::vector<std::string>& names, const ExtendOptions& eopts = {}) {
  bool pass = true;
  std::string detail;
  for (const auto& name : names) {
    const auto scene = corpus(name);
    CheckOptions copts;
    copts.samples_per_stratum = std::max<std::size_t>(100, scene.plan.samples_per_stratum);
    const auto rep = check_extension(extend_field(scene, eopts).as_function(), scene, copts);
    pass = pass && rep.pass && rep.max_rel < 1e-4;
    detail += (detail.empty() ? "" : "; ") + name + " " + fmt(rep.max_rel);
  }
  return {pass, "max rel deviation " + detail + " (tol 1e-4, 100 samples per stratum)"};
}

Outcome cutoff_contract() {
  bool pass = true;
  std::string detail;
  for (const auto& named : load_cutoff_specs(std::string(WHITNEY_SCENE_DIR) + "/cutoffs.json")) {
    const auto rep = verify_cutoff(build_cutoff(named.spec));
    double worst = 0.0;
    bool finite = true;
    for (const auto& b : rep.bounds) {
      finite = finite && std::isfinite(b.c_coarse) && std::isfinite(b.c_fine);
      worst = std::max(worst, b.ratio);
    }
    const bool ok = rep.plateau_failures == 0 && rep.support_failures == 0 && rep.range_failures == 0 &&
                    rep.samples >= 10000 && finite && worst < 2.0 && rep.bounds_stable &&
                    static_cast<int>(rep.bounds.size()) > 0;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + named.name + ": plateau " + std::to_string(rep.plateau_failures) + "/" +
              std::to_string(rep.plateau_samples) + ", support " + std::to_string(rep.support_failures) + "/" +
              std::to_string(rep.support_samples) + ", max ratio " + fmt(worst);
  }
  return {pass, detail};
}

std::vector<std::vector<double>> dyadic(double sign) {
  std::vector<std::vector<double>> seq;
  for (int j = 3; j <= 14; ++j) seq.push_back({sign * std::ldexp(1.0, -j)});
  return seq;
}

std::string tail(const FlatnessReport& rep) {
  std::string out;
  for (const auto& s : rep.series) {
    out += " kappa=" + s.kappa.to_string() + " last=" + fmt(s.normalized.back()) + (s.flat ? " flat" : " not flat");
  }
  return out;
}

Outcome flatness(bool positive_side) {
  const auto scene = corpus("half_line");
  const auto h = extend_on_cell(scene, "ray");
  const SetDesc Z = scene.set_of({"origin"});
  const SetDesc lambda = scene.set_of({"ray"});
  try {
    const auto rep = flatness_rate_probe(h.as_function(), Z, lambda, 0.5, scene.p, dyadic(positive_side ? 1.0 : -1.0));
    return {rep.flat, "x_j = " + std::string(positive_side ? "+" : "-") + "2^-j, j = 3..14:" + tail(rep)};
  } catch (const Error& e) {
    return {false, std::string("x_j = -2^-j, j = 3..14: ") + e.what() +
                       " (d(x,Lambda) = d(x,Z) = 2^-j, ratio 1 > C = 0.5)"};
  }
}

Outcome sandwich() {
  bool pass = true;
  std::string detail;
  double equality_gap = 0.0;
  bool saw_constant = false;
  Rng rng(1007);
  for (const char* name : {"parabola", "square_boundary"}) {
    const auto scene = corpus(name);
    for (const auto& s : scene.strata) {
      if (s.cell->is_point() || s.cell->map().empty()) continue;
      const auto lip = lipschitz_estimate(s.cell->map(), *s.cell->base(), 200);
      const auto rep = distance_sandwich_check(*s.cell, lip, sandwich_samples(*s.cell, 1000, rng), 1e-6);
      pass = pass && rep.violations == 0 && rep.inside_samples + rep.outside_samples >= 1000;
      detail += (detail.empty() ? "" : ", ") + s.id + " " + std::to_string(rep.violations) + "/" +
                std::to_string(rep.inside_samples + rep.outside_samples);
      if (s.cell->closed_form_distance()) {
        saw_constant = true;
        equality_gap = std::max(equality_gap, rep.max_equality_gap);
      }
    }
  }
  pass = pass && saw_constant && equality_gap <= 1e-9;
  return {pass, "violations " + detail + "; constant-graph equality gap " + fmt(equality_gap)};
}

Outcome induction_driver() {
  const auto with = agreement({"square_boundary"});
  ExtendOptions off;
  off.subtract_skeleton = false;
  const auto without = agreement({"square_boundary"}, off);
  return {with.pass && !without.pass, "with subtraction " + std::string(with.pass ? "PASS" : "FAIL") + " (" + with.detail +
                                          "); without " + (without.pass ? "PASS" : "FAIL") + " (" + without.detail + ")"};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("whitney-acceptance-" + std::to_string(::getpid()));
  std::ostringstream sink;
  bool same = true;
  std::string detail;
  for (const char* name : {"half_line", "square_boundary"}) {
    const std::string scene = std::string(WHITNEY_SCENE_DIR) + "/" + name + ".json";
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / name / run;
      fs::remove_all(dir);
      cli::cmd_extend({scene, dir, {}, 42}, sink);
      cli::cmd_verify({scene, dir, std::nullopt, std::nullopt, std::nullopt}, sink);
    }
    for (const char* file : {"report.json", "verify.json", "extension.csv", "manifest.json"}) {
      const bool eq = read_text(root / name / "a" / file) == read_text(root / name / "b" / file);
      same = same && eq;
      if (!eq) detail += std::string(" ") + name + "/" + file + " differs;";
    }
  }
  fs::remove_all(root);
  return {same, "two extend + verify runs, seed 42, half_line and square_boundary:" +
                    (detail.empty() ? std::string(" report.json, verify.json, extension.csv, manifest.json identical") : detail)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "jet algebra matches brute-force polynomials", 30, jet_oracle},
      {2, "chain rule on Taylor fields", 30, chain_rule},
      {3, "Whitney condition rate fit", 10, whitney_condition},
      {4, "extension agrees with the field on E", 120, [] { return agreement(kAgreementScenes); }},
      {5, "cutoff plateau, support and scaled bounds", 120, cutoff_contract},
      {6, "flatness rate on the half line", 10, [] { return flatness(false); }},
      {7, "distance sandwich on graph cells", 0, sandwich},
      {8, "skeleton subtraction is load-bearing", 120, induction_driver},
      {9, "byte-identical reports for equal seeds", 0, determinism},
  };
  int unexpected = 0, passed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      out.pass = false;
      out.detail += "; runtime over the " + fmt(c.limit_s) + " s limit";
    }
    const bool expected_fail = kExpectedFailures.count(c.id) > 0;
    if (out.pass) ++passed;
    if (!out.pass && !expected_fail) ++unexpected;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << fmt(secs)
              << " s): " << out.detail << (!out.pass && expected_fail ? " [expected failure]" : "") << std::endl;
    if (c.id == 6) {
      const auto info = flatness(true);
      std::cout << "     info: mirrored sequence inside the cone: " << (info.pass ? "flat" : "not flat") << ";"
                << " " << info.detail << std::endl;
    }
  }
  std::cout << passed << "/" << criteria.size() << " criteria PASS, " << unexpected << " unexpected failure(s)"
            << std::endl;
  return unexpected == 0 ? 0 : 1;
}
