#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "whitney/cutoff.hpp"
#include "whitney/error.hpp"
#include "whitney/numdiff.hpp"

namespace whitney {
namespace {

SetDesc points(std::vector<std::vector<double>> xs) {
  SetDesc out;
  for (auto& x : xs) out.pieces.push_back(Cell::point(std::move(x)));
  return out;
}

SetDesc segment(double lo, double hi) {
  SetDesc out;
  out.pieces.push_back(Cell::open(make_interval(lo, hi)));
  return out;
}

TEST(Transition, MatchesClassicalSmoothstep) {
  const auto s1 = smooth_transition(1);
  EXPECT_EQ(s1.coeffs, (std::vector<double>{1, 0, -3, 2}));
  const auto s2 = smooth_transition(2);
  EXPECT_EQ(s2.coeffs, (std::vector<double>{1, 0, 0, -10, 15, -6}));
}

TEST(Transition, DerivativesVanishAtBothEnds) {
  for (int q = 1; q <= 4; ++q) {
    const auto s = smooth_transition(q);
    for (double end : {1e-10, 1.0 - 1e-10}) {
      const auto d = s.derivatives(end, q);
      for (int k = 1; k <= q; ++k) EXPECT_NEAR(d[static_cast<std::size_t>(k)], 0.0, 1e-5) << "q=" << q << " k=" << k;
    }
  }
}

TEST(RegularizedDistance, SinglePointIsExact) {
  RegularizedDistance d(points({{0.0, 0.0}}), 2);
  std::vector<std::vector<double>> xs = {{3.0, 4.0}, {-1.0, 0.5}, {0.1, -0.2}};
  d.calibrate(xs, 1.0);
  EXPECT_DOUBLE_EQ(d.value(xs[0]), 5.0);
  EXPECT_NEAR(d.comparability().c1, 1.0, 1e-12);
  EXPECT_NEAR(d.comparability().c2, 1.0, 1e-12);
}

TEST(RegularizedDistance, EmptySetIsOne) {
  RegularizedDistance d(SetDesc{}, 1);
  const std::vector<double> x = {0.3};
  EXPECT_EQ(d.value(x), 1.0);
}

TEST(RegularizedDistance, JetMatchesFiniteDifferences) {
  RegularizedDistance d(points({{0.0, 0.0}, {1.0, 0.0}}), 2);
  const std::vector<double> x = {0.4, 0.7};
  const auto jet = d.jet(x, 2);
  const ScalarFn f = [&d](std::span<const double> y) { return d.value(y); };
  for (std::size_t k = 0; k < jet.indices().size(); ++k) {
    const auto fd = finite_difference(f, jet.indices()[k], x, 1e-3);
    EXPECT_NEAR(jet.at(k), fd.value, 1e-6);
  }
}

TEST(Cutoff, IntervalAwayFromOrigin) {
  CutoffSpec spec;
  spec.n = 1;
  spec.W = segment(0.9, 1.1);
  spec.Z = points({{0.0}});
  spec.eta = 0.5;
  spec.q = 2;
  const auto omega = build_cutoff(spec);
  EXPECT_GT(omega.rho_prime(), 0.0);
  EXPECT_LT(omega.rho_prime(), spec.eta);
  const std::vector<double> inside = {1.0};
  const std::vector<double> far = {-0.5};
  EXPECT_EQ(omega.value(inside), 1.0);
  EXPECT_EQ(omega.value(far), 0.0);

  CutoffCheckOptions opts;
  opts.samples = 2000;
  const auto rep = verify_cutoff(omega, opts);
  EXPECT_TRUE(rep.plateau_ok);
  EXPECT_TRUE(rep.support_ok);
  EXPECT_TRUE(rep.bounds_stable);
  EXPECT_GT(rep.plateau_samples, 0u);
  EXPECT_GT(rep.support_samples, 0u);
}

TEST(Cutoff, JetAgreesWithFiniteDifferencesInTransition) {
  CutoffSpec spec;
  spec.n = 2;
  spec.W = points({{1.0, 0.0}});
  spec.Z = points({{0.0, 0.0}, {2.0, 1.0}});
  spec.q = 2;
  const auto omega = build_cutoff(spec);
  const ScalarFn f = [&omega](std::span<const double> y) { return omega.value(y); };
  int checked = 0;
  for (double t = 0.0; t < 0.5; t += 0.005) {
    const std::vector<double> x = {1.0 - t, 0.1 * t};
    const double v = omega.value(x);
    if (v <= 0.05 || v >= 0.95) continue;
    const auto jet = omega.jet(x, 2);
    for (std::size_t k = 0; k < jet.indices().size(); ++k) {
      const auto fd = finite_difference(f, jet.indices()[k], x, 1e-4);
      EXPECT_NEAR(jet.at(k), fd.value, 1e-4 * (1.0 + std::abs(fd.value)));
    }
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Cutoff, EmptyWIsZero) {
  CutoffSpec spec;
  spec.n = 1;
  spec.Z = points({{0.0}});
  const auto omega = build_cutoff(spec);
  const std::vector<double> x = {0.5};
  EXPECT_EQ(omega.value(x), 0.0);
}

TEST(GEta, ClassifiesAndRejectsZ) {
  const auto W = points({{1.0}});
  const auto Z = points({{0.0}});
  const std::vector<double> near = {1.05};
  const std::vector<double> far = {0.5};
  const std::vector<double> onz = {0.0};
  EXPECT_EQ(in_g_eta(near, W, Z, 0.5), GMembership::kIn);
  EXPECT_EQ(in_g_eta(far, W, Z, 0.5), GMembership::kOut);
  EXPECT_THROW(in_g_eta(onz, W, Z, 0.5), Error);
}

}  // namespace
}  // namespace whitney
