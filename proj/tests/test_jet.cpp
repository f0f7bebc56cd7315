#include <gtest/gtest.h>

#include <vector>

#include "poly_oracle.hpp"
#include "whitney/error.hpp"
#include "whitney/field.hpp"
#include "whitney/jet.hpp"

namespace whitney {
namespace {

using RJet = PointJet<Rational>;

RJet jet_of(const oracle::Poly& mono, int n, int p, std::vector<Rational> base) {
  RJet out = RJet::zero(n, p, std::move(base));
  const auto& idx = out.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) out.at(k) = oracle::coeff(mono, idx[k].exponents()) * idx.factorial(k);
  return out;
}

std::vector<Rational> random_point(int n, Rng& rng) {
  std::vector<Rational> x;
  for (int i = 0; i < n; ++i) x.push_back(oracle::random_rational(rng, 3, 4));
  return x;
}

void expect_matches(const RJet& got, const oracle::Poly& mono) {
  const auto& idx = got.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    EXPECT_EQ(got.at(k), oracle::coeff(mono, idx[k].exponents()) * idx.factorial(k)) << idx[k].to_string();
  }
}

TEST(Jet, MulMatchesTruncatedProduct) {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int p = static_cast<int>(rng.below(5));
    const auto base = random_point(n, rng);
    const auto a = oracle::random_poly(n, p, rng);
    const auto b = oracle::random_poly(n, p, rng);
    expect_matches(jet_of(a, n, p, base) * jet_of(b, n, p, base), oracle::truncate(oracle::mul(a, b), p));
  }
}

TEST(Jet, RingAxioms) {
  Rng rng(12);
  const int n = 2, p = 3;
  const auto base = random_point(n, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = jet_of(oracle::random_poly(n, p, rng), n, p, base);
    const auto b = jet_of(oracle::random_poly(n, p, rng), n, p, base);
    const auto c = jet_of(oracle::random_poly(n, p, rng), n, p, base);
    EXPECT_EQ((a * b).coeffs(), (b * a).coeffs());
    EXPECT_EQ(((a * b) * c).coeffs(), (a * (b * c)).coeffs());
    EXPECT_EQ((a * (b + c)).coeffs(), (a * b + a * c).coeffs());
    EXPECT_EQ((a * RJet::constant(n, p, base, Rational(1))).coeffs(), a.coeffs());
  }
}

TEST(Jet, ComposeMatchesSubstitution) {
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(3));
    const int m = 1 + static_cast<int>(rng.below(3));
    const int p = static_cast<int>(rng.below(4)) + 1;
    const auto base = random_point(n, rng);
    std::vector<RJet> inner;
    std::vector<oracle::Poly> offsets;
    std::vector<Rational> values;
    for (int i = 0; i < m; ++i) {
      auto poly = oracle::random_poly(n, p, rng);
      inner.push_back(jet_of(poly, n, p, base));
      values.push_back(oracle::coeff(poly, oracle::Exps(static_cast<std::size_t>(n), 0)));
      poly.erase(oracle::Exps(static_cast<std::size_t>(n), 0));
      offsets.push_back(poly);
    }
    const auto outer = oracle::random_poly(m, p, rng);
    const auto got = jet_compose(jet_of(outer, m, p, values), inner);
    expect_matches(got, oracle::truncate(oracle::compose(outer, offsets, n), p));
  }
}

TEST(Jet, ComposeIsAssociative) {
  Rng rng(14);
  const int p = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = random_point(1, rng);
    const auto k = jet_of(oracle::random_poly(1, p, rng), 1, p, base);
    const auto g = jet_of(oracle::random_poly(1, p, rng), 1, p, {k.value()});
    const auto h = jet_of(oracle::random_poly(1, p, rng), 1, p, {g.value()});
    const auto left = jet_compose(jet_compose(h, {g}), {k});
    const auto right = jet_compose(h, {jet_compose(g, {k})});
    EXPECT_EQ(left.coeffs(), right.coeffs());
  }
}

TEST(Jet, ChainRuleOnTaylorFields) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(2));
    const int m = 1 + static_cast<int>(rng.below(2));
    const int p = 1 + static_cast<int>(rng.below(3));
    const auto x0 = random_point(n, rng);
    std::vector<oracle::Poly> g;
    std::vector<RJet> tg;
    std::vector<Rational> gx0;
    for (int i = 0; i < m; ++i) {
      g.push_back(oracle::random_poly(n, 2, rng));
      tg.push_back(taylor_field_exact(oracle::to_expr(g.back(), n), p, x0));
      gx0.push_back(tg.back().value());
    }
    const auto h = oracle::random_poly(m, 3, rng);
    const auto got = jet_compose(taylor_field_exact(oracle::to_expr(h, m), p, gx0), tg);
    const auto hg = oracle::compose(h, g, n);
    for (std::size_t k = 0; k < got.indices().size(); ++k) {
      EXPECT_EQ(got.at(k), oracle::derivative_at(hg, x0, got.indices()[k].exponents()));
    }
  }
}

TEST(Jet, EvalIsTaylorPolynomial) {
  const int n = 2, p = 2;
  oracle::Poly mono = {{{0, 0}, Rational(1)}, {{1, 0}, Rational(2)}, {{1, 1}, Rational(3)}, {{0, 2}, Rational(1, 2)}};
  const auto j = jet_of(mono, n, p, {Rational(0), Rational(0)});
  const std::vector<Rational> off = {Rational(1, 2), Rational(-1)};
  EXPECT_EQ(jet_eval(j, off), Rational(1) + Rational(1) - Rational(3, 2) + Rational(1, 2));
}

TEST(Jet, DerivativeShiftDropsOrder) {
  const auto j = jet_of({{{3}, Rational(1)}}, 1, 3, {Rational(0)});  // x^3
  const auto d = derivative_shift(j, MultiIndex({1}));
  EXPECT_EQ(d.order(), 2);
  EXPECT_EQ(d.at(2), Rational(6));
}

TEST(Jet, MismatchedBasesAreRejected) {
  const auto a = RJet::constant(1, 2, {Rational(0)}, Rational(1));
  const auto b = RJet::constant(1, 2, {Rational(1)}, Rational(1));
  try {
    (void)(a * b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBaseMismatch);
  }
  const auto c = RJet::constant(1, 3, {Rational(0)}, Rational(1));
  EXPECT_THROW((void)(a + c), Error);
}

}  // namespace
}  // namespace whitney
