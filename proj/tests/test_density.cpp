#include <gtest/gtest.h>

#include <map>
#include <random>

#include "support.hpp"

using namespace betadd;
using betadd::testing::G;
using betadd::testing::golden_system;
using betadd::testing::rat;

namespace {

StepFn<QuadExt> random_step(std::mt19937_64& rng, const QuadExt& end, int pieces) {
  std::vector<QuadExt> pts{QuadExt(0), end};
  for (int i = 0; i < pieces - 1; ++i) pts.push_back(betadd::testing::random_point(rng, end));
  StepFn<QuadExt> f;
  f.breakpoints = sorted_unique(std::move(pts));
  std::uniform_int_distribution<long> v(-20, 20);
  for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i) f.values.push_back(rat(v(rng), 7));
  return f;
}

}  // namespace

TEST(StepFn, IndicatorSumAndIntegral) {
  const auto f = indicator_sum(QuadExt(3), QuadExt(1), {{QuadExt(1), QuadExt(2)}, {QuadExt(2), QuadExt(1)}});
  ASSERT_EQ(f.pieces(), 3u);
  EXPECT_EQ(f(QuadExt(0)), QuadExt(4));
  EXPECT_EQ(f(rat(3, 2)), QuadExt(2));
  EXPECT_EQ(f(rat(5, 2)), QuadExt(1));
  EXPECT_EQ(f.integral(), QuadExt(4 + 2 + 1));
  EXPECT_EQ(f.integral(rat(1, 2), rat(3, 2)), QuadExt(3));
  EXPECT_THROW(f(QuadExt(3)), Error);
}

TEST(StepFn, CanonicalMergesEqualNeighbours) {
  StepFn<QuadExt> f{{0, 1, 2, 3}, {5, 5, 2}, false};
  const auto c = f.canonical();
  EXPECT_EQ(c.pieces(), 2u);
  EXPECT_EQ(c.integral(), f.integral());
}

TEST(PhiClosed, GoldenTerms) {
  const auto sys = golden_system();
  const auto p = phi_closed(sys);
  const QuadExt b = G();
  std::map<QuadExt, QuadExt> expected{
      {QuadExt(3) * b - QuadExt(4), b.pow(-1)}, {QuadExt(3) - b, b.pow(-2)},
      {QuadExt(2) * b - QuadExt(1), b.pow(-3)}, {QuadExt(1), QuadExt(1)},
      {b, b.pow(-1)},                           {b * b, b.pow(-2)},
      {b.pow(-3), b.pow(-3)},                   {b.pow(-2), b.pow(-4)},
      {b.pow(-1), b.pow(-3)},
  };
  EXPECT_EQ(p.base, QuadExt(1));
  ASSERT_EQ(p.terms.size(), expected.size());
  for (const auto& [k, w] : p.terms) {
    ASSERT_TRUE(expected.count(k)) << k;
    EXPECT_EQ(w, expected.at(k)) << k;
  }
  EXPECT_EQ(p.phi.end(), QuadExt(3));
}

TEST(PhiClosed, GoldenNormalizer) {
  const auto p = phi_closed(golden_system());
  const QuadExt b = G();
  EXPECT_EQ(p.phi.integral(), QuadExt(58) - QuadExt(31) * b);
  EXPECT_EQ(p.phi.integral(), (QuadExt(27) - QuadExt(4) * b) / (b * b));
  EXPECT_NE(p.phi.integral(), QuadExt(27) - QuadExt(4) * b);
  EXPECT_EQ(p.phi.integral().to_decimal(5), "7.84095");
}

TEST(PhiClosed, RequiresExactBackend) {
  const auto sys = GreedySystem<Real>::make(Real(G()), {Real(0), Real(3), Real(4)});
  try {
    phi_closed(sys);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExactBackendRequired);
  }
}

TEST(PhiClosed, NotEventuallyPeriodic) {
  const auto sys = GreedySystem<QuadExt>::make(rat(19, 10), {0, 1, rat(9, 5)});
  try {
    phi_closed(sys, 200);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotEventuallyPeriodic);
  }
}

TEST(PhiClosed, FiniteCriticalOrbitsMatchTruncation) {
  // Both critical points reach 0, so phi has finitely many terms.
  const auto sys = GreedySystem<QuadExt>::make(QuadExt(2), {0, 1, rat(3, 2)});
  ASSERT_EQ(sys.support_case(), SupportCase::MainCase);
  const auto closed = phi_closed(sys);
  const auto trunc = phi_truncated(sys, 20);
  EXPECT_EQ(closed.phi.canonical().breakpoints, trunc.phi.canonical().breakpoints);
  EXPECT_EQ(closed.phi.canonical().values, trunc.phi.canonical().values);
  EXPECT_EQ(sup_distance(phi_truncated(sys, 40).phi, trunc.phi), QuadExt(0));
  EXPECT_EQ(sup_distance(transfer_apply(sys, normalize(closed.phi)), normalize(closed.phi)), QuadExt(0));
}

TEST(PhiTruncated, MonotoneAndWithinTail) {
  const auto sys = golden_system();
  const auto closed = phi_closed(sys);
  for (std::size_t N = 1; N < 25; ++N) {
    const auto a = phi_truncated(sys, N);
    const auto b = phi_truncated(sys, N + 1);
    const auto diff = b.phi - a.phi;
    for (const auto& v : diff.values) EXPECT_GE(v.sign(), 0);
    EXPECT_LE(diff.sup_abs(), a.tail_sup_bound);
    EXPECT_LE(sup_distance(closed.phi, a.phi), a.tail_sup_bound) << N;
  }
}

TEST(PhiTruncated, AutoDepthHitsRelativeTarget) {
  const auto sys = GreedySystem<QuadExt>::make(rat(19, 10), {0, 1, rat(9, 5)});
  const auto p = phi(sys, DensityMode::Auto);
  EXPECT_EQ(p.mode, DensityMode::Truncated);
  EXPECT_TRUE(p.converged);
  const QuadExt mean = p.phi.integral() / sys.support_end();
  EXPECT_LE(p.tail_sup_bound, mean * QuadExt(Rational("1/1000000000000")));
}

TEST(Normalize, Basics) {
  const auto c = normalize(StepFn<QuadExt>::constant(QuadExt(3), rat(5, 2)));
  EXPECT_EQ(c.values.front(), rat(1, 3));
  EXPECT_TRUE(c.normalized);
  const auto h = normalize(phi_closed(golden_system()).phi);
  EXPECT_EQ(h.integral(), QuadExt(1));
  try {
    normalize(StepFn<QuadExt>::constant(QuadExt(3), QuadExt(0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroIntegral);
  }
}

TEST(Transfer, DoublingPreservesLebesgue) {
  const auto sys = GreedySystem<QuadExt>::classical(QuadExt(2));
  const auto one = StepFn<QuadExt>::constant(QuadExt(1), QuadExt(1));
  const auto l = transfer_apply(sys, one).canonical();
  ASSERT_EQ(l.pieces(), 1u);
  EXPECT_EQ(l.values.front(), QuadExt(1));
}

TEST(Transfer, GoldenFixedPointExact) {
  const auto sys = golden_system();
  const auto a = acim(sys, DensityMode::Closed);
  EXPECT_EQ(a.route, "wilkinson");
  const auto l = transfer_apply(sys, a.h);
  EXPECT_EQ(sup_distance(l, a.h), QuadExt(0));
  EXPECT_EQ(l.canonical().breakpoints, a.h.canonical().breakpoints);
  EXPECT_EQ(l.canonical().values, a.h.canonical().values);
}

TEST(Transfer, Linearity) {
  const auto sys = golden_system();
  std::mt19937_64 rng(51);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_step(rng, QuadExt(3), 5);
    const auto g = random_step(rng, QuadExt(3), 4);
    const QuadExt alpha = rat(static_cast<long>(i) - 7, 3);
    const auto lhs = transfer_apply(sys, f.scaled(alpha) + g);
    const auto rhs = transfer_apply(sys, f).scaled(alpha) + transfer_apply(sys, g);
    EXPECT_EQ(sup_distance(lhs, rhs), QuadExt(0));
  }
}

TEST(Transfer, PreservesIntegral) {
  const auto sys = GreedySystem<QuadExt>::make(rat(19, 10), {0, 1, rat(9, 5)});
  std::mt19937_64 rng(52);
  for (int i = 0; i < 10; ++i) {
    const auto f = random_step(rng, QuadExt(1), 6);
    EXPECT_EQ(transfer_apply(sys, f).integral(), f.integral());
  }
}

TEST(Parry, GoldenTwoStep) {
  const QuadExt b = G();
  const auto p = parry_density(b);
  EXPECT_EQ(p.mode, DensityMode::Closed);
  const auto h = normalize(p.phi).canonical();
  ASSERT_EQ(h.pieces(), 2u);
  EXPECT_EQ(h.breakpoints[1], b.inverse());
  const QuadExt norm = QuadExt(1) + b.pow(-2);
  EXPECT_EQ(h.values[0], (QuadExt(1) + b.inverse()) / norm);
  EXPECT_EQ(h.values[1], QuadExt(1) / norm);

  const auto sys = GreedySystem<QuadExt>::classical(b);
  EXPECT_EQ(sup_distance(transfer_apply(sys, h), h), QuadExt(0));
}

TEST(Parry, IntegerBetaIsUniform) {
  const auto a = acim(GreedySystem<QuadExt>::classical(QuadExt(2)));
  EXPECT_EQ(a.route, "parry");
  const auto h = a.h.canonical();
  ASSERT_EQ(h.pieces(), 1u);
  EXPECT_EQ(h.values.front(), QuadExt(1));
}

TEST(Parry, PeriodicOrbitOfOne) {
  // 1 + sqrt 2: T_c 1 = sqrt 2 - 1 = 1/beta, then 0.
  const QuadExt b = constants::one_plus_sqrt2();
  const auto o = parry_orbit(b, 10);
  ASSERT_TRUE(o.period);
  const auto p = parry_density(b);
  EXPECT_EQ(p.mode, DensityMode::Closed);
  const auto sys = GreedySystem<QuadExt>::classical(b);
  const auto h = normalize(p.phi);
  EXPECT_EQ(sup_distance(transfer_apply(sys, h), h), QuadExt(0));
}

TEST(Acim, IsoClassicalAgreesWithDeletedDigitPipeline) {
  const auto sys = GreedySystem<QuadExt>::make(constants::sqrt3(), {0, 1, 3});
  ASSERT_EQ(sys.support_case(), SupportCase::IsoClassical);
  for (std::size_t N : {5u, 12u, 20u}) {
    const auto parry = parry_density(sys.beta(), N);
    const auto wilk = phi_truncated(sys, N);
    EXPECT_EQ(parry.mode, DensityMode::Truncated);
    EXPECT_EQ(parry.phi.breakpoints, wilk.phi.breakpoints);
    EXPECT_EQ(parry.phi.values, wilk.phi.values);
  }
  const auto a = acim(sys, DensityMode::Truncated, 20);
  EXPECT_EQ(a.route, "parry");
  EXPECT_EQ(a.h.values, normalize(parry_density(sys.beta(), 20).phi).values);
}

TEST(Acim, TruncatedResidualWithinTwiceTail) {
  const std::vector<GreedySystem<QuadExt>> systems{
      GreedySystem<QuadExt>::make(constants::sqrt3(), {0, 1, 3}),
      GreedySystem<QuadExt>::make(constants::one_plus_sqrt2(), {0, 1, 3}),
      GreedySystem<QuadExt>::make(constants::sqrt7(), {0, 3, 7}),
      GreedySystem<QuadExt>::make(rat(19, 10), {0, 1, rat(9, 5)}),
  };
  for (const auto& sys : systems) {
    const auto a = acim(sys, DensityMode::Truncated);
    const auto r = sup_distance(transfer_apply(sys, a.h), a.h);
    EXPECT_LE(r, QuadExt(2) * a.tail_sup_bound) << sys.beta();
    EXPECT_GT(a.tail_sup_bound, QuadExt(0));
    EXPECT_EQ(a.h.integral(), QuadExt(1));
  }
}

TEST(Acim, FloatBackend) {
  const auto sys = GreedySystem<Real>::make(Real(constants::sqrt7()), {Real(0), Real(3), Real(7)});
  const auto a = acim(sys, DensityMode::Auto);
  const Real r = sup_distance(transfer_apply(sys, a.h), a.h);
  EXPECT_LE(r.to_double(), 2 * a.tail_sup_bound.to_double() + 1e-25);
  EXPECT_THROW(acim(sys, DensityMode::Closed), Error);
}

TEST(Acim, TowerMarginal) {
  // h on the gap left of key k equals (s/lambda_R)(1 + sum of weights with key >= right end).
  const auto sys = golden_system();
  const auto tw = build_tower(sys, 4);
  const auto a = acim(sys, DensityMode::Closed);
  const QuadExt scale = sys.support_end() / *tw.lambda_R_closed;
  for (std::size_t i = 0; i < a.h.pieces(); ++i) {
    QuadExt acc(1);
    for (const auto& [k, w] : tw.closed_phi->terms) {
      if (!(k < a.h.breakpoints[i + 1])) acc = acc + w;
    }
    EXPECT_EQ(a.h.values[i], scale * acc);
  }
}

TEST(Birkhoff, GoldenHistogram) {
  const auto sys = GreedySystem<Real>::make(Real(G()), {Real(0), Real(3), Real(4)});
  const auto h = convert<Real>(acim(golden_system(), DensityMode::Closed).h);
  BirkhoffOptions opt;
  opt.iterations = 200000;
  opt.seed = 7;
  const auto r = birkhoff_histogram(sys, h, opt);
  EXPECT_EQ(r.empirical.size(), 64u);
  double total = 0, expected = 0;
  for (double v : r.empirical) total += v;
  for (double v : r.expected) expected += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(expected, 1.0, 1e-12);
  EXPECT_LT(r.l1, 0.05);
  const auto again = birkhoff_histogram(sys, h, opt);
  EXPECT_EQ(again.empirical, r.empirical);
}

TEST(Birkhoff, DoublingMapUniform) {
  const auto sys = GreedySystem<Real>::classical(Real(2));
  const auto h = StepFn<Real>::constant(Real(1), Real(1));
  BirkhoffOptions opt;
  opt.seed = 3;
  const auto r = birkhoff_histogram(sys, h, opt);
  EXPECT_LT(r.l1, 0.01);
}

TEST(Birkhoff, MoreIterationsDoNotHurt) {
  const auto sys = GreedySystem<Real>::make(Real(G()), {Real(0), Real(3), Real(4)});
  const auto h = convert<Real>(acim(golden_system(), DensityMode::Closed).h);
  double small = 0, large = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    BirkhoffOptions opt;
    opt.seed = seed;
    opt.iterations = 50000;
    small += birkhoff_histogram(sys, h, opt).l1;
    opt.iterations = 200000;
    large += birkhoff_histogram(sys, h, opt).l1;
  }
  EXPECT_LT(large, small);
}

TEST(Birkhoff, RunsAreIndependentOfJobCount) {
  const auto sys = GreedySystem<Real>::make(Real(G()), {Real(0), Real(3), Real(4)});
  const auto h = convert<Real>(acim(golden_system(), DensityMode::Closed).h);
  BirkhoffOptions opt;
  opt.iterations = 20000;
  const auto one = birkhoff_runs(sys, h, opt, {1, 2, 3}, 1);
  const auto three = birkhoff_runs(sys, h, opt, {1, 2, 3}, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(one[i].seed, i + 1);
    EXPECT_EQ(one[i].empirical, three[i].empirical);
  }
}
