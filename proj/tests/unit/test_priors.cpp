#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "physattn/errors.hpp"
#include "physattn/priors.hpp"

using namespace physattn;
using priors::PriorKind;
using priors::PriorSpec;

namespace {

FeatureSequence ramp() { return FeatureSequence::scalars(std::vector<double>{0.0, 1.0, 2.0}); }

ControlParams quiet(double alpha, double c_heat = 2.0) { return derive_params(alpha, {c_heat, 1.0, 0.0, 0.0}); }

PriorSpec spec_of(PriorKind kind, bool insulated = true) {
  PriorSpec s;
  s.kind = kind;
  s.insulated = insulated;
  return s;
}

void expect_values(const FeatureSequence& f, std::vector<double> expected, double tol = 1e-15) {
  ASSERT_EQ(f.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(f.values()[i], expected[i], tol) << "index " << i;
}

}  // namespace

TEST(PriorLabels, RoundTrip) {
  for (const PriorKind k : priors::kAllPriors) EXPECT_EQ(priors::parse_prior_kind(priors::label(k)), k);
  EXPECT_EQ(priors::label(PriorKind::identity), "ori");
  EXPECT_THROW((void)priors::parse_prior_kind("diffusion"), DomainError);
}

TEST(EffectiveNeighbor, PeriodicWrapAndSubstitution) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  EXPECT_EQ(priors::effective_neighbor(ramp(), all, 0, -1).values()[0], 2.0);
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  EXPECT_EQ(priors::effective_neighbor(ramp(), m, 0, +1).values()[0], 0.0);
}

TEST(EffectiveNeighbor, PerPositionOnMixedGrid) {
  const FeatureSequence f(2, {1, 2, 1}, {1.0, 2.0, 10.0, 20.0});
  const MaskSequence m(2, 1, 2, {1, 1, 1, 0});
  const auto n = priors::effective_neighbor(f, m, 0, +1);
  EXPECT_EQ(n.values()[0], 10.0);
  EXPECT_EQ(n.values()[1], 2.0);
}

TEST(InsulatedLaplacian, HandValues) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  EXPECT_EQ(priors::insulated_laplacian(ramp(), all, 0).values()[0], 3.0);
  EXPECT_EQ(priors::insulated_laplacian(ramp(), all, 1).values()[0], 0.0);
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  EXPECT_EQ(priors::insulated_laplacian(ramp(), m, 0).values()[0], 2.0);
}

TEST(InsulatedLaplacian, SingleFrameIsZero) {
  const auto f = FeatureSequence::scalars(std::vector<double>{5.0});
  EXPECT_EQ(priors::insulated_laplacian(f, MaskSequence::filled(1, 1, 1, true), 0).values()[0], 0.0);
}

TEST(NoiseField, RegionSplit) {
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  const auto field = priors::build_noise_field(m, derive_params(0.5, {2.0, 1.0, 0.1, 1.0}));
  EXPECT_DOUBLE_EQ(field.at(0, 0, 0), 0.05);
  EXPECT_DOUBLE_EQ(field.at(1, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(field.at(2, 0, 0), 0.05);

  const auto zero = priors::build_noise_field(m, derive_params(0.0));
  EXPECT_EQ(zero.at(1, 0, 0), 0.0);
  const auto uniform = priors::build_noise_field(MaskSequence::filled(3, 1, 1, true), derive_params(0.5));
  for (const double v : uniform.values()) EXPECT_DOUBLE_EQ(v, 0.05);
}

TEST(StepPrior, HeatExample) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const auto r = priors::step_prior(ramp(), nullptr, all, spec_of(PriorKind::heat), quiet(0.5),
                                    OperatorSchedule(1, 0.1), nullptr);
  expect_values(r.state, {0.3, 1.0, 1.7});
  EXPECT_NEAR(priors::framewise_sum(r.state)[0], 3.0, 1e-15);
  EXPECT_EQ(r.previous, ramp());
}

TEST(StepPrior, HeatInsulatedExample) {
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  const auto r = priors::step_prior(ramp(), nullptr, m, spec_of(PriorKind::heat), quiet(0.5),
                                    OperatorSchedule(1, 0.1), nullptr);
  expect_values(r.state, {0.2, 1.0, 1.8});
}

TEST(StepPrior, BurgersExample) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const auto r = priors::step_prior(ramp(), nullptr, all, spec_of(PriorKind::burgers), quiet(0.5),
                                    OperatorSchedule(1, 0.1), nullptr);
  expect_values(r.state, {0.0, 0.9, 2.1});
}

TEST(StepPrior, WaveFirstStepWithZeroVelocity) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  PriorSpec s = spec_of(PriorKind::wave);
  s.wave_c = 0.1;
  const FeatureSequence x = ramp();
  const auto r = priors::step_prior(x, &x, all, s, quiet(0.5), OperatorSchedule(1, 0.1), nullptr);
  expect_values(r.state, {0.3, 1.0, 1.7});
}

TEST(StepPrior, WaveDefaultsToDtauNu) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const FeatureSequence x = ramp();
  const auto r = priors::step_prior(x, &x, all, spec_of(PriorKind::elasticity), quiet(0.5),
                                    OperatorSchedule(1, 0.1), nullptr);
  expect_values(r.state, {0.3, 1.0, 1.7});
}

TEST(StepPrior, ConservationLinearFlux) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const auto r = priors::step_prior(ramp(), nullptr, all, spec_of(PriorKind::conservation), quiet(0.5),
                                    OperatorSchedule(1, 0.1), nullptr);
  // s - 0.05 * (s_{t+1} - s_{t-1}) with periodic wrap
  expect_values(r.state, {0.0 - 0.05 * (1 - 2), 1.0 - 0.05 * (2 - 0), 2.0 - 0.05 * (0 - 1)});
}

TEST(StepPrior, ContractErrors) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const OperatorSchedule one(1, 0.1);
  EXPECT_THROW((void)priors::step_prior(ramp(), nullptr, all, spec_of(PriorKind::wave), quiet(0.5), one, nullptr),
               DomainError);
  EXPECT_THROW(
      (void)priors::step_prior(ramp(), nullptr, all, spec_of(PriorKind::heat), derive_params(0.5), one, nullptr),
      DomainError);
  EXPECT_THROW((void)priors::step_prior(ramp(), nullptr, MaskSequence::filled(2, 1, 1, true),
                                        spec_of(PriorKind::heat), quiet(0.5), one, nullptr),
               ShapeError);
  PriorSpec bad = spec_of(PriorKind::wave);
  bad.wave_c = -1.0;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(StepPrior, OverflowNamesPriorAndIteration) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const auto big = FeatureSequence::scalars(std::vector<double>{1e300, -1e300, 1e300});
  try {
    (void)priors::step_prior(big, nullptr, all, spec_of(PriorKind::burgers), quiet(0.5), OperatorSchedule(1, 0.1),
                             nullptr, 4);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.stage(), "burgers");
    EXPECT_EQ(e.iteration(), 4u);
  }
}

TEST(StepPrior, MatchesBruteForceOnRandomInputs) {
  std::mt19937_64 gen(2024);
  const std::pair<PriorKind, oracle::Rule> rules[] = {
      {PriorKind::identity, oracle::Rule::identity}, {PriorKind::burgers, oracle::Rule::burgers},
      {PriorKind::wave, oracle::Rule::wave},         {PriorKind::conservation, oracle::Rule::conservation_linear},
      {PriorKind::elasticity, oracle::Rule::elasticity}, {PriorKind::heat, oracle::Rule::heat},
  };
  std::uniform_int_distribution<std::size_t> frames(3, 8), side(1, 2), depth(1, 4);
  std::uniform_real_distribution<double> coeff(0.0, 0.5);
  for (const auto& [kind, rule] : rules) {
    for (const bool insulated : {true, false}) {
      for (int trial = 0; trial < 40; ++trial) {
        const std::size_t T = frames(gen), H = side(gen), W = side(gen), D = depth(gen);
        const auto x = oracle::random_features(gen, T, H, W, D);
        const auto prev = oracle::random_features(gen, T, H, W, D);
        const auto m = oracle::random_masks(gen, T, H, W);
        const double alpha = coeff(gen) * 2;
        const ControlParams p = quiet(alpha);
        PriorSpec s = spec_of(kind, insulated);
        double c = p.nu();
        if (kind == PriorKind::wave) s.wave_c = c = coeff(gen);
        if (kind == PriorKind::elasticity) s.elastic_c = c = coeff(gen);
        if (kind == PriorKind::conservation) {
          c = coeff(gen) * 4 - 1;
          s.flux = priors::LinearFlux{c};
        }
        const auto got = priors::step_prior(x, &prev, m, s, p, OperatorSchedule(1, 0.1), nullptr).state;
        const auto want = oracle::step(rule, oracle::flatten(x, m),
                                       std::vector<double>(prev.values().begin(), prev.values().end()), 0.1, c,
                                       insulated);
        for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(got.values()[i], want[i], 1e-12);
      }
    }
  }
}

TEST(StepPrior, QuadraticFluxMatchesBruteForce) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_features(gen, 5, 2, 1, 3);
    const auto m = oracle::random_masks(gen, 5, 2, 1);
    PriorSpec s = spec_of(PriorKind::conservation);
    s.flux = priors::QuadraticFlux{};
    const auto got = priors::step_prior(x, nullptr, m, s, quiet(0.5), OperatorSchedule(1, 0.2), nullptr).state;
    const auto want = oracle::step(oracle::Rule::conservation_quadratic, oracle::flatten(x, m), {}, 0.2, 0, true);
    for (std::size_t i = 0; i < want.size(); ++i) ASSERT_NEAR(got.values()[i], want[i], 1e-12);
  }
}

TEST(RunPhysicsOperator, SingleIterationEqualsStep) {
  std::mt19937_64 gen(5);
  const auto x = oracle::random_features(gen, 6, 2, 2, 3);
  const auto m = oracle::random_masks(gen, 6, 2, 2);
  for (const PriorKind k : priors::kAllPriors) {
    const auto a = priors::run_physics_operator(x, m, spec_of(k), quiet(0.5), OperatorSchedule(1, 0.1), nullptr);
    const auto b = priors::step_prior(x, &x, m, spec_of(k), quiet(0.5), OperatorSchedule(1, 0.1), nullptr).state;
    EXPECT_EQ(a, b) << priors::label(k);
  }
}

TEST(RunPhysicsOperator, HeatConvergesToMean) {
  const auto all = MaskSequence::filled(3, 1, 1, true);
  const auto out =
      priors::run_physics_operator(ramp(), all, spec_of(PriorKind::heat), quiet(0.5), OperatorSchedule(200, 0.1),
                                   nullptr);
  for (const double v : out.values()) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(RunPhysicsOperator, IdentityIsBitExactWithoutNoise) {
  std::mt19937_64 gen(6);
  const auto x = oracle::random_features(gen, 5, 3, 3, 2);
  const auto m = oracle::random_masks(gen, 5, 3, 3);
  EXPECT_EQ(priors::run_physics_operator(x, m, spec_of(PriorKind::identity), quiet(0.7), OperatorSchedule(37, 0.1),
                                         nullptr),
            x);
}

TEST(RunPhysicsOperator, HeatDissipatesAndConservesBelowStabilityLimit) {
  std::mt19937_64 gen(8);
  const auto all = MaskSequence::filled(7, 2, 1, true);
  for (const double rate : {0.05, 0.2, 0.5}) {
    FeatureSequence x = oracle::random_features(gen, 7, 2, 1, 2);
    const auto sum0 = priors::framewise_sum(x);
    double e = priors::sequence_energy(x);
    for (int k = 0; k < 100; ++k) {
      x = priors::step_prior(x, nullptr, all, spec_of(PriorKind::heat), quiet(0.5, rate / 0.1 / 0.5),
                             OperatorSchedule(1, 0.1), nullptr)
              .state;
      const double next = priors::sequence_energy(x);
      ASSERT_LE(next, e * (1 + 1e-12));
      e = next;
    }
    const auto sum = priors::framewise_sum(x);
    for (std::size_t i = 0; i < sum.size(); ++i) EXPECT_NEAR(sum[i], sum0[i], 1e-9);
  }
}

TEST(RunPhysicsOperator, InsulatedBackgroundUntouchedForAllPriors) {
  std::mt19937_64 gen(9);
  auto bits = std::vector<std::uint8_t>(6 * 6);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t p = 0; p < 6; ++p) bits[t * 6 + p] = (p == 0 || p == 4) ? 0 : ((t + p) % 3 != 0);
  const MaskSequence m(6, 2, 3, bits);
  for (const PriorKind k : priors::kAllPriors) {
    // centred Burgers steepens into overflow on O(1) data within 100 steps
    const auto x = oracle::random_features(gen, 6, 2, 3, 2, k == PriorKind::burgers ? 0.05 : 3.0);
    const auto out = priors::run_physics_operator(x, m, spec_of(k), quiet(0.4), OperatorSchedule(100, 0.1), nullptr);
    for (std::size_t t = 0; t < 6; ++t)
      for (const std::size_t p : {0u, 4u})
        for (std::size_t c = 0; c < 2; ++c) ASSERT_EQ(out.at(t, p / 3, p % 3, c), x.at(t, p / 3, p % 3, c));
  }
}

TEST(RunPhysicsOperator, LeakageBlockedBetweenSubjectFrames) {
  const auto f = FeatureSequence::scalars(std::vector<double>{0.5, -0.3, 0.7});
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  for (const PriorKind k : priors::kAllPriors) {
    if (k == PriorKind::burgers) continue;
    EXPECT_EQ(priors::run_physics_operator(f, m, spec_of(k), quiet(0.5), OperatorSchedule(50, 0.1), nullptr)
                  .values()[1],
              -0.3);
  }
}

TEST(RunPhysicsOperator, UninsulatedHeatLeaksIntoBackground) {
  const auto f = FeatureSequence::scalars(std::vector<double>{0.5, -0.3, 0.7});
  const auto m = MaskSequence::scalars(std::vector<int>{1, 0, 1});
  const auto out = priors::run_physics_operator(f, m, spec_of(PriorKind::heat, false), quiet(0.5),
                                                OperatorSchedule(1, 0.1), nullptr);
  EXPECT_NE(out.values()[1], -0.3);
}

TEST(RunPhysicsOperator, BurgersBlowsUpOnLargeFeatures) {
  std::mt19937_64 gen(10);
  const auto x = oracle::random_features(gen, 8, 2, 2, 4, 10.0);
  const auto all = MaskSequence::filled(8, 2, 2, true);
  EXPECT_THROW((void)priors::run_physics_operator(x, all, spec_of(PriorKind::burgers), quiet(0.5),
                                                  OperatorSchedule(50, 0.1), nullptr),
               DivergenceError);
}

TEST(RunPhysicsOperator, NoiseIncrementStatistics) {
  const std::size_t n = 100000;
  const FeatureSequence x(n, {1, 1, 1}, std::vector<double>(n, 0.0));
  const auto all = MaskSequence::filled(n, 1, 1, true);
  const ControlParams p = derive_params(0.0, {2.0, 1.0, 0.3, 0.3});
  const RngHandle rng(11, "noise");
  const auto r = priors::step_prior(x, nullptr, all, spec_of(PriorKind::heat), p, OperatorSchedule(1, 0.1), &rng);
  double s = 0, s2 = 0;
  for (const double v : r.state.values()) {
    s += v;
    s2 += v * v;
  }
  const double var = 2 * 0.1 * 0.3 * 0.3;
  EXPECT_NEAR(s / n, 0.0, 3 * std::sqrt(var / n));
  EXPECT_NEAR(s2 / n, var, 3 * var * std::sqrt(2.0 / n));
}

TEST(RunPhysicsOperator, NoisyRunIsDeterministic) {
  std::mt19937_64 gen(12);
  const auto x = oracle::random_features(gen, 5, 2, 2, 2);
  const auto m = oracle::random_masks(gen, 5, 2, 2);
  const RngHandle a(3, "p"), b(3, "p"), c(4, "p");
  const auto ra = priors::run_physics_operator(x, m, spec_of(PriorKind::heat), derive_params(0.5),
                                               OperatorSchedule(10, 0.1), &a);
  EXPECT_EQ(ra, priors::run_physics_operator(x, m, spec_of(PriorKind::heat), derive_params(0.5),
                                             OperatorSchedule(10, 0.1), &b));
  EXPECT_NE(ra, priors::run_physics_operator(x, m, spec_of(PriorKind::heat), derive_params(0.5),
                                             OperatorSchedule(10, 0.1), &c));
}
