#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "qsens/error.hpp"
#include "qsens/measures.hpp"
#include "qsens/perturbation.hpp"
#include "test_support.hpp"

namespace qsens {
namespace {

using testing::deg;

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qsens::Error thrown";
  return Errc::InvalidArgument;
}

// (1 - e) rho + e/4 1 without the [0, 1] restriction; valid for full-rank rho
// and small |e|.
DensityMatrix channel_unchecked(const DensityMatrix& rho, double e) {
  return DensityMatrix(rho.matrix() * Complex{1 - e} + ComplexMatrix::identity(4) * Complex{e / 4});
}

// Central difference at 0 with one Richardson level.
double derivative_at_zero(const std::function<double(double)>& g, double h) {
  const double d1 = (g(h) - g(-h)) / (2 * h);
  const double d2 = (g(h / 2) - g(-h / 2)) / h;
  return (4 * d2 - d1) / 3;
}

TEST(RankInfo, SplitsDimension) {
  for (const auto& rho : testing::fixture_states()) {
    const RankInfo r = rank_info(rho);
    EXPECT_EQ(r.n_nonzero + r.n_zero, rho.dim());
  }
  EXPECT_EQ(rank_info(phi_plus()).n_nonzero, 1u);
  EXPECT_EQ(rank_info(mems(0.8)).n_nonzero, 2u);
  EXPECT_EQ(rank_info(mems(0.5)).n_nonzero, 3u);
  EXPECT_EQ(rank_info(rho1(0.1, 0.3)).n_nonzero, 4u);
}

TEST(AmplitudeFidelityExpansion, Examples) {
  const auto mixed = expand_amplitude_fidelity(fully_mixed(4));
  EXPECT_DOUBLE_EQ(mixed.constant, 1.0);
  EXPECT_NEAR(mixed.coeff_eps, 0.0, 1e-15);
  EXPECT_NEAR(mixed.coeff_eps2, 0.0, 1e-15);

  const auto pure = expand_amplitude_fidelity(phi_plus());
  EXPECT_NEAR(pure.coeff_eps, -3.0 / 8, 1e-15);
  EXPECT_NEAR(pure.coeff_eps2, -9.0 / 128, 1e-14);  // matches sqrt(1 - 3e/4)

  const auto full = expand_amplitude_fidelity(rho1(0.2, deg(22.5)));
  EXPECT_NEAR(full.coeff_eps, 0.0, 1e-15);
  EXPECT_LT(full.coeff_eps2, 0.0);
}

TEST(AmplitudeFidelityExpansion, ValidityBound) {
  // Smallest nonzero eigenvalue 0.05: N lambda / |1 - N lambda| = 0.2 / 0.8.
  EXPECT_NEAR(expand_amplitude_fidelity(rho1(0.2, deg(22.5))).validity_bound, 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(expand_amplitude_fidelity(fully_mixed(4)).validity_bound, 1.0);
  for (const auto& rho : testing::fixture_states()) {
    const double b = expand_amplitude_fidelity(rho).validity_bound;
    EXPECT_GT(b, 0.0);
    EXPECT_LE(b, 1.0);
  }
}

TEST(AmplitudeFidelityExpansionProperty, TruncationErrorScaling) {
  // Full rank: error ~ eps^3. Rank deficient: ~ eps^2 beyond first order.
  for (const auto& rho : testing::fixture_states()) {
    const auto e = expand_amplitude_fidelity(rho);
    const bool full = rank_info(rho).n_zero == 0;
    const double p = full ? 3.0 : 2.0;
    const auto err = [&](double eps) { return std::abs(exact_delta(Measure::AmplitudeFidelity, rho, eps) - e.evaluate(eps)); };
    const double k = std::max(err(1e-3) / std::pow(1e-3, p), 1.0);
    for (double eps : {1e-4, 1e-5}) EXPECT_LE(err(eps), 2 * k * std::pow(eps, p) + 1e-14) << describe(Rho1Params{eps, 0});
  }
}

TEST(ExactDelta, Identities) {
  for (const auto& rho : testing::fixture_states()) {
    const double sl = linear_entropy(rho);
    double spread = 0;
    for (double l : rho.eigenvalues()) spread += std::abs(l - 0.25);
    for (double eps : {0.0, 0.01, 0.1, 0.5, 0.9, 1.0}) {
      EXPECT_NEAR(exact_delta(Measure::LinearEntropy, rho, eps), (2 * eps - eps * eps) * (1 - sl), 1e-12);
      EXPECT_NEAR(exact_delta(Measure::TraceDistance, rho, eps), eps / 2 * spread, 1e-12);
    }
    EXPECT_NEAR(exact_delta(Measure::AmplitudeFidelity, rho, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(exact_delta(Measure::Fidelity, rho, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(exact_delta(Measure::VonNeumannEntropy, rho, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(exact_delta(Measure::Concurrence, rho, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(exact_deviation(Measure::Fidelity, rho, 0.0), 0.0, 1e-12);
  }
  EXPECT_EQ(code_of([] { exact_delta(Measure::TraceDistance, phi_plus(), 1.5); }), Errc::EpsilonOutOfRange);
}

TEST(ExactRelations, LinearEntropyAndTraceDistanceExpansionsAreExact) {
  for (const auto& rho : testing::fixture_states()) {
    const auto sl = expand_linear_entropy(rho);
    const auto td = expand_trace_distance(rho);
    EXPECT_DOUBLE_EQ(sl.validity_bound, 1.0);
    for (int i = 0; i <= 10; ++i) {
      const double eps = i / 10.0;
      EXPECT_NEAR(sl.evaluate(eps), exact_delta(Measure::LinearEntropy, rho, eps), 1e-12);
      EXPECT_NEAR(td.evaluate(eps), exact_delta(Measure::TraceDistance, rho, eps), 1e-12);
    }
  }
}

TEST(VonNeumannExpansion, Examples) {
  const auto mixed = expand_von_neumann(fully_mixed(4));
  EXPECT_NEAR(mixed.coeff_eps_log_eps, 0.0, 1e-15);
  EXPECT_NEAR(mixed.coeff_eps, 0.0, 1e-12);
  EXPECT_NEAR(expand_von_neumann(phi_plus()).coeff_eps_log_eps, -0.75, 1e-15);
  EXPECT_NEAR(expand_von_neumann(mems(0.8)).coeff_eps_log_eps, -0.5, 1e-15);
  EXPECT_NEAR(expand_von_neumann(rho1(0.1, 0.2)).coeff_eps_log_eps, 0.0, 1e-15);
}

TEST(VonNeumannExpansion, PureStateLinearCoefficient) {
  // 1 - 0 - 1/4 + (3/4) ln 4 for any pure two-qubit state.
  EXPECT_NEAR(expand_von_neumann(pure_nonmax(deg(9))).coeff_eps, 0.75 + 0.75 * std::log(4.0), 1e-12);
}

TEST(VonNeumannExpansionProperty, FirstOrderAccuracy) {
  for (const auto& rho : testing::fixture_states()) {
    const auto e = expand_von_neumann(rho);
    for (double eps : {1e-4, 1e-5, 1e-6}) {
      const double exact = exact_delta(Measure::VonNeumannEntropy, rho, eps);
      EXPECT_NEAR(e.evaluate(eps) / exact, 1.0, 1e-2) << eps;
    }
  }
}

TEST(VonNeumannExpansionProperty, LogTermDominatesOnlyLogarithmically) {
  // Delta S / (-(n0/N) eps ln eps) tends to 1, but the linear term decays as
  // 1/ln(1/eps): after removing it the ratio is within 5% at 1e-6.
  for (const auto& rho : {phi_plus(), pure_nonmax(deg(11.25)), mems(0.8), mems(0.5)}) {
    const auto e = expand_von_neumann(rho);
    const double eps = 1e-6;
    const double exact = exact_delta(Measure::VonNeumannEntropy, rho, eps);
    const double log_part = e.coeff_eps_log_eps * eps * std::log(eps);
    EXPECT_NEAR((exact - e.coeff_eps * eps) / log_part, 1.0, 0.05);
    const double raw_small = exact / log_part;
    const double raw_large = exact_delta(Measure::VonNeumannEntropy, rho, 1e-3) / (e.coeff_eps_log_eps * 1e-3 * std::log(1e-3));
    EXPECT_LT(std::abs(raw_small - 1), std::abs(raw_large - 1));
  }
}

TEST(ConcurrenceExpansion, RejectsSeparableInput) {
  EXPECT_EQ(code_of([] { expand_concurrence(basis_state(0, 1)); }), Errc::NotEntangled);
  EXPECT_EQ(code_of([] { expand_concurrence(rho1(0.9, deg(22.5))); }), Errc::NotEntangled);
  EXPECT_EQ(code_of([] { expand_tangle(fully_mixed(4)); }), Errc::NotEntangled);
}

TEST(ConcurrenceExpansion, BellStateTotalSlope) {
  const auto e = expand_concurrence(phi_plus());
  EXPECT_EQ(e.rank.n_nonzero, 1u);
  for (double eps : {1e-6, 1e-4, 1e-2}) EXPECT_NEAR(e.evaluate(eps) / eps, -1.5, 1e-6) << eps;
  for (double eps : {0.0, 0.1, 0.3, 0.6, 0.8, 1.0}) {
    EXPECT_NEAR(concurrence(rho1(eps, deg(22.5))), std::max(0.0, 1 - 1.5 * eps), 1e-10);
  }
}

TEST(ConcurrenceExpansion, MatchesFiniteDifferenceOnFullRankStates) {
  for (const auto& rho : testing::full_rank_fixtures()) {
    const auto e = expand_concurrence(rho);
    EXPECT_TRUE(e.zero_mode_weights.empty());
    EXPECT_GT(e.validity_bound, 0.0);
    const double fd = derivative_at_zero([&](double x) { return concurrence(channel_unchecked(rho, x)); }, 1e-5);
    EXPECT_NEAR(e.coeff_eps, fd, 1e-4);
  }
}

TEST(ConcurrenceExpansion, WernerCoefficient) {
  // C = 1 - 3 eps/2 along the Werner line; at eps0 = 0.1, d/deps of the
  // composed channel is (1 - eps0) (-3/2).
  EXPECT_NEAR(expand_concurrence(rho1(0.1, deg(22.5))).coeff_eps, -1.35, 1e-9);
}

TEST(ConcurrenceExpansionProperty, RankDeficientStatesTrackExactChange) {
  for (const auto& rho : {mems(0.8), mems(0.5), mems(0.3), mems(2.0 / 3.0)}) {
    const auto e = expand_concurrence(rho);
    for (double eps : {1e-6, 1e-5, 1e-4}) {
      const double exact = exact_delta(Measure::Concurrence, rho, eps);
      EXPECT_NEAR(e.evaluate(eps), exact, 50 * eps * eps + 1e-10 + 1e-3 * std::abs(exact)) << eps;
    }
  }
}

// Pure non-maximal states: no sqrt(eps) weights, and the fixed eps^2/16 per
// zero mode makes the slope -C + 1/(4C) - 3/4 while the exact one is -C - 1/2.
TEST(ConcurrenceExpansion, PureNonMaximalSlope) {
  for (double theta_deg : {5.0, 11.25, 18.0}) {
    const auto rho = pure_nonmax(deg(theta_deg));
    const double c = concurrence(rho);
    const auto e = expand_concurrence(rho);
    ASSERT_EQ(e.zero_mode_weights.size(), 3u);
    for (double w : e.zero_mode_weights) EXPECT_NEAR(w, 0.0, 1e-10);
    EXPECT_NEAR(e.coeff_eps, -c + 1.0 / (4.0 * c), 1e-9);
    EXPECT_NEAR(e.evaluate(1e-6) / 1e-6, -c + 1.0 / (4.0 * c) - 0.75, 1e-6);
    EXPECT_NEAR(exact_delta(Measure::Concurrence, rho, 1e-2) / 1e-2, -c - 0.5, 1e-9);
  }
}

TEST(TangleExpansion, ScaleIsTwiceConcurrence) {
  for (const auto& rho : testing::full_rank_fixtures()) {
    const auto c = expand_concurrence(rho);
    const auto t = expand_tangle(rho);
    EXPECT_NEAR(t.coeff_eps, 2 * concurrence(rho) * c.coeff_eps, 1e-12);
  }
}

TEST(TangleExpansionProperty, AlgebraicIdentity) {
  for (const auto& rho : testing::fixture_states()) {
    for (double eps : {1e-3, 1e-2, 0.1, 0.3}) {
      const double dc = exact_delta(Measure::Concurrence, rho, eps);
      const double dt = exact_delta(Measure::Tangle, rho, eps);
      EXPECT_LE(std::abs(dt - 2 * concurrence(rho) * dc), dc * dc + 1e-12);
    }
  }
}

TEST(ScalingReport, Examples) {
  const auto grid = geometric_grid(1e-6, 1e-2, 17);
  const auto werner = rho1(0.2, deg(22.5));
  EXPECT_NEAR(order_scaling_report(werner, Measure::AmplitudeFidelity, grid).estimated_order, 2.0, 0.05);
  for (const auto& rho : testing::fixture_states()) {
    const auto r = order_scaling_report(rho, Measure::TraceDistance, grid);
    EXPECT_NEAR(r.estimated_order, 1.0, 0.01);
    EXPECT_GE(r.r_squared, 0.0);
    EXPECT_LE(r.r_squared, 1.0);
  }
  EXPECT_NEAR(order_scaling_report(phi_plus(), Measure::LinearEntropy, grid).estimated_order, 1.0, 0.02);
}

TEST(ScalingReport, FlagsLogTermOnlyForRankDeficientEntropy) {
  const auto grid = geometric_grid(1e-6, 1e-2, 17);
  EXPECT_TRUE(order_scaling_report(phi_plus(), Measure::VonNeumannEntropy, grid).flagged_log_term);
  EXPECT_TRUE(order_scaling_report(mems(0.8), Measure::VonNeumannEntropy, grid).flagged_log_term);
  EXPECT_FALSE(order_scaling_report(rho1(0.2, deg(22.5)), Measure::VonNeumannEntropy, grid).flagged_log_term);
  EXPECT_FALSE(order_scaling_report(phi_plus(), Measure::TraceDistance, grid).flagged_log_term);
}

TEST(ScalingReport, FixedPointHasNoOrder) {
  const auto grid = geometric_grid(1e-6, 1e-2, 9);
  const auto r = order_scaling_report(fully_mixed(4), Measure::TraceDistance, grid);
  EXPECT_TRUE(std::isnan(r.estimated_order));
  EXPECT_LT(r.max_abs_deviation, 1e-14);
}

TEST(ScalingReport, DegenerateGrids) {
  const std::vector<double> one{1e-3};
  const std::vector<double> same{1e-3, 1e-3};
  const std::vector<double> bad{0.0, 1e-3};
  EXPECT_EQ(code_of([&] { order_scaling_report(phi_plus(), Measure::Fidelity, one); }), Errc::DegenerateGrid);
  EXPECT_EQ(code_of([&] { order_scaling_report(phi_plus(), Measure::Fidelity, same); }), Errc::DegenerateGrid);
  EXPECT_EQ(code_of([&] { order_scaling_report(phi_plus(), Measure::Fidelity, bad); }), Errc::DegenerateGrid);
}

TEST(GeometricGrid, EndpointsAndRatio) {
  const auto g = geometric_grid(1e-6, 1e-2, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-2);
  EXPECT_NEAR(g.back(), 1e-6, 1e-20);
  EXPECT_NEAR(g[1] / g[0], 0.1, 1e-12);
}

TEST(Expand, FidelityIsSquaredAmplitudeExpansion) {
  const auto rho = rho1(0.2, deg(22.5));
  const auto f = expand(Measure::AmplitudeFidelity, rho);
  const auto F = expand(Measure::Fidelity, rho);
  EXPECT_NEAR(F.coeff_eps, 2 * f.coeff_eps, 1e-15);
  EXPECT_NEAR(F.coeff_eps2, 2 * f.coeff_eps2 + f.coeff_eps * f.coeff_eps, 1e-15);
  EXPECT_EQ(to_string(Measure::VonNeumannEntropy), "von_neumann_entropy");
}

}  // namespace
}  // namespace qsens
