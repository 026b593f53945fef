#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "trotterforge/experiments.hpp"

using namespace trotterforge;

namespace {

struct Fixture {
  Model model;
  Decomposition decomposition;
  DenseOperator observable;
};

Fixture standard(int length) {
  Fixture f{tfim_fixture(length), {}, {}};
  f.decomposition = decompose_even_odd(f.model.interaction, f.model.graph);
  f.observable = f.model.observable_operator();
  return f;
}

}  // namespace

TEST(Fit, RecoversExactLine) {
  const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-14);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-14);
  EXPECT_THROW(fit_line({1, 1, 1}, {1, 2, 3}), DegenerateFitError);
}

TEST(Fit, LogLogDropsFloorPoints) {
  const auto fit = fit_loglog({1, 2, 4, 8}, {1.0, 0.25, 0.0625, 1e-14});
  EXPECT_EQ(fit.points, 3u);
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_THROW(fit_loglog({1, 2, 4}, {1e-13, 1e-14, 0.0}), DegenerateFitError);
}

TEST(Fit, ExpectedOrder) {
  EXPECT_EQ(expected_order(1), 2);
  EXPECT_EQ(expected_order(2), 2);
  EXPECT_EQ(expected_order(3), 4);
  EXPECT_EQ(expected_order(4), 4);
}

TEST(Convergence, SecondOrderOnStandardFixture) {
  const auto f = standard(8);
  const auto report = convergence_study(f.decomposition, f.observable, 1.0, 1, 3, {64, 4, 16, 8, 32}, "tfim");
  EXPECT_EQ(report.alpha_expected, 2);
  ASSERT_EQ(report.samples.size(), 5u);
  for (std::size_t i = 1; i < report.samples.size(); ++i) EXPECT_LT(report.samples[i - 1].n, report.samples[i].n);
  EXPECT_GE(report.fitted_order, 1.9);
  EXPECT_GT(report.r_squared, 0.999);
}

TEST(Convergence, FourthOrderOnStandardFixture) {
  const auto f = standard(8);
  const auto report = convergence_study(f.decomposition, f.observable, 1.0, 3, 3, {2, 4, 8, 16});
  EXPECT_EQ(report.alpha_expected, 4);
  EXPECT_GE(report.fitted_order, 3.7);
}

TEST(Convergence, OrderNearExpectedAcrossArities) {
  const auto f = standard(6);
  struct Case {
    int m, r;
    std::vector<int> ns;
  };
  for (const Case& c : {Case{1, 3, {4, 8, 16, 32, 64}}, Case{3, 3, {2, 4, 8, 16}}, Case{3, 5, {2, 4, 8, 16}}}) {
    const auto report = convergence_study(f.decomposition, f.observable, 1.0, c.m, c.r, c.ns);
    EXPECT_GE(report.fitted_order, report.alpha_expected - 0.3) << "m=" << c.m << " r=" << c.r;
  }
}

TEST(Convergence, HigherOrderIsMoreAccurateAtFixedN) {
  const auto f = standard(8);
  const std::vector<int> ns{4, 8, 16};
  const auto first = convergence_study(f.decomposition, f.observable, 1.0, 1, 3, ns);
  const auto third = convergence_study(f.decomposition, f.observable, 1.0, 3, 3, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) EXPECT_LE(third.samples[i].error, first.samples[i].error);
}

TEST(Convergence, FloorExclusionStaysWithinStderr) {
  // Dense roundoff grows with n, so measured errors seldom fall below the
  // floor. Append sub-floor samples to a measured series and refit.
  const auto f = standard(6);
  const auto report = convergence_study(f.decomposition, f.observable, 0.5, 3, 3, {2, 4, 8, 16, 32});
  std::vector<double> ns, errs;
  for (const auto& s : report.samples) {
    ns.push_back(s.n);
    errs.push_back(s.error);
  }
  for (double sub_floor : {1e-13, 0.0}) {
    ns.push_back(2 * ns.back());
    errs.push_back(sub_floor);
  }
  const auto fit = fit_loglog(ns, errs);
  EXPECT_EQ(fit.points, report.points_used);
  EXPECT_LE(std::abs(-fit.slope - report.fitted_order), report.fit_stderr);
}

TEST(Convergence, CommutingHamiltonianSignalsDegenerateFit) {
  const auto g = LatticeGraph::chain(4);
  Interaction phi;
  for (const auto& [a, b] : g.edges()) phi.add(PauliString({a, b}, "ZZ"), 1.0);
  for (Vertex x = 0; x < 4; ++x) phi.add(PauliString::single(x, Pauli::Z), 0.4);
  const auto d = decompose_even_odd(phi, g);
  const auto o = to_dense(PauliString({1}, "Z"), g.vertices());
  EXPECT_THROW(convergence_study(d, o, 1.0, 1, 3, {4, 8, 16}), DegenerateFitError);
}

TEST(Convergence, RejectsBadStepLists) {
  const auto f = standard(4);
  EXPECT_THROW(convergence_study(f.decomposition, f.observable, 1.0, 1, 3, {4, 8}), ValidationError);
  EXPECT_THROW(convergence_study(f.decomposition, f.observable, 1.0, 1, 3, {4, 6, 8}), ValidationError);
  EXPECT_THROW(convergence_study(f.decomposition, f.observable, 1.0, 1, 3, {0, 4, 8}), ValidationError);
  EXPECT_THROW(convergence_study(f.decomposition, f.observable, 1.0, 1, 4, {1, 2, 4}), ValidationError);
}

TEST(SingleStep, ExponentsAndAliasing) {
  const auto f = standard(6);
  const std::vector<double> mus{0.2, 0.1, 0.05, 0.025};
  const auto first = single_step_order(f.decomposition, f.observable, 1, 3, mus);
  EXPECT_EQ(first.exponent_expected, 3);
  EXPECT_GE(first.exponent, 2.8);
  const auto second = single_step_order(f.decomposition, f.observable, 2, 3, mus);
  for (std::size_t i = 0; i < mus.size(); ++i) EXPECT_EQ(second.samples[i].error, first.samples[i].error);
  const auto third = single_step_order(f.decomposition, f.observable, 3, 3, {0.4, 0.2, 0.1, 0.05});
  EXPECT_GE(third.exponent, 4.7);
}

TEST(Lightcone, RadiusGrowsWithTime) {
  const Model model = tfim_fixture(10);
  const auto o = model.observable_operator();
  const auto report = lightcone_study(model, o, model.observable->support(), {2.0, 0.0, 0.5, 1.0});
  ASSERT_EQ(report.radius_at_threshold.size(), 4u);
  EXPECT_EQ(report.radius_at_threshold[0].first, 0.0);
  EXPECT_EQ(report.radius_at_threshold[0].second, 0);
  for (std::size_t i = 1; i < report.radius_at_threshold.size(); ++i)
    EXPECT_GE(report.radius_at_threshold[i].second, report.radius_at_threshold[i - 1].second);
  EXPECT_GT(report.radius_at_threshold.back().second, 1);
}

TEST(Lightcone, CommutingLayerStaysWithinRange) {
  Model model{LatticeGraph::chain(8), {}, {}, Observable{PauliString({3}, "Y"), 1.0}};
  for (Vertex x = 0; x + 1 < 8; x += 2) model.interaction.add(PauliString({x, x + 1}, "XX"), 1.0 + x);
  const int range = model.interaction.max_diameter(model.graph);
  const auto report = lightcone_study(model, model.observable_operator(), {3}, {0.1, 1.0, 10.0});
  for (const auto& [t, r_star] : report.radius_at_threshold) EXPECT_LE(r_star, range) << t;
}

TEST(Depth, TrivialEpsilonGivesOneStep) {
  const auto f = standard(4);
  const auto report = depth_search(f.decomposition, f.observable, 1.0, 1, 3, 10.0);
  EXPECT_EQ(report.n_min, 1);
  EXPECT_FALSE(report.error_below_n_min.has_value());
  EXPECT_EQ(report.factors_per_step, 3);
  EXPECT_EQ(report.total_depth, 3);
}

TEST(Depth, CertificateAgreesWithLinearScan) {
  const auto f = standard(6);
  const double eps = 1e-4;
  const auto report = depth_search(f.decomposition, f.observable, 1.0, 1, 3, eps);
  ASSERT_TRUE(report.error_below_n_min.has_value());
  EXPECT_LE(report.error_at_n_min, eps);
  EXPECT_GT(*report.error_below_n_min, eps);

  const EvolutionPlan plan(f.decomposition, f.observable.sites());
  const auto exact = heisenberg(plan.hamiltonian(), 1.0, f.observable);
  const auto schedule = suzuki_schedule(2, 1, 3);
  int scan = 1;
  while (error_norm(exact, run_schedule(plan, schedule, 1.0 / scan, scan, f.observable)) > eps) ++scan;
  EXPECT_EQ(report.n_min, scan);
  EXPECT_EQ(report.total_depth, 3LL * scan);
}

TEST(Depth, SecondOrderScalingOfStepCount) {
  const auto f = standard(6);
  const auto coarse = depth_search(f.decomposition, f.observable, 1.0, 1, 3, 1e-3);
  const auto fine = depth_search(f.decomposition, f.observable, 1.0, 1, 3, 1e-3 / 16);
  const double ratio = static_cast<double>(fine.n_min) / coarse.n_min;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 6.0);
}

TEST(Depth, CapRaisesResourceError) {
  const auto f = standard(4);
  EXPECT_THROW(depth_search(f.decomposition, f.observable, 1.0, 1, 3, 1e-10, 8), ResourceError);
  EXPECT_THROW(depth_search(f.decomposition, f.observable, 1.0, 1, 3, 0.0), ValidationError);
}

TEST(Truncation, LongRangeFixture) {
  const Model model = long_range_fixture(10);
  const auto o = model.observable_operator();
  const auto report = truncation_study(model, {8, 1, 2, 3, 4, 5, 6, 7, 9}, 0.5, 1.0, o);
  EXPECT_TRUE(report.bounds_hold());
  ASSERT_EQ(report.rows.size(), 9u);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    EXPECT_LT(report.rows[i - 1].range, report.rows[i].range);
    EXPECT_LE(report.rows[i].dyn_error, report.rows[i - 1].dyn_error + 1e-12);
  }
  // R = 9 is the chain diameter: nothing is truncated.
  EXPECT_EQ(report.rows.back().norm_lhs, 0.0);
  EXPECT_LT(report.rows.back().dyn_error, 1e-12);
}

TEST(Csv, HeadersAndPrecision) {
  std::ostringstream os;
  ConvergenceReport c;
  c.samples = {{4, 0.1}};
  write_convergence_csv(os, c);
  EXPECT_EQ(os.str(), "n,error\n4,0.10000000000000001\n");
  os.str("");
  write_step_csv(os, {});
  EXPECT_EQ(os.str(), "mu,error\n");
  os.str("");
  write_lightcone_csv(os, {});
  EXPECT_EQ(os.str(), "t,r,leakage\n");
  os.str("");
  write_depth_csv(os, DepthReport{1e-4, 12, 1e-5, 2e-4, 3, 36});
  EXPECT_EQ(os.str(), "epsilon,n_min,factors_per_step,total_depth\n0.0001,12,3,36\n");
  os.str("");
  write_truncation_csv(os, {});
  EXPECT_EQ(os.str(), "R,norm_lhs,norm_rhs,dyn_error\n");
}
