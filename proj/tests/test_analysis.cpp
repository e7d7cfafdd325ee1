#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pdifmp/analysis.hpp"
#include "pdifmp/glioma.hpp"
#include "support.hpp"

namespace pdifmp {
namespace {

using testing::error_kind_of;

Trajectory path_1d(const std::vector<double>& t, const std::vector<double>& y) {
    Trajectory out(1);
    out.start(t[0], std::span<const double>(&y[0], 1), 0);
    for (std::size_t i = 1; i < t.size(); ++i) out.push_sample(t[i], std::span<const double>(&y[i], 1), 0);
    return out;
}

TrajectoryPair pair_1d(const std::vector<double>& t, const std::vector<double>& a, const std::vector<double>& b) {
    return {path_1d(t, a), path_1d(t, b)};
}

TEST(StrongRmse, IdenticalPathsGiveZero) {
    std::vector<TrajectoryPair> pairs;
    for (double j = 0; j < 5; ++j) pairs.push_back(pair_1d({0, 0.5, 1}, {j, j + 1.0, 2.0}, {j, j + 1.0, 2.0}));
    EXPECT_EQ(strong_rmse(pairs), 0.0);
}

TEST(StrongRmse, ConstantOffset) {
    std::vector<TrajectoryPair> pairs;
    for (int j = 0; j < 4; ++j) pairs.push_back(pair_1d({0, 1, 2}, {0, 1, 2}, {-1.5, -0.5, 0.5}));
    EXPECT_DOUBLE_EQ(strong_rmse(pairs), 1.5);
}

TEST(StrongRmse, MaximumOverGridOfRootMeanSquare) {
    // Differences (0, 0.5) and (0, 0) at t=1: sqrt(0.25 / 2) = sqrt(0.125).
    std::vector<TrajectoryPair> pairs;
    pairs.push_back(pair_1d({0, 1}, {0, 0.5}, {0, 0}));
    pairs.push_back(pair_1d({0, 1}, {0, 0}, {0, 0}));
    const auto d = strong_rmse_detail(pairs);
    EXPECT_NEAR(d.value, std::sqrt(0.125), 1e-15);
    EXPECT_NEAR(d.value, 0.35355, 1e-5);
    EXPECT_EQ(d.index, 1u);
    EXPECT_EQ(d.paths, 2u);
}

TEST(StrongRmse, UsesCommonPrefixAcrossPairs) {
    std::vector<TrajectoryPair> pairs;
    pairs.push_back(pair_1d({0, 1}, {0, 1}, {0, 0}));
    pairs.push_back(pair_1d({0, 0.5, 1}, {0, 0, 100}, {0, 0, 0}));
    // Index 2 exists only in the second pair and is ignored.
    EXPECT_NEAR(strong_rmse(pairs), std::sqrt(0.5), 1e-15);
}

TEST(StrongRmse, MismatchedGridsBreakCoupling) {
    std::vector<TrajectoryPair> pairs;
    pairs.push_back({path_1d({0, 1}, {0, 0}), path_1d({0, 0.9}, {0, 0})});
    EXPECT_EQ(error_kind_of([&] { strong_rmse(pairs); }), ErrorKind::coupling_broken);
    pairs[0] = {path_1d({0, 1}, {0, 0}), path_1d({0, 0.5, 1}, {0, 0, 0})};
    EXPECT_EQ(error_kind_of([&] { strong_rmse(pairs); }), ErrorKind::coupling_broken);
    std::vector<TrajectoryPair> none;
    EXPECT_EQ(error_kind_of([&] { strong_rmse(none); }), ErrorKind::argument);
}

TEST(StrongRmse, PermutationInvariantAndIdenticalPairsDilute) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    std::vector<TrajectoryPair> pairs;
    for (int j = 0; j < 30; ++j) {
        pairs.push_back(pair_1d({0, 0.5, 1}, {0, n01(rng), n01(rng)}, {0, n01(rng), n01(rng)}));
    }
    const double base = strong_rmse(pairs);
    auto shuffled = pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(strong_rmse(shuffled), base, 1e-12);
    auto diluted = pairs;
    diluted.push_back(pair_1d({0, 0.5, 1}, {1, 2, 3}, {1, 2, 3}));
    EXPECT_NEAR(strong_rmse(diluted), base * std::sqrt(30.0 / 31.0), 1e-12);
}

TEST(StrongRmse, EuclideanNormOverComponents) {
    Trajectory a(2), b(2);
    const double ya[] = {3.0, 4.0}, yb[] = {0.0, 0.0};
    a.start(0.0, ya, 0);
    b.start(0.0, yb, 0);
    std::vector<TrajectoryPair> pairs{{a, b}};
    EXPECT_DOUBLE_EQ(strong_rmse(pairs), 5.0);
    EXPECT_DOUBLE_EQ(sup_difference(pairs[0]), 5.0);
}

TEST(SupDifference, LargestDistanceOnTheGrid) {
    const auto p = pair_1d({0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1.5, 1.0, 3.0});
    EXPECT_DOUBLE_EQ(sup_difference(p), 1.0);
    EXPECT_EQ(sup_difference(path_1d({0, 1}, {2, 2}), path_1d({0, 1}, {2, 2})), 0.0);
    EXPECT_EQ(error_kind_of([] { sup_difference(path_1d({0, 1}, {0, 0}), path_1d({0, 2}, {0, 0})); }),
              ErrorKind::coupling_broken);
}

TEST(FitSlope, ExactLines) {
    std::vector<ConvergenceRow> half, one;
    for (double h : {0.5, 0.25, 0.125, 0.0625}) {
        half.push_back({h, 3.0 * std::sqrt(h), 0, 1});
        one.push_back({h, 0.7 * h, 0, 1});
    }
    EXPECT_NEAR(fit_slope(half).slope, 0.5, 1e-12);
    EXPECT_NEAR(fit_slope(half).intercept, std::log2(3.0), 1e-12);
    EXPECT_NEAR(fit_slope(one).slope, 1.0, 1e-12);
}

TEST(FitSlope, NoisyHalfOrderData) {
    std::vector<ConvergenceRow> rows;
    const double noise[] = {1.05, 0.97, 1.02, 0.96, 1.04};
    for (int i = 0; i < 5; ++i) {
        const double h = std::pow(2.0, -i - 3);
        rows.push_back({h, std::sqrt(h) * noise[i], 0, 1});
    }
    const double s = fit_slope(rows).slope;
    EXPECT_GT(s, 0.4);
    EXPECT_LT(s, 0.6);
}

TEST(FitSlope, RecoversRandomLines) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double slope = u(rng), intercept = u(rng);
        std::vector<ConvergenceRow> rows;
        for (int k = 1; k <= 6; ++k) {
            const double h = std::pow(2.0, -k);
            rows.push_back({h, std::exp2(intercept + slope * std::log2(h)), 0, 1});
        }
        const auto fit = fit_slope(rows);
        ASSERT_NEAR(fit.slope, slope, 1e-12);
        ASSERT_NEAR(fit.intercept, intercept, 1e-12);
    }
}

TEST(FitSlope, Errors) {
    std::vector<ConvergenceRow> one_row{{0.1, 1.0, 0, 1}};
    EXPECT_EQ(error_kind_of([&] { fit_slope(one_row); }), ErrorKind::argument);
    std::vector<ConvergenceRow> zero_metric{{0.1, 1.0, 0, 1}, {0.05, 0.0, 0, 1}};
    EXPECT_EQ(error_kind_of([&] { fit_slope(zero_metric); }), ErrorKind::argument);
    std::vector<ConvergenceRow> same_h{{0.1, 1.0, 0, 1}, {0.1, 2.0, 0, 1}};
    EXPECT_EQ(error_kind_of([&] { fit_slope(same_h); }), ErrorKind::argument);
    std::vector<ConvergenceRow> bad_h{{-0.1, 1.0, 0, 1}, {0.1, 2.0, 0, 1}};
    EXPECT_EQ(error_kind_of([&] { fit_slope(bad_h); }), ErrorKind::argument);
}

TEST(ConvergenceReport, KeepsRowsSortedAndFitsLazily) {
    ConvergenceReport r(MetricKind::strong_rmse);
    r.add({0.125, 0.35, 0, 1});
    r.refit();
    EXPECT_FALSE(r.fit().has_value());
    r.add({0.5, 0.7, 0, 1});
    r.add({0.25, 0.5, 0, 1});
    ASSERT_EQ(r.rows().size(), 3u);
    EXPECT_EQ(r.rows()[0].h, 0.5);
    EXPECT_EQ(r.rows()[2].h, 0.125);
    r.refit();
    ASSERT_TRUE(r.fit().has_value());
    EXPECT_EQ(to_string(r.kind()), "strong_rmse");
}

TEST(KsStatistic, HandComputedExamples) {
    const std::vector<double> one{0.5};
    const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    EXPECT_DOUBLE_EQ(ks_statistic(one, uniform), 0.5);
    const std::vector<double> quarters{0.25, 0.75};
    EXPECT_DOUBLE_EQ(ks_statistic(quarters, uniform), 0.25);
    const std::vector<double> empty;
    EXPECT_EQ(error_kind_of([&] { ks_statistic(empty, uniform); }), ErrorKind::argument);
}

gbm::ModelWithExactFlow jump_free_gbm() {
    gbm::Params p;
    p.mu = 0.05;
    p.sigma = 0.2;
    p.y0 = 1.0;
    p.rate = gbm::ConstantRate{0.0};
    p.rate_bound = 1e-12;  // keeps proposals (and extra grid points) out of [0, T]
    p.jump = gbm::NoJumpUpdate{};
    return gbm::make_model(p);
}

TEST(WeakError, ExactAgainstItselfIsZero) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const auto F = [](const HybridState& x) { return x.y[0]; };
    const auto est = weak_error_estimate(mf.model, *mf.exact_flow, *mf.exact_flow, F, 0.1, 500, 3);
    EXPECT_EQ(est.estimate, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
    EXPECT_EQ(est.paths, 500u);
}

TEST(WeakError, ConstantFunctionalIsZero) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const auto est = weak_error_estimate(mf, [](const HybridState&) { return 7.0; }, 0.1, 500, 3);
    EXPECT_EQ(est.estimate, 0.0);
}

TEST(WeakError, NoExactFlowIsUnsupported) {
    gbm::ModelWithExactFlow bare;
    bare.model = gbm::make_model(gbm::weak_test_defaults()).model;
    const auto F = [](const HybridState& x) { return x.y[0]; };
    EXPECT_EQ(error_kind_of([&] { weak_error_estimate(bare, F, 0.1, 10, 1); }), ErrorKind::unsupported_model);
    EXPECT_EQ(error_kind_of([&] { weak_error_adaptive(bare, F, 0.1, 1, {}); }), ErrorKind::unsupported_model);
}

TEST(WeakError, JumpFreeEulerBiasMatchesClosedForm) {
    const auto mf = jump_free_gbm();
    const auto F = [](const HybridState& x) { return x.y[0]; };
    for (double h : {0.25, 0.125}) {
        const auto est = weak_error_estimate(mf, F, h, 200000, 99);
        const double n = 1.0 / h;
        const double expected = std::pow(1.0 + 0.05 * h, n) - std::exp(0.05);
        EXPECT_NEAR(est.estimate, expected, 4.0 * est.std_error) << "h=" << h;
        EXPECT_LT(est.std_error, 0.25 * std::abs(expected));
    }
}

TEST(WeakError, IndependentOfThreadCountAndSplitting) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const auto F = [](const HybridState& x) { return x.y[0] * x.y[0]; };
    const auto one = weak_error_estimate(mf, F, 0.125, 3000, 11, {1, 0});
    const auto four = weak_error_estimate(mf, F, 0.125, 3000, 11, {4, 0});
    EXPECT_EQ(one.estimate, four.estimate);
    EXPECT_EQ(one.std_error, four.std_error);
}

TEST(WeakError, AdaptiveStopsAtTargetOrCap) {
    const auto mf = jump_free_gbm();
    const auto F = [](const HybridState& x) { return x.y[0]; };
    AdaptiveWeakOptions o;
    o.initial_paths = 1000;
    o.max_paths = 400000;
    o.target_relative_se = 0.3;
    const auto est = weak_error_adaptive(mf, F, 0.25, 5, o);
    EXPECT_TRUE(est.std_error <= 0.3 * std::abs(est.estimate) || est.paths == o.max_paths);
    EXPECT_GE(est.paths, 1000u);
    o.initial_paths = 1;
    EXPECT_EQ(error_kind_of([&] { weak_error_adaptive(mf, F, 0.25, 5, o); }), ErrorKind::argument);
}

TEST(TemVsTsm, MedianSupDifferenceShrinksWithStep) {
    glioma::Params g;
    g.horizon = 5.0;
    const auto model = glioma::make_model(g);
    const EulerMaruyamaFlow em;
    const GliomaSplittingFlow split(g);
    std::vector<double> medians;
    for (double h : {1e-1, 1e-2, 1e-3}) {
        SimulationOptions o;
        o.step = h;
        std::vector<double> sups;
        for (int j = 0; j < 21; ++j) {
            auto stream = DriverStream::fork_for_path(31, j);
            sups.push_back(sup_difference(simulate_coupled_pair(model, em, split, stream, o)));
        }
        std::nth_element(sups.begin(), sups.begin() + 10, sups.end());
        medians.push_back(sups[10]);
    }
    EXPECT_GT(medians[0], medians[1]);
    EXPECT_GT(medians[1], medians[2]);
}

}  // namespace
}  // namespace pdifmp
