#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "pdifmp/analysis.hpp"
#include "pdifmp/gbm_models.hpp"
#include "pdifmp/glioma.hpp"
#include "pdifmp/jump_engine.hpp"
#include "pdifmp/parallel.hpp"
#include "support.hpp"

namespace pdifmp {
namespace {

using testing::error_kind_of;
using testing::flip_model;

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size() || a.jump_times() != b.jump_times() || a.interval_modes() != b.interval_modes() ||
        a.proposal_times() != b.proposal_times()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.time(i) != b.time(i) || a.mode(i) != b.mode(i) || a.is_jump(i) != b.is_jump(i)) return false;
        for (std::size_t k = 0; k < a.dim(); ++k) {
            if (std::memcmp(&a.y(i)[k], &b.y(i)[k], sizeof(double)) != 0) return false;
        }
    }
    return true;
}

TEST(SegmentGrid, EndsExactlyAndKeepsStepsNearH) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const double h = std::pow(2.0, -1 - 12 * unif(rng));
        const double start = 10 * unif(rng);
        const double end = start + 5 * h * unif(rng) + 1e-300;
        if (!(end > start)) continue;
        const auto seg = segment_grid(start, end, h);
        ASSERT_EQ(seg.point(seg.cells), end);
        ASSERT_EQ(seg.point(0), start);
        const double length = end - start;
        if (length > h) {
            ASSERT_LE(seg.local_step, 2 * h);
            ASSERT_GE(seg.local_step, 0.5 * h);
        } else {
            ASSERT_EQ(seg.cells, 1u);
        }
    }
    EXPECT_EQ(error_kind_of([] { segment_grid(1.0, 1.0, 0.1); }), ErrorKind::argument);
    EXPECT_EQ(error_kind_of([] { segment_grid(0.0, 1.0, 0.0); }), ErrorKind::argument);
}

TEST(SegmentGrid, LocalStepRule) {
    const auto seg = segment_grid(0.0, 1.05, 0.1);
    EXPECT_EQ(seg.cells, 10u);
    EXPECT_DOUBLE_EQ(seg.local_step, 0.105);
}

TEST(AcceptCandidate, ThresholdArithmetic) {
    const auto full = flip_model(1.0, 1.0, 1.0);
    const double y[] = {0.0};
    for (double u : {0.0, 0.3, 0.999, 1.0}) EXPECT_TRUE(accept_candidate(full, y, 0, u));
    const auto never = flip_model(0.0, 1.0, 1.0);
    for (double u : {0.0, 0.3, 1.0}) EXPECT_FALSE(accept_candidate(never, y, 0, u));
    const auto half = flip_model(0.5, 1.0, 1.0);
    EXPECT_TRUE(accept_candidate(half, y, 0, 0.49));
    EXPECT_FALSE(accept_candidate(half, y, 0, 0.51));
}

TEST(AcceptCandidate, BoundAndSignErrors) {
    const double y[] = {0.0};
    const auto above = flip_model(2.0, 1.0, 1.0);
    EXPECT_EQ(error_kind_of([&] { accept_candidate(above, y, 0, 0.5); }), ErrorKind::bound_violation);
    auto counted = above;
    counted.bound_policy = BoundPolicy::count_only;
    PathStats stats;
    EXPECT_TRUE(accept_candidate(counted, y, 0, 1.0, &stats));
    EXPECT_EQ(stats.bound_violations, 1u);
    const auto negative = flip_model(-1.0, 1.0, 1.0);
    EXPECT_EQ(error_kind_of([&] { accept_candidate(negative, y, 0, 0.5); }), ErrorKind::model_definition);
    EXPECT_EQ(error_kind_of([&] { accept_candidate(above, y, 0, 1.5); }), ErrorKind::argument);
}

TEST(ApplyJump, FlipKeepsStateBitExact) {
    const auto m = flip_model(1.0, 1.0, 1.0);
    const auto post = apply_jump(m, {StateVector{3.2}, 0, 0.7}, 0.42);
    EXPECT_EQ(post.y, StateVector{3.2});
    EXPECT_EQ(post.v, 1u);
    EXPECT_EQ(post.t, 0.7);
}

TEST(NextJump, ZeroRateRunsToHorizon) {
    const auto m = flip_model(0.0, 1.0, 2.0, 0.5, 0.0);
    const EulerMaruyamaFlow em;
    auto stream = DriverStream::fork_for_path(1, 1);
    SimulationOptions o;
    o.step = 0.01;
    const auto nj = next_jump(m, em, stream, m.initial_state(), o);
    EXPECT_FALSE(nj.jumped);
    EXPECT_EQ(nj.time, 2.0);
    EXPECT_NEAR(nj.y[0], -1.0, 1e-12);  // drift -0.5 in mode 0 for two time units
    EXPECT_EQ(nj.post.v, 0u);
}

TEST(NextJump, StopsAtFirstAcceptedProposal) {
    const auto m = flip_model(1.0, 1.0, 100.0, 1.0, 0.0);
    const EulerMaruyamaFlow em;
    auto stream = DriverStream::fork_for_path(3, 0);
    SimulationOptions o;
    o.step = 0.01;
    const auto nj = next_jump(m, em, stream, m.initial_state(), o);
    ASSERT_TRUE(nj.jumped);
    EXPECT_EQ(nj.post.v, 1u);
    EXPECT_EQ(nj.post.t, nj.time);
    EXPECT_NEAR(nj.y[0], -nj.time, 1e-9);
    EXPECT_EQ(nj.samples.jump_count(), 1u);
    EXPECT_EQ(stream.counter(Substream::poisson), 1u);
    // Continue from the post-jump state with the same stream.
    const auto second = next_jump(m, em, stream, nj.post, o);
    ASSERT_TRUE(second.jumped);
    EXPECT_GT(second.time, nj.time);
    EXPECT_EQ(second.post.v, 0u);
}

class ThinningLaw : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(ThinningLaw, FirstJumpTimesAreExponential) {
    const auto [c, bound] = GetParam();
    const auto m = flip_model(c, bound, 200.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 1.0;
    const int n = 10000;
    std::vector<double> times(n);
    for (int j = 0; j < n; ++j) {
        auto stream = DriverStream::fork_for_path(555, j);
        const auto nj = next_jump(m, em, stream, m.initial_state(), o);
        ASSERT_TRUE(nj.jumped);
        times[j] = nj.time;
    }
    const double d = ks_statistic(times, [c = c](double t) { return t <= 0 ? 0.0 : -std::expm1(-c * t); });
    EXPECT_LT(d, 1.36 / std::sqrt(n));
}

INSTANTIATE_TEST_SUITE_P(Rates, ThinningLaw,
                         ::testing::Values(std::pair{1.0, 1.0}, std::pair{0.5, 1.0}, std::pair{0.3, 2.0}));

TEST(Thinning, InterJumpTimesAlongOnePathAreExponential) {
    const auto m = flip_model(0.5, 1.0, 20000.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 10.0;
    o.record_stride = 1000;
    auto stream = DriverStream::fork_for_path(8, 0);
    const auto t = simulate_path(m, em, stream, o);
    const auto& jt = t.jump_times();
    std::vector<double> gaps;
    for (std::size_t n = 1; n < jt.size(); ++n) gaps.push_back(jt[n] - jt[n - 1]);
    ASSERT_GT(gaps.size(), 9000u);
    const double d = ks_statistic(gaps, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-0.5 * x); });
    EXPECT_LT(d, 1.36 / std::sqrt(static_cast<double>(gaps.size())));
}

TEST(Thinning, LongRunRate) {
    const auto m = flip_model(1.0, 2.0, 1000.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 1.0;
    auto stream = DriverStream::fork_for_path(21, 0);
    const auto t = simulate_path(m, em, stream, o);
    const double rate = static_cast<double>(t.jump_count()) / 1000.0;
    EXPECT_NEAR(rate, 1.0, 3.0 * std::sqrt(1.0 / 1000.0));
    EXPECT_LE(t.jump_count(), t.stats.proposals);
}

TEST(SimulatePath, DeterministicGbmOnTheGrid) {
    gbm::Params p;
    p.mu = 0.3;
    p.sigma = 0.0;
    p.y0 = 2.0;
    p.rate = gbm::ConstantRate{0.0};
    p.jump = gbm::NoJumpUpdate{};
    const auto mf = gbm::make_model(p);
    auto stream = DriverStream::fork_for_path(1, 2);
    SimulationOptions o;
    o.step = 0.01;
    const auto t = simulate_path(mf.model, *mf.exact_flow, stream, o);
    EXPECT_EQ(t.jump_count(), 0u);
    EXPECT_EQ(t.time(t.size() - 1), 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        ASSERT_NEAR(t.y(i)[0], 2.0 * std::exp(0.3 * t.time(i)), 1e-13);
    }
}

TEST(SimulatePath, GridContainsEveryProposalAndJump) {
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 0.05;
    const auto m = flip_model(3.0, 5.0, 10.0, 1.0, 0.5);
    auto g = glioma::Params{};
    g.horizon = 20.0;
    const auto gm = glioma::make_model(g);
    for (int j = 0; j < 200; ++j) {
        auto s1 = DriverStream::fork_for_path(4, j);
        const auto t1 = simulate_path(m, em, s1, o);
        ASSERT_NO_THROW(check_trajectory(t1, m.horizon, true));
        ASSERT_LE(t1.jump_count(), t1.stats.proposals);
        ASSERT_EQ(t1.stats.proposals, t1.proposal_times().size());
        auto s2 = DriverStream::fork_for_path(4, j);
        const auto t2 = simulate_path(gm, em, s2, o);
        ASSERT_NO_THROW(check_trajectory(t2, gm.horizon, true));
    }
}

TEST(SimulatePath, DenseProposalsAreProcessedInOrder) {
    const auto m = flip_model(400.0, 1000.0, 1.0, 1.0, 0.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 0.1;
    auto stream = DriverStream::fork_for_path(2, 2);
    const auto t = simulate_path(m, em, stream, o);
    EXPECT_GT(t.stats.proposals, 800u);
    EXPECT_TRUE(std::is_sorted(t.proposal_times().begin(), t.proposal_times().end()));
    EXPECT_NO_THROW(check_trajectory(t, 1.0, true));
    // Alternating modes: the path is the integral of +-1 over the intervals.
    const auto& jt = t.jump_times();
    double expected = 0.0;
    for (std::size_t n = 0; n < jt.size(); ++n) {
        const double end = n + 1 < jt.size() ? jt[n + 1] : 1.0;
        expected += (t.interval_modes()[n] == 0 ? -1.0 : 1.0) * (end - jt[n]);
    }
    EXPECT_NEAR(t.final_state().y[0], expected, 1e-12);
}

TEST(SimulatePath, DrawOrderContract) {
    const auto m = flip_model(0.7, 1.5, 3.0, 0.0, 1.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 0.1;
    auto stream = DriverStream::fork_for_path(12, 34);
    const auto t = simulate_path(m, em, stream, o);
    const std::uint64_t k = t.stats.proposals;
    EXPECT_EQ(stream.counter(Substream::poisson), k + 1);  // the last draw overshoots the horizon
    EXPECT_EQ(stream.counter(Substream::thinning), k);
    EXPECT_EQ(stream.counter(Substream::kernel), 2 * k);
    EXPECT_EQ(stream.counter(Substream::wiener), t.stats.cells);

    // Replaying the contract by hand reproduces the proposal times.
    auto replay = DriverStream::fork_for_path(12, 34);
    double time = 0.0;
    for (double p : t.proposal_times()) {
        time += replay.next_proposal(1.5);
        ASSERT_EQ(time, p);
    }
}

TEST(SimulatePath, RecordStrideKeepsEventPoints) {
    const auto m = flip_model(2.0, 4.0, 5.0, 1.0, 0.3);
    const EulerMaruyamaFlow em;
    SimulationOptions full, sparse;
    full.step = sparse.step = 0.01;
    sparse.record_stride = 25;
    auto s1 = DriverStream::fork_for_path(3, 3);
    auto s2 = DriverStream::fork_for_path(3, 3);
    const auto a = simulate_path(m, em, s1, full);
    const auto b = simulate_path(m, em, s2, sparse);
    EXPECT_LT(b.size(), a.size() / 5);
    EXPECT_EQ(a.jump_times(), b.jump_times());
    EXPECT_NO_THROW(check_trajectory(b, 5.0, true));
    EXPECT_EQ(a.final_state().y, b.final_state().y);
}

TEST(SimulatePath, RunawayRateIsCapped) {
    const auto m = flip_model(1e-9, 1e6, 1.0);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 0.1;
    o.max_proposals = 1000;
    auto stream = DriverStream::fork_for_path(1, 0);
    EXPECT_EQ(error_kind_of([&] { simulate_path(m, em, stream, o); }), ErrorKind::runaway_rate);
}

TEST(SimulatePath, Example1JumpFrequency) {
    // Magnitude rate 1 keeps e^eta finite; the jump times follow lambda = 1e-4.
    auto p = gbm::example1_defaults();
    p.jump = gbm::ExpMagnitudeJump{1.0};
    const auto mf = gbm::make_example1(p);
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 0.5;
    const int n = 100000;
    std::size_t jumped = 0;
    for (int j = 0; j < n; ++j) {
        auto stream = DriverStream::fork_for_path(1001, j);
        jumped += simulate_path(mf.model, em, stream, o).jump_count() > 0;
    }
    const double prob = -std::expm1(-1e-4);
    const double se = std::sqrt(prob * (1 - prob) / n);
    EXPECT_NEAR(jumped / static_cast<double>(n), prob, 3 * se);
}

TEST(SimulatePath, ExcursionsAreCountedAndClampHolds) {
    glioma::Params p;
    p.alpha = 0.5;
    p.x0 = 0.9;
    p.horizon = 3.0;
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 1e-2;
    auto s1 = DriverStream::fork_for_path(5, 0);
    const auto free_run = simulate_path(glioma::make_model(p), em, s1, o);
    EXPECT_GT(free_run.stats.excursions, 0u);
    p.clamp_state = true;
    const auto clamped_model = glioma::make_model(p);
    auto s2 = DriverStream::fork_for_path(5, 0);
    const auto clamped = simulate_path(clamped_model, em, s2, o);
    EXPECT_GT(clamped.stats.excursions, 0u);
    for (std::size_t i = 0; i < clamped.size(); ++i) ASSERT_TRUE(clamped_model.state_hint->contains(clamped.y(i)));
}

TEST(Coupling, ModeOnlyJumpsAgreeExactly) {
    const auto mf = gbm::make_model(gbm::weak_test_defaults());
    const EulerMaruyamaFlow em;
    SimulationOptions o;
    o.step = 1.0 / 32;
    for (int j = 0; j < 100; ++j) {
        auto stream = DriverStream::fork_for_path(77, j);
        const auto [a, b] = simulate_coupled_pair(mf.model, em, *mf.exact_flow, stream, o);
        ASSERT_EQ(a.jump_times(), b.jump_times());
        ASSERT_EQ(a.interval_modes(), b.interval_modes());
        ASSERT_TRUE(std::equal(a.times().begin(), a.times().end(), b.times().begin(), b.times().end()));
    }
}

TEST(Coupling, StateDependentDivergenceDoesNotGrowAsHShrinks) {
    auto p = gbm::example2_defaults();
    p.rate = gbm::LinearRate{0.05};
    p.y_max = 200.0;
    const auto mf = gbm::make_example2(p);
    const EulerMaruyamaFlow em;
    const auto divergence = [&](double h) {
        SimulationOptions o;
        o.step = h;
        int differ = 0;
        for (int j = 0; j < 2000; ++j) {
            auto stream = DriverStream::fork_for_path(88, j);
            const auto [a, b] = simulate_coupled_pair(mf.model, em, *mf.exact_flow, stream, o);
            differ += a.jump_times() != b.jump_times() || a.interval_modes() != b.interval_modes();
        }
        return differ;
    };
    const int coarse = divergence(1.0 / 8);
    const int fine = divergence(1.0 / 32);
    EXPECT_GT(coarse, 0);
    EXPECT_LE(fine, coarse);
}

TEST(Coupling, ZeroNoiseDifferenceIsFirstOrder) {
    gbm::Params p;
    p.mu = 1.0;
    p.sigma = 0.0;
    p.y0 = 1.0;
    p.rate = gbm::ConstantRate{0.0};
    p.jump = gbm::NoJumpUpdate{};
    const auto mf = gbm::make_model(p);
    const EulerMaruyamaFlow em;
    std::vector<double> ratio;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        SimulationOptions o;
        o.step = h;
        auto stream = DriverStream::fork_for_path(1, 0);
        const auto pair = simulate_coupled_pair(mf.model, em, *mf.exact_flow, stream, o);
        ratio.push_back(sup_difference(pair) / h);
    }
    for (double r : ratio) {
        EXPECT_GT(r, 0.5);
        EXPECT_LT(r, 2.0);
    }
}

TEST(Replay, BitIdenticalAcrossThreadCounts) {
    glioma::Params g;
    g.horizon = 5.0;
    const auto gm = glioma::make_model(g);
    const GliomaSplittingFlow split(g);
    SimulationOptions o;
    o.step = 1e-3;
    const auto run = [&](std::size_t threads) {
        std::vector<Trajectory> out(16);
        parallel_for(out.size(), threads, [&](std::size_t j) {
            auto stream = DriverStream::fork_for_path(2718, j);
            out[j] = simulate_path(gm, split, stream, o);
        });
        return out;
    };
    const auto one = run(1);
    const auto eight = run(8);
    for (std::size_t j = 0; j < one.size(); ++j) EXPECT_TRUE(same_trajectory(one[j], eight[j])) << "path " << j;
}

TEST(Lanes, StartOverrideAndValidation) {
    const auto m = flip_model(1.0, 1.0, 2.0, 1.0, 0.0);
    const EulerMaruyamaFlow em;
    const FlowIntegrator* lanes[] = {&em};
    SimulationOptions o;
    o.step = 0.1;
    auto stream = DriverStream::fork_for_path(1, 0);
    const auto out = simulate_lanes(m, lanes, stream, o, HybridState{StateVector{5.0}, 1, 1.5});
    EXPECT_EQ(out[0].time(0), 1.5);
    EXPECT_EQ(out[0].y(0)[0], 5.0);
    EXPECT_EQ(error_kind_of([&] { simulate_lanes(m, lanes, stream, o, HybridState{StateVector{5.0}, 1, 2.5}); }),
              ErrorKind::argument);
    o.step = -1.0;
    EXPECT_EQ(error_kind_of([&] { simulate_lanes(m, lanes, stream, o); }), ErrorKind::argument);
}

}  // namespace
}  // namespace pdifmp
