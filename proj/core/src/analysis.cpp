#include "pdifmp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pdifmp/error.hpp"
#include "pdifmp/parallel.hpp"

namespace pdifmp {
namespace {

void require_same_grid(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size() || a.dim() != b.dim()) {
        std::ostringstream os;
        os << "coupled trajectories have different grids (" << a.size() << " vs " << b.size() << " points)";
        fail(ErrorKind::coupling_broken, os.str());
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.time(i) != b.time(i)) {
            std::ostringstream os;
            os.precision(17);
            os << "coupled trajectories disagree at grid index " << i << ": " << a.time(i) << " vs " << b.time(i);
            fail(ErrorKind::coupling_broken, os.str());
        }
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

// Paths per block; per-path differences are reduced in index order so the
// estimate does not depend on the thread count.
constexpr std::size_t kBlock = 1 << 15;

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }

    WeakEstimate estimate() const {
        WeakEstimate out;
        out.paths = n;
        if (n == 0) return out;
        const double mean = sum / static_cast<double>(n);
        out.estimate = mean;
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                                                 static_cast<double>(n - 1));
            out.std_error = std::sqrt(var / static_cast<double>(n));
        }
        return out;
    }
};

void accumulate(Moments& acc, const PDifMPModel& model, const FlowIntegrator& approx,
                const FlowIntegrator& reference, const TestFunctional& F, double h, std::size_t M,
                std::uint64_t seed, std::uint64_t first_path, std::size_t threads) {
    SimulationOptions opts;
    opts.step = h;
    opts.record_stride = std::numeric_limits<std::size_t>::max();
    const FlowIntegrator* lanes[] = {&approx, &reference};
    std::vector<double> diffs;
    for (std::size_t done = 0; done < M;) {
        const std::size_t n = std::min(kBlock, M - done);
        diffs.assign(n, 0.0);
        parallel_for(n, threads, [&](std::size_t i) {
            auto stream = DriverStream::fork_for_path(seed, first_path + done + i);
            const auto paths = simulate_lanes(model, lanes, stream, opts);
            diffs[i] = F(paths[0].final_state()) - F(paths[1].final_state());
        });
        for (double d : diffs) acc.add(d);
        done += n;
    }
}

}  // namespace

std::string_view to_string(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::strong_rmse: return "strong_rmse";
        case MetricKind::weak_error: return "weak_error";
        case MetricKind::sup_difference: return "sup_difference";
    }
    return "unknown";
}

void ConvergenceReport::add(const ConvergenceRow& row) {
    const auto pos = std::find_if(rows_.begin(), rows_.end(), [&](const ConvergenceRow& r) { return r.h < row.h; });
    rows_.insert(pos, row);
}

void ConvergenceReport::refit() {
    fit_.reset();
    if (rows_.size() >= 2) fit_ = fit_slope(rows_);
}

SlopeFit fit_slope(std::span<const ConvergenceRow> rows) {
    if (rows.size() < 2) fail(ErrorKind::argument, "slope fit needs at least two step sizes");
    double sx = 0.0, sy = 0.0;
    for (const auto& r : rows) {
        if (!(r.h > 0.0)) fail(ErrorKind::argument, "slope fit needs positive step sizes");
        if (!(r.metric > 0.0) || !std::isfinite(r.metric)) {
            std::ostringstream os;
            os << "cannot fit a log-log slope through nonpositive metric " << r.metric << " at h=" << r.h;
            fail(ErrorKind::argument, os.str());
        }
        sx += std::log2(r.h);
        sy += std::log2(r.metric);
    }
    const double n = static_cast<double>(rows.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log2(r.h) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log2(r.metric) - my);
    }
    if (!(sxx > 0.0)) fail(ErrorKind::argument, "slope fit needs distinct step sizes");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

RmseDetail strong_rmse_detail(std::span<const TrajectoryPair> pairs) {
    if (pairs.empty()) fail(ErrorKind::argument, "strong_rmse needs at least one trajectory pair");
    std::size_t common = std::numeric_limits<std::size_t>::max();
    for (const auto& [a, b] : pairs) {
        require_same_grid(a, b);
        common = std::min(common, a.size());
    }
    if (common == 0) fail(ErrorKind::argument, "strong_rmse needs non-empty trajectories");

    const double M = static_cast<double>(pairs.size());
    std::vector<double> mean_sq(common, 0.0);
    for (const auto& [a, b] : pairs) {
        for (std::size_t n = 0; n < common; ++n) mean_sq[n] += squared_distance(a.y(n), b.y(n));
    }
    for (auto& s : mean_sq) s /= M;
    const auto it = std::max_element(mean_sq.begin(), mean_sq.end());

    RmseDetail out;
    out.index = static_cast<std::size_t>(it - mean_sq.begin());
    out.value = std::sqrt(*it);
    out.paths = pairs.size();
    if (pairs.size() > 1 && out.value > 0.0) {
        // se(sqrt(s)) ~ se(s) / (2 sqrt(s))
        double var = 0.0;
        for (const auto& [a, b] : pairs) {
            const double d = squared_distance(a.y(out.index), b.y(out.index)) - *it;
            var += d * d;
        }
        var /= (M - 1.0);
        out.std_error = std::sqrt(var / M) / (2.0 * out.value);
    }
    return out;
}

double strong_rmse(std::span<const TrajectoryPair> pairs) { return strong_rmse_detail(pairs).value; }

double sup_difference(const Trajectory& a, const Trajectory& b) {
    require_same_grid(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, squared_distance(a.y(i), b.y(i)));
    return std::sqrt(worst);
}

double sup_difference(const TrajectoryPair& pair) { return sup_difference(pair.first, pair.second); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) fail(ErrorKind::argument, "KS statistic needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

WeakEstimate weak_error_estimate(const PDifMPModel& model, const FlowIntegrator& approx,
                                 const FlowIntegrator& reference, const TestFunctional& F, double h,
                                 std::size_t M, std::uint64_t seed, const WeakEstimateOptions& options) {
    if (M == 0) fail(ErrorKind::argument, "weak error estimate needs M >= 1");
    if (!F) fail(ErrorKind::argument, "weak error estimate needs a test functional");
    Moments acc;
    accumulate(acc, model, approx, reference, F, h, M, seed, options.first_path, options.threads);
    return acc.estimate();
}

WeakEstimate weak_error_estimate(const gbm::ModelWithExactFlow& model, const TestFunctional& F, double h,
                                 std::size_t M, std::uint64_t seed, const WeakEstimateOptions& options) {
    if (!model.exact_flow) {
        fail(ErrorKind::unsupported_model, "model '" + model.model.id + "' has no exact flow for a weak error reference");
    }
    const EulerMaruyamaFlow em;
    return weak_error_estimate(model.model, em, *model.exact_flow, F, h, M, seed, options);
}

WeakEstimate weak_error_adaptive(const gbm::ModelWithExactFlow& model, const TestFunctional& F, double h,
                                 std::uint64_t seed, const AdaptiveWeakOptions& options) {
    if (!model.exact_flow) {
        fail(ErrorKind::unsupported_model, "model '" + model.model.id + "' has no exact flow for a weak error reference");
    }
    if (options.initial_paths < 2 || options.max_paths < options.initial_paths) {
        fail(ErrorKind::argument, "adaptive weak error needs 2 <= initial_paths <= max_paths");
    }
    const EulerMaruyamaFlow em;
    Moments acc;
    std::size_t target = options.initial_paths;
    for (;;) {
        accumulate(acc, model.model, em, *model.exact_flow, F, h, target - acc.n, seed, acc.n, options.threads);
        const WeakEstimate est = acc.estimate();
        if (est.std_error <= options.target_relative_se * std::abs(est.estimate) || target >= options.max_paths) {
            return est;
        }
        // Project the count that meets the target (SE ~ 1/sqrt(M)), growing by
        // at least a quarter and at most a factor of eight per round.
        const double rel = est.estimate != 0.0 ? est.std_error / std::abs(est.estimate) : 1e9;
        const double projected = static_cast<double>(acc.n) * (rel / options.target_relative_se) *
                                 (rel / options.target_relative_se) * 1.05;
        const double grown = std::clamp(projected, static_cast<double>(acc.n) * 1.25, static_cast<double>(acc.n) * 8.0);
        target = std::min(static_cast<std::size_t>(std::ceil(grown)), options.max_paths);
    }
}

}  // namespace pdifmp
