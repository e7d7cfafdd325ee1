#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pdifmp/flows.hpp"
#include "pdifmp/gbm_models.hpp"
#include "pdifmp/jump_engine.hpp"
#include "pdifmp/trajectory.hpp"

namespace pdifmp {

enum class MetricKind { strong_rmse, weak_error, sup_difference };

std::string_view to_string(MetricKind kind) noexcept;

struct ConvergenceRow {
    double h = 0.0;
    double metric = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Per-step-size metric values with a least-squares fit in log2-log2
/// coordinates. Rows are kept sorted by h, largest first.
class ConvergenceReport {
 public:
    explicit ConvergenceReport(MetricKind kind) : kind_(kind) {}

    MetricKind kind() const noexcept { return kind_; }
    const std::vector<ConvergenceRow>& rows() const noexcept { return rows_; }
    std::optional<SlopeFit> fit() const noexcept { return fit_; }

    void add(const ConvergenceRow& row);
    /// Refits; leaves the fit empty with fewer than two rows.
    void refit();

 private:
    MetricKind kind_;
    std::vector<ConvergenceRow> rows_;
    std::optional<SlopeFit> fit_;
};

/// Ordinary least squares of log2(metric) on log2(h). Needs >= 2 rows with
/// positive metric values.
SlopeFit fit_slope(std::span<const ConvergenceRow> rows);

using TrajectoryPair = std::pair<Trajectory, Trajectory>;

struct RmseDetail {
    double value = 0.0;
    double std_error = 0.0;   ///< delta-method error at the maximizing index
    std::size_t index = 0;    ///< grid index attaining the maximum
    std::size_t paths = 0;
};

/// max_n sqrt( (1/M) sum_j |x_j(t_n) - x~_j(t_n)|^2 ) over the grid indices
/// present in every path. Each pair must share its grid exactly.
RmseDetail strong_rmse_detail(std::span<const TrajectoryPair> pairs);
double strong_rmse(std::span<const TrajectoryPair> pairs);

/// Largest Euclidean distance between the two states over a shared grid.
double sup_difference(const Trajectory& a, const Trajectory& b);
double sup_difference(const TrajectoryPair& pair);

/// sup |empirical CDF - cdf| of the sample.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

using TestFunctional = std::function<double(const HybridState&)>;

struct WeakEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
};

struct WeakEstimateOptions {
    std::size_t threads = 1;
    std::uint64_t first_path = 0;
};

/// Coupled Monte Carlo estimate of E[F(approx_T)] - E[F(reference_T)] from
/// paths first_path .. first_path + M - 1.
WeakEstimate weak_error_estimate(const PDifMPModel& model, const FlowIntegrator& approx,
                                 const FlowIntegrator& reference, const TestFunctional& F, double h,
                                 std::size_t M, std::uint64_t seed, const WeakEstimateOptions& options = {});

/// Euler-Maruyama against the model's exact flow. Throws unsupported_model
/// when no exact flow is attached.
WeakEstimate weak_error_estimate(const gbm::ModelWithExactFlow& model, const TestFunctional& F, double h,
                                 std::size_t M, std::uint64_t seed, const WeakEstimateOptions& options = {});

struct AdaptiveWeakOptions {
    std::size_t initial_paths = 4096;
    std::size_t max_paths = std::size_t{1} << 24;
    /// Stop once std_error <= target_relative_se * |estimate|.
    double target_relative_se = 0.2;
    std::size_t threads = 1;
};

/// Grows the path count (reusing the paths already simulated) until the
/// relative standard error target or the path cap is reached.
WeakEstimate weak_error_adaptive(const gbm::ModelWithExactFlow& model, const TestFunctional& F, double h,
                                 std::uint64_t seed, const AdaptiveWeakOptions& options);

}  // namespace pdifmp
