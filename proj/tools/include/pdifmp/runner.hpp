#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdifmp/flows.hpp"
#include "pdifmp/gbm_models.hpp"
#include "pdifmp/glioma.hpp"

namespace pdifmp::runner {

enum class ExperimentKind { convergence_example1, convergence_example2, weak_error, glioma_sweep, tem_vs_tsm };

std::string_view to_string(ExperimentKind kind) noexcept;

struct Bands {
    std::array<double, 2> strong_slope{0.35, 0.65};
    std::array<double, 2> weak_ratio{1.4, 2.8};
    /// Weak estimates count only once std_error < this fraction of |estimate|.
    double weak_max_relative_se = 0.2;
    /// tem_vs_tsm: required factor between the coarsest and finest median.
    double sup_reduction = 5.0;
};

struct WeakSettings {
    double target_relative_se = 0.07;
    std::size_t initial_paths = 1 << 14;
    std::size_t max_paths = std::size_t{1} << 24;
};

enum class GliomaIntegrator { euler_maruyama, splitting };

enum class TrajectoryFormat { csv, json };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::convergence_example1;
    std::vector<double> h_list;
    std::size_t paths = 200;  ///< M
    std::optional<double> horizon;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    std::size_t threads = 0;  ///< 0: PDIFMP_THREADS or hardware concurrency

    bool paper_faithful = false;
    bool clamp_glioma_state = false;
    FreezePoint freeze_point = FreezePoint::post;
    GliomaIntegrator glioma_integrator = GliomaIntegrator::euler_maruyama;

    Bands bands;
    WeakSettings weak;

    std::vector<double> sweep_lambda0;
    std::vector<double> sweep_lambda1;

    std::size_t record_stride = 1;
    bool write_trajectories = false;
    TrajectoryFormat trajectory_format = TrajectoryFormat::csv;
    std::size_t max_proposals = 10'000'000;

    gbm::Params gbm;
    glioma::Params glioma;
};

/// Parses and validates; throws Error{config} with a readable message.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Invariants: h_list nonempty and strictly decreasing, M >= 1, T > 0, and the
/// model parameters accepted by their builders.
void validate(const ExperimentConfig& config);

/// The configuration with flags folded into the model parameters (horizon
/// override, paper-faithful bound handling).
ExperimentConfig effective(const ExperimentConfig& config);

struct ModelInfo {
    std::string id;
    std::string description;
};

std::vector<ModelInfo> list_models();

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int runtime_error = 1;
inline constexpr int band_failure = 2;
inline constexpr int config_error = 64;
}  // namespace exit_code

struct RunOutcome {
    int exit_code = exit_code::ok;
    nlohmann::json summary;
};

/// Runs the experiment and writes results.csv, plot.csv (convergence kinds),
/// summary.json and optional trajectories/*.csv into output_dir. Runtime
/// errors propagate as pdifmp::Error.
RunOutcome run(const ExperimentConfig& config);

/// {"error": kind, "message": what}
nlohmann::json serialize_error(const std::exception& e);

}  // namespace pdifmp::runner
