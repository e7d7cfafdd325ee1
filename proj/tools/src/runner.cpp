#include "pdifmp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "pdifmp/analysis.hpp"
#include "pdifmp/error.hpp"
#include "pdifmp/io.hpp"
#include "pdifmp/jump_engine.hpp"
#include "pdifmp/parallel.hpp"

namespace pdifmp::runner {
namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& msg) { fail(ErrorKind::config, msg); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) config_fail(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) config_fail("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::convergence_example1, ExperimentKind::convergence_example2,
                   ExperimentKind::weak_error, ExperimentKind::glioma_sweep, ExperimentKind::tem_vs_tsm}) {
        if (to_string(k) == s) return k;
    }
    config_fail("unknown experiment '" + s + "'");
}

bool is_gbm(ExperimentKind k) {
    return k == ExperimentKind::convergence_example1 || k == ExperimentKind::convergence_example2 ||
           k == ExperimentKind::weak_error;
}

std::string family_id(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::convergence_example1: return "example1";
        case ExperimentKind::convergence_example2: return "example2";
        case ExperimentKind::weak_error: return "weak_test";
        default: return "glioma";
    }
}

void parse_gbm(const json& m, gbm::Params& p) {
    reject_unknown(m, {"id", "mu", "sigma", "y0", "rate", "rate_coefficient", "rate_bound", "jump_rate",
                       "jump_factor", "y_max", "counter_capacity"},
                   "model");
    read(m, "mu", p.mu);
    read(m, "sigma", p.sigma);
    read(m, "y0", p.y0);
    read(m, "rate_bound", p.rate_bound);
    read(m, "y_max", p.y_max);
    read(m, "counter_capacity", p.counter_capacity);
    if (m.contains("rate") && m.contains("rate_coefficient")) config_fail("give either rate or rate_coefficient");
    if (m.contains("rate")) p.rate = gbm::ConstantRate{m.at("rate").get<double>()};
    if (m.contains("rate_coefficient")) p.rate = gbm::LinearRate{m.at("rate_coefficient").get<double>()};
    if (m.contains("jump_rate") && m.contains("jump_factor")) config_fail("give either jump_rate or jump_factor");
    if (m.contains("jump_rate")) p.jump = gbm::ExpMagnitudeJump{m.at("jump_rate").get<double>()};
    if (m.contains("jump_factor")) p.jump = gbm::ScaleJump{m.at("jump_factor").get<double>()};
}

void parse_glioma(const json& m, glioma::Params& p) {
    reject_unknown(m, {"id", "k_plus", "k_minus", "alpha", "lambda0", "lambda1", "a", "b", "lambda_star", "x0", "z0",
                       "start_positive", "speed_multiples"},
                   "model");
    read(m, "k_plus", p.k_plus);
    read(m, "k_minus", p.k_minus);
    read(m, "alpha", p.alpha);
    read(m, "lambda0", p.lambda0);
    read(m, "lambda1", p.lambda1);
    read(m, "a", p.a);
    read(m, "b", p.b);
    read(m, "lambda_star", p.lambda_star);
    read(m, "x0", p.x0);
    read(m, "z0", p.z0);
    read(m, "start_positive", p.start_positive);
    read(m, "speed_multiples", p.speed_multiples);
}

std::size_t thread_count(const ExperimentConfig& c) { return c.threads ? c.threads : default_thread_count(); }

gbm::ModelWithExactFlow build_gbm(const ExperimentConfig& c) {
    switch (c.kind) {
        case ExperimentKind::convergence_example1: return gbm::make_example1(c.gbm);
        case ExperimentKind::convergence_example2: return gbm::make_example2(c.gbm);
        default: {
            auto m = gbm::make_model(c.gbm);
            m.model.id = "weak_test";
            return m;
        }
    }
}

SimulationOptions sim_options(const ExperimentConfig& c, double h) {
    SimulationOptions o;
    o.step = h;
    o.horizon = c.horizon;
    o.max_proposals = c.max_proposals;
    o.record_stride = c.record_stride;
    return o;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::argument, "cannot open " + path.string() + " for writing");
    os << content;
}

void write_trajectory(const ExperimentConfig& c, const std::string& stem, const Trajectory& traj,
                      const ModeSet& modes) {
    const auto dir = c.output_dir / "trajectories";
    std::filesystem::create_directories(dir);
    std::ostringstream os;
    if (c.trajectory_format == TrajectoryFormat::json) {
        write_trajectory_json(os, traj, modes);
        write_file(dir / (stem + ".json"), os.str());
    } else {
        write_trajectory_csv(os, traj, modes);
        write_file(dir / (stem + ".csv"), os.str());
    }
}

void write_report(const ExperimentConfig& c, const ConvergenceReport& report) {
    std::ostringstream results;
    write_results_csv(results, report);
    write_file(c.output_dir / "results.csv", results.str());
    bool positive = !report.rows().empty();
    for (const auto& r : report.rows()) positive = positive && r.metric > 0.0;
    if (positive) {
        std::ostringstream plot;
        emit_plot_data(plot, report);
        write_file(c.output_dir / "plot.csv", plot.str());
    }
}

json base_summary(const ExperimentConfig& c, const std::string& model_id) {
    json s;
    s["experiment"] = std::string(to_string(c.kind));
    s["model"] = model_id;
    s["seed"] = c.seed;
    s["M"] = c.paths;
    s["h_list"] = c.h_list;
    s["paper_faithful"] = c.paper_faithful;
    return s;
}

json fit_json(const ConvergenceReport& report) {
    json f;
    if (auto fit = report.fit()) {
        f["slope"] = fit->slope;
        f["intercept"] = fit->intercept;
    } else {
        f["slope"] = nullptr;
        f["intercept"] = nullptr;
    }
    return f;
}

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string hname(std::size_t level) { return "h" + std::to_string(level); }

RunOutcome run_convergence(const ExperimentConfig& c) {
    const auto mf = build_gbm(c);
    const EulerMaruyamaFlow em;
    const FlowIntegrator& exact = *mf.exact_flow;
    const std::size_t threads = thread_count(c);

    ConvergenceReport report(MetricKind::strong_rmse);
    json levels = json::array();
    for (std::size_t level = 0; level < c.h_list.size(); ++level) {
        const auto t0 = std::chrono::steady_clock::now();
        const double h = c.h_list[level];
        const auto opts = sim_options(c, h);
        std::vector<TrajectoryPair> pairs(c.paths);
        parallel_for(c.paths, threads, [&](std::size_t j) {
            auto stream = DriverStream::fork_for_path(c.seed, j);
            pairs[j] = simulate_coupled_pair(mf.model, em, exact, stream, opts);
        });
        const auto detail = strong_rmse_detail(pairs);
        report.add({h, detail.value, detail.std_error, c.paths});

        std::size_t jumps = 0, proposals = 0, violations = 0;
        for (const auto& [a, b] : pairs) {
            jumps += a.jump_count();
            proposals += a.stats.proposals;
            violations += a.stats.bound_violations;
        }
        levels.push_back({{"h", h}, {"rmse", detail.value}, {"stderr", detail.std_error},
                          {"argmax_index", detail.index}, {"jumps", jumps}, {"proposals", proposals},
                          {"bound_violations", violations}});
        if (c.write_trajectories) {
            write_trajectory(c, hname(level) + "_path0_em", pairs[0].first,
                             mf.model.modes);
            write_trajectory(c, hname(level) + "_path0_exact", pairs[0].second,
                             mf.model.modes);
        }
        std::clog << "[" << to_string(c.kind) << "] h=" << h << " rmse=" << detail.value << " se=" << detail.std_error
                  << " jumps=" << jumps << " (" << elapsed(t0) << " s)\n";
    }
    report.refit();
    write_report(c, report);

    json s = base_summary(c, mf.model.id);
    s["metric"] = "strong_rmse";
    s.update(fit_json(report));
    s["band"] = c.bands.strong_slope;
    s["levels"] = levels;
    const auto fit = report.fit();
    const bool pass = fit && fit->slope >= c.bands.strong_slope[0] && fit->slope <= c.bands.strong_slope[1];
    s["pass"] = pass;
    return {pass ? exit_code::ok : exit_code::band_failure, s};
}

RunOutcome run_weak(const ExperimentConfig& c) {
    const auto mf = build_gbm(c);
    const TestFunctional F = [](const HybridState& x) { return x.y[0]; };
    AdaptiveWeakOptions opts;
    opts.initial_paths = std::min(c.weak.initial_paths, c.weak.max_paths);
    opts.max_paths = c.weak.max_paths;
    opts.target_relative_se = c.weak.target_relative_se;
    opts.threads = thread_count(c);

    ConvergenceReport report(MetricKind::weak_error);
    json levels = json::array();
    std::vector<WeakEstimate> estimates;
    bool se_ok = true;
    for (double h : c.h_list) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto est = weak_error_adaptive(mf, F, h, c.seed, opts);
        estimates.push_back(est);
        const double rel = est.estimate != 0.0 ? est.std_error / std::abs(est.estimate) : INFINITY;
        se_ok = se_ok && rel < c.bands.weak_max_relative_se;
        report.add({h, std::abs(est.estimate), est.std_error, est.paths});
        levels.push_back({{"h", h}, {"estimate", est.estimate}, {"stderr", est.std_error}, {"relative_se", rel},
                          {"M", est.paths}});
        std::clog << "[weak_error] h=" << h << " estimate=" << est.estimate << " se=" << est.std_error
                  << " M=" << est.paths << " (" << elapsed(t0) << " s)\n";
    }
    report.refit();
    write_report(c, report);

    json ratios = json::array();
    bool ratios_ok = true;
    for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
        const double r = estimates[i].estimate / estimates[i + 1].estimate;
        ratios.push_back(r);
        ratios_ok = ratios_ok && r >= c.bands.weak_ratio[0] && r <= c.bands.weak_ratio[1];
    }
    json s = base_summary(c, mf.model.id);
    s["metric"] = "weak_error";
    s.update(fit_json(report));
    s["ratios"] = ratios;
    s["band"] = c.bands.weak_ratio;
    s["max_relative_se"] = c.bands.weak_max_relative_se;
    s["levels"] = levels;
    const bool pass = se_ok && ratios_ok;
    s["pass"] = pass;
    return {pass ? exit_code::ok : exit_code::band_failure, s};
}

std::unique_ptr<FlowIntegrator> glioma_flow(const ExperimentConfig& c, const glioma::Params& p) {
    if (c.glioma_integrator == GliomaIntegrator::splitting) {
        return std::make_unique<GliomaSplittingFlow>(p, c.freeze_point);
    }
    return std::make_unique<EulerMaruyamaFlow>();
}

glioma::Params glioma_params(const ExperimentConfig& c) {
    glioma::Params p = c.glioma;
    if (c.horizon) p.horizon = *c.horizon;
    p.clamp_state = c.clamp_glioma_state;
    return p;
}

RunOutcome run_glioma_sweep(const ExperimentConfig& c) {
    const glioma::Params base = glioma_params(c);
    const std::vector<double> l0s = c.sweep_lambda0.empty() ? std::vector<double>{base.lambda0} : c.sweep_lambda0;
    const std::vector<double> l1s = c.sweep_lambda1.empty() ? std::vector<double>{base.lambda1} : c.sweep_lambda1;
    const std::size_t threads = thread_count(c);

    std::ostringstream results;
    results << "lambda0,lambda1,h,path,final_t,final_x,final_z,final_v,jumps,proposals,rate_min,rate_max,excursions\n";
    json runs = json::array();
    bool pass = true;
    for (double l0 : l0s) {
        for (double l1 : l1s) {
            glioma::Params p = base;
            p.lambda0 = l0;
            p.lambda1 = l1;
            const PDifMPModel model = glioma::make_model(p);
            const auto flow = glioma_flow(c, p);
            for (std::size_t level = 0; level < c.h_list.size(); ++level) {
                const auto t0 = std::chrono::steady_clock::now();
                const double h = c.h_list[level];
                const auto opts = sim_options(c, h);
                std::vector<Trajectory> paths(c.paths);
                parallel_for(c.paths, threads, [&](std::size_t j) {
                    auto stream = DriverStream::fork_for_path(c.seed, j);
                    paths[j] = simulate_path(model, *flow, stream, opts);
                });
                bool finite = true, in_range = true;
                std::size_t excursions = 0, jumps = 0;
                double rmin = INFINITY, rmax = -INFINITY;
                for (std::size_t j = 0; j < paths.size(); ++j) {
                    const auto& tr = paths[j];
                    const auto fin = tr.final_state();
                    for (std::size_t i = 0; i < tr.size() && finite; ++i) {
                        for (double y : tr.y(i)) finite = finite && std::isfinite(y);
                    }
                    if (tr.stats.proposals > 0) {
                        rmin = std::min(rmin, tr.stats.rate_min);
                        rmax = std::max(rmax, tr.stats.rate_max);
                    }
                    excursions += tr.stats.excursions;
                    jumps += tr.jump_count();
                    results << format_double(l0) << ',' << format_double(l1) << ',' << format_double(h) << ',' << j
                            << ',' << format_double(fin.t) << ',' << format_double(fin.y[0]) << ','
                            << format_double(fin.y[1]) << ',' << format_double(model.modes.value(fin.v)) << ','
                            << tr.jump_count() << ',' << tr.stats.proposals << ','
                            << format_double(tr.stats.rate_min) << ',' << format_double(tr.stats.rate_max) << ','
                            << tr.stats.excursions << '\n';
                }
                if (rmin < INFINITY) in_range = rmin >= l0 - l1 && rmax <= l0;
                pass = pass && finite && in_range;
                json run = {{"lambda0", l0}, {"lambda1", l1}, {"h", h}, {"finite", finite},
                            {"rate_in_range", in_range}, {"excursions", excursions}, {"jumps", jumps}};
                run["rate_min"] = rmin < INFINITY ? json(rmin) : json(nullptr);
                run["rate_max"] = rmax > -INFINITY ? json(rmax) : json(nullptr);
                runs.push_back(run);
                if (c.write_trajectories && !paths.empty()) {
                    std::ostringstream name;
                    name << "lambda0_" << format_double(l0) << "_lambda1_" << format_double(l1) << "_" << hname(level)
                         << "_path0";
                    write_trajectory(c, name.str(), paths[0], model.modes);
                }
                std::clog << "[glioma_sweep] lambda0=" << l0 << " lambda1=" << l1 << " h=" << h << " jumps=" << jumps
                          << " excursions=" << excursions << " (" << elapsed(t0) << " s)\n";
            }
        }
    }
    write_file(c.output_dir / "results.csv", results.str());
    json s = base_summary(c, "glioma");
    s["integrator"] = c.glioma_integrator == GliomaIntegrator::splitting ? "splitting" : "euler_maruyama";
    s["runs"] = runs;
    s["pass"] = pass;
    return {pass ? exit_code::ok : exit_code::band_failure, s};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunOutcome run_tem_vs_tsm(const ExperimentConfig& c) {
    const glioma::Params p = glioma_params(c);
    const PDifMPModel model = glioma::make_model(p);
    const EulerMaruyamaFlow tem;
    const GliomaSplittingFlow tsm(p, c.freeze_point);
    const std::size_t threads = thread_count(c);

    ConvergenceReport report(MetricKind::sup_difference);
    json levels = json::array();
    std::vector<double> medians;
    for (std::size_t level = 0; level < c.h_list.size(); ++level) {
        const auto t0 = std::chrono::steady_clock::now();
        const double h = c.h_list[level];
        const auto opts = sim_options(c, h);
        std::vector<double> sup(c.paths);
        parallel_for(c.paths, threads, [&](std::size_t j) {
            auto stream = DriverStream::fork_for_path(c.seed, j);
            const auto pair = simulate_coupled_pair(model, tem, tsm, stream, opts);
            sup[j] = sup_difference(pair);
            if (c.write_trajectories && j == 0) {
                write_trajectory(c, hname(level) + "_path0_tem", pair.first,
                                 model.modes);
                write_trajectory(c, hname(level) + "_path0_tsm", pair.second,
                                 model.modes);
            }
        });
        const double med = median(sup);
        double mean = 0.0, var = 0.0;
        for (double x : sup) mean += x;
        mean /= static_cast<double>(sup.size());
        for (double x : sup) var += (x - mean) * (x - mean);
        const double se = sup.size() > 1
                              ? 1.2533 * std::sqrt(var / static_cast<double>(sup.size() - 1) / static_cast<double>(sup.size()))
                              : 0.0;
        medians.push_back(med);
        report.add({h, med, se, c.paths});
        levels.push_back({{"h", h}, {"median_sup_difference", med}, {"stderr", se}, {"mean", mean}});
        std::clog << "[tem_vs_tsm] h=" << h << " median sup=" << med << " (" << elapsed(t0) << " s)\n";
    }
    report.refit();
    write_report(c, report);

    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i) decreasing = decreasing && medians[i + 1] < medians[i];
    const bool reduced = medians.back() * c.bands.sup_reduction <= medians.front();
    json s = base_summary(c, "glioma");
    s["metric"] = "sup_difference";
    s.update(fit_json(report));
    s["levels"] = levels;
    s["strictly_decreasing"] = decreasing;
    s["required_reduction"] = c.bands.sup_reduction;
    const bool pass = decreasing && reduced;
    s["pass"] = pass;
    return {pass ? exit_code::ok : exit_code::band_failure, s};
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::convergence_example1: return "convergence_example1";
        case ExperimentKind::convergence_example2: return "convergence_example2";
        case ExperimentKind::weak_error: return "weak_error";
        case ExperimentKind::glioma_sweep: return "glioma_sweep";
        case ExperimentKind::tem_vs_tsm: return "tem_vs_tsm";
    }
    return "unknown";
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig c;
    try {
        reject_unknown(j, {"experiment", "h_list", "M", "T", "seed", "output_dir", "threads", "flags", "bands", "weak",
                           "sweep", "record_stride", "write_trajectories", "trajectory_format", "max_proposals",
                           "model"},
                       "config");
        if (!j.contains("experiment")) config_fail("missing 'experiment'");
        c.kind = parse_kind(j.at("experiment").get<std::string>());
        switch (c.kind) {
            case ExperimentKind::convergence_example1: c.gbm = gbm::example1_defaults(); break;
            case ExperimentKind::convergence_example2: c.gbm = gbm::example2_defaults(); break;
            case ExperimentKind::weak_error: c.gbm = gbm::weak_test_defaults(); break;
            default: break;
        }
        if (c.kind == ExperimentKind::glioma_sweep) c.record_stride = 100;

        if (!j.contains("h_list")) config_fail("missing 'h_list'");
        c.h_list = j.at("h_list").get<std::vector<double>>();
        if (j.contains("M")) {
            const auto m = j.at("M").get<long long>();
            if (m < 1) config_fail("M must be at least 1 (got " + std::to_string(m) + ")");
            c.paths = static_cast<std::size_t>(m);
        }
        read(j, "T", c.horizon);
        read(j, "seed", c.seed);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        read(j, "threads", c.threads);
        read(j, "record_stride", c.record_stride);
        read(j, "write_trajectories", c.write_trajectories);
        read(j, "max_proposals", c.max_proposals);
        if (j.contains("trajectory_format")) {
            const auto f = j.at("trajectory_format").get<std::string>();
            if (f == "csv") c.trajectory_format = TrajectoryFormat::csv;
            else if (f == "json") c.trajectory_format = TrajectoryFormat::json;
            else config_fail("trajectory_format must be 'csv' or 'json'");
        }

        if (j.contains("flags")) {
            const auto& f = j.at("flags");
            reject_unknown(f, {"paper_faithful", "clamp_glioma_state", "freeze_point", "glioma_integrator"}, "flags");
            read(f, "paper_faithful", c.paper_faithful);
            read(f, "clamp_glioma_state", c.clamp_glioma_state);
            if (f.contains("freeze_point")) {
                const auto s = f.at("freeze_point").get<std::string>();
                if (s == "post") c.freeze_point = FreezePoint::post;
                else if (s == "pre") c.freeze_point = FreezePoint::pre;
                else config_fail("freeze_point must be 'post' or 'pre'");
            }
            if (f.contains("glioma_integrator")) {
                const auto s = f.at("glioma_integrator").get<std::string>();
                if (s == "euler_maruyama") c.glioma_integrator = GliomaIntegrator::euler_maruyama;
                else if (s == "splitting") c.glioma_integrator = GliomaIntegrator::splitting;
                else config_fail("glioma_integrator must be 'euler_maruyama' or 'splitting'");
            }
        }
        if (j.contains("bands")) {
            const auto& b = j.at("bands");
            reject_unknown(b, {"strong_slope", "weak_ratio", "weak_max_relative_se", "sup_reduction"}, "bands");
            read(b, "strong_slope", c.bands.strong_slope);
            read(b, "weak_ratio", c.bands.weak_ratio);
            read(b, "weak_max_relative_se", c.bands.weak_max_relative_se);
            read(b, "sup_reduction", c.bands.sup_reduction);
        }
        if (j.contains("weak")) {
            const auto& w = j.at("weak");
            reject_unknown(w, {"target_relative_se", "initial_paths", "max_paths"}, "weak");
            read(w, "target_relative_se", c.weak.target_relative_se);
            read(w, "initial_paths", c.weak.initial_paths);
            read(w, "max_paths", c.weak.max_paths);
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            reject_unknown(s, {"lambda0", "lambda1"}, "sweep");
            read(s, "lambda0", c.sweep_lambda0);
            read(s, "lambda1", c.sweep_lambda1);
        }
        if (j.contains("model")) {
            const auto& m = j.at("model");
            if (m.contains("id") && m.at("id").get<std::string>() != family_id(c.kind)) {
                config_fail("experiment " + std::string(to_string(c.kind)) + " runs model '" + family_id(c.kind) +
                            "', not '" + m.at("id").get<std::string>() + "'");
            }
            if (is_gbm(c.kind)) parse_gbm(m, c.gbm);
            else parse_glioma(m, c.glioma);
        }
    } catch (const nlohmann::json::exception& e) {
        config_fail(std::string("malformed config: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) config_fail("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        config_fail("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

void validate(const ExperimentConfig& c) {
    if (c.h_list.empty()) config_fail("h_list must not be empty");
    for (std::size_t i = 0; i < c.h_list.size(); ++i) {
        if (!(c.h_list[i] > 0.0) || !std::isfinite(c.h_list[i])) config_fail("h_list entries must be positive");
        if (i > 0 && !(c.h_list[i] < c.h_list[i - 1])) config_fail("h_list must be strictly decreasing");
    }
    if (c.paths < 1) config_fail("M must be at least 1");
    if (c.horizon && !(*c.horizon > 0.0)) config_fail("T must be positive");
    if (c.record_stride < 1) config_fail("record_stride must be at least 1");
    if (c.max_proposals < 1) config_fail("max_proposals must be at least 1");
    if (c.bands.strong_slope[0] > c.bands.strong_slope[1] || c.bands.weak_ratio[0] > c.bands.weak_ratio[1]) {
        config_fail("band bounds must be ordered [low, high]");
    }
    if (c.kind == ExperimentKind::weak_error) {
        if (!(c.weak.target_relative_se > 0.0)) config_fail("weak.target_relative_se must be positive");
        if (c.weak.initial_paths < 2 || c.weak.max_paths < 2) config_fail("weak path counts must be at least 2");
    }
    if (c.kind == ExperimentKind::tem_vs_tsm && c.h_list.size() < 2) {
        config_fail("tem_vs_tsm needs at least two step sizes");
    }
    // Dry-build the model so parameter errors surface as configuration errors.
    if (is_gbm(c.kind)) {
        (void)build_gbm(effective(c));
    } else {
        const auto p = glioma_params(c);
        for (double l0 : c.sweep_lambda0.empty() ? std::vector<double>{p.lambda0} : c.sweep_lambda0) {
            for (double l1 : c.sweep_lambda1.empty() ? std::vector<double>{p.lambda1} : c.sweep_lambda1) {
                auto q = p;
                q.lambda0 = l0;
                q.lambda1 = l1;
                glioma::validate(q);
            }
        }
    }
}

ExperimentConfig effective(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    if (c.horizon) c.gbm.horizon = *c.horizon;
    if (c.paper_faithful) {
        c.gbm.paper_faithful = true;
        if (c.kind == ExperimentKind::convergence_example2 && !c.gbm.rate_bound) c.gbm.rate_bound = 0.001;
    }
    return c;
}

std::vector<ModelInfo> list_models() {
    return {
        {"example1", "GBM with constant Poisson jump rate and exponential multiplicative jumps (convergence_example1)"},
        {"example2", "GBM with state-dependent jump rate c*y and y -> 0.9y jumps (convergence_example2)"},
        {"weak_test", "GBM mu=0.05 sigma=0.2 y0=1 with unit jump rate and y -> 0.9y jumps (weak_error)"},
        {"glioma", "1D glioma cell: position x, bound integrins z, velocity jumps (glioma_sweep, tem_vs_tsm)"},
    };
}

RunOutcome run(const ExperimentConfig& config) {
    const ExperimentConfig c = effective(config);
    std::filesystem::create_directories(c.output_dir);
    RunOutcome out;
    switch (c.kind) {
        case ExperimentKind::convergence_example1:
        case ExperimentKind::convergence_example2: out = run_convergence(c); break;
        case ExperimentKind::weak_error: out = run_weak(c); break;
        case ExperimentKind::glioma_sweep: out = run_glioma_sweep(c); break;
        case ExperimentKind::tem_vs_tsm: out = run_tem_vs_tsm(c); break;
    }
    write_file(c.output_dir / "summary.json", out.summary.dump(2) + "\n");
    return out;
}

json serialize_error(const std::exception& e) {
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j["error"] = std::string(to_string(err->kind()));
    } else {
        j["error"] = "internal";
    }
    j["message"] = e.what();
    return j;
}

}  // namespace pdifmp::runner
