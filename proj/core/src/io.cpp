#include "pdifmp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "pdifmp/error.hpp"

namespace pdifmp {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) fail(ErrorKind::argument, "could not format a double");
    return std::string(buf.data(), end);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ModeSet& modes) {
    os << "t";
    for (std::size_t k = 0; k < traj.dim(); ++k) os << ",y" << k;
    os << ",v,is_jump\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << format_double(traj.time(i));
        for (double y : traj.y(i)) os << ',' << format_double(y);
        os << ',' << format_double(modes.value(traj.mode(i))) << ',' << (traj.is_jump(i) ? 1 : 0) << '\n';
    }
}

namespace {

template <class Range, class Fn>
void json_array(std::ostream& os, const Range& r, Fn&& item) {
    os << '[';
    bool first = true;
    for (const auto& x : r) {
        if (!first) os << ',';
        first = false;
        item(x);
    }
    os << ']';
}

void json_numbers(std::ostream& os, std::span<const double> xs) {
    json_array(os, xs, [&](double x) { os << format_double(x); });
}

}  // namespace

void write_trajectory_json(std::ostream& os, const Trajectory& traj, const ModeSet& modes) {
    std::vector<std::size_t> idx(traj.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    os << "{\"dim\":" << traj.dim() << ",\"times\":";
    json_numbers(os, traj.times());
    os << ",\"y\":";
    json_array(os, idx, [&](std::size_t i) { json_numbers(os, traj.y(i)); });
    os << ",\"modes\":";
    json_array(os, idx, [&](std::size_t i) { os << format_double(modes.value(traj.mode(i))); });
    os << ",\"is_jump\":";
    json_array(os, idx, [&](std::size_t i) { os << (traj.is_jump(i) ? "true" : "false"); });
    os << ",\"jump_times\":";
    json_numbers(os, traj.jump_times());
    os << ",\"proposal_times\":";
    json_numbers(os, traj.proposal_times());
    os << ",\"jumps\":";
    json_array(os, traj.jumps(), [&](const JumpRecord& j) {
        os << "{\"time\":" << format_double(j.time) << ",\"y_pre\":";
        json_numbers(os, j.y_pre.span());
        os << ",\"y_post\":";
        json_numbers(os, j.y_post.span());
        os << ",\"from\":" << format_double(modes.value(j.from)) << ",\"to\":" << format_double(modes.value(j.to))
           << '}';
    });
    os << "}\n";
}

void write_results_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "h,metric,stderr,M\n";
    for (const auto& r : report.rows()) {
        os << format_double(r.h) << ',' << format_double(r.metric) << ',' << format_double(r.std_error) << ','
           << r.paths << '\n';
    }
}

void emit_plot_data(std::ostream& os, const ConvergenceReport& report) {
    if (report.rows().empty()) fail(ErrorKind::argument, "cannot emit plot data for an empty report");
    const auto& anchor = report.rows().front();
    const double x0 = std::log2(anchor.h);
    const double y0 = std::log2(anchor.metric);
    os << "log2_h,log2_metric,ref_slope_05,ref_slope_1\n";
    for (const auto& r : report.rows()) {
        const double x = std::log2(r.h);
        os << format_double(x) << ',' << format_double(std::log2(r.metric)) << ','
           << format_double(y0 + 0.5 * (x - x0)) << ',' << format_double(y0 + (x - x0)) << '\n';
    }
}

}  // namespace pdifmp
