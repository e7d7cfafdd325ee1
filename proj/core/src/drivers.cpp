#include "pdifmp/drivers.hpp"

#include <cmath>
#include <numbers>

#include "pdifmp/error.hpp"

namespace pdifmp {
namespace {

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

// 53 random bits from two 32-bit words -> [0, 1).
double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * kTwoPow53Inv;
}

}  // namespace

std::string_view to_string(Substream s) noexcept {
    switch (s) {
        case Substream::poisson: return "poisson";
        case Substream::thinning: return "thinning";
        case Substream::kernel: return "kernel";
        case Substream::wiener: return "wiener";
    }
    return "unknown";
}

DriverStream::DriverStream(std::uint64_t seed, std::uint64_t path_id) noexcept
    : seed_(seed),
      path_id_(path_id),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

// Counter layout: words 0-1 hold the draw index, word 2 the low half of the
// path id, word 3 the substream tag (top 4 bits) and 28 more path-id bits.
Philox4x32::Counter DriverStream::block(Substream s, std::uint64_t index) const noexcept {
    const auto tag = static_cast<std::uint32_t>(s);
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(path_id_),
         (tag << 28) | (static_cast<std::uint32_t>(path_id_ >> 32) & 0x0FFFFFFFu)},
        key_);
}

double DriverStream::uniform_at(Substream s, std::uint64_t index) const noexcept {
    const auto b = block(s, index);
    return to_unit(b[0], b[1]);
}

double DriverStream::normal_at(std::uint64_t index) const noexcept {
    // Box-Muller (cosine branch) from the two halves of one block.
    const auto b = block(Substream::wiener, index);
    const double u1 = 1.0 - to_unit(b[0], b[1]);  // (0, 1]
    const double u2 = to_unit(b[2], b[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double DriverStream::next_proposal(double rate_bound) {
    if (!(rate_bound > 0.0) || !std::isfinite(rate_bound)) {
        fail(ErrorKind::argument, "proposal rate bound must be positive and finite");
    }
    const double u = uniform_at(Substream::poisson, advance(Substream::poisson));
    return -std::log1p(-u) / rate_bound;
}

double DriverStream::wiener_increment(double h) {
    if (!(h >= 0.0) || !std::isfinite(h)) fail(ErrorKind::argument, "Wiener increment needs h >= 0");
    const double z = normal_at(advance(Substream::wiener));
    return h == 0.0 ? 0.0 : std::sqrt(h) * z;
}

double DriverStream::next_uniform(UniformKind which) noexcept {
    const Substream s = which == UniformKind::thinning ? Substream::thinning : Substream::kernel;
    return uniform_at(s, advance(s));
}

}  // namespace pdifmp
