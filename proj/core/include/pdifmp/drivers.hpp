#pragma once

#include <cstdint>
#include <string_view>

#include "pdifmp/philox.hpp"

namespace pdifmp {

/// Independent counter domains of a path's randomness.
enum class Substream : std::uint32_t {
    poisson = 0,   ///< proposal inter-arrival times T*_k - T*_{k-1}
    thinning = 1,  ///< acceptance uniforms U_k
    kernel = 2,    ///< post-jump uniforms V_k (and the jump-update uniform)
    wiener = 3,    ///< standard normals scaled into Wiener increments
};

enum class UniformKind { thinning, kernel };

std::string_view to_string(Substream s) noexcept;

/// Reproducible randomness for one simulated path.
///
/// Every draw is a pure function of (seed, path_id, substream, counter): the
/// stream only stores the four counters, so forking is O(1), replays are
/// bitwise identical, and two consumers reading the same instance see the
/// same proposals, uniforms and Wiener increments.
class DriverStream {
 public:
    static DriverStream fork_for_path(std::uint64_t seed, std::uint64_t path_id) noexcept {
        return DriverStream(seed, path_id);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_id() const noexcept { return path_id_; }
    std::uint64_t counter(Substream s) const noexcept { return counters_[static_cast<std::uint32_t>(s)]; }

    /// Exponential(rate_bound) increment via inverse CDF. Throws on rate_bound <= 0.
    double next_proposal(double rate_bound);

    /// N(0, h) increment; h == 0 returns exactly 0 (the counter still advances).
    double wiener_increment(double h);

    /// Uniform on [0, 1) from the selected substream.
    double next_uniform(UniformKind which) noexcept;

    /// Random access without advancing any counter.
    double uniform_at(Substream s, std::uint64_t index) const noexcept;
    double normal_at(std::uint64_t index) const noexcept;

 private:
    DriverStream(std::uint64_t seed, std::uint64_t path_id) noexcept;

    Philox4x32::Counter block(Substream s, std::uint64_t index) const noexcept;
    std::uint64_t advance(Substream s) noexcept { return counters_[static_cast<std::uint32_t>(s)]++; }

    std::uint64_t seed_;
    std::uint64_t path_id_;
    Philox4x32::Key key_;
    std::uint64_t counters_[4] = {0, 0, 0, 0};
};

}  // namespace pdifmp
