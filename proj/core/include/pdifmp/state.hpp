#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pdifmp {

inline constexpr std::size_t kMaxStateDim = 4;

using ModeIndex = std::uint32_t;

/// Inline, allocation-free vector for the continuous component. Dimensions
/// are tiny (d <= kMaxStateDim) and states are copied on every grid cell.
class StateVector {
 public:
    StateVector() = default;
    explicit StateVector(std::size_t size, double fill = 0.0);
    StateVector(std::initializer_list<double> values);
    explicit StateVector(std::span<const double> values);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> span() noexcept { return {data_.data(), size_}; }
    std::span<const double> span() const noexcept { return {data_.data(), size_}; }

    double* begin() noexcept { return data_.data(); }
    double* end() noexcept { return data_.data() + size_; }
    const double* begin() const noexcept { return data_.data(); }
    const double* end() const noexcept { return data_.data() + size_; }

    bool all_finite() const noexcept;

    friend bool operator==(const StateVector& a, const StateVector& b) noexcept;

 private:
    std::array<double, kMaxStateDim> data_{};
    std::size_t size_ = 0;
};

/// Ordered, duplicate-free set of discrete modes. Each mode carries a real
/// value (velocity, counter value, ...) and a label for reporting.
class ModeSet {
 public:
    explicit ModeSet(std::vector<double> values, std::vector<std::string> labels = {});

    /// Modes 0, 1, ..., count-1 with value equal to their index.
    static ModeSet counter(std::size_t count);

    std::size_t size() const noexcept { return values_.size(); }
    double value(ModeIndex i) const { return values_.at(i); }
    const std::string& label(ModeIndex i) const { return labels_.at(i); }
    bool contains(ModeIndex i) const noexcept { return i < values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

 private:
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

struct HybridState {
    StateVector y;
    ModeIndex v = 0;
    double t = 0.0;
};

}  // namespace pdifmp
