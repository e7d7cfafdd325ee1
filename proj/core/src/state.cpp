#include "pdifmp/state.hpp"

#include <algorithm>
#include <set>

#include "pdifmp/error.hpp"

namespace pdifmp {

StateVector::StateVector(std::size_t size, double fill) : size_(size) {
    if (size > kMaxStateDim) {
        fail(ErrorKind::argument, "state dimension " + std::to_string(size) + " exceeds " +
                                      std::to_string(kMaxStateDim));
    }
    std::fill_n(data_.begin(), size, fill);
}

StateVector::StateVector(std::initializer_list<double> values)
    : StateVector(std::span<const double>(values.begin(), values.size())) {}

StateVector::StateVector(std::span<const double> values) : StateVector(values.size()) {
    std::copy(values.begin(), values.end(), data_.begin());
}

bool StateVector::all_finite() const noexcept {
    return std::all_of(begin(), end(), [](double x) { return std::isfinite(x); });
}

bool operator==(const StateVector& a, const StateVector& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
}

ModeSet::ModeSet(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.empty()) {
        fail(ErrorKind::model_definition, "mode set must contain at least one mode");
    }
    if (std::set<double>(values_.begin(), values_.end()).size() != values_.size()) {
        fail(ErrorKind::model_definition, "mode values must be pairwise distinct");
    }
    if (labels_.empty()) {
        labels_.reserve(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) labels_.push_back("k" + std::to_string(i + 1));
    } else if (labels_.size() != values_.size()) {
        fail(ErrorKind::model_definition, "mode labels and values differ in length");
    }
}

ModeSet ModeSet::counter(std::size_t count) {
    std::vector<double> values(count);
    std::vector<std::string> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = static_cast<double>(i);
        labels[i] = std::to_string(i);
    }
    return ModeSet(std::move(values), std::move(labels));
}

}  // namespace pdifmp
