#include "pdifmp/error.hpp"

namespace pdifmp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::argument: return "argument";
        case ErrorKind::model_definition: return "model_definition";
        case ErrorKind::bound_violation: return "bound_violation";
        case ErrorKind::integration_diverged: return "integration_diverged";
        case ErrorKind::runaway_rate: return "runaway_rate";
        case ErrorKind::coupling_broken: return "coupling_broken";
        case ErrorKind::unsupported_model: return "unsupported_model";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace pdifmp
