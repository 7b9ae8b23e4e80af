#pragma once

#include <stdexcept>
#include <string>

namespace fkrep {

// state space or index width would be exceeded
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a measure was asked for on an empty support (e.g. odd source count)
struct EmptySupportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// requested sources cannot be realised inside the given configuration
struct InfeasibleSourcesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fkrep
