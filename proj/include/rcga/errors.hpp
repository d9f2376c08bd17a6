#pragma once

#include <stdexcept>

namespace rcga {

// Thrown when a caller violates a documented precondition of an operation.
struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an update would corrupt the count table, i.e. a decrement
// would drive a count below zero. This can only happen if the winner/loser
// pair was not sampled from the matrix being updated.
struct matrix_corruption : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rcga
