#pragma once

#include <stdexcept>
#include <string>

namespace fairpca {

// Bad arguments or violated call contracts. CLI maps this to exit code 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Problems with input data: unreadable files, parse failures, schema
// mismatches, empty groups. CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical routine failed to converge (ill-conditioned input). CLI maps
// this to exit code 2 as well, since it is induced by the data.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A violated internal guarantee; always indicates a bug, never user error.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace fairpca
