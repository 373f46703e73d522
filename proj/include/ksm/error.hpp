#pragma once

#include <stdexcept>
#include <string>

namespace ksm {

/// Rejected input: bad arguments, malformed configs, inconsistent files.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not be completed (NaN, solver breakdown).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ksm
