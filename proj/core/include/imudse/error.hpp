#pragma once

#include <stdexcept>
#include <string>

namespace imudse {

/// Input that violates a documented contract (bad file, bad argument, infeasible request).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while executing an otherwise valid request (I/O, numerical breakdown).
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace imudse
