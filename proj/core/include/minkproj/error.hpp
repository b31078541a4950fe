#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minkproj {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or dimension mismatch between grids, vectors, and operators.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid set parameters or an inconsistent constraint specification.
/// Carries every violation found, not just the first.
class SpecError : public Error {
public:
    explicit SpecError(std::vector<std::string> issues);

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Numerical failure inside a solver (e.g. CG hit non-positive curvature).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable file.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace minkproj
