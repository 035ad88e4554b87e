#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sinrldp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Requested work exceeds the configured resource guard.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Coincident points with an unbounded path-loss law.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Operation is not defined for the configured mode.
class ModeError : public Error {
public:
    using Error::Error;
};

/// A quadrature integrand produced a non-finite value.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Two measures or tables live on different grids.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// An edge probability of exactly 0 or 1 on a pair where the likelihood needs log(p) or log(1-p).
class DegenerateProbabilityError : public Error {
public:
    DegenerateProbabilityError(const std::string& what, std::size_t u, std::size_t v)
        : Error(what), u_(u), v_(v) {}
    std::size_t u() const noexcept { return u_; }
    std::size_t v() const noexcept { return v_; }

private:
    std::size_t u_;
    std::size_t v_;
};

/// File I/O failure; the message carries the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated file. `offset()` is the byte at which decoding failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace sinrldp
