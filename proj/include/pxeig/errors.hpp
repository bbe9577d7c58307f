#pragma once

#include <stdexcept>
#include <string>

namespace pxeig {

// Invalid argument to an operation (non-positive gamma, j = 0, zero field, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Point outside the exponent's or domain's bounding box.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Non-finite or otherwise unusable input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain with no interior nodes or zero inradius.
class DegenerateDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite-difference stencil would leave the discretized domain.
class StencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition of a formula does not hold.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A monotone root-find could not bracket its root.
class RootFindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration failed to parse or validate. `path` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace pxeig
