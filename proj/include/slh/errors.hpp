#pragma once

#include <stdexcept>
#include <string>

namespace slh {

/// Malformed input (JSON shape, CLI arguments). CLI exit status 2.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

/// Structural precondition failure (dimension mismatch, non-unitary
/// scattering, non-Hermitian Hamiltonian). CLI exit status 3.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical breakdown (negative distance radicand beyond the rounding
/// budget, truncation norm deficit over bound). CLI exit status 4.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slh
