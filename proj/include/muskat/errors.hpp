#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

/// Invalid run parameters (grid sizes, cutoff widths, scenario ranges, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The chord denominator cosh(d2)-cos(d1) fell below the floor. Carries the
/// offending node indices when raised from a quadrature loop (-1 otherwise).
struct ArcChordViolation : std::runtime_error {
    int i = -1;
    int j = -1;
    explicit ArcChordViolation(const std::string& what, int i_ = -1, int j_ = -1)
        : std::runtime_error(what), i(i_), j(j_) {}
};

/// Tangent vector vanished where a diagonal kernel limit was requested.
struct DegenerateParameterization : std::runtime_error {
    explicit DegenerateParameterization(const std::string& what) : std::runtime_error(what) {}
};

/// analyticity radius of the identically-zero field is undefined.
struct UndefinedRadius : std::runtime_error {
    explicit UndefinedRadius(const std::string& what) : std::runtime_error(what) {}
};

/// Requested extension point lies outside the lens |y| <= c(alpha)*t.
struct OutsideDomain : std::runtime_error {
    explicit OutsideDomain(const std::string& what) : std::runtime_error(what) {}
};

/// gamma-derivative requested at a boundary node with no evolved w slices.
struct UnsupportedNode : std::runtime_error {
    explicit UnsupportedNode(const std::string& what) : std::runtime_error(what) {}
};

/// Turnover root found but the second derivative there is numerically zero.
struct DegenerateTurnover : std::runtime_error {
    explicit DegenerateTurnover(const std::string& what) : std::runtime_error(what) {}
};

/// Initial data handed to the stationary continuation is not stationary.
struct NotStationary : std::runtime_error {
    explicit NotStationary(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace muskat
