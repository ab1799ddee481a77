#pragma once

#include "muskat/spectral.hpp"

namespace muskat {

/// Interface parameterization f = (alpha + g1, g2); f - (alpha, 0) periodic.
struct Contour {
    PeriodicField g1;
    PeriodicField g2;
    bool complex_valued = false;

    int size() const { return g1.size(); }
};

/// A pair of periodic fields; used for right-hand sides, w slices, etc.
struct FieldPair {
    PeriodicField c1;
    PeriodicField c2;

    int size() const { return c1.size(); }
};

}  // namespace muskat
