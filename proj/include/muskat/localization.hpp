#pragma once

#include <array>

#include "muskat/contour.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

/// Normalized smooth step built from the exp(-1/(x(1-x))) glue: 0 for x<=0,
/// 1 for x>=1, strictly increasing in between. First two derivatives are
/// available in closed form.
double smooth_step(double x);
double smooth_step_d1(double x);
double smooth_step_d2(double x);

/// The window cutoff lambda and the lens bump c with their derivatives.
///
/// lambda = 1 on |alpha| <= delta, 0 on |alpha| >= 2*delta.
/// c = delta_c on |alpha| <= delta/32, supported in [-delta/8, delta/8],
/// c >= 0, supp c inside {lambda = 1}. Derivatives are evaluated from the
/// closed-form transition profile, not by mode multiplication: at practical
/// grid sizes the delta/8-wide bump is too coarse for spectral
/// differentiation to be trustworthy.
struct CutoffPair {
    double delta = 0.0;
    double delta_c = 0.0;

    PeriodicField lambda;
    PeriodicField lambda_prime;
    PeriodicField c;
    PeriodicField c_prime;
    PeriodicField c_dprime;

    // lambda(alpha)*alpha and its derivative, used to rebuild z1 from its
    // reduced storage.
    PeriodicField lam_alpha;
    PeriodicField lam_alpha_prime;

    /// Measured sup |c^(k)|, k = 0..4 (k >= 3 by fine-grid differencing of
    /// the closed-form c''). Recorded so a run can report how far the bump
    /// is from the idealized smallness the analysis assumes.
    std::array<double, 5> c_deriv_sup{};

    /// True when sup|c| and sup|c'| are both <= delta.
    bool smallness_ok = false;
};

/// Localization triple: f^c = lambda*f, f_tilde = (1-lambda)*f.
/// f_tilde's first component is stored minus alpha so it is periodic.
struct SplitState {
    FieldPair f_c;          // (lambda*f1, lambda*f2), both periodic
    FieldPair f_tilde_st;   // (f_tilde1 - alpha, f_tilde2)
    CutoffPair cutoffs;

    // Cached derivatives of f_tilde (the +1 from the alpha part is included
    // in dft1).
    PeriodicField dft1, dft2;
    PeriodicField d2ft1, d2ft2;
};

/// Window cutoff. Requires 2*delta < pi.
PeriodicField make_lambda(const SpectralGrid& grid, double delta);

/// Full cutoff construction. Requires delta_c <= delta; emits an ordinary
/// warning on stderr when the grid under-resolves the transition layers
/// (fewer than 8 nodes across the c-bump transition).
CutoffPair make_c(const SpectralGrid& grid, double delta, double delta_c);

/// Split f into f^c + f_tilde. f must be band-limited on the grid.
SplitState split_contour(const Contour& f, const CutoffPair& cutoffs);

/// f_tilde evaluated along alpha + i*c(alpha)*gamma*t. The value is
/// bit-identical to f_tilde on the real line because f_tilde vanishes on
/// supp c and the curve is real elsewhere; the support condition
/// supp c inside {lambda = 1} is asserted.
FieldPair f_tilde_on_curve(const SplitState& split, double gamma, double t);

}  // namespace muskat
