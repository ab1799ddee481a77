#pragma once

#include <functional>
#include <string>
#include <vector>

#include "muskat/spectral.hpp"

namespace muskat {

/// An operator T(f) on periodic scalar fields together with its Frechet
/// derivative. When `frechet` is empty a central-difference surrogate with
/// step 1e-5 relative to ||h|| is used (and flagged in reports).
struct OperatorHandle {
    std::function<PeriodicField(const PeriodicField&)> apply;
    std::function<PeriodicField(const PeriodicField&, const PeriodicField&)> frechet;
    int sobolev_index = 1;
    double trust_region = 1e9;
};

/// Outcome of probing the hypotheses (boundedness, Frechet agreement, the
/// chain rule d/dx T(f) = D_fT[f'], and i-linearity) with random trial
/// directions. Failures are reported, never thrown.
struct HypothesisReport {
    bool passed = true;
    bool used_fd_surrogate = false;
    double frechet_fd_residual = 0.0;   // FD vs supplied derivative, finest step
    double frechet_fd_ratio = 0.0;      // coarse/fine residual ratio (~4 for O(h^2))
    double chain_rule_residual = 0.0;
    double i_linearity_residual = 0.0;
    double boundedness_max = 0.0;       // max ||T||_{H^k} over trials
    std::vector<std::string> failures;
};

HypothesisReport verify_hypotheses(const OperatorHandle& op, const PeriodicField& f0,
                                   int trials, double tol = 1e-8, unsigned seed = 1234);

/// Time series from continuing a stationary solution into complex time.
struct ContinuationResult {
    std::vector<double> times;       // sorted ascending, both directions
    std::vector<double> residuals;   // ||f_x - T(f)||_L2 (= ||f_x + i f_t||)
    std::vector<double> hk_norms;
    PeriodicField f_forward_end;     // state at +t_max (or early stop)
    PeriodicField f_backward_end;    // state at -t_max (or early stop)
    bool left_trust_region = false;
};

/// Evolve df/dt = i T(f) from f0 in both time directions with RK4,
/// recording the Cauchy-Riemann residual each step. Requires
/// ||f0' - T(f0)||_L2 <= 1e-8 * ||f0||_H1 (throws NotStationary otherwise).
ContinuationResult continue_stationary(const OperatorHandle& op, const PeriodicField& f0,
                                       double t_max, double dt);

}  // namespace muskat
