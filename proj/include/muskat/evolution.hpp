#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "muskat/contour.hpp"
#include "muskat/kernels.hpp"
#include "muskat/localization.hpp"

namespace muskat {

/// One member of the complexified family z(., gamma, t). The first component
/// is stored minus lambda(alpha)*alpha; rebuild with z1_full().
struct FamilySlice {
    PeriodicField z1_red;
    PeriodicField z2;
    double gamma = 0.0;
    double t = 0.0;
};

PeriodicField z1_full(const FamilySlice& slice, const SplitState& split);

/// The gamma-grid family, optionally carrying w = dz/dgamma slices.
struct FamilyState {
    std::vector<FamilySlice> slices;   // gamma ascending, odd count, includes 0
    std::vector<FieldPair> w_slices;   // empty unless w is evolved
    double t = 0.0;
    int direction = +1;                // +1 forward, -1 backward
    double rho = 1.0;
    std::shared_ptr<const SplitState> split;

    bool has_w() const { return !w_slices.empty(); }
    int gamma_index_of_zero() const { return static_cast<int>(slices.size()) / 2; }
    double gamma_spacing() const;
};

/// Family at t = 0: z(alpha, gamma, 0) = f^c(alpha, 0) on every slice.
FamilyState init_family(std::shared_ptr<const SplitState> split, int gamma_count,
                        double rho, int direction);

/// Full-contour Muskat right-hand side,
///   df_mu/dt = rho/(2pi) * int sin(D1)(df_mu(a) - df_mu(b)) / (cosh D2 - cos D1) db,
/// by removable-singularity trapezoid quadrature (diagonal value
/// 2a d2f_mu/(a^2+b^2)).
FieldPair muskat_rhs(const Contour& f, double rho_factor);

/// Localized right-hand side: the two lambda-weighted integrals with df^c and
/// df~ densities. Equals lambda * muskat_rhs to quadrature tolerance.
FieldPair localized_rhs(const SplitState& split, double rho_factor);

/// T(z): transport ic(a)gamma/(1+ic'gamma t) dz plus the two kernel
/// integrals with curve weights 1 + i c'(beta) gamma t.
FieldPair complex_T(const FamilySlice& slice, const SplitState& split, double rho_factor);

/// Gateaux derivative D_zT(z)[w]; the exact directional derivative of the
/// discretized T, so w evolved alongside z tracks dz/dgamma to scheme order.
FieldPair gateaux_DzT(const FamilySlice& slice, const FieldPair& w,
                      const SplitState& split, double rho_factor);

/// Partial derivative of T in gamma at fixed z (again exact for the
/// discretization).
FieldPair partial_gamma_T(const FamilySlice& slice, const SplitState& split,
                          double rho_factor);

/// dw/dt = D_zT(z)[w] + dT/dgamma for the state's slice_index.
FieldPair w_rhs(const FamilyState& state, int slice_index);

/// Galerkin-mollified right-hand side: Fourier projection to |k| <= n of
/// input, densities and output, and the regularized kernel K^n.
FieldPair mollified_T(const FamilySlice& slice, const SplitState& split,
                      double rho_factor, long n);

/// Classical RK4 step for any state with `axpy`-style arithmetic supplied by
/// the callable: y' = f(t, y).
template <class Y, class F>
Y rk4_step(const Y& y, double t, double dt, F&& f) {
    const Y k1 = f(t, y);
    const Y k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
    const Y k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
    const Y k4 = f(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

enum class StopReason { Completed, MarginNonpositive, ArcChordViolationStop, NanDetected };
std::string to_string(StopReason r);

struct EvolveOptions {
    double dt = 0.0;               // 0 -> cfl_const / n_points
    double cfl_const = 0.0;        // 0 -> 0.5 / (2*pi*max(sigma_max, c_max))
    double t_final = 0.0;          // unsigned duration; direction applies the sign
    int record_every = 10;
    bool evolve_w = false;
    std::optional<long> mollify_n; // evolve the mollified system instead
    int threads = 1;
    bool check_margin = true;      // disabled only by scheme-property tests
};

struct EvolveResult {
    StopReason reason = StopReason::Completed;
    int steps = 0;
    double t_reached = 0.0;
};

/// Advance every gamma-slice independently (parallel across slices), with
/// the optional w slices stepped in the same RK4 tableau against the stage
/// values of z. `on_record` fires at step 0, every record_every steps, and at
/// the end. Monitor failures roll back to the last recorded state.
EvolveResult evolve_family(FamilyState& state, const EvolveOptions& options,
                           const std::function<void(const FamilyState&, int)>& on_record = {});

/// Garding margin oriented by time direction and density sign:
/// min over slices and the window of (-dir*rho*Re L1 - |Im L2|).
double oriented_margin(const FamilyState& state);

/// Min of the Rayleigh-Taylor coefficient over |alpha| <= 2*delta, evaluated
/// on the reassembled contour of the gamma = 0 slice.
double window_min_sigma(const Contour& f, double rho, double delta);

}  // namespace muskat
