#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "muskat/evolution.hpp"

namespace muskat {

/// Turnover-point data for Theorem-1.2-style conditions.
struct TurnoverReport {
    enum class Status { Found, None, Degenerate };
    Status status = Status::None;
    double z1_location = 0.0;    // root of df1 nearest the window center
    double second_deriv = 0.0;   // d2f1 at the root
    double pv_velocity = 0.0;    // (1/2pi) p.v. int K dbeta at the root
    double z1_speed = 0.0;       // dZ1/dt by implicit differentiation
    double condition_sign = 0.0; // (z1_speed + rho*pv) * rho * d2f1
    std::vector<double> all_roots;
};

/// One row of the certification time series.
struct DiagnosticsRecord {
    double t = 0.0;
    double h5_norm = 0.0;
    double arc = 0.0;
    double rt = 0.0;
    double garding_margin = 0.0;
    double cr_residual = 0.0;
    double analyticity_radius_gamma0 = 0.0;
    std::optional<TurnoverReport> turnover;
};

/// The curve-adapted Cauchy-Riemann operator applied to the family,
///   A0(z) = (i c(alpha) t / (1 + i c'(alpha) gamma t)) dz/dalpha - dz/dgamma,
/// with dz/dgamma taken from the evolved w when present, otherwise by a
/// centered difference on the gamma grid (interior nodes only).
FieldPair cr_operator_A0(const FamilyState& state, int gamma_index);

/// max over interior gamma nodes of the L2_alpha norm of A0(z).
double cr_residual(const FamilyState& state);

/// f^c(alpha + i y, t) via z(alpha, y/(c(alpha) t), t), cubic interpolation
/// across the gamma grid. Nodes with |y| > c(alpha)*t are flagged invalid.
struct ExtensionSlice {
    std::vector<cplx> f1, f2;
    std::vector<bool> valid;
};
ExtensionSlice reconstruct_extension(const FamilyState& state, double y);

/// A scalar test family sampled over the gamma grid.
struct TestFamily {
    std::vector<PeriodicField> slices;
    std::vector<double> gammas;

    double spacing() const { return gammas[1] - gammas[0]; }
};

/// Residual of the derivative/A0 commutation identity
///   A0( d_alpha h / (1+ic'gamma t) ) = (d_alpha/(1+ic'gamma t)) A0(h)
/// at an interior gamma node; sup norm over alpha.
double check_lemma_switch(const TestFamily& h, const CutoffPair& cutoffs,
                          int gamma_index, double t);

/// A scalar meromorphic kernel with its derivative, for the integral
/// commutation identity.
struct ScalarKernel {
    std::function<cplx(cplx)> value;
    std::function<cplx(cplx)> deriv;
};

/// Residual of A0(int K~(h(a)-h(b)) X(b) (1+ic'(b)gamma t) db) against the
/// gradient + A0(X) form; sup norm over alpha at an interior gamma node.
double check_lemma_forM1(const ScalarKernel& kernel, const TestFamily& X,
                         const TestFamily& h, const CutoffPair& cutoffs,
                         int gamma_index, double t);

/// Locate turnover points (zeros of df1) on the full circle, polish by
/// Newton on the trigonometric interpolant, and evaluate the sign condition.
/// Status::None when df1 has no zero; throws DegenerateTurnover when
/// |d2f1(Z1)| < 1e-8.
TurnoverReport turnover_condition(const Contour& f, const FieldPair& rhs, double rho_factor);

/// Reassemble the real interface from the gamma = 0 slice plus f_tilde.
Contour reassembled_contour(const FamilyState& state);

/// Turnover report with graceful handling of degenerate cases (vanishing
/// tangent, vanishing second derivative).
TurnoverReport turnover_report_of(const Contour& f, double rho);

/// Compose a full record (norms, margin, CR residual, radius, turnover).
DiagnosticsRecord make_record(const FamilyState& state, bool with_turnover);

}  // namespace muskat
