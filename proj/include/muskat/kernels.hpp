#pragma once

#include <vector>

#include "muskat/contour.hpp"
#include "muskat/localization.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

/// Pointwise kernel arguments: d1, d2 are the combined first/second-component
/// differences (z plus f_tilde); sep = alpha - beta feeds the mollified
/// kernel's regularizer only.
struct KernelInput {
    cplx d1;
    cplx d2;
    double sep = 0.0;
};

/// K = sin(d1) / (cosh(d2) - cos(d1)). Raises ArcChordViolation when the
/// denominator falls below 1e-12 * (1 + |cosh d2|).
cplx kernel_K(const KernelInput& inp);

/// Mollified kernel: sin(d1) * conj(D) / (|D|^2 + sin^2(sep/2)/n) with
/// D = cosh(d2) - cos(d1). Needs no floor; reduces to K at sep = 0.
cplx kernel_K_n(const KernelInput& inp, long n);

/// Deriviative-data limit lim_{beta -> alpha} K * tan((alpha-beta)/2)
///   = a / (a^2 + b^2),  a = d(z1 + f1~)/dalpha, b = the second component.
/// Raises DegenerateParameterization when a^2 + b^2 vanishes.
cplx kernel_diagonal_limit(cplx dz1, cplx dz2);

/// Next coefficient in K*tan((alpha-beta)/2) = L + M*(alpha-beta) + ...,
/// M = a(a*a2 + b*b2)/(a^2+b^2)^2 - a2/(2(a^2+b^2)), from first and second
/// derivatives of the combined contour. Regular through a = 0.
cplx kernel_tan_slope(cplx a, cplx b, cplx a2, cplx b2);

/// Dense sample matrix of a singular kernel G(alpha_i, alpha_j); diagonal
/// slots are unused (quadratures substitute analytic limits there).
struct KernelMatrix {
    int n = 0;
    std::vector<cplx> data;

    explicit KernelMatrix(int n_) : n(n_), data(static_cast<std::size_t>(n_) * n_) {}
    cplx& at(int i, int j) { return data[static_cast<std::size_t>(i) * n + j]; }
    cplx at(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
};

/// Factorized per-slice trig data: every kernel entry is a few multiplies on
/// u_m = exp(i(alpha_m + P1_m)) and w_m = exp(P2_m), so building an n x n
/// kernel matrix costs O(n) transcendentals. Also carries the derivative
/// fields the analytic diagonal limits need.
struct SliceGeometry {
    int n = 0;
    std::vector<cplx> u, iu;      // exp(+-i F1)
    std::vector<cplx> we, iwe;    // exp(+-F2)
    std::vector<cplx> a, b;       // dF1, dF2
    std::vector<cplx> a2, b2;     // second derivatives
    std::vector<cplx> L;          // a/(a^2+b^2)
    std::vector<cplx> M;          // tan-slope coefficient

    cplx sin_d1(int m, int j) const { return (u[m] * iu[j] - u[j] * iu[m]) * cplx(0.0, -0.5); }
    cplx cos_d1(int m, int j) const { return (u[m] * iu[j] + u[j] * iu[m]) * 0.5; }
    cplx cosh_d2(int m, int j) const { return (we[m] * iwe[j] + we[j] * iwe[m]) * 0.5; }
    cplx sinh_d2(int m, int j) const { return (we[m] * iwe[j] - we[j] * iwe[m]) * 0.5; }
};

/// Build the factorized data for the combined contour z + f_tilde.
/// `z_full` must contain the full z1 (reduced storage plus lambda*alpha).
SliceGeometry build_slice_geometry(const FieldPair& z_full, const SplitState& split);

/// Same, for a plain contour f = (alpha + g1, g2) with no localization split.
SliceGeometry build_contour_geometry(const Contour& f);

/// Kernel matrix K(i,j) over all node pairs (diagonal left zero).
KernelMatrix kernel_matrix(const SliceGeometry& geom);

/// The coefficient fields of the energy identity: L1 = -2*pi*L and the
/// transport-plus-p.v. coefficient L2, together with the Garding margin
/// min over |alpha| <= 2*delta of (-Re L1 - |Im L2|).
struct CoefficientPair {
    PeriodicField l1;
    PeriodicField l2;
    double margin = 0.0;
};

CoefficientPair coefficients(const FieldPair& z_full, const SplitState& split,
                             double gamma, double t);

/// p.v. integral of G(alpha, beta) * g(beta) dbeta over the period:
/// the cot singularity (coefficient `cot_coeff` = lim G*tan((a-b)/2)) is
/// routed through the Hilbert transform, the remainder is a trapezoid sum
/// whose diagonal is the supplied analytic limit of G - cot_coeff*cot.
PeriodicField pv_integral(const KernelMatrix& G, const PeriodicField& cot_coeff,
                          const PeriodicField& remainder_diag, const PeriodicField& density);

/// sup over |alpha| <= 2*delta, beta in [-pi,pi) of
/// (alpha-beta)^2 / |cosh(D2) - cos(D1)| (difference wrapped to (-pi,pi]),
/// diagonal pairs replaced by |2/(a^2+b^2)|. Returns +infinity when an
/// off-diagonal denominator is exactly zero (self-intersection).
double arc_chord_norm(const FieldPair& z_full, const SplitState& split);

/// Rayleigh-Taylor coefficient rho * df1 / ((df1)^2 + (df2)^2) as a real
/// field; NaN where the tangent vanishes (turnover candidate).
PeriodicField rt_coefficient(const Contour& f, double rho_factor);

}  // namespace muskat
