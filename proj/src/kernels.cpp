// Muskat kernel, its mollified variant, diagonal limits, the L1/L2
// coefficient fields and the arc-chord / Rayleigh-Taylor functionals.

#include "muskat/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "muskat/errors.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;

double wrap_to_pi(double s) {
    while (s > kPi) s -= 2.0 * kPi;
    while (s <= -kPi) s += 2.0 * kPi;
    return s;
}
}  // namespace

cplx kernel_K(const KernelInput& inp) {
    const cplx den = std::cosh(inp.d2) - std::cos(inp.d1);
    const double floor = 1e-12 * (1.0 + std::abs(std::cosh(inp.d2)));
    if (std::abs(den) < floor)
        throw ArcChordViolation("chord denominator below floor");
    return std::sin(inp.d1) / den;
}

cplx kernel_K_n(const KernelInput& inp, long n) {
    const cplx den = std::cosh(inp.d2) - std::cos(inp.d1);
    const double s = std::sin(0.5 * inp.sep);
    const double reg = s * s / static_cast<double>(n);
    return std::sin(inp.d1) * std::conj(den) / (std::norm(den) + reg);
}

cplx kernel_diagonal_limit(cplx dz1, cplx dz2) {
    const cplx den = dz1 * dz1 + dz2 * dz2;
    const double scale = std::norm(dz1) + std::norm(dz2);
    if (std::abs(den) <= 1e-14 * (scale + 1e-300))
        throw DegenerateParameterization("tangent vector vanished in diagonal kernel limit");
    return dz1 / den;
}

cplx kernel_tan_slope(cplx a, cplx b, cplx a2, cplx b2) {
    const cplx s = a * a + b * b;
    return a * (a * a2 + b * b2) / (s * s) - a2 / (2.0 * s);
}

namespace {
// p1/p2 are the periodic parts of F1 - alpha and F2; dF/d2F the combined
// derivative fields (dF1 includes the unit slope of the alpha part).
SliceGeometry build_geometry(const std::vector<cplx>& p1, const std::vector<cplx>& p2,
                             const std::vector<cplx>& dF1, const std::vector<cplx>& dF2,
                             const std::vector<cplx>& d2F1, const std::vector<cplx>& d2F2) {
    const int n = static_cast<int>(p1.size());
    const SpectralGrid grid(n);
    SliceGeometry g;
    g.n = n;
    g.u.resize(n); g.iu.resize(n); g.we.resize(n); g.iwe.resize(n);
    g.a = dF1; g.b = dF2; g.a2 = d2F1; g.b2 = d2F2;
    g.L.resize(n); g.M.resize(n);
    for (int m = 0; m < n; ++m) {
        const double alpha = grid.node(m);
        g.u[m] = std::exp(cplx(0.0, 1.0) * (alpha + p1[m]));
        g.iu[m] = 1.0 / g.u[m];
        g.we[m] = std::exp(p2[m]);
        g.iwe[m] = 1.0 / g.we[m];
        g.L[m] = kernel_diagonal_limit(g.a[m], g.b[m]);
        g.M[m] = kernel_tan_slope(g.a[m], g.b[m], g.a2[m], g.b2[m]);
    }
    return g;
}
}  // namespace

SliceGeometry build_slice_geometry(const FieldPair& z_full, const SplitState& split) {
    const int n = z_full.size();
    const PeriodicField dz1 = spectral_derivative(z_full.c1, 1);
    const PeriodicField dz2 = spectral_derivative(z_full.c2, 1);
    const PeriodicField d2z1 = spectral_derivative(z_full.c1, 2);
    const PeriodicField d2z2 = spectral_derivative(z_full.c2, 2);

    std::vector<cplx> p1(n), p2(n), a(n), b(n), a2(n), b2(n);
    for (int m = 0; m < n; ++m) {
        p1[m] = z_full.c1.samples()[m] + split.f_tilde_st.c1.samples()[m];
        p2[m] = z_full.c2.samples()[m] + split.f_tilde_st.c2.samples()[m];
        a[m] = dz1.samples()[m] + split.dft1.samples()[m];
        b[m] = dz2.samples()[m] + split.dft2.samples()[m];
        a2[m] = d2z1.samples()[m] + split.d2ft1.samples()[m];
        b2[m] = d2z2.samples()[m] + split.d2ft2.samples()[m];
    }
    return build_geometry(p1, p2, a, b, a2, b2);
}

SliceGeometry build_contour_geometry(const Contour& f) {
    const int n = f.size();
    const PeriodicField dg1 = spectral_derivative(f.g1, 1);
    const PeriodicField dg2 = spectral_derivative(f.g2, 1);
    const PeriodicField d2g1 = spectral_derivative(f.g1, 2);
    const PeriodicField d2g2 = spectral_derivative(f.g2, 2);

    std::vector<cplx> a(n), b(n);
    for (int m = 0; m < n; ++m) {
        a[m] = 1.0 + dg1.samples()[m];
        b[m] = dg2.samples()[m];
    }
    return build_geometry(f.g1.samples(), f.g2.samples(), a, b, d2g1.samples(), d2g2.samples());
}

KernelMatrix kernel_matrix(const SliceGeometry& geom) {
    const int n = geom.n;
    KernelMatrix K(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const cplx den = geom.cosh_d2(i, j) - geom.cos_d1(i, j);
            const double floor = 1e-12 * (1.0 + std::abs(geom.cosh_d2(i, j)));
            if (std::abs(den) < floor)
                throw ArcChordViolation("chord denominator below floor", i, j);
            K.at(i, j) = geom.sin_d1(i, j) / den;
        }
    }
    return K;
}

PeriodicField pv_integral(const KernelMatrix& G, const PeriodicField& cot_coeff,
                          const PeriodicField& remainder_diag, const PeriodicField& density) {
    const int n = G.n;
    const double h = 2.0 * kPi / n;
    const PeriodicField Hg = hilbert_transform(density);

    // cot((alpha_i - alpha_j)/2) depends only on i-j; alpha_i - alpha_j = h*(i-j).
    std::vector<double> cot_table(n, 0.0);
    for (int d = 1; d < n; ++d) cot_table[d] = 1.0 / std::tan(0.5 * h * d);

    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = remainder_diag.samples()[i] * density.samples()[i];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            int d = i - j;
            double ct = (d > 0) ? cot_table[d] : -cot_table[-d];
            acc += (G.at(i, j) - cot_coeff.samples()[i] * ct) * density.samples()[j];
        }
        out[i] = cot_coeff.samples()[i] * 2.0 * kPi * Hg.samples()[i] + h * acc;
    }
    return PeriodicField::from_samples(std::move(out));
}

CoefficientPair coefficients(const FieldPair& z_full, const SplitState& split,
                             double gamma, double t) {
    const int n = z_full.size();
    const SpectralGrid grid(n);
    const SliceGeometry geom = build_slice_geometry(z_full, split);
    const KernelMatrix K = kernel_matrix(geom);

    std::vector<cplx> cotc(n), rem(n), dens(n);
    for (int m = 0; m < n; ++m) {
        cotc[m] = geom.L[m];
        rem[m] = 2.0 * geom.M[m];
        dens[m] = 1.0 + cplx(0.0, 1.0) * split.cutoffs.c_prime.samples()[m] * gamma * t;
    }
    const PeriodicField pv = pv_integral(K, PeriodicField::from_samples(cotc),
                                         PeriodicField::from_samples(rem),
                                         PeriodicField::from_samples(dens));

    std::vector<cplx> l1(n), l2(n);
    for (int m = 0; m < n; ++m) {
        const cplx denom = 1.0 + cplx(0.0, 1.0) * split.cutoffs.c_prime.samples()[m] * gamma * t;
        l1[m] = -2.0 * kPi * geom.L[m];
        l2[m] = cplx(0.0, 1.0) * split.cutoffs.c.samples()[m] * gamma / denom +
                pv.samples()[m] / denom;
    }

    CoefficientPair out{PeriodicField::from_samples(std::move(l1)),
                        PeriodicField::from_samples(std::move(l2)), 0.0};
    double margin = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m) {
        if (std::abs(grid.node(m)) > 2.0 * split.cutoffs.delta) continue;
        const double v = -out.l1.samples()[m].real() - std::abs(out.l2.samples()[m].imag());
        margin = std::min(margin, v);
    }
    out.margin = margin;
    return out;
}

double arc_chord_norm(const FieldPair& z_full, const SplitState& split) {
    const int n = z_full.size();
    const SpectralGrid grid(n);
    const SliceGeometry geom = build_slice_geometry(z_full, split);

    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(grid.node(i)) > 2.0 * split.cutoffs.delta) continue;
        for (int j = 0; j < n; ++j) {
            double val;
            if (j == i) {
                const cplx den = geom.a[i] * geom.a[i] + geom.b[i] * geom.b[i];
                if (std::abs(den) == 0.0) return std::numeric_limits<double>::infinity();
                val = std::abs(2.0 / den);
            } else {
                const cplx D = geom.cosh_d2(i, j) - geom.cos_d1(i, j);
                const double floor = 1e-12 * (1.0 + std::abs(geom.cosh_d2(i, j)));
                if (std::abs(D) < floor) return std::numeric_limits<double>::infinity();
                const double s = wrap_to_pi(grid.node(i) - grid.node(j));
                val = s * s / std::abs(D);
            }
            sup = std::max(sup, val);
        }
    }
    return sup;
}

PeriodicField rt_coefficient(const Contour& f, double rho_factor) {
    const int n = f.size();
    const PeriodicField dg1 = spectral_derivative(f.g1, 1);
    const PeriodicField dg2 = spectral_derivative(f.g2, 1);
    std::vector<cplx> sig(n);
    for (int j = 0; j < n; ++j) {
        const double a = 1.0 + dg1.samples()[j].real();
        const double b = dg2.samples()[j].real();
        const double den = a * a + b * b;
        sig[j] = (den < 1e-14) ? std::numeric_limits<double>::quiet_NaN()
                               : rho_factor * a / den;
    }
    return PeriodicField::from_samples(std::move(sig));
}

}  // namespace muskat
