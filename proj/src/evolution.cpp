// Right-hand sides of the real, localized, complexified and mollified contour
// equations, the Gateaux/partial-gamma derivatives, and the gamma-family RK4
// runner.
//
// All singular integrals are removable-singularity trapezoid sums: the
// density differences vanish on the diagonal, whose entry is the analytic
// limit 2L * (density derivative) * weight. The Gateaux and partial-gamma
// operators are the exact derivatives of this discretization, so the coupled
// (z, w) tableau integrates the variational equation of the discrete flow.

#include "muskat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "muskat/errors.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

using Vec = std::vector<cplx>;

void run_parallel(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < count; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Everything a right-hand-side evaluation needs, built once per RK4 stage.
struct Stage {
    int n = 0;
    double gamma = 0.0, t = 0.0, rho = 0.0;
    const SplitState* split = nullptr;
    SliceGeometry geom;
    Vec wgt;        // 1 + i c'(beta) gamma t
    Vec invw;       // 1 / (1 + i c'(alpha) gamma t)
    Vec dz1, dz2;   // dz (z only)
    Vec q1, q2;     // dz * invw
    Vec dq1, dq2;   // d/dalpha of q
    std::vector<int> rows;  // nodes with lambda != 0
};

Vec samples_of_derivative(const PeriodicField& f) { return spectral_derivative(f, 1).samples(); }

Stage build_stage(const PeriodicField& z1f, const PeriodicField& z2, double gamma, double t,
                  const SplitState& split, double rho) {
    Stage st;
    st.n = z1f.size();
    st.gamma = gamma;
    st.t = t;
    st.rho = rho;
    st.split = &split;
    st.geom = build_slice_geometry(FieldPair{z1f, z2}, split);

    const int n = st.n;
    st.wgt.resize(n);
    st.invw.resize(n);
    st.dz1 = samples_of_derivative(z1f);
    st.dz2 = samples_of_derivative(z2);
    Vec q1(n), q2(n);
    for (int m = 0; m < n; ++m) {
        const cplx cp = split.cutoffs.c_prime.samples()[m];
        const cplx w = 1.0 + kI * cp * gamma * t;
        st.wgt[m] = w;
        st.invw[m] = 1.0 / w;
        q1[m] = st.dz1[m] * st.invw[m];
        q2[m] = st.dz2[m] * st.invw[m];
    }
    st.dq1 = samples_of_derivative(PeriodicField::from_samples(q1));
    st.dq2 = samples_of_derivative(PeriodicField::from_samples(q2));
    st.q1 = std::move(q1);
    st.q2 = std::move(q2);

    st.rows.reserve(n);
    for (int m = 0; m < n; ++m) {
        if (split.cutoffs.lambda.samples()[m].real() != 0.0) st.rows.push_back(m);
    }
    return st;
}

// T(z) on the stage data.
FieldPair eval_T(const Stage& st) {
    const int n = st.n;
    const SplitState& sp = *st.split;
    const double scale = st.rho / n;

    Vec out1(n, 0.0), out2(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const cplx c = sp.cutoffs.c.samples()[m];
        const cplx trans = kI * c * st.gamma * st.invw[m];
        out1[m] = trans * st.dz1[m];
        out2[m] = trans * st.dz2[m];
    }

    for (int m : st.rows) {
        const double lam = sp.cutoffs.lambda.samples()[m].real();
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == m) continue;
            const cplx den = st.geom.cosh_d2(m, j) - st.geom.cos_d1(m, j);
            const double floor = 1e-12 * (1.0 + std::abs(st.geom.cosh_d2(m, j)));
            if (std::abs(den) < floor)
                throw ArcChordViolation("chord denominator below floor", m, j);
            const cplx K = st.geom.sin_d1(m, j) / den;
            const cplx wj = st.wgt[j];
            acc1 += K * ((st.q1[m] - st.q1[j]) + (sp.dft1.samples()[m] - sp.dft1.samples()[j])) * wj;
            acc2 += K * ((st.q2[m] - st.q2[j]) + (sp.dft2.samples()[m] - sp.dft2.samples()[j])) * wj;
        }
        const cplx diag1 = 2.0 * st.geom.L[m] * (st.dq1[m] + sp.d2ft1.samples()[m]) * st.wgt[m];
        const cplx diag2 = 2.0 * st.geom.L[m] * (st.dq2[m] + sp.d2ft2.samples()[m]) * st.wgt[m];
        out1[m] += lam * scale * (acc1 + diag1);
        out2[m] += lam * scale * (acc2 + diag2);
    }
    return FieldPair{PeriodicField::from_samples(std::move(out1)),
                     PeriodicField::from_samples(std::move(out2))};
}

// D_zT(z)[w] on the stage data.
FieldPair eval_DzT(const Stage& st, const PeriodicField& w1f, const PeriodicField& w2f) {
    const int n = st.n;
    const SplitState& sp = *st.split;
    const double scale = st.rho / n;

    const Vec dw1 = samples_of_derivative(w1f);
    const Vec dw2 = samples_of_derivative(w2f);
    Vec qw1(n), qw2(n);
    for (int m = 0; m < n; ++m) {
        qw1[m] = dw1[m] * st.invw[m];
        qw2[m] = dw2[m] * st.invw[m];
    }
    const Vec dqw1 = samples_of_derivative(PeriodicField::from_samples(qw1));
    const Vec dqw2 = samples_of_derivative(PeriodicField::from_samples(qw2));

    Vec out1(n, 0.0), out2(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const cplx c = sp.cutoffs.c.samples()[m];
        const cplx trans = kI * c * st.gamma * st.invw[m];
        out1[m] = trans * dw1[m];
        out2[m] = trans * dw2[m];
    }

    const Vec& w1 = w1f.samples();
    const Vec& w2 = w2f.samples();
    for (int m : st.rows) {
        const double lam = sp.cutoffs.lambda.samples()[m].real();
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == m) continue;
            const cplx coshv = st.geom.cosh_d2(m, j);
            const cplx cosv = st.geom.cos_d1(m, j);
            const cplx sinv = st.geom.sin_d1(m, j);
            const cplx den = coshv - cosv;
            const double floor = 1e-12 * (1.0 + std::abs(coshv));
            if (std::abs(den) < floor)
                throw ArcChordViolation("chord denominator below floor", m, j);
            const cplx K = sinv / den;
            const cplx den2 = den * den;
            const cplx Kd1 = (cosv * coshv - 1.0) / den2;
            const cplx Kd2 = -sinv * st.geom.sinh_d2(m, j) / den2;
            const cplx gradK_dot_w = Kd1 * (w1[m] - w1[j]) + Kd2 * (w2[m] - w2[j]);
            const cplx psi1 = (st.q1[m] - st.q1[j]) + (sp.dft1.samples()[m] - sp.dft1.samples()[j]);
            const cplx psi2 = (st.q2[m] - st.q2[j]) + (sp.dft2.samples()[m] - sp.dft2.samples()[j]);
            const cplx wj = st.wgt[j];
            acc1 += (K * (qw1[m] - qw1[j]) + gradK_dot_w * psi1) * wj;
            acc2 += (K * (qw2[m] - qw2[j]) + gradK_dot_w * psi2) * wj;
        }
        // Diagonal: 2L d(qw) + 2 dL . dw times dpsi, all at alpha_m.
        const cplx a = st.geom.a[m], b = st.geom.b[m];
        const cplx s = a * a + b * b;
        const cplx dLa = (b * b - a * a) / (s * s);
        const cplx dLb = -2.0 * a * b / (s * s);
        const cplx dL_dir = dLa * dw1[m] + dLb * dw2[m];
        const cplx dpsi1 = st.dq1[m] + sp.d2ft1.samples()[m];
        const cplx dpsi2 = st.dq2[m] + sp.d2ft2.samples()[m];
        const cplx diag1 = (2.0 * st.geom.L[m] * dqw1[m] + 2.0 * dL_dir * dpsi1) * st.wgt[m];
        const cplx diag2 = (2.0 * st.geom.L[m] * dqw2[m] + 2.0 * dL_dir * dpsi2) * st.wgt[m];
        out1[m] += lam * scale * (acc1 + diag1);
        out2[m] += lam * scale * (acc2 + diag2);
    }
    return FieldPair{PeriodicField::from_samples(std::move(out1)),
                     PeriodicField::from_samples(std::move(out2))};
}

// dT/dgamma at fixed z on the stage data.
FieldPair eval_dgammaT(const Stage& st) {
    const int n = st.n;
    const SplitState& sp = *st.split;
    const double scale = st.rho / n;

    // d/dgamma of q = dz/(1+ic'gamma t) at fixed z.
    Vec qg1(n), qg2(n), dgw(n);
    for (int m = 0; m < n; ++m) {
        const cplx cp = sp.cutoffs.c_prime.samples()[m];
        const cplx d = -kI * cp * st.t * st.invw[m] * st.invw[m];
        qg1[m] = st.dz1[m] * d;
        qg2[m] = st.dz2[m] * d;
        dgw[m] = kI * cp * st.t;  // d/dgamma of the weight
    }
    const Vec dqg1 = samples_of_derivative(PeriodicField::from_samples(qg1));
    const Vec dqg2 = samples_of_derivative(PeriodicField::from_samples(qg2));

    Vec out1(n, 0.0), out2(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const cplx c = sp.cutoffs.c.samples()[m];
        const cplx trans = kI * c * st.invw[m] * st.invw[m];
        out1[m] = trans * st.dz1[m];
        out2[m] = trans * st.dz2[m];
    }

    for (int m : st.rows) {
        const double lam = sp.cutoffs.lambda.samples()[m].real();
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == m) continue;
            const cplx den = st.geom.cosh_d2(m, j) - st.geom.cos_d1(m, j);
            const double floor = 1e-12 * (1.0 + std::abs(st.geom.cosh_d2(m, j)));
            if (std::abs(den) < floor)
                throw ArcChordViolation("chord denominator below floor", m, j);
            const cplx K = st.geom.sin_d1(m, j) / den;
            const cplx zdens1 = st.q1[m] - st.q1[j];
            const cplx zdens2 = st.q2[m] - st.q2[j];
            const cplx fdens1 = sp.dft1.samples()[m] - sp.dft1.samples()[j];
            const cplx fdens2 = sp.dft2.samples()[m] - sp.dft2.samples()[j];
            acc1 += K * ((qg1[m] - qg1[j]) * st.wgt[j] + (zdens1 + fdens1) * dgw[j]);
            acc2 += K * ((qg2[m] - qg2[j]) * st.wgt[j] + (zdens2 + fdens2) * dgw[j]);
        }
        const cplx L2 = 2.0 * st.geom.L[m];
        const cplx diag1 =
            L2 * (dqg1[m] * st.wgt[m] + (st.dq1[m] + sp.d2ft1.samples()[m]) * dgw[m]);
        const cplx diag2 =
            L2 * (dqg2[m] * st.wgt[m] + (st.dq2[m] + sp.d2ft2.samples()[m]) * dgw[m]);
        out1[m] += lam * scale * (acc1 + diag1);
        out2[m] += lam * scale * (acc2 + diag2);
    }
    return FieldPair{PeriodicField::from_samples(std::move(out1)),
                     PeriodicField::from_samples(std::move(out2))};
}

}  // namespace

PeriodicField z1_full(const FamilySlice& slice, const SplitState& split) {
    return slice.z1_red + split.cutoffs.lam_alpha;
}

double FamilyState::gamma_spacing() const {
    if (slices.size() < 2) return 0.0;
    return (slices.back().gamma - slices.front().gamma) /
           static_cast<double>(slices.size() - 1);
}

FamilyState init_family(std::shared_ptr<const SplitState> split, int gamma_count,
                        double rho, int direction) {
    if (gamma_count < 3 || gamma_count % 2 == 0)
        throw ConfigError("gamma_count must be odd and >= 3");
    const int n = split->f_c.size();
    std::vector<cplx> z1red(n);
    for (int j = 0; j < n; ++j)
        z1red[j] = split->f_c.c1.samples()[j] - split->cutoffs.lam_alpha.samples()[j];
    const PeriodicField z1 = PeriodicField::from_samples(std::move(z1red));

    FamilyState state;
    state.t = 0.0;
    state.direction = direction;
    state.rho = rho;
    state.split = std::move(split);
    state.slices.reserve(gamma_count);
    for (int i = 0; i < gamma_count; ++i) {
        const double gamma = -1.0 + 2.0 * i / (gamma_count - 1);
        state.slices.push_back(FamilySlice{z1, state.split->f_c.c2, gamma, 0.0});
    }
    return state;
}

FieldPair muskat_rhs(const Contour& f, double rho_factor) {
    const int n = f.size();
    const SpectralGrid grid(n);
    const PeriodicField dg1 = spectral_derivative(f.g1, 1);
    const PeriodicField dg2 = spectral_derivative(f.g2, 1);
    const PeriodicField d2g1 = spectral_derivative(f.g1, 2);
    const PeriodicField d2g2 = spectral_derivative(f.g2, 2);

    // Factorized exponentials of F1 = alpha + g1 and F2 = g2.
    Vec u(n), iu(n), we(n), iwe(n), a(n), b(n), L(n);
    for (int m = 0; m < n; ++m) {
        u[m] = std::exp(kI * (grid.node(m) + f.g1.samples()[m]));
        iu[m] = 1.0 / u[m];
        we[m] = std::exp(f.g2.samples()[m]);
        iwe[m] = 1.0 / we[m];
        a[m] = 1.0 + dg1.samples()[m];
        b[m] = dg2.samples()[m];
        L[m] = kernel_diagonal_limit(a[m], b[m]);
    }

    const double scale = rho_factor / n;
    Vec out1(n), out2(n);
    for (int m = 0; m < n; ++m) {
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == m) continue;
            const cplx coshv = (we[m] * iwe[j] + we[j] * iwe[m]) * 0.5;
            const cplx cosv = (u[m] * iu[j] + u[j] * iu[m]) * 0.5;
            const cplx sinv = (u[m] * iu[j] - u[j] * iu[m]) * cplx(0.0, -0.5);
            const cplx den = coshv - cosv;
            const double floor = 1e-12 * (1.0 + std::abs(coshv));
            if (std::abs(den) < floor)
                throw ArcChordViolation("chord denominator below floor", m, j);
            const cplx K = sinv / den;
            acc1 += K * (dg1.samples()[m] - dg1.samples()[j]);
            acc2 += K * (dg2.samples()[m] - dg2.samples()[j]);
        }
        acc1 += 2.0 * L[m] * d2g1.samples()[m];
        acc2 += 2.0 * L[m] * d2g2.samples()[m];
        out1[m] = scale * acc1;
        out2[m] = scale * acc2;
    }
    return FieldPair{PeriodicField::from_samples(std::move(out1)),
                     PeriodicField::from_samples(std::move(out2))};
}

FieldPair localized_rhs(const SplitState& split, double rho_factor) {
    // The localized equation is the gamma = 0 member of the complex family.
    const int n = split.f_c.size();
    std::vector<cplx> z1red(n);
    for (int j = 0; j < n; ++j)
        z1red[j] = split.f_c.c1.samples()[j] - split.cutoffs.lam_alpha.samples()[j];
    FamilySlice slice{PeriodicField::from_samples(std::move(z1red)), split.f_c.c2, 0.0, 0.0};
    return complex_T(slice, split, rho_factor);
}

FieldPair complex_T(const FamilySlice& slice, const SplitState& split, double rho_factor) {
    const Stage st =
        build_stage(z1_full(slice, split), slice.z2, slice.gamma, slice.t, split, rho_factor);
    return eval_T(st);
}

FieldPair gateaux_DzT(const FamilySlice& slice, const FieldPair& w,
                      const SplitState& split, double rho_factor) {
    const Stage st =
        build_stage(z1_full(slice, split), slice.z2, slice.gamma, slice.t, split, rho_factor);
    return eval_DzT(st, w.c1, w.c2);
}

FieldPair partial_gamma_T(const FamilySlice& slice, const SplitState& split,
                          double rho_factor) {
    const Stage st =
        build_stage(z1_full(slice, split), slice.z2, slice.gamma, slice.t, split, rho_factor);
    return eval_dgammaT(st);
}

FieldPair w_rhs(const FamilyState& state, int slice_index) {
    if (!state.has_w()) throw ConfigError("w_rhs requires evolved w slices");
    const FamilySlice& slice = state.slices[slice_index];
    const Stage st = build_stage(z1_full(slice, *state.split), slice.z2, slice.gamma, slice.t,
                                 *state.split, state.rho);
    const FieldPair& w = state.w_slices[slice_index];
    const FieldPair dz = eval_DzT(st, w.c1, w.c2);
    const FieldPair dg = eval_dgammaT(st);
    return FieldPair{dz.c1 + dg.c1, dz.c2 + dg.c2};
}

FieldPair mollified_T(const FamilySlice& slice, const SplitState& split,
                      double rho_factor, long n_moll) {
    if (n_moll <= 0) throw ConfigError("mollified_T requires n >= 1");
    const int n = slice.z1_red.size();
    const SpectralGrid grid(n);
    const int keep = static_cast<int>(std::min<long>(n_moll, n / 2));

    const PeriodicField z1p = project_modes(z1_full(slice, split), keep);
    const PeriodicField z2p = project_modes(slice.z2, keep);

    // Projected densities; the kernel arguments keep the unprojected f~.
    const PeriodicField dft1p = project_modes(split.dft1, keep);
    const PeriodicField dft2p = project_modes(split.dft2, keep);
    const PeriodicField d2ft1p = project_modes(split.d2ft1, keep);
    const PeriodicField d2ft2p = project_modes(split.d2ft2, keep);

    Stage st = build_stage(z1p, z2p, slice.gamma, slice.t, split, rho_factor);

    const double scale = rho_factor / n;
    // sin^2((alpha_m - alpha_j)/2) depends only on m-j.
    std::vector<double> reg(n, 0.0);
    for (int d = 1; d < n; ++d) {
        const double s = std::sin(0.5 * (2.0 * kPi * d / n));
        reg[d] = s * s / static_cast<double>(n_moll);
    }

    Vec out1(n, 0.0), out2(n, 0.0);
    for (int m = 0; m < n; ++m) {
        const cplx c = split.cutoffs.c.samples()[m];
        const cplx trans = kI * c * st.gamma * st.invw[m];
        out1[m] = trans * st.dz1[m];
        out2[m] = trans * st.dz2[m];
    }
    for (int m : st.rows) {
        const double lam = split.cutoffs.lambda.samples()[m].real();
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == m) continue;
            const cplx den = st.geom.cosh_d2(m, j) - st.geom.cos_d1(m, j);
            const cplx Kn = st.geom.sin_d1(m, j) * std::conj(den) /
                            (std::norm(den) + reg[std::abs(m - j)]);
            const cplx wj = st.wgt[j];
            acc1 += Kn * ((st.q1[m] - st.q1[j]) + (dft1p.samples()[m] - dft1p.samples()[j])) * wj;
            acc2 += Kn * ((st.q2[m] - st.q2[j]) + (dft2p.samples()[m] - dft2p.samples()[j])) * wj;
        }
        const cplx diag1 = 2.0 * st.geom.L[m] * (st.dq1[m] + d2ft1p.samples()[m]) * st.wgt[m];
        const cplx diag2 = 2.0 * st.geom.L[m] * (st.dq2[m] + d2ft2p.samples()[m]) * st.wgt[m];
        out1[m] += lam * scale * (acc1 + diag1);
        out2[m] += lam * scale * (acc2 + diag2);
    }
    return FieldPair{project_modes(PeriodicField::from_samples(std::move(out1)), keep),
                     project_modes(PeriodicField::from_samples(std::move(out2)), keep)};
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Completed: return "completed";
        case StopReason::MarginNonpositive: return "margin_nonpositive";
        case StopReason::ArcChordViolationStop: return "arc_chord_violation";
        case StopReason::NanDetected: return "nan_detected";
    }
    return "unknown";
}

double window_min_sigma(const Contour& f, double rho, double delta) {
    const int n = f.size();
    const SpectralGrid grid(n);
    const PeriodicField sigma = rt_coefficient(f, rho);
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (std::abs(grid.node(j)) > 2.0 * delta) continue;
        const double v = sigma.samples()[j].real();
        if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
        mn = std::min(mn, v);
    }
    return mn;
}

double oriented_margin(const FamilyState& state) {
    const SpectralGrid grid(state.slices[0].z1_red.size());
    const double delta = state.split->cutoffs.delta;
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& slice : state.slices) {
        const FieldPair zf{z1_full(slice, *state.split), slice.z2};
        const CoefficientPair cp = coefficients(zf, *state.split, slice.gamma, state.t);
        for (int m = 0; m < grid.n_points; ++m) {
            if (std::abs(grid.node(m)) > 2.0 * delta) continue;
            const double v = -state.direction * state.rho * cp.l1.samples()[m].real() -
                             std::abs(cp.l2.samples()[m].imag());
            mn = std::min(mn, v);
        }
    }
    return mn;
}

namespace {

// Flat per-slice RK4 state: z pair plus optional w pair.
struct SliceY {
    Vec z1, z2, w1, w2;
    bool has_w = false;
};

SliceY axpy(const SliceY& y, const SliceY& k, double s) {
    SliceY out = y;
    for (std::size_t i = 0; i < y.z1.size(); ++i) {
        out.z1[i] += s * k.z1[i];
        out.z2[i] += s * k.z2[i];
        if (y.has_w) {
            out.w1[i] += s * k.w1[i];
            out.w2[i] += s * k.w2[i];
        }
    }
    return out;
}

bool finite(const Vec& v) {
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

}  // namespace

EvolveResult evolve_family(FamilyState& state, const EvolveOptions& options,
                           const std::function<void(const FamilyState&, int)>& on_record) {
    const int n = state.slices[0].z1_red.size();
    const int M = static_cast<int>(state.slices.size());
    const SplitState& split = *state.split;

    double dt = options.dt;
    if (dt <= 0.0) {
        double cfl = options.cfl_const;
        if (cfl <= 0.0) {
            // Reassembled gamma = 0 contour: g1 = z1_red + lam*alpha + (f~1 - alpha).
            const FamilySlice& s0 = state.slices[state.gamma_index_of_zero()];
            const PeriodicField g1 = s0.z1_red + split.cutoffs.lam_alpha + split.f_tilde_st.c1;
            const PeriodicField g2 = s0.z2 + split.f_tilde_st.c2;
            const PeriodicField sigma = rt_coefficient(Contour{g1, g2, true}, state.rho);
            double smax = 0.0;
            for (const auto& v : sigma.samples())
                if (std::isfinite(v.real())) smax = std::max(smax, std::abs(v.real()));
            const double cmax = split.cutoffs.delta_c;
            cfl = 0.5 / (2.0 * kPi * std::max(smax, cmax));
        }
        dt = cfl / n;
    }
    const int total_steps = std::max(1, static_cast<int>(std::ceil(options.t_final / dt - 1e-12)));
    const double dt_signed = state.direction * dt;

    if (options.evolve_w && state.w_slices.empty()) {
        state.w_slices.assign(M, FieldPair{PeriodicField::zero(n), PeriodicField::zero(n)});
    }

    // Per-slice RHS in flat form.
    auto slice_rhs = [&](int i, double tau, const SliceY& y) {
        SliceY k;
        k.has_w = y.has_w;
        const PeriodicField z1r = PeriodicField::from_samples(y.z1);
        const PeriodicField z2 = PeriodicField::from_samples(y.z2);
        const PeriodicField z1f = z1r + split.cutoffs.lam_alpha;
        const Stage st = build_stage(z1f, z2, state.slices[i].gamma, tau, split, state.rho);
        FieldPair T = options.mollify_n
                          ? mollified_T(FamilySlice{z1r, z2, state.slices[i].gamma, tau}, split,
                                        state.rho, *options.mollify_n)
                          : eval_T(st);
        k.z1 = T.c1.samples();
        k.z2 = T.c2.samples();
        if (y.has_w) {
            const PeriodicField w1 = PeriodicField::from_samples(y.w1);
            const PeriodicField w2 = PeriodicField::from_samples(y.w2);
            const FieldPair dzw = eval_DzT(st, w1, w2);
            const FieldPair dgt = eval_dgammaT(st);
            k.w1 = (dzw.c1 + dgt.c1).samples();
            k.w2 = (dzw.c2 + dgt.c2).samples();
        }
        return k;
    };

    auto step_slice = [&](int i, double t0) {
        SliceY y;
        y.has_w = state.has_w();
        y.z1 = state.slices[i].z1_red.samples();
        y.z2 = state.slices[i].z2.samples();
        if (y.has_w) {
            y.w1 = state.w_slices[i].c1.samples();
            y.w2 = state.w_slices[i].c2.samples();
        }
        const SliceY k1 = slice_rhs(i, t0, y);
        const SliceY k2 = slice_rhs(i, t0 + 0.5 * dt_signed, axpy(y, k1, 0.5 * dt_signed));
        const SliceY k3 = slice_rhs(i, t0 + 0.5 * dt_signed, axpy(y, k2, 0.5 * dt_signed));
        const SliceY k4 = slice_rhs(i, t0 + dt_signed, axpy(y, k3, dt_signed));
        SliceY out = y;
        const double s = dt_signed / 6.0;
        for (std::size_t p = 0; p < y.z1.size(); ++p) {
            out.z1[p] += s * (k1.z1[p] + 2.0 * k2.z1[p] + 2.0 * k3.z1[p] + k4.z1[p]);
            out.z2[p] += s * (k1.z2[p] + 2.0 * k2.z2[p] + 2.0 * k3.z2[p] + k4.z2[p]);
            if (y.has_w) {
                out.w1[p] += s * (k1.w1[p] + 2.0 * k2.w1[p] + 2.0 * k3.w1[p] + k4.w1[p]);
                out.w2[p] += s * (k1.w2[p] + 2.0 * k2.w2[p] + 2.0 * k3.w2[p] + k4.w2[p]);
            }
        }
        if (!finite(out.z1) || !finite(out.z2) ||
            (y.has_w && (!finite(out.w1) || !finite(out.w2))))
            throw std::overflow_error("nan detected in slice state");
        state.slices[i].z1_red = PeriodicField::from_samples(std::move(out.z1));
        state.slices[i].z2 = PeriodicField::from_samples(std::move(out.z2));
        state.slices[i].t = t0 + dt_signed;
        if (y.has_w) {
            state.w_slices[i].c1 = PeriodicField::from_samples(std::move(out.w1));
            state.w_slices[i].c2 = PeriodicField::from_samples(std::move(out.w2));
        }
    };

    EvolveResult result;
    FamilyState snapshot = state;
    if (on_record) on_record(state, 0);

    for (int step = 1; step <= total_steps; ++step) {
        const double t0 = state.t;
        try {
            run_parallel(M, options.threads, [&](int i) { step_slice(i, t0); });
        } catch (const ArcChordViolation&) {
            state = snapshot;
            result.reason = StopReason::ArcChordViolationStop;
            result.t_reached = state.t;
            return result;
        } catch (const std::overflow_error&) {
            state = snapshot;
            result.reason = StopReason::NanDetected;
            result.t_reached = state.t;
            return result;
        }
        state.t = t0 + dt_signed;
        result.steps = step;

        const bool is_record = (step % options.record_every == 0) || step == total_steps;
        if (is_record) {
            if (options.check_margin) {
                double margin;
                try {
                    margin = oriented_margin(state);
                } catch (const ArcChordViolation&) {
                    margin = -std::numeric_limits<double>::infinity();
                }
                if (!(margin > 0.0)) {
                    state = snapshot;
                    result.reason = StopReason::MarginNonpositive;
                    result.t_reached = state.t;
                    return result;
                }
            }
            if (on_record) on_record(state, step);
            snapshot = state;
        }
    }
    result.reason = StopReason::Completed;
    result.t_reached = state.t;
    return result;
}

}  // namespace muskat
