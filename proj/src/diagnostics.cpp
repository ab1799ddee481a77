// Certification quantities: the A0 residual, extension reconstruction,
// commutation-identity checks, turnover diagnostics and record assembly.

#include "muskat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "muskat/errors.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double wrap_to_pi(double s) {
    while (s > kPi) s -= 2.0 * kPi;
    while (s <= -kPi) s += 2.0 * kPi;
    return s;
}

// A0 applied to one component field of the family, at gamma node i.
PeriodicField a0_component(const FamilyState& state, int i,
                           const PeriodicField& z_full_i,
                           const PeriodicField& z_red_prev,
                           const PeriodicField& z_red_next,
                           const PeriodicField* w_component) {
    const SplitState& sp = *state.split;
    const int n = z_full_i.size();
    const double gamma = state.slices[i].gamma;
    const double t = state.t;

    const PeriodicField dz = spectral_derivative(z_full_i, 1);
    std::vector<cplx> out(n);
    if (w_component) {
        for (int m = 0; m < n; ++m) {
            const cplx c = sp.cutoffs.c.samples()[m];
            const cplx cp = sp.cutoffs.c_prime.samples()[m];
            const cplx coef = kI * c * t / (1.0 + kI * cp * gamma * t);
            out[m] = coef * dz.samples()[m] - w_component->samples()[m];
        }
    } else {
        const double dg = state.gamma_spacing();
        for (int m = 0; m < n; ++m) {
            const cplx c = sp.cutoffs.c.samples()[m];
            const cplx cp = sp.cutoffs.c_prime.samples()[m];
            const cplx coef = kI * c * t / (1.0 + kI * cp * gamma * t);
            const cplx dgam =
                (z_red_next.samples()[m] - z_red_prev.samples()[m]) / (2.0 * dg);
            out[m] = coef * dz.samples()[m] - dgam;
        }
    }
    return PeriodicField::from_samples(std::move(out));
}
}  // namespace

FieldPair cr_operator_A0(const FamilyState& state, int gamma_index) {
    const int M = static_cast<int>(state.slices.size());
    const bool interior = gamma_index > 0 && gamma_index < M - 1;
    if (!state.has_w() && !interior)
        throw UnsupportedNode("boundary gamma node requires evolved w slices");

    const FamilySlice& s = state.slices[gamma_index];
    const PeriodicField z1f = z1_full(s, *state.split);
    const PeriodicField& z2 = s.z2;

    const PeriodicField* w1 = state.has_w() ? &state.w_slices[gamma_index].c1 : nullptr;
    const PeriodicField* w2 = state.has_w() ? &state.w_slices[gamma_index].c2 : nullptr;
    const int prev = interior ? gamma_index - 1 : gamma_index;
    const int next = interior ? gamma_index + 1 : gamma_index;

    return FieldPair{
        a0_component(state, gamma_index, z1f, state.slices[prev].z1_red,
                     state.slices[next].z1_red, w1),
        a0_component(state, gamma_index, z2, state.slices[prev].z2,
                     state.slices[next].z2, w2)};
}

double cr_residual(const FamilyState& state) {
    const int M = static_cast<int>(state.slices.size());
    double worst = 0.0;
    for (int i = 1; i < M - 1; ++i) {
        const FieldPair a0 = cr_operator_A0(state, i);
        const double r = std::hypot(l2_norm(a0.c1), l2_norm(a0.c2));
        worst = std::max(worst, r);
    }
    return worst;
}

ExtensionSlice reconstruct_extension(const FamilyState& state, double y) {
    const SplitState& sp = *state.split;
    const int n = state.slices[0].z1_red.size();
    const int M = static_cast<int>(state.slices.size());
    const int i0 = state.gamma_index_of_zero();
    const double t = state.t;

    ExtensionSlice out;
    out.f1.resize(n);
    out.f2.resize(n);
    out.valid.assign(n, true);

    if (y == 0.0) {
        const PeriodicField z1f = z1_full(state.slices[i0], sp);
        out.f1 = z1f.samples();
        out.f2 = state.slices[i0].z2.samples();
        return out;
    }
    if (t == 0.0) throw OutsideDomain("extension requires t > 0 for y != 0");

    // Cubic Lagrange stencil on the uniform gamma grid.
    const double dg = state.gamma_spacing();
    std::vector<const FamilySlice*> sl(M);
    for (int i = 0; i < M; ++i) sl[i] = &state.slices[i];

    for (int m = 0; m < n; ++m) {
        const double c = sp.cutoffs.c.samples()[m].real();
        if (c * std::abs(t) < std::abs(y) * (1.0 - 1e-12)) {
            out.valid[m] = false;
            out.f1[m] = out.f2[m] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double gstar = std::clamp(y / (c * t), -1.0, 1.0);
        int base = static_cast<int>(std::floor((gstar + 1.0) / dg)) - 1;
        base = std::clamp(base, 0, M - 4);
        cplx acc1 = 0.0, acc2 = 0.0;
        for (int p = 0; p < 4; ++p) {
            double wgt = 1.0;
            for (int q = 0; q < 4; ++q) {
                if (q == p) continue;
                wgt *= (gstar - sl[base + q]->gamma) /
                       (sl[base + p]->gamma - sl[base + q]->gamma);
            }
            acc1 += wgt * (sl[base + p]->z1_red.samples()[m] +
                           sp.cutoffs.lam_alpha.samples()[m]);
            acc2 += wgt * sl[base + p]->z2.samples()[m];
        }
        out.f1[m] = acc1;
        out.f2[m] = acc2;
    }
    return out;
}

double check_lemma_switch(const TestFamily& h, const CutoffPair& cutoffs,
                          int gamma_index, double t) {
    const int M = static_cast<int>(h.slices.size());
    if (gamma_index <= 0 || gamma_index >= M - 1)
        throw UnsupportedNode("lemma check needs an interior gamma node");
    const int n = h.slices[0].size();
    const double dg = h.spacing();

    auto weight = [&](int m, double gamma) {
        return 1.0 + kI * cutoffs.c_prime.samples()[m] * gamma * t;
    };
    auto a0_of = [&](const std::vector<PeriodicField>& fam, int i) {
        const PeriodicField da = spectral_derivative(fam[i], 1);
        std::vector<cplx> out(n);
        for (int m = 0; m < n; ++m) {
            const cplx coef = kI * cutoffs.c.samples()[m] * t / weight(m, h.gammas[i]);
            out[m] = coef * da.samples()[m] -
                     (fam[i + 1].samples()[m] - fam[i - 1].samples()[m]) / (2.0 * dg);
        }
        return PeriodicField::from_samples(std::move(out));
    };

    // G = d_alpha h / (1 + i c' gamma t), per gamma node.
    std::vector<PeriodicField> G;
    G.reserve(M);
    for (int i = 0; i < M; ++i) {
        const PeriodicField dh = spectral_derivative(h.slices[i], 1);
        std::vector<cplx> g(n);
        for (int m = 0; m < n; ++m) g[m] = dh.samples()[m] / weight(m, h.gammas[i]);
        G.push_back(PeriodicField::from_samples(std::move(g)));
    }

    const PeriodicField lhs = a0_of(G, gamma_index);

    const PeriodicField a0h = a0_of(h.slices, gamma_index);
    const PeriodicField da0h = spectral_derivative(a0h, 1);
    double worst = 0.0;
    for (int m = 0; m < n; ++m) {
        const cplx rhs = da0h.samples()[m] / weight(m, h.gammas[gamma_index]);
        worst = std::max(worst, std::abs(lhs.samples()[m] - rhs));
    }
    return worst;
}

double check_lemma_forM1(const ScalarKernel& kernel, const TestFamily& X,
                         const TestFamily& h, const CutoffPair& cutoffs,
                         int gamma_index, double t) {
    const int M = static_cast<int>(h.slices.size());
    if (gamma_index <= 0 || gamma_index >= M - 1)
        throw UnsupportedNode("lemma check needs an interior gamma node");
    const int n = h.slices[0].size();
    const double dg = h.spacing();
    const double quad_w = 2.0 * kPi / n;

    auto weight = [&](int m, double gamma) {
        return 1.0 + kI * cutoffs.c_prime.samples()[m] * gamma * t;
    };

    // I(alpha, gamma) = int K~(h(a)-h(b)) X(b) (1+ic'(b)gamma t) db.
    auto integral_at = [&](int i) {
        std::vector<cplx> out(n);
        for (int m = 0; m < n; ++m) {
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) {
                acc += kernel.value(h.slices[i].samples()[m] - h.slices[i].samples()[j]) *
                       X.slices[i].samples()[j] * weight(j, h.gammas[i]);
            }
            out[m] = quad_w * acc;
        }
        return PeriodicField::from_samples(std::move(out));
    };

    auto a0_of = [&](const std::vector<PeriodicField>& fam, int i) {
        const PeriodicField da = spectral_derivative(fam[i], 1);
        std::vector<cplx> out(n);
        for (int m = 0; m < n; ++m) {
            const cplx coef = kI * cutoffs.c.samples()[m] * t / weight(m, h.gammas[i]);
            out[m] = coef * da.samples()[m] -
                     (fam[i + 1].samples()[m] - fam[i - 1].samples()[m]) / (2.0 * dg);
        }
        return PeriodicField::from_samples(std::move(out));
    };

    std::vector<PeriodicField> I;
    I.reserve(M);
    for (int i = 0; i < M; ++i) I.push_back(integral_at(i));
    const PeriodicField lhs = a0_of(I, gamma_index);

    const PeriodicField a0h = a0_of(h.slices, gamma_index);
    const PeriodicField a0X = a0_of(X.slices, gamma_index);

    const int i = gamma_index;
    double worst = 0.0;
    for (int m = 0; m < n; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const cplx du = h.slices[i].samples()[m] - h.slices[i].samples()[j];
            const cplx wj = weight(j, h.gammas[i]);
            acc += kernel.deriv(du) * (a0h.samples()[m] - a0h.samples()[j]) *
                   X.slices[i].samples()[j] * wj;
            acc += kernel.value(du) * a0X.samples()[j] * wj;
        }
        worst = std::max(worst, std::abs(lhs.samples()[m] - quad_w * acc));
    }
    return worst;
}

Contour reassembled_contour(const FamilyState& state) {
    const SplitState& sp = *state.split;
    const FamilySlice& s0 = state.slices[state.gamma_index_of_zero()];
    return Contour{s0.z1_red + sp.cutoffs.lam_alpha + sp.f_tilde_st.c1,
                   s0.z2 + sp.f_tilde_st.c2, true};
}

TurnoverReport turnover_condition(const Contour& f, const FieldPair& rhs, double rho_factor) {
    const int n = f.size();
    const SpectralGrid grid(n);

    // df1 = 1 + dg1; real part drives the root search.
    const PeriodicField dg1 = spectral_derivative(f.g1, 1);
    std::vector<cplx> df1s(n);
    for (int m = 0; m < n; ++m) df1s[m] = 1.0 + dg1.samples()[m];
    const PeriodicField df1 = PeriodicField::from_samples(std::move(df1s));
    const PeriodicField d2f1 = spectral_derivative(f.g1, 2);

    TurnoverReport report;
    std::vector<double> roots;
    double vmax = 0.0;
    for (int j = 0; j < n; ++j) vmax = std::max(vmax, std::abs(df1.samples()[j].real()));
    for (int j = 0; j < n; ++j) {
        const int jn = (j + 1) % n;
        const double v0 = df1.samples()[j].real();
        const double v1 = df1.samples()[jn].real();
        // Grazing node: catches double zeros that produce no sign change.
        if (std::abs(v0) <= 1e-8 * (1.0 + vmax)) roots.push_back(grid.node(j));
        if (v0 * v1 >= 0.0) continue;
        // Newton polish on the trigonometric interpolant, seeded mid-bracket.
        double x = grid.node(j) + kPi / n;
        for (int it = 0; it < 20; ++it) {
            const double p = interpolate_at(df1, x).real();
            const double dp = interpolate_at(d2f1, x).real();
            if (dp == 0.0) break;
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-14) break;
        }
        if (std::abs(interpolate_at(df1, x).real()) <= 1e-8) roots.push_back(wrap_to_pi(x));
    }
    if (roots.empty()) {
        report.status = TurnoverReport::Status::None;
        return report;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-6; }),
                roots.end());
    report.all_roots = roots;

    // The root nearest the window center; ties resolve to the positive one.
    double best = roots[0];
    for (double r : roots) {
        if (std::abs(r) < std::abs(best) - 1e-15 ||
            (std::abs(std::abs(r) - std::abs(best)) <= 1e-15 && r > best))
            best = r;
    }
    report.z1_location = best;
    report.second_deriv = interpolate_at(d2f1, best).real();
    if (std::abs(report.second_deriv) < 1e-8)
        throw DegenerateTurnover("d2f1 vanishes at the turnover point");

    // (1/2pi) p.v. int K dbeta as a field, interpolated at Z1.
    const SliceGeometry geom = build_contour_geometry(f);
    const KernelMatrix K = kernel_matrix(geom);
    std::vector<cplx> cotc(n), rem(n), ones(n, 1.0);
    for (int m = 0; m < n; ++m) {
        cotc[m] = geom.L[m];
        rem[m] = 2.0 * geom.M[m];
    }
    const PeriodicField pv = pv_integral(K, PeriodicField::from_samples(cotc),
                                         PeriodicField::from_samples(rem),
                                         PeriodicField::from_samples(ones));
    report.pv_velocity = interpolate_at(pv, best).real() / (2.0 * kPi);

    const PeriodicField drhs1 = spectral_derivative(rhs.c1, 1);
    report.z1_speed = -interpolate_at(drhs1, best).real() / report.second_deriv;
    report.condition_sign = (report.z1_speed + rho_factor * report.pv_velocity) *
                            rho_factor * report.second_deriv;
    report.status = TurnoverReport::Status::Found;
    return report;
}

DiagnosticsRecord make_record(const FamilyState& state, bool with_turnover) {
    const SplitState& sp = *state.split;
    DiagnosticsRecord rec;
    rec.t = state.t;

    double h5 = 0.0, arc = 0.0;
    for (const auto& s : state.slices) {
        const PeriodicField z1f = z1_full(s, sp);
        h5 = std::max(h5, std::hypot(sobolev_norm(z1f, 5.0), sobolev_norm(s.z2, 5.0)));
        arc = std::max(arc, arc_chord_norm(FieldPair{z1f, s.z2}, sp));
    }
    rec.h5_norm = h5;
    rec.arc = arc;
    rec.garding_margin = oriented_margin(state);
    rec.rt = rec.garding_margin > 0.0 ? 1.0 / rec.garding_margin
                                      : std::numeric_limits<double>::infinity();
    rec.cr_residual = state.slices.size() >= 3 ? cr_residual(state) : 0.0;

    const FamilySlice& s0 = state.slices[state.gamma_index_of_zero()];
    double radius = std::numeric_limits<double>::infinity();
    for (const PeriodicField* g : {&s0.z1_red, &s0.z2}) {
        try {
            radius = std::min(radius, analyticity_radius(*g));
        } catch (const UndefinedRadius&) {
            // zero component carries no decay information
        }
    }
    rec.analyticity_radius_gamma0 = radius;

    if (with_turnover) {
        const Contour f = reassembled_contour(state);
        rec.turnover = turnover_report_of(f, state.rho);
    }
    return rec;
}

TurnoverReport turnover_report_of(const Contour& f, double rho) {
    FieldPair rhs{PeriodicField::zero(f.size()), PeriodicField::zero(f.size())};
    try {
        rhs = muskat_rhs(f, rho);
    } catch (const DegenerateParameterization&) {
        // vanishing tangent: the degenerate check below still applies, only
        // the velocity fields are unavailable
    }
    try {
        return turnover_condition(f, rhs, rho);
    } catch (const DegenerateTurnover&) {
        TurnoverReport rep;
        rep.status = TurnoverReport::Status::Degenerate;
        return rep;
    }
}

}  // namespace muskat
