#include "muskat/localization.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "muskat/errors.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;

double glue(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(-1.0 / (u * (1.0 - u)));
}

double glue_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double p = u * (1.0 - u);
    return glue(u) * (1.0 - 2.0 * u) / (p * p);
}

// 5-point Gauss-Legendre on [a,b].
double gauss5(double a, double b, double (*f)(double)) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

// Cumulative integral of the glue tabulated once on a fine uniform grid;
// in-between values come from a Hermite cubic with exact endpoint slopes.
struct GlueTable {
    static constexpr int kIntervals = 16384;
    std::vector<double> cum;
    double total;

    GlueTable() : cum(kIntervals + 1, 0.0) {
        const double h = 1.0 / kIntervals;
        for (int i = 0; i < kIntervals; ++i)
            cum[i + 1] = cum[i] + gauss5(i * h, (i + 1) * h, &glue);
        total = cum[kIntervals];
    }

    double eval(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return total;
        const double h = 1.0 / kIntervals;
        int i = static_cast<int>(x * kIntervals);
        if (i >= kIntervals) i = kIntervals - 1;
        const double t = (x - i * h) / h;
        const double y0 = cum[i], y1 = cum[i + 1];
        const double m0 = glue(i * h) * h, m1 = glue((i + 1) * h) * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }
};

const GlueTable& glue_table() {
    static const GlueTable table;
    return table;
}
}  // namespace

double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const auto& t = glue_table();
    return t.eval(x) / t.total;
}

double smooth_step_d1(double x) { return glue(x) / glue_table().total; }

double smooth_step_d2(double x) { return glue_d1(x) / glue_table().total; }

PeriodicField make_lambda(const SpectralGrid& grid, double delta) {
    if (2.0 * delta >= kPi)
        throw ConfigError("make_lambda requires 2*delta < pi");
    if (delta <= 0.0) throw ConfigError("delta must be positive");
    std::vector<cplx> s(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double a = std::abs(grid.node(j));
        double v;
        if (a <= delta) v = 1.0;
        else if (a >= 2.0 * delta) v = 0.0;
        else v = 1.0 - smooth_step((a - delta) / delta);
        s[j] = v;
    }
    return PeriodicField::from_samples(std::move(s));
}

namespace {

double lambda_prime_at(double alpha, double delta) {
    const double a = std::abs(alpha);
    if (a <= delta || a >= 2.0 * delta) return 0.0;
    const double sgn = alpha > 0.0 ? 1.0 : -1.0;
    return -sgn * smooth_step_d1((a - delta) / delta) / delta;
}

double c_at(double alpha, double delta, double delta_c) {
    const double a = std::abs(alpha);
    const double inner = delta / 32.0, outer = delta / 8.0, w = outer - inner;
    if (a <= inner) return delta_c;
    if (a >= outer) return 0.0;
    return delta_c * (1.0 - smooth_step((a - inner) / w));
}

double c_prime_at(double alpha, double delta, double delta_c) {
    const double a = std::abs(alpha);
    const double inner = delta / 32.0, outer = delta / 8.0, w = outer - inner;
    if (a <= inner || a >= outer) return 0.0;
    const double sgn = alpha > 0.0 ? 1.0 : -1.0;
    return -sgn * delta_c * smooth_step_d1((a - inner) / w) / w;
}

double c_dprime_at(double alpha, double delta, double delta_c) {
    const double a = std::abs(alpha);
    const double inner = delta / 32.0, outer = delta / 8.0, w = outer - inner;
    if (a <= inner || a >= outer) return 0.0;
    return -delta_c * smooth_step_d2((a - inner) / w) / (w * w);
}

}  // namespace

CutoffPair make_c(const SpectralGrid& grid, double delta, double delta_c) {
    if (delta_c > delta)
        throw ConfigError("make_c requires delta_c <= delta (the |c| <= delta bound fails)");
    if (delta_c <= 0.0) throw ConfigError("delta_c must be positive");

    CutoffPair out;
    out.delta = delta;
    out.delta_c = delta_c;
    out.lambda = make_lambda(grid, delta);

    const int n = grid.n_points;
    std::vector<cplx> lp(n), cs(n), cp(n), cpp(n), la(n), lap(n);
    for (int j = 0; j < n; ++j) {
        const double a = grid.node(j);
        lp[j] = lambda_prime_at(a, delta);
        cs[j] = c_at(a, delta, delta_c);
        cp[j] = c_prime_at(a, delta, delta_c);
        cpp[j] = c_dprime_at(a, delta, delta_c);
        const double lam = out.lambda.samples()[j].real();
        la[j] = lam * a;
        lap[j] = lam + lp[j].real() * a;
    }
    out.lambda_prime = PeriodicField::from_samples(std::move(lp));
    out.c = PeriodicField::from_samples(std::move(cs));
    out.c_prime = PeriodicField::from_samples(std::move(cp));
    out.c_dprime = PeriodicField::from_samples(std::move(cpp));
    out.lam_alpha = PeriodicField::from_samples(std::move(la));
    out.lam_alpha_prime = PeriodicField::from_samples(std::move(lap));

    // Measured sups of |c^(k)| on a fine auxiliary grid over the bump support;
    // orders 3 and 4 by differencing the closed-form c''.
    const int fine = 40000;
    const double half_supp = delta / 8.0;
    const double h = 2.0 * half_supp / fine;
    std::array<double, 5> sup{};
    double prev2 = 0.0, prev3 = 0.0;
    for (int j = 0; j <= fine; ++j) {
        const double a = -half_supp + j * h;
        const double v0 = c_at(a, delta, delta_c);
        const double v1 = c_prime_at(a, delta, delta_c);
        const double v2 = c_dprime_at(a, delta, delta_c);
        sup[0] = std::max(sup[0], std::abs(v0));
        sup[1] = std::max(sup[1], std::abs(v1));
        sup[2] = std::max(sup[2], std::abs(v2));
        if (j > 0) {
            const double v3 = (v2 - prev2) / h;
            sup[3] = std::max(sup[3], std::abs(v3));
            if (j > 1) sup[4] = std::max(sup[4], std::abs((v3 - prev3) / h));
            prev3 = v3;
        }
        prev2 = v2;
    }
    out.c_deriv_sup = sup;
    out.smallness_ok = (sup[0] <= delta && sup[1] <= delta);
    if (!out.smallness_ok)
        throw ConfigError("cutoff bump violates sup|c|, sup|c'| <= delta; shrink delta_c");

    const double layer = 3.0 * delta / 32.0;  // c-transition width
    const double nodes_in_layer = layer / (2.0 * kPi / grid.n_points);
    if (nodes_in_layer < 8.0) {
        std::fprintf(stderr,
                     "warning: c-bump transition carries %.1f grid nodes (<8); "
                     "increase n_points or delta for well-resolved cutoffs\n",
                     nodes_in_layer);
    }
    return out;
}

SplitState split_contour(const Contour& f, const CutoffPair& cutoffs) {
    const int n = f.size();
    if (n != cutoffs.lambda.size())
        throw ConfigError("contour and cutoff grids disagree");
    const SpectralGrid grid(n);

    std::vector<cplx> fc1(n), fc2(n), ft1(n), ft2(n);
    for (int j = 0; j < n; ++j) {
        const double a = grid.node(j);
        const double lam = cutoffs.lambda.samples()[j].real();
        const cplx f1 = a + f.g1.samples()[j];
        const cplx f2 = f.g2.samples()[j];
        fc1[j] = lam * f1;
        fc2[j] = lam * f2;
        ft1[j] = (1.0 - lam) * f1 - a;  // f_tilde1 minus alpha
        ft2[j] = (1.0 - lam) * f2;
    }

    SplitState out{
        FieldPair{PeriodicField::from_samples(std::move(fc1)),
                  PeriodicField::from_samples(std::move(fc2))},
        FieldPair{PeriodicField::from_samples(std::move(ft1)),
                  PeriodicField::from_samples(std::move(ft2))},
        cutoffs,
        PeriodicField::zero(n), PeriodicField::zero(n),
        PeriodicField::zero(n), PeriodicField::zero(n)};

    // dft1 includes the unit slope of the alpha part.
    PeriodicField dft1_st = spectral_derivative(out.f_tilde_st.c1, 1);
    std::vector<cplx> d1(n);
    for (int j = 0; j < n; ++j) d1[j] = 1.0 + dft1_st.samples()[j];
    out.dft1 = PeriodicField::from_samples(std::move(d1));
    out.dft2 = spectral_derivative(out.f_tilde_st.c2, 1);
    out.d2ft1 = spectral_derivative(out.f_tilde_st.c1, 2);
    out.d2ft2 = spectral_derivative(out.f_tilde_st.c2, 2);
    return out;
}

FieldPair f_tilde_on_curve(const SplitState& split, double /*gamma*/, double /*t*/) {
    const int n = split.f_tilde_st.size();
    for (int j = 0; j < n; ++j) {
        const double cj = split.cutoffs.c.samples()[j].real();
        const double lj = split.cutoffs.lambda.samples()[j].real();
        if (cj != 0.0 && lj != 1.0)
            throw ConfigError("supp c is not contained in {lambda = 1}");
    }
    return split.f_tilde_st;
}

}  // namespace muskat
