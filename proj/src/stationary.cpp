// Generic analyticity-by-continuation machinery for scalar nonlocal
// equations: hypothesis probing and the complex-time evolution with its
// Cauchy-Riemann residual certificate.

#include "muskat/stationary.hpp"

#include <cmath>
#include <random>

#include "muskat/errors.hpp"
#include "muskat/evolution.hpp"

namespace muskat {

namespace {
const cplx kI(0.0, 1.0);

PeriodicField random_band_limited(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<cplx> modes(n, 0.0);
    const int kmax = std::max(1, n / 6);
    for (int k = -kmax; k <= kmax; ++k) {
        const double decay = 1.0 / (1.0 + k * k);
        modes[(k + n) % n] = decay * cplx(dist(rng), dist(rng));
    }
    PeriodicField h = PeriodicField::from_modes(std::move(modes));
    const double norm = l2_norm(h);
    return (1.0 / norm) * h;
}

PeriodicField fd_directional(const OperatorHandle& op, const PeriodicField& f,
                             const PeriodicField& h, double step) {
    const PeriodicField plus = op.apply(f + cplx(step) * h);
    const PeriodicField minus = op.apply(f - cplx(step) * h);
    return (1.0 / (2.0 * step)) * (plus - minus);
}
}  // namespace

HypothesisReport verify_hypotheses(const OperatorHandle& op, const PeriodicField& f0,
                                   int trials, double tol, unsigned seed) {
    HypothesisReport rep;
    std::mt19937_64 rng(seed);
    const int n = f0.size();
    const double scale = std::max(1.0, sobolev_norm(f0, op.sobolev_index));

    auto deriv = [&](const PeriodicField& f, const PeriodicField& h) {
        if (op.frechet) return op.frechet(f, h);
        rep.used_fd_surrogate = true;
        return fd_directional(op, f, h, 1e-5 * std::max(l2_norm(h), 1e-30));
    };

    for (int trial = 0; trial < trials; ++trial) {
        const PeriodicField h = random_band_limited(n, rng);
        const PeriodicField Dh = deriv(f0, h);

        // (b) supplied derivative against central differences at two steps.
        if (op.frechet) {
            const double coarse = l2_norm(fd_directional(op, f0, h, 1e-3) - Dh);
            const double fine = l2_norm(fd_directional(op, f0, h, 5e-4) - Dh);
            rep.frechet_fd_residual = std::max(rep.frechet_fd_residual, fine);
            if (fine > 1e-12 * scale) {
                const double ratio = coarse / fine;
                rep.frechet_fd_ratio = std::max(rep.frechet_fd_ratio, ratio);
                if (fine > tol * scale && (ratio < 2.5 || ratio > 6.0)) {
                    rep.passed = false;
                    rep.failures.push_back("frechet derivative disagrees with finite differences");
                }
            }
        }

        // (e) i-linearity.
        const PeriodicField Dih = deriv(f0, kI * h);
        const double ilin = l2_norm(kI * Dh - Dih);
        rep.i_linearity_residual = std::max(rep.i_linearity_residual, ilin);

        // (a) boundedness probe around f0.
        const PeriodicField probe = f0 + cplx(0.05) * h;
        const double tb = sobolev_norm(op.apply(probe), op.sobolev_index);
        rep.boundedness_max = std::max(rep.boundedness_max, tb);
        if (!std::isfinite(tb)) {
            rep.passed = false;
            rep.failures.push_back("T unbounded near f0");
        }
    }

    // (d) chain rule at f0.
    const PeriodicField df0 = spectral_derivative(f0, 1);
    const PeriodicField dTf0 = spectral_derivative(op.apply(f0), 1);
    rep.chain_rule_residual = l2_norm(dTf0 - deriv(f0, df0));

    if (rep.chain_rule_residual > tol * scale) {
        rep.passed = false;
        rep.failures.push_back("chain rule d/dx T(f) = D_fT[f'] fails");
    }
    if (rep.i_linearity_residual > tol * scale) {
        rep.passed = false;
        rep.failures.push_back("derivative is not i-linear");
    }
    return rep;
}

ContinuationResult continue_stationary(const OperatorHandle& op, const PeriodicField& f0,
                                       double t_max, double dt) {
    const PeriodicField df0 = spectral_derivative(f0, 1);
    const double stat = l2_norm(df0 - op.apply(f0));
    const double gate = 1e-8 * sobolev_norm(f0, 1.0);
    if (stat > gate)
        throw NotStationary("||f0' - T(f0)|| = " + std::to_string(stat) +
                            " exceeds the stationarity gate");

    ContinuationResult out{{}, {}, {}, f0, f0, false};
    auto rhs = [&](double, const PeriodicField& f) { return kI * op.apply(f); };

    struct Sample { double t, r, hk; };
    std::vector<Sample> samples;
    samples.push_back({0.0, stat, sobolev_norm(f0, op.sobolev_index)});

    for (int dir : {+1, -1}) {
        PeriodicField f = f0;
        double t = 0.0;
        const double step = dir * dt;
        const int steps = static_cast<int>(std::ceil(t_max / dt - 1e-12));
        for (int s = 0; s < steps; ++s) {
            f = rk4_step(f, t, step, rhs);
            t += step;
            const PeriodicField fx = spectral_derivative(f, 1);
            const double r = l2_norm(fx - op.apply(f));
            samples.push_back({t, r, sobolev_norm(f, op.sobolev_index)});
            if (sobolev_norm(f - f0, op.sobolev_index) > op.trust_region) {
                out.left_trust_region = true;
                break;
            }
        }
        if (dir > 0) out.f_forward_end = f;
        else out.f_backward_end = f;
    }

    std::sort(samples.begin(), samples.end(),
              [](const Sample& a, const Sample& b) { return a.t < b.t; });
    for (const auto& s : samples) {
        out.times.push_back(s.t);
        out.residuals.push_back(s.r);
        out.hk_norms.push_back(s.hk);
    }
    return out;
}

}  // namespace muskat
