// Periodic trigonometric toolkit on the uniform grid alpha_j = -pi + 2*pi*j/n.
//
// Mode coefficients follow g(alpha) = sum m_k e^{i k alpha}. Relative to the
// standard DFT on x_j = 2*pi*j/n this introduces the twiddle (-1)^k from
// alpha_j = x_j - pi, applied symmetrically in both directions.

#include "muskat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "muskat/errors.hpp"
#include "muskat/fft.hpp"

namespace muskat {

namespace {
constexpr double kPi = std::numbers::pi;

void check_even_positive(int n) {
    if (n <= 0 || n % 2 != 0)
        throw ConfigError("grid size must be a positive even integer, got " + std::to_string(n));
}

// (-1)^k twiddle between the alpha-grid and the x-grid DFT.
std::vector<cplx> apply_alternating_sign(std::vector<cplx> v) {
    const int n = static_cast<int>(v.size());
    for (int j = 0; j < n; ++j) {
        if (fft_wavenumber(j, n) % 2 != 0) v[j] = -v[j];
    }
    return v;
}
}  // namespace

int fft_wavenumber(int j, int n) { return (j <= n / 2) ? j : j - n; }

SpectralGrid::SpectralGrid(int n, double dealias) : n_points(n), dealias_fraction(dealias) {
    check_even_positive(n);
    if (dealias <= 0.0 || dealias > 1.0)
        throw ConfigError("dealias_fraction must lie in (0,1]");
}

double SpectralGrid::node(int j) const { return -kPi + 2.0 * kPi * j / n_points; }

std::vector<double> SpectralGrid::nodes() const {
    std::vector<double> out(n_points);
    for (int j = 0; j < n_points; ++j) out[j] = node(j);
    return out;
}

PeriodicField PeriodicField::from_samples(std::vector<cplx> samples) {
    check_even_positive(static_cast<int>(samples.size()));
    std::vector<cplx> modes = apply_alternating_sign(fft::forward(samples));
    return PeriodicField(std::move(samples), std::move(modes));
}

PeriodicField PeriodicField::from_modes(std::vector<cplx> modes) {
    check_even_positive(static_cast<int>(modes.size()));
    std::vector<cplx> samples = fft::inverse(apply_alternating_sign(modes));
    return PeriodicField(std::move(samples), std::move(modes));
}

PeriodicField PeriodicField::zero(int n) {
    check_even_positive(n);
    return PeriodicField(std::vector<cplx>(n), std::vector<cplx>(n));
}

cplx PeriodicField::mode(int k) const {
    const int n = size();
    if (k > n / 2 || k <= -n / 2)
        throw ConfigError("mode index outside {-n/2+1,...,n/2}");
    return modes_[(k + n) % n];
}

bool PeriodicField::is_real(double tol) const {
    const int n = size();
    for (int k = 1; k < n / 2; ++k) {
        if (std::abs(mode(-k) - std::conj(mode(k))) > tol) return false;
    }
    if (std::abs(std::imag(mode(0))) > tol) return false;
    if (std::abs(std::imag(mode(n / 2))) > tol) return false;
    return true;
}

double PeriodicField::max_abs() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
}

double PeriodicField::max_abs_imag() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(std::imag(v)));
    return m;
}

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b) {
    std::vector<cplx> s(a.samples());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] += b.samples()[j];
    return PeriodicField::from_samples(std::move(s));
}

PeriodicField operator-(const PeriodicField& a, const PeriodicField& b) {
    std::vector<cplx> s(a.samples());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] -= b.samples()[j];
    return PeriodicField::from_samples(std::move(s));
}

PeriodicField operator*(cplx s, const PeriodicField& a) {
    std::vector<cplx> v(a.samples());
    for (auto& x : v) x *= s;
    return PeriodicField::from_samples(std::move(v));
}

PeriodicField pointwise(const PeriodicField& a, const PeriodicField& b) {
    std::vector<cplx> s(a.samples());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] *= b.samples()[j];
    return PeriodicField::from_samples(std::move(s));
}

PeriodicField conj_field(const PeriodicField& a) {
    std::vector<cplx> s(a.samples());
    for (auto& x : s) x = std::conj(x);
    return PeriodicField::from_samples(std::move(s));
}

PeriodicField spectral_derivative(const PeriodicField& g, int order) {
    if (order < 0) throw ConfigError("derivative order must be nonnegative");
    if (order == 0) return g;
    const int n = g.size();
    std::vector<cplx> m(g.modes());
    for (int j = 0; j < n; ++j) {
        const int k = fft_wavenumber(j, n);
        if (k == n / 2) {
            m[j] = 0.0;
            continue;
        }
        cplx ik(0.0, static_cast<double>(k));
        cplx factor = 1.0;
        for (int p = 0; p < order; ++p) factor *= ik;
        m[j] *= factor;
    }
    return PeriodicField::from_modes(std::move(m));
}

PeriodicField hilbert_transform(const PeriodicField& g) {
    const int n = g.size();
    std::vector<cplx> m(g.modes());
    for (int j = 0; j < n; ++j) {
        const int k = fft_wavenumber(j, n);
        if (k == 0 || k == n / 2) {
            m[j] = 0.0;
        } else {
            m[j] *= cplx(0.0, k > 0 ? -1.0 : 1.0);
        }
    }
    return PeriodicField::from_modes(std::move(m));
}

PeriodicField lambda_operator(const PeriodicField& g) {
    const int n = g.size();
    std::vector<cplx> m(g.modes());
    for (int j = 0; j < n; ++j) {
        const int k = fft_wavenumber(j, n);
        m[j] *= (k == n / 2) ? 0.0 : static_cast<double>(std::abs(k));
    }
    return PeriodicField::from_modes(std::move(m));
}

PeriodicField project_modes(const PeriodicField& g, int n_keep) {
    if (n_keep <= 0) throw ConfigError("project_modes requires n_keep >= 1");
    const int n = g.size();
    std::vector<cplx> m(g.modes());
    for (int j = 0; j < n; ++j) {
        if (std::abs(fft_wavenumber(j, n)) > n_keep) m[j] = 0.0;
    }
    return PeriodicField::from_modes(std::move(m));
}

PeriodicField dealias(const PeriodicField& g, double fraction) {
    const int keep = std::max(1, static_cast<int>(fraction * g.size() / 2));
    return project_modes(g, keep);
}

cplx interpolate_at(const PeriodicField& g, double point) {
    const int n = g.size();
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const int k = fft_wavenumber(j, n);
        acc += g.modes()[j] * std::exp(cplx(0.0, k * point));
    }
    return acc;
}

std::vector<cplx> interpolate(const PeriodicField& g, const std::vector<double>& points) {
    std::vector<cplx> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = interpolate_at(g, points[i]);
    return out;
}

double analyticity_radius(const PeriodicField& g, double tail_fraction) {
    if (tail_fraction <= 0.0 || tail_fraction > 1.0)
        throw ConfigError("tail_fraction must lie in (0,1]");
    const int n = g.size();
    bool all_zero = true;
    for (const auto& v : g.modes()) {
        if (std::abs(v) != 0.0) { all_zero = false; break; }
    }
    if (all_zero) throw UndefinedRadius("analyticity radius of the zero field is undefined");

    const int kmax = n / 2;
    const int kmin = std::max(1, static_cast<int>(std::ceil((1.0 - tail_fraction) * kmax)));

    // Pool +k and -k magnitudes; keep points above the noise floor.
    std::vector<std::pair<double, double>> pts;  // (|k|, -log|m|)
    for (int k = kmin; k <= kmax; ++k) {
        for (int sign : {+1, -1}) {
            if (sign < 0 && k == kmax) continue;  // no -n/2 slot
            const double mag = std::abs(g.mode(sign * k));
            if (mag > 1e-14) pts.emplace_back(static_cast<double>(k), -std::log(mag));
        }
    }
    if (pts.empty()) return std::numeric_limits<double>::infinity();

    double k_lo = pts.front().first, k_hi = pts.front().first;
    for (const auto& p : pts) {
        k_lo = std::min(k_lo, p.first);
        k_hi = std::max(k_hi, p.first);
    }
    if (k_hi == k_lo) return std::numeric_limits<double>::infinity();

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::max(0.0, slope);
}

double l2_norm(const PeriodicField& g) { return sobolev_norm(g, 0.0); }

double sobolev_norm(const PeriodicField& g, double s) {
    const int n = g.size();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double k = fft_wavenumber(j, n);
        acc += std::pow(1.0 + k * k, s) * std::norm(g.modes()[j]);
    }
    return std::sqrt(2.0 * kPi * acc);
}

PeriodicField translate_nodes(const PeriodicField& g, int shift) {
    const int n = g.size();
    std::vector<cplx> s(n);
    for (int j = 0; j < n; ++j) s[j] = g.samples()[((j - shift) % n + n) % n];
    return PeriodicField::from_samples(std::move(s));
}

std::string modes_to_csv(const PeriodicField& g) {
    const int n = g.size();
    std::string out = "k,re,im\n";
    char buf[96];
    for (int k = -n / 2 + 1; k <= n / 2; ++k) {
        const cplx m = g.mode(k);
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", k, m.real(), m.imag());
        out += buf;
    }
    return out;
}

}  // namespace muskat
