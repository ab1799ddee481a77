#pragma once

#include <complex>
#include <vector>

namespace muskat {

using cplx = std::complex<double>;

/// Uniform grid on [-pi, pi) with alpha_0 = -pi.
struct SpectralGrid {
    int n_points;
    double dealias_fraction = 2.0 / 3.0;

    explicit SpectralGrid(int n, double dealias = 2.0 / 3.0);
    double node(int j) const;
    std::vector<double> nodes() const;
};

/// One 2*pi-periodic complex scalar held in both sample and mode form.
///
/// Samples live at alpha_j = -pi + 2*pi*j/n. Modes m_k are the coefficients of
/// g(alpha) = sum_{k=-n/2+1}^{n/2} m_k e^{i k alpha}, stored in FFT index
/// order (index j holds k = j for j <= n/2, k = j-n above). Both
/// representations are materialized at construction; instances are immutable.
class PeriodicField {
  public:
    PeriodicField() = default;  // empty placeholder; assign before use

    static PeriodicField from_samples(std::vector<cplx> samples);
    static PeriodicField from_modes(std::vector<cplx> modes);
    static PeriodicField zero(int n);

    int size() const { return static_cast<int>(samples_.size()); }
    const std::vector<cplx>& samples() const { return samples_; }
    const std::vector<cplx>& modes() const { return modes_; }

    /// Mode coefficient for wavenumber k in {-n/2+1, ..., n/2}.
    cplx mode(int k) const;

    /// True when the mode set satisfies conjugate symmetry to `tol`.
    bool is_real(double tol = 1e-12) const;

    double max_abs() const;
    double max_abs_imag() const;

  private:
    PeriodicField(std::vector<cplx> samples, std::vector<cplx> modes)
        : samples_(std::move(samples)), modes_(std::move(modes)) {}
    std::vector<cplx> samples_;
    std::vector<cplx> modes_;
};

/// Wavenumber carried by FFT-layout index j on an n-point grid.
int fft_wavenumber(int j, int n);

// Arithmetic (sample-wise; sizes must agree).
PeriodicField operator+(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator-(const PeriodicField& a, const PeriodicField& b);
PeriodicField operator*(cplx s, const PeriodicField& a);
PeriodicField pointwise(const PeriodicField& a, const PeriodicField& b);
PeriodicField conj_field(const PeriodicField& a);

/// Spectral derivative of the given order; the Nyquist mode is zeroed for
/// order >= 1 so differentiation maps real fields to real fields.
PeriodicField spectral_derivative(const PeriodicField& g, int order);

/// Periodic Hilbert transform, H g(alpha) = (1/2pi) p.v. int g(beta)
/// cot((alpha-beta)/2) dbeta; multiplier -i*sgn(k), zero on k=0 and Nyquist.
PeriodicField hilbert_transform(const PeriodicField& g);

/// Half-Laplacian (-Lap)^{1/2}: multiplier |k|, Nyquist zeroed so the
/// identity Lambda = H o d/dalpha holds on the grid.
PeriodicField lambda_operator(const PeriodicField& g);

/// Zero all modes with |k| > n_keep. Idempotent.
PeriodicField project_modes(const PeriodicField& g, int n_keep);

/// 2/3-rule style truncation: zero |k| > fraction * n/2.
PeriodicField dealias(const PeriodicField& g, double fraction);

/// Exact trigonometric interpolation at arbitrary points via the mode sum.
std::vector<cplx> interpolate(const PeriodicField& g, const std::vector<double>& points);
cplx interpolate_at(const PeriodicField& g, double point);

/// Least-squares decay rate of -log|m_k| against |k| over the top
/// `tail_fraction` of wavenumbers, floored at 0. Returns +infinity when the
/// tail sits below 1e-14 (band-limited input) or has fewer than two usable
/// points. Throws UndefinedRadius on the zero field.
double analyticity_radius(const PeriodicField& g, double tail_fraction = 0.5);

/// L2 norm on [-pi,pi]: sqrt(2*pi*sum |m_k|^2).
double l2_norm(const PeriodicField& g);

/// Sobolev norm sqrt(2*pi*sum (1+k^2)^s |m_k|^2).
double sobolev_norm(const PeriodicField& g, double s);

/// Circular shift of samples by `shift` grid nodes.
PeriodicField translate_nodes(const PeriodicField& g, int shift);

/// Write modes as CSV rows `k,re,im` with k ascending, 17 significant digits.
std::string modes_to_csv(const PeriodicField& g);

}  // namespace muskat
