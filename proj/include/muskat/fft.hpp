#pragma once

#include <complex>
#include <vector>

namespace muskat::fft {

using cplx = std::complex<double>;

/// Forward DFT: c_k = (1/n) sum_j x_j e^{-2*pi*i*j*k/n}, FFT index order
/// (k = 0..n/2, then -n/2+1..-1 at indices n/2+1..n-1).
std::vector<cplx> forward(const std::vector<cplx>& samples);

/// Inverse of forward(): x_j = sum_k c_k e^{2*pi*i*j*k/n}.
std::vector<cplx> inverse(const std::vector<cplx>& coeffs);

}  // namespace muskat::fft
