#pragma once

#include <complex>
#include <vector>

namespace ctrec {

using cdouble = std::complex<double>;

// In-place iterative radix-2 FFT; n must be a power of two.
void fft_1d(cdouble* data, int n, bool inverse);

// Row-major 2D FFT on an h x w grid (both powers of two).
void fft_2d(std::vector<cdouble>& data, int w, int h, bool inverse);

int next_pow2(int n);

}  // namespace ctrec
