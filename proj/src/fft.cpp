#include "ctrec/fft.hpp"

#include <cmath>

namespace ctrec {

void fft_1d(cdouble* a, int n, bool inverse) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (int len = 2; len <= n; len <<= 1) {
    double ang = sign * 2.0 * M_PI / len;
    cdouble wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cdouble w(1.0);
      for (int k = 0; k < len / 2; ++k) {
        cdouble u = a[i + k];
        cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (int i = 0; i < n; ++i) a[i] /= n;
  }
}

void fft_2d(std::vector<cdouble>& data, int w, int h, bool inverse) {
  for (int y = 0; y < h; ++y) fft_1d(data.data() + static_cast<size_t>(y) * w, w, inverse);
  std::vector<cdouble> col(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = data[static_cast<size_t>(y) * w + x];
    fft_1d(col.data(), h, inverse);
    for (int y = 0; y < h; ++y) data[static_cast<size_t>(y) * w + x] = col[y];
  }
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ctrec
