#include "ctrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "ctrec/fft.hpp"

namespace ctrec {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

void mean_std(const std::vector<double>& v, double* mean, double* sd) {
  double s = 0.0;
  for (double x : v) s += x;
  double m = s / v.size();
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  *mean = m;
  *sd = std::sqrt(q / v.size());
}

void l2_normalize(std::vector<double>* v) {
  double ss = 0.0;
  for (double x : *v) ss += x * x;
  if (ss <= 0.0) return;  // all-zero stays all-zero
  double inv = 1.0 / std::sqrt(ss);
  for (double& x : *v) x *= inv;
}

}  // namespace

const char* feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Wavelet: return "wavelet";
    case FeatureKind::Gabor: return "gabor";
    case FeatureKind::LBP: return "lbp";
    case FeatureKind::LPQ: return "lpq";
    case FeatureKind::StatsHist: return "statshist";
  }
  return "?";
}

bool feature_kind_from_name(const std::string& name, FeatureKind* out) {
  for (FeatureKind k : {FeatureKind::Wavelet, FeatureKind::Gabor, FeatureKind::LBP,
                        FeatureKind::LPQ, FeatureKind::StatsHist}) {
    if (name == feature_kind_name(k)) {
      *out = k;
      return true;
    }
  }
  return false;
}

int feature_dim(FeatureKind k) {
  switch (k) {
    case FeatureKind::Wavelet: return 24;
    case FeatureKind::Gabor: return 60;
    case FeatureKind::LBP: return 59;
    case FeatureKind::LPQ: return 256;
    case FeatureKind::StatsHist: return 265;
  }
  return 0;
}

int descriptor_dim(FeatureKind k) {
  return k == FeatureKind::StatsHist ? 265 : 8 * feature_dim(k);
}

// ---------------------------------------------------------------- wavelet

std::vector<double> wavelet_feature(const ChannelPlane& patch) {
  if (patch.width < 8 || patch.height < 8)
    fail(Err::PatchTooSmall, "wavelet feature needs at least 8x8");

  // Working copy of the current LL band.
  int w = patch.width, h = patch.height;
  std::vector<double> cur(patch.v);

  std::vector<double> out;
  out.reserve(24);
  std::vector<double> band;

  for (int level = 0; level < 3; ++level) {
    if (w & 1) {  // replicate last column
      std::vector<double> ext((w + 1) * static_cast<size_t>(h));
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) ext[static_cast<size_t>(y) * (w + 1) + x] = cur[static_cast<size_t>(y) * w + x];
        ext[static_cast<size_t>(y) * (w + 1) + w] = cur[static_cast<size_t>(y) * w + w - 1];
      }
      cur.swap(ext);
      ++w;
    }
    if (h & 1) {  // replicate last row
      cur.resize(static_cast<size_t>(w) * (h + 1));
      for (int x = 0; x < w; ++x) cur[static_cast<size_t>(h) * w + x] = cur[static_cast<size_t>(h - 1) * w + x];
      ++h;
    }

    // Transform along x then y.
    std::vector<double> tmp(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w / 2; ++x) {
        double a = cur[static_cast<size_t>(y) * w + 2 * x];
        double b = cur[static_cast<size_t>(y) * w + 2 * x + 1];
        tmp[static_cast<size_t>(y) * w + x] = (a + b) * kSqrt1_2;
        tmp[static_cast<size_t>(y) * w + w / 2 + x] = (a - b) * kSqrt1_2;
      }
    }
    std::vector<double> tr(static_cast<size_t>(w) * h);
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h / 2; ++y) {
        double a = tmp[static_cast<size_t>(2 * y) * w + x];
        double b = tmp[static_cast<size_t>(2 * y + 1) * w + x];
        tr[static_cast<size_t>(y) * w + x] = (a + b) * kSqrt1_2;
        tr[static_cast<size_t>(h / 2 + y) * w + x] = (a - b) * kSqrt1_2;
      }
    }

    int hw = w / 2, hh = h / 2;
    // Band order LL, LH, HL, HH. LH is the x-detail band (vertical edges),
    // HL the y-detail band (horizontal edges).
    auto emit = [&](int x0, int y0) {
      band.clear();
      for (int y = 0; y < hh; ++y)
        for (int x = 0; x < hw; ++x) band.push_back(tr[static_cast<size_t>(y0 + y) * w + x0 + x]);
      double m, sd;
      mean_std(band, &m, &sd);
      out.push_back(m);
      out.push_back(sd);
    };
    emit(0, 0);    // LL
    emit(hw, 0);   // LH
    emit(0, hh);   // HL
    emit(hw, hh);  // HH

    // Recurse on LL.
    std::vector<double> ll(static_cast<size_t>(hw) * hh);
    for (int y = 0; y < hh; ++y)
      for (int x = 0; x < hw; ++x) ll[static_cast<size_t>(y) * hw + x] = tr[static_cast<size_t>(y) * w + x];
    cur.swap(ll);
    w = hw;
    h = hh;
  }
  return out;
}

// ------------------------------------------------------------------ gabor

const std::vector<GaborKernel>& gabor_bank() {
  static const std::vector<GaborKernel> bank = [] {
    std::vector<GaborKernel> filters;
    const double wavelengths[5] = {4.0, 4.0 * std::sqrt(2.0), 8.0, 8.0 * std::sqrt(2.0), 16.0};
    const double gamma = 0.5;
    for (double lambda : wavelengths) {
      double sigma = 0.56 * lambda;
      int half = static_cast<int>(std::ceil(3.0 * sigma));
      for (int o = 0; o < 6; ++o) {
        double theta = o * M_PI / 6.0;
        GaborKernel gk;
        gk.half = half;
        gk.wavelength = lambda;
        gk.theta = theta;
        int size = 2 * half + 1;
        gk.k.resize(static_cast<size_t>(size) * size);
        std::complex<double> sum(0.0, 0.0);
        for (int y = -half; y <= half; ++y) {
          for (int x = -half; x <= half; ++x) {
            double xr = x * std::cos(theta) + y * std::sin(theta);
            double yr = -x * std::sin(theta) + y * std::cos(theta);
            double env = std::exp(-(xr * xr + gamma * gamma * yr * yr) / (2.0 * sigma * sigma));
            double phase = 2.0 * M_PI * xr / lambda;
            std::complex<double> v = env * std::complex<double>(std::cos(phase), std::sin(phase));
            gk.k[static_cast<size_t>(y + half) * size + (x + half)] = v;
            sum += v;
          }
        }
        // Remove DC so a constant region gives zero response.
        std::complex<double> mean = sum / static_cast<double>(size * size);
        for (auto& v : gk.k) v -= mean;
        filters.push_back(std::move(gk));
      }
    }
    return filters;
  }();
  return bank;
}

namespace {

// Frequency-domain bank, cached per padded-grid size.
struct BankFFT {
  int pw = 0, ph = 0;
  std::vector<std::vector<cdouble>> filters;
};

const BankFFT& bank_fft_for(int pw, int ph) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, BankFFT> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(pw, ph);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  BankFFT bf;
  bf.pw = pw;
  bf.ph = ph;
  for (const GaborKernel& gk : gabor_bank()) {
    int size = 2 * gk.half + 1;
    std::vector<cdouble> grid(static_cast<size_t>(pw) * ph, cdouble(0.0));
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        grid[static_cast<size_t>(y) * pw + x] = gk.k[static_cast<size_t>(y) * size + x];
    fft_2d(grid, pw, ph, false);
    bf.filters.push_back(std::move(grid));
  }
  return cache.emplace(key, std::move(bf)).first->second;
}

}  // namespace

std::vector<double> gabor_feature(const ChannelPlane& patch) {
  if (patch.width < 8 || patch.height < 8)
    fail(Err::PatchTooSmall, "gabor feature needs at least 8x8");
  const int w = patch.width, h = patch.height;
  const int maxhalf = gabor_bank().back().half;
  const int pw = next_pow2(w + 2 * maxhalf);
  const int ph = next_pow2(h + 2 * maxhalf);
  const BankFFT& bank = bank_fft_for(pw, ph);

  std::vector<cdouble> img(static_cast<size_t>(pw) * ph, cdouble(0.0));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img[static_cast<size_t>(y) * pw + x] = patch.at(x, y);
  fft_2d(img, pw, ph, false);

  std::vector<double> out;
  out.reserve(60);
  std::vector<cdouble> prod(static_cast<size_t>(pw) * ph);
  const auto& filters = gabor_bank();
  for (size_t f = 0; f < filters.size(); ++f) {
    for (size_t i = 0; i < prod.size(); ++i) prod[i] = img[i] * bank.filters[f][i];
    fft_2d(prod, pw, ph, true);
    // "Same" crop: the kernel array starts at -half, so output (x,y)
    // lands at padded index (x+half, y+half).
    int half = filters[f].half;
    double sum_mag = 0.0, sum_sq = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double m = std::abs(prod[static_cast<size_t>(y + half) * pw + (x + half)]);
        sum_mag += m;
        sum_sq += m * m;
      }
    }
    double n = static_cast<double>(w) * h;
    out.push_back(sum_mag / n);
    out.push_back(sum_sq / n);
  }
  return out;
}

// -------------------------------------------------------------------- lbp

namespace {

int circular_transitions(int code) {
  int t = 0;
  for (int i = 0; i < 8; ++i) {
    int a = (code >> i) & 1;
    int b = (code >> ((i + 1) % 8)) & 1;
    t += a ^ b;
  }
  return t;
}

// code -> bin; uniform codes in ascending order get 0..57, rest 58.
const std::array<int, 256>& lbp_bin_table() {
  static const std::array<int, 256> table = [] {
    std::array<int, 256> t{};
    int next = 0;
    for (int code = 0; code < 256; ++code)
      t[code] = circular_transitions(code) <= 2 ? next++ : -1;
    for (int code = 0; code < 256; ++code)
      if (t[code] < 0) t[code] = 58;
    return t;
  }();
  return table;
}

}  // namespace

std::vector<double> lbp_feature(const ChannelPlane& patch) {
  if (patch.width < 3 || patch.height < 3)
    fail(Err::PatchTooSmall, "lbp feature needs at least 3x3");
  const int w = patch.width, h = patch.height;
  static const double kR = 1.0;
  double dx[8], dy[8];
  for (int n = 0; n < 8; ++n) {
    dx[n] = kR * std::cos(2.0 * M_PI * n / 8.0);
    dy[n] = kR * std::sin(2.0 * M_PI * n / 8.0);
  }
  std::vector<double> hist(59, 0.0);
  long count = 0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      double c = patch.at(x, y);
      int code = 0;
      for (int n = 0; n < 8; ++n) {
        double sx = x + dx[n], sy = y + dy[n];
        int x0 = static_cast<int>(std::floor(sx));
        int y0 = static_cast<int>(std::floor(sy));
        double fx = sx - x0, fy = sy - y0;
        int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
        double v = patch.at(x0, y0) * (1 - fx) * (1 - fy) + patch.at(x1, y0) * fx * (1 - fy) +
                   patch.at(x0, y1) * (1 - fx) * fy + patch.at(x1, y1) * fx * fy;
        // ">= center" with a guard against interpolation roundoff, so flat
        // neighborhoods give the all-ones pattern.
        if (v >= c - 1e-6) code |= 1 << n;
      }
      hist[lbp_bin_table()[code]] += 1.0;
      ++count;
    }
  }
  for (double& v : hist) v /= count;
  return hist;
}

// -------------------------------------------------------------------- lpq

std::vector<double> lpq_feature(const ChannelPlane& patch) {
  if (patch.width < 7 || patch.height < 7)
    fail(Err::PatchTooSmall, "lpq feature needs at least 7x7");
  const int w = patch.width, h = patch.height;
  const int half = 3;
  const double a = 1.0 / 7.0;

  // 1-D window responses, e^{-i 2 pi a t} for t in [-3,3].
  cdouble w1[7];
  for (int t = -half; t <= half; ++t) {
    double ph = -2.0 * M_PI * a * t;
    w1[t + half] = cdouble(std::cos(ph), std::sin(ph));
  }

  // Horizontal passes: s0 = box sum, s1 = modulated sum, s1c = conjugate.
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<double> s0(n, 0.0);
  std::vector<cdouble> s1(n, cdouble(0.0));
  for (int y = 0; y < h; ++y) {
    for (int x = half; x < w - half; ++x) {
      double acc0 = 0.0;
      cdouble acc1(0.0);
      for (int t = -half; t <= half; ++t) {
        double v = patch.at(x + t, y);
        acc0 += v;
        acc1 += v * w1[t + half];
      }
      s0[static_cast<size_t>(y) * w + x] = acc0;
      s1[static_cast<size_t>(y) * w + x] = acc1;
    }
  }

  std::vector<double> hist(256, 0.0);
  long count = 0;
  for (int y = half; y < h - half; ++y) {
    for (int x = half; x < w - half; ++x) {
      // Vertical combination yields the four frequencies:
      // (a,0): w1_x * box_y   (0,a): box_x * w1_y
      // (a,a): w1_x * w1_y    (a,-a): w1_x * conj(w1)_y
      cdouble f_a0(0.0), f_0a(0.0), f_aa(0.0), f_am(0.0);
      for (int t = -half; t <= half; ++t) {
        size_t idx = static_cast<size_t>(y + t) * w + x;
        f_a0 += s1[idx];
        f_0a += s0[idx] * w1[t + half];
        f_aa += s1[idx] * w1[t + half];
        f_am += s1[idx] * std::conj(w1[t + half]);
      }
      const cdouble coeffs[4] = {f_a0, f_0a, f_aa, f_am};
      int code = 0;
      for (int j = 0; j < 4; ++j) {
        if (coeffs[j].real() >= 0.0) code |= 1 << (2 * j);
        if (coeffs[j].imag() >= 0.0) code |= 1 << (2 * j + 1);
      }
      hist[code] += 1.0;
      ++count;
    }
  }
  for (double& v : hist) v /= count;
  return hist;
}

// ------------------------------------------------------------- stats/hist

std::vector<double> stats_hist_feature(const ImageRGB& patch) {
  if (patch.width < 1 || patch.height < 1) fail(Err::PatchTooSmall, "empty patch");
  const size_t n = static_cast<size_t>(patch.width) * patch.height;
  std::vector<double> out;
  out.reserve(265);
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) sum += patch.data[i * 3 + c];
    double mean = sum / n;
    double m2 = 0.0, m3 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = patch.data[i * 3 + c] - mean;
      m2 += d * d;
      m3 += d * d * d;
    }
    out.push_back(mean);
    out.push_back(std::sqrt(m2 / n));
    out.push_back(std::cbrt(m3 / n));
  }
  std::vector<double> hist(256, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double hch, sch, vch;
    rgb_to_hsv(patch.data[i * 3], patch.data[i * 3 + 1], patch.data[i * 3 + 2], &hch, &sch, &vch);
    int hq = std::min(15, static_cast<int>(hch / 16.0));
    int sq = std::min(3, static_cast<int>(sch / 64.0));
    int vq = std::min(3, static_cast<int>(vch / 64.0));
    hist[static_cast<size_t>(hq) * 16 + sq * 4 + vq] += 1.0;
  }
  for (double& v : hist) v /= static_cast<double>(n);
  out.insert(out.end(), hist.begin(), hist.end());
  return out;
}

// --------------------------------------------------------------- combined

SelectionDescriptor selection_descriptor(const ChannelSet& channels, const Rect& region,
                                         FeatureKind kind) {
  Rect r = region;
  r.x = std::max(0, r.x);
  r.y = std::max(0, r.y);
  r.w = std::min(region.x + region.w, channels.width) - r.x;
  r.h = std::min(region.y + region.h, channels.height) - r.y;
  if (r.w <= 0 || r.h <= 0) fail(Err::PatchTooSmall, "region outside image");

  SelectionDescriptor d;
  d.kind = kind;
  d.per_channel_len = feature_dim(kind);
  if (kind == FeatureKind::StatsHist) {
    ImageRGB patch;
    patch.width = r.w;
    patch.height = r.h;
    patch.data.resize(static_cast<size_t>(r.w) * r.h * 3);
    const ChannelPlane& rp = channels.plane(Channel::R);
    const ChannelPlane& gp = channels.plane(Channel::G);
    const ChannelPlane& bp = channels.plane(Channel::B);
    for (int y = 0; y < r.h; ++y) {
      for (int x = 0; x < r.w; ++x) {
        patch.at(x, y, 0) = static_cast<std::uint8_t>(rp.at(r.x + x, r.y + y));
        patch.at(x, y, 1) = static_cast<std::uint8_t>(gp.at(r.x + x, r.y + y));
        patch.at(x, y, 2) = static_cast<std::uint8_t>(bp.at(r.x + x, r.y + y));
      }
    }
    d.values = stats_hist_feature(patch);
  } else {
    d.values.reserve(static_cast<size_t>(8) * d.per_channel_len);
    for (Channel c : kSelectableChannels) {
      ChannelPlane patch = extract_patch(channels.plane(c), r);
      std::vector<double> f;
      switch (kind) {
        case FeatureKind::Wavelet: f = wavelet_feature(patch); break;
        case FeatureKind::Gabor: f = gabor_feature(patch); break;
        case FeatureKind::LBP: f = lbp_feature(patch); break;
        case FeatureKind::LPQ: f = lpq_feature(patch); break;
        default: break;
      }
      d.values.insert(d.values.end(), f.begin(), f.end());
    }
  }
  l2_normalize(&d.values);
  return d;
}

}  // namespace ctrec
