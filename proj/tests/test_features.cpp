#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctrec/features.hpp"
#include "ctrec/rng.hpp"
#include "oracles.hpp"

using namespace ctrec;

namespace {

ChannelPlane make_plane(int w, int h, double v = 0.0) {
  ChannelPlane p;
  p.width = w;
  p.height = h;
  p.v.assign(static_cast<size_t>(w) * h, v);
  return p;
}

ChannelPlane random_plane(int w, int h, std::uint64_t seed) {
  ChannelPlane p = make_plane(w, h);
  SplitMix64 rng(seed);
  for (double& v : p.v) v = rng.uniform(0.0, 255.0);
  return p;
}

double sumsq(const ChannelPlane& p) {
  double s = 0;
  for (double v : p.v) s += v * v;
  return s;
}

}  // namespace

// ------------------------------------------------------------ wavelet

TEST_CASE("wavelet constant plane") {
  ChannelPlane p = make_plane(16, 16, 100.0);
  std::vector<double> f = wavelet_feature(p);
  REQUIRE(f.size() == 24);
  // layout per level: LLm LLs LHm LHs HLm HLs HHm HHs
  for (int level = 0; level < 3; ++level) {
    double scale = std::pow(2.0, level + 1);
    CHECK(f[level * 8 + 0] == doctest::Approx(100.0 * scale).epsilon(1e-12));
    CHECK(f[level * 8 + 1] == doctest::Approx(0.0));  // LL std
    for (int k = 2; k < 8; ++k) CHECK(f[level * 8 + k] == doctest::Approx(0.0));
  }
}

TEST_CASE("wavelet vertical-variation stencil puts detail in HL") {
  // [[a],[a] rows then [b],[b] rows]: rows constant, columns alternate.
  ChannelPlane p = make_plane(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) p.at(x, y) = (y % 2 == 0) ? 7.0 : 3.0;
  std::vector<double> f = wavelet_feature(p);
  CHECK(f[2] == doctest::Approx(0.0));          // LH mean
  CHECK(f[3] == doctest::Approx(0.0));          // LH std
  CHECK(std::fabs(f[4]) > 1e-9);                // HL mean = a-b = 4
  CHECK(f[4] == doctest::Approx(4.0));
  CHECK(f[6] == doctest::Approx(0.0));          // HH mean
}

TEST_CASE("wavelet level-1 parseval") {
  ChannelPlane p = random_plane(24, 16, 99);
  std::vector<double> f = wavelet_feature(p);
  // sum of squares per band = N_band * (std^2 + mean^2)
  double n_band = (24 / 2) * (16 / 2);
  double total = 0.0;
  for (int band = 0; band < 4; ++band) {
    double m = f[band * 2], sd = f[band * 2 + 1];
    total += n_band * (sd * sd + m * m);
  }
  CHECK(total == doctest::Approx(sumsq(p)).epsilon(1e-9));
}

TEST_CASE("wavelet pads odd extents") {
  ChannelPlane p = random_plane(9, 11, 3);
  std::vector<double> f = wavelet_feature(p);
  CHECK(f.size() == 24);
  for (double v : f) CHECK(std::isfinite(v));
}

TEST_CASE("wavelet rejects tiny patches") {
  ChannelPlane p = make_plane(7, 8, 1.0);
  CHECK_THROWS_AS(wavelet_feature(p), Error);
}

// -------------------------------------------------------------- gabor

TEST_CASE("gabor bank shape") {
  const auto& bank = gabor_bank();
  REQUIRE(bank.size() == 30);
  for (const auto& gk : bank) {
    std::complex<double> sum(0, 0);
    for (auto v : gk.k) sum += v;
    CHECK(std::abs(sum) < 1e-9);  // zero DC
  }
}

TEST_CASE("gabor constant plane responds near zero") {
  ChannelPlane p = make_plane(32, 32, 100.0);
  std::vector<double> f = gabor_feature(p);
  REQUIRE(f.size() == 60);
  // Interior response of the smallest filter is exactly zero; check via the
  // naive convolution.
  auto r = oracle::naive_conv(p, gabor_bank()[0]);
  int half = gabor_bank()[0].half;
  for (int y = half; y < 32 - half; ++y)
    for (int x = half; x < 32 - half; ++x)
      CHECK(std::abs(r[y * 32 + x]) < 1e-8);
  // Energy decays as the patch grows (border fraction shrinks).
  ChannelPlane big = make_plane(64, 64, 100.0);
  std::vector<double> f2 = gabor_feature(big);
  for (int i = 1; i < 60; i += 2) CHECK(f2[i] < f[i] + 1e-12);
}

TEST_CASE("gabor grating energy peaks at matching orientation") {
  ChannelPlane p = make_plane(32, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) p.at(x, y) = 128.0 + 100.0 * std::cos(2.0 * M_PI * x / 4.0);
  std::vector<double> f = gabor_feature(p);
  double e0 = f[(0 * 6 + 0) * 2 + 1];   // lambda=4, 0 degrees
  double e90 = f[(0 * 6 + 3) * 2 + 1];  // lambda=4, 90 degrees
  CHECK(e0 > e90);
}

TEST_CASE("gabor finite and nonnegative") {
  ChannelPlane p = random_plane(20, 14, 11);
  std::vector<double> f = gabor_feature(p);
  for (size_t i = 0; i < f.size(); ++i) {
    CHECK(std::isfinite(f[i]));
    CHECK(f[i] >= 0.0);  // magnitude means and energies
  }
}

TEST_CASE("gabor matches naive convolution on 16x16") {
  ChannelPlane p = random_plane(16, 16, 1234);
  std::vector<double> f = gabor_feature(p);
  const auto& bank = gabor_bank();
  for (size_t fi = 0; fi < bank.size(); ++fi) {
    auto r = oracle::naive_conv(p, bank[fi]);
    double sm = 0, se = 0;
    for (auto v : r) {
      sm += std::abs(v);
      se += std::norm(v);
    }
    sm /= r.size();
    se /= r.size();
    CHECK(f[fi * 2] == doctest::Approx(sm).epsilon(1e-6));
    CHECK(f[fi * 2 + 1] == doctest::Approx(se).epsilon(1e-6));
  }
}

// ---------------------------------------------------------------- lbp

TEST_CASE("lbp constant plane is all-ones pattern") {
  ChannelPlane p = make_plane(10, 10, 42.0);
  std::vector<double> h = lbp_feature(p);
  REQUIRE(h.size() == 59);
  int bin255 = oracle::lbp_bin_of_code(255);
  for (int i = 0; i < 59; ++i)
    CHECK(h[i] == doctest::Approx(i == bin255 ? 1.0 : 0.0));
}

TEST_CASE("lbp histogram sums to one") {
  ChannelPlane p = random_plane(17, 9, 5);
  std::vector<double> h = lbp_feature(p);
  double s = 0;
  for (double v : h) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lbp bright center 5x5 matches enumeration oracle") {
  ChannelPlane p = make_plane(5, 5, 10.0);
  p.at(2, 2) = 200.0;
  std::vector<double> h = lbp_feature(p);
  std::vector<double> o = oracle::lbp_hist(p);
  for (int i = 0; i < 59; ++i) CHECK(h[i] == doctest::Approx(o[i]).epsilon(1e-12));
}

TEST_CASE("lbp matches oracle on random patches") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    ChannelPlane p = random_plane(12, 15, seed);
    std::vector<double> h = lbp_feature(p);
    std::vector<double> o = oracle::lbp_hist(p);
    for (int i = 0; i < 59; ++i) CHECK(h[i] == doctest::Approx(o[i]).epsilon(1e-12));
  }
}

TEST_CASE("lbp translation covariance on periodic texture") {
  // Valid region 24x24 = 3x3 full periods of an 8x8 texture, so any cyclic
  // shift leaves the code multiset unchanged.
  SplitMix64 rng(77);
  double tex[8][8];
  for (auto& row : tex)
    for (double& v : row) v = rng.uniform(0.0, 255.0);
  auto tiled = [&](int dx, int dy) {
    ChannelPlane p = make_plane(26, 26);
    for (int y = 0; y < 26; ++y)
      for (int x = 0; x < 26; ++x)
        p.at(x, y) = tex[((y - 1 + dy) % 8 + 8) % 8][((x - 1 + dx) % 8 + 8) % 8];
    return p;
  };
  std::vector<double> h1 = lbp_feature(tiled(0, 0));
  std::vector<double> h2 = lbp_feature(tiled(3, 5));
  for (int i = 0; i < 59; ++i) CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-9));
}

// ---------------------------------------------------------------- lpq

TEST_CASE("lpq constant plane concentrates in one code") {
  ChannelPlane p = make_plane(9, 9, 55.0);
  std::vector<double> h = lpq_feature(p);
  REQUIRE(h.size() == 256);
  int nonzero = 0;
  for (double v : h) nonzero += v > 0;
  CHECK(nonzero == 1);
  double s = 0;
  for (double v : h) s += v;
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("lpq histogram sums to one") {
  ChannelPlane p = random_plane(13, 19, 100);
  std::vector<double> h = lpq_feature(p);
  double s = 0;
  for (double v : h) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lpq matches direct windowed dft oracle") {
  for (std::uint64_t seed : {9ull, 10ull}) {
    ChannelPlane p = random_plane(9, 9, seed);
    std::vector<double> h = lpq_feature(p);
    std::vector<double> o = oracle::lpq_hist(p);
    for (int i = 0; i < 256; ++i) CHECK(h[i] == doctest::Approx(o[i]).epsilon(1e-9));
  }
}

TEST_CASE("lpq translation covariance on periodic texture") {
  SplitMix64 rng(31);
  double tex[8][8];
  for (auto& row : tex)
    for (double& v : row) v = rng.uniform(0.0, 255.0);
  auto tiled = [&](int dx, int dy) {
    ChannelPlane p = make_plane(30, 30);
    for (int y = 0; y < 30; ++y)
      for (int x = 0; x < 30; ++x)
        p.at(x, y) = tex[((y - 3 + dy) % 8 + 8) % 8][((x - 3 + dx) % 8 + 8) % 8];
    return p;
  };
  std::vector<double> h1 = lpq_feature(tiled(0, 0));
  std::vector<double> h2 = lpq_feature(tiled(3, 5));
  for (int i = 0; i < 256; ++i) CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-9));
}

// --------------------------------------------------------- stats hist

TEST_CASE("stats constant gray patch") {
  ImageRGB img = ImageRGB::filled(6, 6, 64, 64, 64);
  std::vector<double> f = stats_hist_feature(img);
  REQUIRE(f.size() == 265);
  for (int c = 0; c < 3; ++c) {
    CHECK(f[c * 3 + 0] == doctest::Approx(64.0));
    CHECK(f[c * 3 + 1] == doctest::Approx(0.0));
    CHECK(f[c * 3 + 2] == doctest::Approx(0.0));
  }
  int nonzero = 0;
  for (int i = 9; i < 265; ++i) nonzero += f[i] > 0;
  CHECK(nonzero == 1);
}

TEST_CASE("stats two-point distribution") {
  ImageRGB img;
  img.width = 2;
  img.height = 1;
  img.data = {0, 0, 0, 200, 200, 200};
  std::vector<double> f = stats_hist_feature(img);
  for (int c = 0; c < 3; ++c) {
    CHECK(f[c * 3 + 0] == doctest::Approx(100.0));
    CHECK(f[c * 3 + 1] == doctest::Approx(100.0));
    CHECK(f[c * 3 + 2] == doctest::Approx(0.0));
  }
}

TEST_CASE("stats matches direct summation oracle") {
  SplitMix64 rng(17);
  ImageRGB img;
  img.width = 4;
  img.height = 4;
  img.data.resize(48);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  std::vector<double> f = stats_hist_feature(img);
  std::vector<double> o = oracle::stats_feature(img);
  REQUIRE(f.size() == o.size());
  for (size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(o[i]).epsilon(1e-9));
}

// ------------------------------------------------------- descriptors

TEST_CASE("selection descriptor dimensions and norm") {
  SplitMix64 rng(8);
  ImageRGB img;
  img.width = 48;
  img.height = 40;
  img.data.resize(static_cast<size_t>(48) * 40 * 3);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  ChannelSet cs = to_channel_set(img);
  Rect whole{0, 0, 48, 40};

  SelectionDescriptor dw = selection_descriptor(cs, whole, FeatureKind::Wavelet);
  CHECK(dw.values.size() == 192);  // 8 x 24
  double norm = 0;
  for (double v : dw.values) norm += v * v;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));

  SelectionDescriptor ds = selection_descriptor(cs, whole, FeatureKind::StatsHist);
  CHECK(ds.values.size() == 265);

  CHECK(selection_descriptor(cs, whole, FeatureKind::Gabor).values.size() == 480);
  CHECK(selection_descriptor(cs, whole, FeatureKind::LBP).values.size() == 472);
  CHECK(selection_descriptor(cs, whole, FeatureKind::LPQ).values.size() == 2048);
}

TEST_CASE("all-zero patch descriptor stays zero") {
  // All nine planes identically zero: the norm guard must return the zero
  // vector instead of normalizing it.
  ChannelSet cs;
  cs.width = 32;
  cs.height = 40;
  for (int c = 0; c < kNumChannels; ++c) {
    cs.planes[c].id = static_cast<Channel>(c);
    cs.planes[c].width = 32;
    cs.planes[c].height = 40;
    cs.planes[c].v.assign(32 * 40, 0.0);
  }
  SelectionDescriptor d = selection_descriptor(cs, Rect{0, 0, 32, 40}, FeatureKind::Gabor);
  double norm = 0;
  for (double v : d.values) norm += v * v;
  CHECK(norm == 0.0);
}

TEST_CASE("descriptor blocks follow the fixed channel order") {
  SplitMix64 rng(88);
  ImageRGB img;
  img.width = 40;
  img.height = 40;
  img.data.resize(40 * 40 * 3);
  for (auto& b : img.data) b = static_cast<std::uint8_t>(rng.next() & 0xff);
  ChannelSet cs = to_channel_set(img);
  Rect whole{0, 0, 40, 40};
  SelectionDescriptor d = selection_descriptor(cs, whole, FeatureKind::Wavelet);
  // Rebuild manually: per-channel features concatenated then normalized.
  std::vector<double> manual;
  for (Channel c : kSelectableChannels) {
    std::vector<double> f = wavelet_feature(extract_patch(cs.plane(c), whole));
    manual.insert(manual.end(), f.begin(), f.end());
  }
  double norm = 0;
  for (double v : manual) norm += v * v;
  for (double& v : manual) v /= std::sqrt(norm);
  REQUIRE(manual.size() == d.values.size());
  for (size_t i = 0; i < manual.size(); ++i)
    CHECK(d.values[i] == doctest::Approx(manual[i]).epsilon(1e-12));
}

TEST_CASE("descriptor region outside image fails") {
  ImageRGB img = ImageRGB::filled(20, 40, 5, 5, 5);
  ChannelSet cs = to_channel_set(img);
  CHECK_THROWS_AS(selection_descriptor(cs, Rect{25, 0, 10, 40}, FeatureKind::Wavelet), Error);
}
