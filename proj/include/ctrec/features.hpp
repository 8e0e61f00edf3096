#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ctrec/image.hpp"

namespace ctrec {

enum class FeatureKind { Wavelet, Gabor, LBP, LPQ, StatsHist };

const char* feature_kind_name(FeatureKind k);
bool feature_kind_from_name(const std::string& name, FeatureKind* out);

// Per-channel feature length.
int feature_dim(FeatureKind k);
// Full selection-descriptor length (8 channel blocks, except StatsHist).
int descriptor_dim(FeatureKind k);

struct SelectionDescriptor {
  FeatureKind kind = FeatureKind::Wavelet;
  int per_channel_len = 0;
  std::vector<double> values;  // unit L2 norm, or exactly zero
};

// 3-level orthonormal Haar decomposition; mean and population std of the
// LL/LH/HL/HH bands at each level. Odd extents are edge-replicated to even
// before each level. 24 values.
std::vector<double> wavelet_feature(const ChannelPlane& patch);

// Complex Gabor filter; DC removed so constant regions give zero response.
struct GaborKernel {
  int half = 0;  // kernel spans [-half, half]^2
  double wavelength = 0.0;
  double theta = 0.0;
  std::vector<std::complex<double>> k;  // (2*half+1)^2 row-major
};

// The 30-filter bank: wavelengths {4, 4sqrt2, 8, 8sqrt2, 16} px,
// orientations 0,30,...,150 degrees, sigma = 0.56 * wavelength, aspect 0.5.
const std::vector<GaborKernel>& gabor_bank();

// Mean magnitude and mean squared magnitude of the zero-padded convolution
// with each bank filter, scale-major then orientation. 60 values.
std::vector<double> gabor_feature(const ChannelPlane& patch);

// Uniform LBP, P=8 R=1, bilinear sampling, "neighbor >= center".
// 58 uniform bins in ascending code order plus one catch-all; L1-normalized.
std::vector<double> lbp_feature(const ChannelPlane& patch);

// LPQ with a 7x7 window, the four lowest non-DC frequencies, sign-of-
// real/imag quantization, 256-bin L1-normalized histogram. No decorrelation.
std::vector<double> lpq_feature(const ChannelPlane& patch);

// Mean / std / signed-cube-root third moment per R,G,B plane, then a
// 256-bin HSV histogram with 16x4x4 quantization. 265 values.
std::vector<double> stats_hist_feature(const ImageRGB& patch);

// Feature on the region for each selectable channel (paper order
// R,G,B,Y,Cr,Cb,S,V), concatenated and L2-normalized as a whole.
// StatsHist is computed once on the RGB patch instead.
SelectionDescriptor selection_descriptor(const ChannelSet& channels, const Rect& region,
                                         FeatureKind kind);

}  // namespace ctrec
