#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ctrec/common.hpp"

namespace ctrec {

// The nine per-pixel planes of a word image. R,G,B are the source bytes;
// Y,Cb,Cr follow BT.601 full range; H,S,V follow the hexcone model with
// all three scaled to [0,255] (H fixed to 0 on gray pixels).
enum class Channel : int { R = 0, G, B, Y, Cb, Cr, H, S, V };

inline constexpr int kNumChannels = 9;

// Channels the selector may choose from, in label-vector order.
// H is excluded; it is kept only for fixed-channel evaluation.
inline constexpr std::array<Channel, 8> kSelectableChannels = {
    Channel::R, Channel::G, Channel::B, Channel::Y,
    Channel::Cr, Channel::Cb, Channel::S, Channel::V};

const char* channel_name(Channel c);
bool channel_from_name(const std::string& name, Channel* out);

struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, interleaved r,g,b

  std::uint8_t& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  std::uint8_t at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

  static ImageRGB filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

struct ChannelPlane {
  Channel id = Channel::R;
  int width = 0;
  int height = 0;
  std::vector<double> v;  // row-major, values in [0,255]

  double& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
};

struct ChannelSet {
  int width = 0;
  int height = 0;
  std::array<ChannelPlane, kNumChannels> planes;

  const ChannelPlane& plane(Channel c) const { return planes[static_cast<int>(c)]; }
};

// --- imageio.cpp ---

// Decodes PNG (8-bit gray/gray+alpha/palette/RGB/RGBA, non-interlaced)
// or binary PPM (P6, maxval 255). Grayscale replicates into r=g=b.
ImageRGB load_image(const std::string& path);

void save_png(const ImageRGB& img, const std::string& path);
void save_ppm(const ImageRGB& img, const std::string& path);

// PNG encoder into memory; fixed zlib settings so identical pixels give
// identical bytes.
std::vector<std::uint8_t> encode_png(const ImageRGB& img);
ImageRGB decode_png(const std::uint8_t* bytes, size_t len);
ImageRGB decode_ppm(const std::uint8_t* bytes, size_t len);

// --- image.cpp ---

ChannelSet to_channel_set(const ImageRGB& img);

// Per-pixel conversions, exposed for tests and the synthetic generator.
void rgb_to_ycbcr(double r, double g, double b, double* y, double* cb, double* cr);
void rgb_to_hsv(double r, double g, double b, double* h, double* s, double* v);

constexpr int kNormalizedHeight = 40;

// Bilinear resample to height target_h, width scaled to keep aspect
// (rounded, min 1). Identity when the height already matches.
ImageRGB normalize_height(const ImageRGB& img, int target_h = kNormalizedHeight);
ChannelPlane normalize_height(const ChannelPlane& plane, int target_h = kNormalizedHeight);

// Same resample without the >= 8 target guard; the degradation study
// goes through intermediate heights down to 4.
ImageRGB resize_to_height(const ImageRGB& img, int target_h);

// Extracts [r.x, r.x+r.w) x [r.y, r.y+r.h) with edge replication for
// out-of-bounds coordinates.
ChannelPlane extract_patch(const ChannelPlane& plane, const Rect& r);
ImageRGB extract_patch(const ImageRGB& img, const Rect& r);

}  // namespace ctrec
