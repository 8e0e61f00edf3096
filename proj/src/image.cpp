#include "ctrec/image.hpp"

#include <algorithm>
#include <cmath>

namespace ctrec {

namespace {

const char* kChannelNames[kNumChannels] = {"R", "G", "B", "Y", "Cb", "Cr", "H", "S", "V"};

double clamp255(double x) { return x < 0.0 ? 0.0 : (x > 255.0 ? 255.0 : x); }

}  // namespace

const char* channel_name(Channel c) { return kChannelNames[static_cast<int>(c)]; }

bool channel_from_name(const std::string& name, Channel* out) {
  for (int i = 0; i < kNumChannels; ++i) {
    if (name == kChannelNames[i]) {
      *out = static_cast<Channel>(i);
      return true;
    }
  }
  return false;
}

ImageRGB ImageRGB::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageRGB img;
  img.width = w;
  img.height = h;
  img.data.resize(static_cast<size_t>(w) * h * 3);
  for (size_t i = 0; i < img.data.size(); i += 3) {
    img.data[i] = r;
    img.data[i + 1] = g;
    img.data[i + 2] = b;
  }
  return img;
}

void rgb_to_ycbcr(double r, double g, double b, double* y, double* cb, double* cr) {
  *y = 0.299 * r + 0.587 * g + 0.114 * b;
  *cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
  *cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
}

void rgb_to_hsv(double r, double g, double b, double* h, double* s, double* v) {
  double mx = std::max({r, g, b});
  double mn = std::min({r, g, b});
  double d = mx - mn;
  *v = mx;
  *s = (mx <= 0.0) ? 0.0 : d / mx * 255.0;
  if (d <= 0.0) {
    *h = 0.0;  // hue undefined on gray; pinned to 0
    return;
  }
  double hue;  // in units of 60 degrees
  if (mx == r) {
    hue = std::fmod((g - b) / d, 6.0);
    if (hue < 0.0) hue += 6.0;
  } else if (mx == g) {
    hue = (b - r) / d + 2.0;
  } else {
    hue = (r - g) / d + 4.0;
  }
  *h = hue * 60.0 * (255.0 / 360.0);
}

ChannelSet to_channel_set(const ImageRGB& img) {
  ChannelSet set;
  set.width = img.width;
  set.height = img.height;
  for (int c = 0; c < kNumChannels; ++c) {
    set.planes[c].id = static_cast<Channel>(c);
    set.planes[c].width = img.width;
    set.planes[c].height = img.height;
    set.planes[c].v.resize(static_cast<size_t>(img.width) * img.height);
  }
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    double r = img.data[i * 3], g = img.data[i * 3 + 1], b = img.data[i * 3 + 2];
    double y, cb, cr, h, s, v;
    rgb_to_ycbcr(r, g, b, &y, &cb, &cr);
    rgb_to_hsv(r, g, b, &h, &s, &v);
    set.planes[0].v[i] = r;
    set.planes[1].v[i] = g;
    set.planes[2].v[i] = b;
    set.planes[3].v[i] = clamp255(y);
    set.planes[4].v[i] = clamp255(cb);
    set.planes[5].v[i] = clamp255(cr);
    set.planes[6].v[i] = clamp255(h);
    set.planes[7].v[i] = clamp255(s);
    set.planes[8].v[i] = clamp255(v);
  }
  return set;
}

namespace {

// Center-aligned bilinear sample with clamped coordinates.
template <typename GetFn>
double bilinear(GetFn get, int w, int h, double x, double y) {
  x = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
  y = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  int x1 = std::min(x0 + 1, w - 1);
  int y1 = std::min(y0 + 1, h - 1);
  double fx = x - x0, fy = y - y0;
  double a = get(x0, y0) * (1 - fx) + get(x1, y0) * fx;
  double b = get(x0, y1) * (1 - fx) + get(x1, y1) * fx;
  return a * (1 - fy) + b * fy;
}

void resized_dims(int w, int h, int target_h, int* out_w, int* out_h) {
  if (h <= 0) fail(Err::DegenerateImage, "source height is zero");
  *out_h = target_h;
  *out_w = std::max(1, static_cast<int>(std::lround(static_cast<double>(w) * target_h / h)));
}

}  // namespace

ImageRGB resize_to_height(const ImageRGB& img, int target_h) {
  if (img.height == target_h) return img;
  int nw, nh;
  resized_dims(img.width, img.height, target_h, &nw, &nh);
  ImageRGB out;
  out.width = nw;
  out.height = nh;
  out.data.resize(static_cast<size_t>(nw) * nh * 3);
  double sx = static_cast<double>(img.width) / nw;
  double sy = static_cast<double>(img.height) / nh;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double srcx = (x + 0.5) * sx - 0.5;
      double srcy = (y + 0.5) * sy - 0.5;
      for (int c = 0; c < 3; ++c) {
        double v = bilinear([&](int ix, int iy) { return static_cast<double>(img.at(ix, iy, c)); },
                            img.width, img.height, srcx, srcy);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(clamp255(v)));
      }
    }
  }
  return out;
}

ImageRGB normalize_height(const ImageRGB& img, int target_h) {
  if (target_h < 8) fail(Err::DegenerateImage, "target height below 8");
  return resize_to_height(img, target_h);
}

ChannelPlane normalize_height(const ChannelPlane& plane, int target_h) {
  if (target_h < 8) fail(Err::DegenerateImage, "target height below 8");
  if (plane.height == target_h) return plane;
  int nw, nh;
  resized_dims(plane.width, plane.height, target_h, &nw, &nh);
  ChannelPlane out;
  out.id = plane.id;
  out.width = nw;
  out.height = nh;
  out.v.resize(static_cast<size_t>(nw) * nh);
  double sx = static_cast<double>(plane.width) / nw;
  double sy = static_cast<double>(plane.height) / nh;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double srcx = (x + 0.5) * sx - 0.5;
      double srcy = (y + 0.5) * sy - 0.5;
      out.at(x, y) = clamp255(bilinear([&](int ix, int iy) { return plane.at(ix, iy); },
                                       plane.width, plane.height, srcx, srcy));
    }
  }
  return out;
}

ChannelPlane extract_patch(const ChannelPlane& plane, const Rect& r) {
  ChannelPlane out;
  out.id = plane.id;
  out.width = r.w;
  out.height = r.h;
  out.v.resize(static_cast<size_t>(r.w) * r.h);
  for (int y = 0; y < r.h; ++y) {
    int sy = std::clamp(r.y + y, 0, plane.height - 1);
    for (int x = 0; x < r.w; ++x) {
      int sx = std::clamp(r.x + x, 0, plane.width - 1);
      out.at(x, y) = plane.at(sx, sy);
    }
  }
  return out;
}

ImageRGB extract_patch(const ImageRGB& img, const Rect& r) {
  ImageRGB out;
  out.width = r.w;
  out.height = r.h;
  out.data.resize(static_cast<size_t>(r.w) * r.h * 3);
  for (int y = 0; y < r.h; ++y) {
    int sy = std::clamp(r.y + y, 0, img.height - 1);
    for (int x = 0; x < r.w; ++x) {
      int sx = std::clamp(r.x + x, 0, img.width - 1);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

}  // namespace ctrec
