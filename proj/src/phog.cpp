#include "ctrec/phog.hpp"

#include <algorithm>
#include <cmath>

namespace ctrec {

BaselinePoly fit_baseline(const std::vector<std::pair<double, double>>& points) {
  // Direct normal equations for degree 2.
  int distinct = 0;
  {
    std::vector<double> xs;
    for (auto& p : points) xs.push_back(p.first);
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i < xs.size(); ++i)
      if (i == 0 || xs[i] != xs[i - 1]) ++distinct;
  }
  if (points.size() < 3 || distinct < 3)
    fail(Err::RankDeficient, "baseline fit needs 3 points with distinct x");

  double s[5] = {0, 0, 0, 0, 0};  // sums of x^0..x^4
  double t[3] = {0, 0, 0};        // sums of y x^0..x^2
  for (auto& p : points) {
    double x = p.first, y = p.second;
    double xp = 1.0;
    for (int k = 0; k <= 4; ++k) {
      s[k] += xp;
      if (k <= 2) t[k] += y * xp;
      xp *= x;
    }
  }
  double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-12) fail(Err::RankDeficient, "singular normal equations");
    if (piv != col)
      for (int k = 0; k < 4; ++k) std::swap(a[piv][k], a[col][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double m = a[r][col] / a[col][col];
      for (int k = col; k < 4; ++k) a[r][k] -= m * a[col][k];
    }
  }
  BaselinePoly poly;
  for (int k = 0; k < 3; ++k) poly.coeff[k] = a[k][3] / a[k][k];
  return poly;
}

namespace {

// Sobel with edge-replicated sampling.
void sobel_at(const ChannelPlane& p, int x, int y, double* gx, double* gy) {
  auto v = [&](int ix, int iy) {
    ix = std::clamp(ix, 0, p.width - 1);
    iy = std::clamp(iy, 0, p.height - 1);
    return p.at(ix, iy);
  };
  *gx = (v(x + 1, y - 1) + 2.0 * v(x + 1, y) + v(x + 1, y + 1)) -
        (v(x - 1, y - 1) + 2.0 * v(x - 1, y) + v(x - 1, y + 1));
  *gy = (v(x - 1, y + 1) + 2.0 * v(x, y + 1) + v(x + 1, y + 1)) -
        (v(x - 1, y - 1) + 2.0 * v(x, y - 1) + v(x + 1, y - 1));
}

}  // namespace

std::vector<std::pair<double, double>> baseline_points(const ChannelPlane& plane) {
  std::vector<double> mags(static_cast<size_t>(plane.width) * plane.height);
  for (int y = 0; y < plane.height; ++y)
    for (int x = 0; x < plane.width; ++x) {
      double gx, gy;
      sobel_at(plane, x, y, &gx, &gy);
      mags[static_cast<size_t>(y) * plane.width + x] = std::hypot(gx, gy);
    }
  std::vector<double> sorted(mags);
  std::sort(sorted.begin(), sorted.end());
  double thresh = sorted[static_cast<size_t>(sorted.size() * 0.8)];
  if (thresh <= 0.0) return {};
  std::vector<std::pair<double, double>> pts;
  for (int x = 0; x < plane.width; ++x) {
    double wsum = 0.0, ysum = 0.0;
    for (int y = 0; y < plane.height; ++y) {
      double m = mags[static_cast<size_t>(y) * plane.width + x];
      if (m >= thresh) {
        wsum += m;
        ysum += m * y;
      }
    }
    if (wsum > 0.0) pts.emplace_back(x, ysum / wsum);
  }
  return pts;
}

std::vector<Rect> sliding_windows(int img_w, int img_h, const WindowSpec& spec,
                                  const BaselinePoly* baseline) {
  int count = img_w >= spec.width ? (img_w - spec.width) / spec.stride + 1 : 1;
  std::vector<Rect> rects;
  rects.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rect r;
    r.x = i * spec.stride;
    r.w = spec.width;
    r.h = spec.height;
    r.y = 0;
    if (baseline) {
      double cy = baseline->eval(r.x + spec.width / 2.0);
      r.y = static_cast<int>(std::lround(cy - spec.height / 2.0));
    }
    r.y = std::clamp(r.y, 0, std::max(0, img_h - spec.height));
    rects.push_back(r);
  }
  return rects;
}

std::vector<double> phog_descriptor(const ChannelPlane& window) {
  const int w = window.width, h = window.height;
  std::vector<double> desc(kPhogDim, 0.0);
  double total = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx, gy;
      sobel_at(window, x, y, &gx, &gy);
      double mag = std::hypot(gx, gy);
      if (mag <= 0.0) continue;
      double ang = std::atan2(gy, gx) * (180.0 / M_PI);
      if (ang < 0.0) ang += 360.0;
      int bin = static_cast<int>(ang / 45.0) & 7;
      total += mag;
      // level 0
      desc[bin] += mag;
      // level 1: 2x2 cells
      int cx1 = x * 2 / w, cy1 = y * 2 / h;
      desc[8 + (cy1 * 2 + cx1) * 8 + bin] += mag;
      // level 2: 4x4 cells
      int cx2 = x * 4 / w, cy2 = y * 4 / h;
      desc[8 + 32 + (cy2 * 4 + cx2) * 8 + bin] += mag;
    }
  }
  if (total < 1e-8) return std::vector<double>(kPhogDim, 0.0);
  double ss = 0.0;
  for (double v : desc) ss += v * v;
  double inv = 1.0 / std::sqrt(ss);
  for (double& v : desc) v *= inv;
  return desc;
}

ObservationSequence extract_sequence(const ChannelSet& channels, SelectionMode mode, Channel fixed,
                                     const SelectorModel* selector, const BaselinePoly* baseline,
                                     const WindowSpec& spec) {
  std::vector<Rect> rects = sliding_windows(channels.width, channels.height, spec, baseline);
  const int t = static_cast<int>(rects.size());

  ObservationSequence seq;
  seq.vectors.resize(t);
  seq.chosen_channel.resize(t);
  seq.window_rects = rects;

  Channel image_choice = fixed;
  if (mode == SelectionMode::PerImage) {
    if (!selector) fail(Err::DimensionMismatch, "per-image selection needs a selector model");
    Rect whole{0, 0, channels.width, channels.height};
    image_choice = select_channel(*selector, selection_descriptor(channels, whole, selector->kind));
  }
  if (mode == SelectionMode::PerWindow && !selector)
    fail(Err::DimensionMismatch, "per-window selection needs a selector model");

#pragma omp parallel for schedule(dynamic) if (mode == SelectionMode::PerWindow && t > 1)
  for (int i = 0; i < t; ++i) {
    const Rect& r = rects[i];
    Channel ch = image_choice;
    if (mode == SelectionMode::PerWindow) {
      Rect ctx;
      ctx.x = r.x + spec.width / 2 - kContextWidth / 2;
      ctx.w = kContextWidth;
      ctx.y = r.y;
      ctx.h = spec.height;
      ch = select_channel(*selector, selection_descriptor(channels, ctx, selector->kind));
    }
    ChannelPlane patch = extract_patch(channels.plane(ch), r);
    seq.vectors[i] = phog_descriptor(patch);
    seq.chosen_channel[i] = ch;
  }
  return seq;
}

}  // namespace ctrec
