#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ctrec/image.hpp"
#include "ctrec/selector.hpp"

namespace ctrec {

// Least-squares polynomial for the vertical text baseline, default degree 2.
struct BaselinePoly {
  std::array<double, 3> coeff{{0.0, 0.0, 0.0}};  // a0 + a1 x + a2 x^2

  double eval(double x) const { return coeff[0] + coeff[1] * x + coeff[2] * x * x; }
};

BaselinePoly fit_baseline(const std::vector<std::pair<double, double>>& points);

// Baseline sample points from a plane: per-column vertical centroid of the
// top-20%-magnitude gradient pixels.
std::vector<std::pair<double, double>> baseline_points(const ChannelPlane& plane);

struct WindowSpec {
  int height = 40;
  int width = 8;
  int stride = 4;
};

// Left-to-right strip positions; count = floor((W-width)/stride)+1 for
// W >= width, else a single right-padded window. With a baseline each
// window is centered on f(x_center), clamped into the image.
std::vector<Rect> sliding_windows(int img_w, int img_h, const WindowSpec& spec = {},
                                  const BaselinePoly* baseline = nullptr);

inline constexpr int kPhogDim = 168;

// Sobel gradients, signed orientation in [0,360) into 8 bins with
// magnitude voting, pyramid levels 0/1/2 -> (1+4+16)*8 = 168 values,
// L2-normalized (zero vector when the window has no gradient energy).
std::vector<double> phog_descriptor(const ChannelPlane& window);

enum class SelectionMode { PerWindow, PerImage, Fixed };

struct ObservationSequence {
  std::vector<std::vector<double>> vectors;  // one 168-dim vector per window
  std::vector<Channel> chosen_channel;
  std::vector<Rect> window_rects;

  int length() const { return static_cast<int>(vectors.size()); }
};

// Full per-word feature extraction. PerWindow selects a channel per
// window from a 32-px-wide context patch, PerImage selects once on the
// whole image, Fixed bypasses the selector entirely.
ObservationSequence extract_sequence(const ChannelSet& channels, SelectionMode mode,
                                     Channel fixed = Channel::Y,
                                     const SelectorModel* selector = nullptr,
                                     const BaselinePoly* baseline = nullptr,
                                     const WindowSpec& spec = {});

inline constexpr int kContextWidth = 32;

}  // namespace ctrec
